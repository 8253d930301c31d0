#pragma once

// Reference MRT encoder used to produce decoder fixtures. Written directly
// from the wire-format documents, independent of the library decoder.

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hsp/route_record.hpp"

namespace testenc {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { data_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v >> 8));
    u8(static_cast<std::uint8_t>(v));
  }
  void u32(std::uint32_t v) {
    u16(static_cast<std::uint16_t>(v >> 16));
    u16(static_cast<std::uint16_t>(v));
  }
  void raw(const void* p, std::size_t n) {
    data_.append(static_cast<const char*>(p), n);
  }
  void append(const ByteWriter& other) { data_ += other.data_; }
  const std::string& str() const { return data_; }
  std::size_t size() const { return data_.size(); }

 private:
  std::string data_;
};

inline void write_address(ByteWriter& w, const hsp::IpAddress& a) {
  w.raw(a.bytes.data(), a.family == hsp::Family::v4 ? 4 : 16);
}

inline void write_nlri(ByteWriter& w, const hsp::Prefix& p) {
  w.u8(p.length);
  w.raw(p.bits.data(), (p.length + 7) / 8);
}

inline void mrt_header(ByteWriter& out, std::uint32_t ts, std::uint16_t type,
                       std::uint16_t subtype, const ByteWriter& body) {
  out.u32(ts);
  out.u16(type);
  out.u16(subtype);
  out.u32(static_cast<std::uint32_t>(body.size()));
  out.append(body);
}

// ---- BGP attribute encoding ------------------------------------------------

inline void write_attr(ByteWriter& w, std::uint8_t flags, std::uint8_t type,
                       const ByteWriter& body) {
  if (body.size() > 255) flags |= 0x10;
  w.u8(flags);
  w.u8(type);
  if (flags & 0x10)
    w.u16(static_cast<std::uint16_t>(body.size()));
  else
    w.u8(static_cast<std::uint8_t>(body.size()));
  w.append(body);
}

inline ByteWriter encode_as_path(const std::vector<hsp::PathSegment>& path,
                                 int as_size) {
  ByteWriter w;
  for (const auto& seg : path) {
    w.u8(seg.kind == hsp::PathSegment::Kind::set ? 1 : 2);
    w.u8(static_cast<std::uint8_t>(seg.asns.size()));
    for (std::uint32_t asn : seg.asns) {
      if (as_size == 4)
        w.u32(asn);
      else
        w.u16(static_cast<std::uint16_t>(asn));
    }
  }
  return w;
}

// Attributes for one announcement/RIB record; `as_size` selects the plain
// AS_PATH/AGGREGATOR encoding width.
inline ByteWriter encode_attrs(const hsp::RouteRecord& rec, int as_size,
                               const ByteWriter* mp_reach = nullptr) {
  ByteWriter attrs;
  {
    ByteWriter origin;
    origin.u8(0);  // IGP
    write_attr(attrs, 0x40, 1, origin);
  }
  if (!rec.as_path.empty())
    write_attr(attrs, 0x40, 2, encode_as_path(rec.as_path, as_size));
  if (mp_reach) write_attr(attrs, 0x80, 14, *mp_reach);
  if (rec.atomic_aggregate) write_attr(attrs, 0x40, 6, ByteWriter{});
  if (rec.aggregator) {
    ByteWriter agg;
    if (as_size == 4)
      agg.u32(rec.aggregator->asn);
    else
      agg.u16(static_cast<std::uint16_t>(rec.aggregator->asn));
    write_address(agg, rec.aggregator->address);
    write_attr(attrs, 0xC0, 7, agg);
  }
  if (!rec.communities.empty()) {
    ByteWriter comm;
    for (const auto& c : rec.communities) {
      comm.u16(c.global);
      comm.u16(c.local);
    }
    write_attr(attrs, 0xC0, 8, comm);
  }
  return attrs;
}

// ---- TABLE_DUMP_V2 ---------------------------------------------------------

struct PeerTable {
  std::vector<std::pair<std::uint32_t, hsp::IpAddress>> peers;

  std::uint16_t index_of(std::uint32_t asn, const hsp::IpAddress& addr) {
    for (std::size_t i = 0; i < peers.size(); ++i)
      if (peers[i].first == asn && peers[i].second == addr)
        return static_cast<std::uint16_t>(i);
    peers.emplace_back(asn, addr);
    return static_cast<std::uint16_t>(peers.size() - 1);
  }
};

inline void encode_peer_index_table(ByteWriter& out, std::uint32_t ts,
                                    const PeerTable& table) {
  ByteWriter body;
  body.u32(0x0A000001);  // collector BGP id
  const char view[] = "ref-encoder";
  body.u16(sizeof(view) - 1);
  body.raw(view, sizeof(view) - 1);
  body.u16(static_cast<std::uint16_t>(table.peers.size()));
  for (const auto& [asn, addr] : table.peers) {
    // always 4-byte AS, address width per family
    body.u8(addr.family == hsp::Family::v6 ? 0x03 : 0x02);
    body.u32(0x0B000001);  // peer BGP id
    write_address(body, addr);
    body.u32(asn);
  }
  mrt_header(out, ts, 13, 1, body);
}

inline void encode_rib_entry(ByteWriter& out, const hsp::RouteRecord& rec,
                             std::uint16_t peer_index, std::uint32_t seq) {
  ByteWriter body;
  body.u32(seq);
  write_nlri(body, rec.prefix);
  body.u16(1);  // entry count
  body.u16(peer_index);
  body.u32(static_cast<std::uint32_t>(rec.time_us / hsp::kUsPerSec));
  ByteWriter attrs = encode_attrs(rec, 4);
  body.u16(static_cast<std::uint16_t>(attrs.size()));
  body.append(attrs);
  std::uint16_t subtype = rec.prefix.family == hsp::Family::v4 ? 2 : 4;
  mrt_header(out, static_cast<std::uint32_t>(rec.time_us / hsp::kUsPerSec), 13,
             subtype, body);
}

// ---- BGP4MP updates --------------------------------------------------------

struct UpdateSpec {
  std::uint32_t peer_asn = 0;
  hsp::IpAddress peer_address;
  hsp::TimeUs time_us = 0;
  bool as4 = true;
  std::vector<hsp::Prefix> withdrawn;  // v4 withdrawn routes field
  std::vector<hsp::Prefix> announced;  // v4 NLRI field
  std::vector<hsp::Prefix> mp_announced;  // v6 via MP_REACH_NLRI
  std::vector<hsp::Prefix> mp_withdrawn;  // v6 via MP_UNREACH_NLRI
  hsp::RouteRecord attr_template;  // path attributes for announcements
};

inline void encode_update(ByteWriter& out, const UpdateSpec& spec) {
  ByteWriter bgp;
  for (int i = 0; i < 16; ++i) bgp.u8(0xFF);  // marker
  ByteWriter upd;
  {
    ByteWriter withdrawn;
    for (const auto& p : spec.withdrawn) write_nlri(withdrawn, p);
    upd.u16(static_cast<std::uint16_t>(withdrawn.size()));
    upd.append(withdrawn);

    ByteWriter mp_reach;
    bool has_attrs = !spec.announced.empty() || !spec.mp_announced.empty();
    ByteWriter attrs;
    if (!spec.mp_announced.empty()) {
      mp_reach.u16(2);  // AFI IPv6
      mp_reach.u8(1);   // SAFI unicast
      mp_reach.u8(16);  // next hop length
      for (int i = 0; i < 16; ++i) mp_reach.u8(0x20);
      mp_reach.u8(0);  // reserved
      for (const auto& p : spec.mp_announced) write_nlri(mp_reach, p);
    }
    if (has_attrs)
      attrs = encode_attrs(spec.attr_template, spec.as4 ? 4 : 2,
                           spec.mp_announced.empty() ? nullptr : &mp_reach);
    if (!spec.mp_withdrawn.empty()) {
      ByteWriter mp_unreach;
      mp_unreach.u16(2);
      mp_unreach.u8(1);
      for (const auto& p : spec.mp_withdrawn) write_nlri(mp_unreach, p);
      write_attr(attrs, 0x80, 15, mp_unreach);
    }
    upd.u16(static_cast<std::uint16_t>(attrs.size()));
    upd.append(attrs);
    for (const auto& p : spec.announced) write_nlri(upd, p);
  }
  bgp.u16(static_cast<std::uint16_t>(19 + upd.size()));
  bgp.u8(2);  // UPDATE
  bgp.append(upd);

  ByteWriter body;
  std::uint32_t usec = static_cast<std::uint32_t>(spec.time_us % hsp::kUsPerSec);
  bool et = usec != 0;
  if (et) body.u32(usec);
  if (spec.as4)
    body.u32(spec.peer_asn);
  else
    body.u16(static_cast<std::uint16_t>(spec.peer_asn));
  if (spec.as4)
    body.u32(64999);  // local AS
  else
    body.u16(64999);
  body.u16(7);  // interface index
  body.u16(spec.peer_address.family == hsp::Family::v4 ? 1 : 2);
  write_address(body, spec.peer_address);
  write_address(body, spec.peer_address);  // local address, same family
  body.append(bgp);
  mrt_header(out, static_cast<std::uint32_t>(spec.time_us / hsp::kUsPerSec),
             et ? 17 : 16, spec.as4 ? 4 : 1, body);
}

}  // namespace testenc
