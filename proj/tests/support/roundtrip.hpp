#pragma once

// Random record generation + reference encoding shared by the decoder
// round-trip unit test and the acceptance suite.

#include <random>
#include <string>
#include <vector>

#include "hsp/route_record.hpp"
#include "support/mrt_encoder.hpp"

namespace testenc {

inline hsp::IpAddress random_peer_address(std::mt19937& rng, bool v6) {
  hsp::IpAddress a;
  a.family = v6 ? hsp::Family::v6 : hsp::Family::v4;
  if (v6) {
    a.bytes[0] = 0x20;
    a.bytes[1] = 0x01;
    for (int i = 2; i < 16; ++i)
      a.bytes[static_cast<std::size_t>(i)] =
          static_cast<std::uint8_t>(rng() & 0xFF);
  } else {
    a.bytes[0] = static_cast<std::uint8_t>(1 + rng() % 223);
    for (int i = 1; i < 4; ++i)
      a.bytes[static_cast<std::size_t>(i)] =
          static_cast<std::uint8_t>(rng() & 0xFF);
  }
  return a;
}

inline hsp::Prefix random_route_prefix(std::mt19937& rng, bool v6) {
  hsp::AddrBytes bytes{};
  int nbytes = v6 ? 16 : 4;
  for (int i = 0; i < nbytes; ++i)
    bytes[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(rng() & 0xFF);
  bytes[0] = v6 ? 0x26 : static_cast<std::uint8_t>(1 + bytes[0] % 223);
  int len = v6 ? static_cast<int>(32 + rng() % 97)
               : static_cast<int>(8 + rng() % 25);
  return *hsp::make_canonical(v6 ? hsp::Family::v6 : hsp::Family::v4, bytes,
                              len);
}

inline std::vector<hsp::PathSegment> random_path(std::mt19937& rng, bool wide) {
  std::vector<hsp::PathSegment> path;
  int segments = 1 + static_cast<int>(rng() % 2);
  for (int s = 0; s < segments; ++s) {
    hsp::PathSegment seg;
    bool is_set = s > 0 && rng() % 4 == 0;
    seg.kind = is_set ? hsp::PathSegment::Kind::set
                      : hsp::PathSegment::Kind::sequence;
    int n = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i)
      seg.asns.push_back(wide ? 65536 + rng() % 1000000
                              : 1 + rng() % 64000);
    path.push_back(std::move(seg));
  }
  return path;
}

inline std::vector<hsp::RouteRecord> random_records(
    std::mt19937& rng, int n, const std::string& collector) {
  std::vector<hsp::RouteRecord> records;
  std::vector<std::pair<std::uint32_t, hsp::IpAddress>> peers;
  for (int i = 0; i < 8; ++i) {
    bool wide = rng() % 3 == 0;
    peers.emplace_back(wide ? 70000 + rng() % 100000 : 1 + rng() % 64000,
                       random_peer_address(rng, rng() % 2 == 0));
  }
  hsp::TimeUs base = 1577836800ll * hsp::kUsPerSec;  // 2020-01-01
  for (int i = 0; i < n; ++i) {
    hsp::RouteRecord rec;
    rec.collector = collector;
    const auto& [peer_asn, peer_addr] = peers[rng() % peers.size()];
    rec.peer_asn = peer_asn;
    rec.peer_address = peer_addr;
    bool v6 = rng() % 3 == 0;
    rec.prefix = random_route_prefix(rng, v6);
    int kind = static_cast<int>(rng() % 4);
    if (kind == 0) {
      rec.kind = hsp::RecordKind::rib_entry;
      rec.time_us = base + static_cast<hsp::TimeUs>(rng() % 86400) *
                               hsp::kUsPerSec;
    } else if (kind == 1) {
      rec.kind = hsp::RecordKind::withdrawal;
      rec.time_us = base + static_cast<hsp::TimeUs>(rng() % 86400) *
                               hsp::kUsPerSec +
                    rng() % hsp::kUsPerSec;
    } else {
      rec.kind = hsp::RecordKind::announcement;
      rec.time_us = base + static_cast<hsp::TimeUs>(rng() % 86400) *
                               hsp::kUsPerSec +
                    rng() % hsp::kUsPerSec;
    }
    if (rec.kind != hsp::RecordKind::withdrawal) {
      rec.as_path = random_path(rng, rng() % 4 == 0);
      int ncomm = static_cast<int>(rng() % 3);
      for (int c = 0; c < ncomm; ++c)
        rec.communities.push_back(
            {static_cast<std::uint16_t>(rng() % 65536),
             static_cast<std::uint16_t>(rng() % 65536)});
      if (rng() % 4 == 0) {
        hsp::Aggregator agg;
        agg.asn = 1 + rng() % 64000;
        agg.address = random_peer_address(rng, false);
        rec.aggregator = agg;
        rec.atomic_aggregate = rng() % 2 == 0;
      }
      rec.origin_asn = hsp::origin_of(rec.as_path);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

inline bool needs_as4(const hsp::RouteRecord& rec) {
  if (rec.peer_asn > 65535) return true;
  if (rec.aggregator && rec.aggregator->asn > 65535) return true;
  for (const auto& seg : rec.as_path)
    for (auto asn : seg.asns)
      if (asn > 65535) return true;
  return false;
}

// Encodes records in order; TABLE_DUMP_V2 peer index table is emitted first
// when any RIB entries are present.
inline std::string encode_records(const std::vector<hsp::RouteRecord>& records,
                                  std::mt19937& rng) {
  ByteWriter out;
  PeerTable table;
  hsp::TimeUs first_rib_ts = 0;
  for (const auto& rec : records) {
    if (rec.kind == hsp::RecordKind::rib_entry) {
      if (table.peers.empty()) first_rib_ts = rec.time_us;
      table.index_of(rec.peer_asn, rec.peer_address);
    }
  }
  if (!table.peers.empty())
    encode_peer_index_table(
        out, static_cast<std::uint32_t>(first_rib_ts / hsp::kUsPerSec), table);
  std::uint32_t seq = 0;
  for (const auto& rec : records) {
    if (rec.kind == hsp::RecordKind::rib_entry) {
      encode_rib_entry(out, rec,
                       table.index_of(rec.peer_asn, rec.peer_address), seq++);
      continue;
    }
    UpdateSpec spec;
    spec.peer_asn = rec.peer_asn;
    spec.peer_address = rec.peer_address;
    spec.time_us = rec.time_us;
    spec.as4 = needs_as4(rec) || rng() % 2 == 0;
    bool v6 = rec.prefix.family == hsp::Family::v6;
    if (rec.kind == hsp::RecordKind::withdrawal) {
      if (v6)
        spec.mp_withdrawn.push_back(rec.prefix);
      else
        spec.withdrawn.push_back(rec.prefix);
    } else {
      if (v6)
        spec.mp_announced.push_back(rec.prefix);
      else
        spec.announced.push_back(rec.prefix);
      spec.attr_template = rec;
    }
    encode_update(out, spec);
  }
  return out.str();
}

}  // namespace testenc
