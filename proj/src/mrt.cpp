#include "hsp/mrt.hpp"

#include <algorithm>
#include <cstring>

namespace hsp {

namespace {

// MRT types (RFC 6396)
constexpr std::uint16_t kTableDumpV2 = 13;
constexpr std::uint16_t kBgp4mp = 16;
constexpr std::uint16_t kBgp4mpEt = 17;

// TABLE_DUMP_V2 subtypes
constexpr std::uint16_t kPeerIndexTable = 1;
constexpr std::uint16_t kRibIpv4Unicast = 2;
constexpr std::uint16_t kRibIpv6Unicast = 4;

// BGP4MP subtypes
constexpr std::uint16_t kStateChange = 0;
constexpr std::uint16_t kMessage = 1;
constexpr std::uint16_t kMessageAs4 = 4;
constexpr std::uint16_t kStateChangeAs4 = 5;

// BGP path attribute type codes (RFC 4271, 4760, 6793)
constexpr std::uint8_t kAttrAsPath = 2;
constexpr std::uint8_t kAttrAtomicAggregate = 6;
constexpr std::uint8_t kAttrAggregator = 7;
constexpr std::uint8_t kAttrCommunity = 8;
constexpr std::uint8_t kAttrMpReach = 14;
constexpr std::uint8_t kAttrMpUnreach = 15;
constexpr std::uint8_t kAttrAs4Path = 17;
constexpr std::uint8_t kAttrAs4Aggregator = 18;

constexpr std::uint32_t kMaxMessageLength = 1u << 24;
constexpr std::size_t kMaxRecordedErrors = 64;

struct Truncated {};

class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> data) : data_(data) {}

  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ >= data_.size(); }

  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] << 8 | data_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = static_cast<std::uint32_t>(data_[pos_]) << 24 |
                      static_cast<std::uint32_t>(data_[pos_ + 1]) << 16 |
                      static_cast<std::uint32_t>(data_[pos_ + 2]) << 8 |
                      static_cast<std::uint32_t>(data_[pos_ + 3]);
    pos_ += 4;
    return v;
  }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  void skip(std::size_t n) { need(n), pos_ += n; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw Truncated{};
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

IpAddress read_address(Cursor& cur, Family family) {
  IpAddress a;
  a.family = family;
  auto raw = cur.bytes(family == Family::v4 ? 4 : 16);
  std::copy(raw.begin(), raw.end(), a.bytes.begin());
  return a;
}

struct WirePrefix {
  Prefix prefix;
  std::optional<std::uint16_t> abnormal_length;
  bool noncanonical = false;
};

WirePrefix read_nlri_prefix(Cursor& cur, Family family) {
  WirePrefix out;
  int wire_len = cur.u8();
  int max_len = max_prefix_length(family);
  std::size_t nbytes = (static_cast<std::size_t>(wire_len) + 7) / 8;
  auto raw = cur.bytes(nbytes);
  AddrBytes addr{};
  std::copy_n(raw.begin(), std::min<std::size_t>(nbytes, 16), addr.begin());
  int effective = std::min(wire_len, max_len);
  bool truncated = false;
  out.prefix = *make_canonical(family, addr, effective, &truncated);
  out.noncanonical = truncated;
  if (wire_len > max_len)
    out.abnormal_length = static_cast<std::uint16_t>(wire_len);
  return out;
}

std::vector<PathSegment> read_as_path(std::span<const std::uint8_t> data,
                                      int as_size) {
  Cursor cur(data);
  std::vector<PathSegment> segments;
  while (!cur.done()) {
    PathSegment seg;
    std::uint8_t type = cur.u8();
    // 1=AS_SET, 2=AS_SEQUENCE; confed segments (3/4) map to the same shapes
    seg.kind = (type == 1 || type == 4) ? PathSegment::Kind::set
                                        : PathSegment::Kind::sequence;
    std::uint8_t count = cur.u8();
    seg.asns.reserve(count);
    for (int i = 0; i < count; ++i)
      seg.asns.push_back(as_size == 4 ? cur.u32() : cur.u16());
    if (!seg.asns.empty()) segments.push_back(std::move(seg));
  }
  return segments;
}

struct ParsedAttrs {
  std::vector<PathSegment> as_path;
  std::vector<PathSegment> as4_path;
  std::vector<Community> communities;
  std::optional<Aggregator> aggregator;
  std::optional<Aggregator> as4_aggregator;
  bool atomic_aggregate = false;
  std::vector<WirePrefix> mp_announce;
  std::vector<WirePrefix> mp_withdraw;
};

Aggregator read_aggregator(Cursor& cur, int as_size) {
  Aggregator agg;
  agg.asn = as_size == 4 ? cur.u32() : cur.u16();
  agg.address = read_address(cur, Family::v4);
  return agg;
}

void read_mp_nlri(std::span<const std::uint8_t> data, bool reach,
                  ParsedAttrs& out) {
  Cursor cur(data);
  std::uint16_t afi = cur.u16();
  std::uint8_t safi = cur.u8();
  if (safi != 1) return;  // unicast only
  Family family;
  if (afi == 1)
    family = Family::v4;
  else if (afi == 2)
    family = Family::v6;
  else
    return;
  if (reach) {
    std::uint8_t nh_len = cur.u8();
    cur.skip(nh_len);
    cur.skip(1);  // reserved
  }
  auto& dst = reach ? out.mp_announce : out.mp_withdraw;
  while (!cur.done()) dst.push_back(read_nlri_prefix(cur, family));
}

// `as_size` is the encoding of plain AS_PATH/AGGREGATOR in this context:
// 4 inside TABLE_DUMP_V2 and MESSAGE_AS4, 2 in plain BGP4MP messages.
ParsedAttrs read_attributes(std::span<const std::uint8_t> data, int as_size,
                            bool in_rib_entry) {
  Cursor cur(data);
  ParsedAttrs out;
  while (!cur.done()) {
    std::uint8_t flags = cur.u8();
    std::uint8_t type = cur.u8();
    std::size_t len = (flags & 0x10) ? cur.u16() : cur.u8();
    auto body = cur.bytes(len);
    switch (type) {
      case kAttrAsPath:
        out.as_path = read_as_path(body, as_size);
        break;
      case kAttrAs4Path:
        out.as4_path = read_as_path(body, 4);
        break;
      case kAttrAtomicAggregate:
        out.atomic_aggregate = true;
        break;
      case kAttrAggregator: {
        Cursor sub(body);
        out.aggregator = read_aggregator(sub, as_size);
        break;
      }
      case kAttrAs4Aggregator: {
        Cursor sub(body);
        out.as4_aggregator = read_aggregator(sub, 4);
        break;
      }
      case kAttrCommunity: {
        Cursor sub(body);
        while (!sub.done()) {
          Community c;
          c.global = sub.u16();
          c.local = sub.u16();
          out.communities.push_back(c);
        }
        break;
      }
      case kAttrMpReach:
        // In RIB entries the prefix comes from the entry header and the
        // attribute uses an abbreviated next-hop-only encoding.
        if (!in_rib_entry) read_mp_nlri(body, /*reach=*/true, out);
        break;
      case kAttrMpUnreach:
        if (!in_rib_entry) read_mp_nlri(body, /*reach=*/false, out);
        break;
      default:
        break;  // large/extended communities etc. are carried opaquely
    }
  }
  return out;
}

// RFC 6793 transition: the 4-byte forms win when both are present.
void merge_as4(ParsedAttrs& attrs) {
  if (!attrs.as4_path.empty()) attrs.as_path = std::move(attrs.as4_path);
  if (attrs.as4_aggregator) attrs.aggregator = attrs.as4_aggregator;
}

}  // namespace

MrtReader::MrtReader(std::istream& in, std::string collector_id)
    : in_(&in), collector_(std::move(collector_id)) {}

void MrtReader::note_error(std::uint64_t offset, std::string what) {
  ++stats_.malformed;
  if (stats_.errors.size() < kMaxRecordedErrors)
    stats_.errors.push_back({offset, std::move(what)});
}

std::optional<RouteRecord> MrtReader::next() {
  while (pending_.empty()) {
    if (stream_done_ || !refill()) return std::nullopt;
  }
  RouteRecord rec = std::move(pending_.front());
  pending_.pop_front();
  ++stats_.records;
  return rec;
}

bool MrtReader::refill() {
  std::uint8_t header[12];
  in_->read(reinterpret_cast<char*>(header), sizeof(header));
  auto got = static_cast<std::size_t>(in_->gcount());
  if (got == 0) {
    stream_done_ = true;
    return false;
  }
  if (got < sizeof(header)) {
    note_error(offset_, "truncated MRT header");
    stream_done_ = true;
    return false;
  }
  std::uint32_t ts = static_cast<std::uint32_t>(header[0]) << 24 |
                     static_cast<std::uint32_t>(header[1]) << 16 |
                     static_cast<std::uint32_t>(header[2]) << 8 | header[3];
  std::uint16_t type = static_cast<std::uint16_t>(header[4] << 8 | header[5]);
  std::uint16_t subtype = static_cast<std::uint16_t>(header[6] << 8 | header[7]);
  std::uint32_t length = static_cast<std::uint32_t>(header[8]) << 24 |
                         static_cast<std::uint32_t>(header[9]) << 16 |
                         static_cast<std::uint32_t>(header[10]) << 8 | header[11];
  if (length > kMaxMessageLength) {
    note_error(offset_, "implausible MRT message length");
    stream_done_ = true;
    return false;
  }
  buf_.resize(length);
  in_->read(reinterpret_cast<char*>(buf_.data()), length);
  if (static_cast<std::uint32_t>(in_->gcount()) < length) {
    note_error(offset_, "truncated MRT message body");
    stream_done_ = true;
    return false;
  }
  std::uint64_t msg_offset = offset_;
  offset_ += 12 + length;
  ++stats_.messages;
  parse_message(ts, type, subtype, buf_, msg_offset);
  return true;
}

void MrtReader::parse_message(std::uint32_t ts, std::uint16_t type,
                              std::uint16_t subtype,
                              std::span<const std::uint8_t> body,
                              std::uint64_t offset) {
  try {
    if (type == kTableDumpV2) {
      if (subtype == kPeerIndexTable) {
        parse_peer_index_table(body);
      } else if (subtype == kRibIpv4Unicast) {
        parse_rib(ts, Family::v4, body);
      } else if (subtype == kRibIpv6Unicast) {
        parse_rib(ts, Family::v6, body);
      } else {
        ++stats_.skipped_unknown;
      }
    } else if (type == kBgp4mp || type == kBgp4mpEt) {
      TimeUs time_us = static_cast<TimeUs>(ts) * kUsPerSec;
      auto payload = body;
      if (type == kBgp4mpEt) {
        Cursor cur(body);
        std::uint32_t us = cur.u32();
        time_us += std::min<std::uint32_t>(us, kUsPerSec - 1);
        payload = body.subspan(4);
      }
      if (subtype == kMessage || subtype == kMessageAs4) {
        parse_bgp4mp(time_us, subtype == kMessageAs4, payload);
      } else if (subtype == kStateChange || subtype == kStateChangeAs4) {
        ++stats_.non_update_messages;
      } else {
        ++stats_.skipped_unknown;
      }
    } else {
      ++stats_.skipped_unknown;
    }
  } catch (const Truncated&) {
    note_error(offset, "truncated field inside MRT message");
  }
}

void MrtReader::parse_peer_index_table(std::span<const std::uint8_t> body) {
  Cursor cur(body);
  cur.u32();  // collector BGP id
  std::uint16_t name_len = cur.u16();
  cur.skip(name_len);
  std::uint16_t count = cur.u16();
  std::vector<PeerEntry> peers;
  peers.reserve(count);
  for (int i = 0; i < count; ++i) {
    std::uint8_t peer_type = cur.u8();
    cur.u32();  // peer BGP id
    PeerEntry e;
    e.address = read_address(cur, (peer_type & 0x01) ? Family::v6 : Family::v4);
    e.asn = (peer_type & 0x02) ? cur.u32() : cur.u16();
    peers.push_back(e);
  }
  peers_ = std::move(peers);
}

void MrtReader::parse_rib(std::uint32_t ts, Family family,
                          std::span<const std::uint8_t> body) {
  Cursor cur(body);
  cur.u32();  // sequence number
  WirePrefix wp = read_nlri_prefix(cur, family);
  if (wp.noncanonical) ++stats_.noncanonical_prefixes;
  if (wp.abnormal_length) ++stats_.abnormal_lengths;
  std::uint16_t entry_count = cur.u16();
  for (int i = 0; i < entry_count; ++i) {
    std::uint16_t peer_index = cur.u16();
    cur.u32();  // originated time
    std::uint16_t attr_len = cur.u16();
    auto attrs_raw = cur.bytes(attr_len);
    if (peer_index >= peers_.size()) {
      ++stats_.missing_peer_index;
      continue;
    }
    ParsedAttrs attrs = read_attributes(attrs_raw, 4, /*in_rib_entry=*/true);
    merge_as4(attrs);
    RouteRecord rec;
    rec.time_us = static_cast<TimeUs>(ts) * kUsPerSec;
    rec.collector = collector_;
    rec.peer_asn = peers_[peer_index].asn;
    rec.peer_address = peers_[peer_index].address;
    rec.prefix = wp.prefix;
    rec.abnormal_length = wp.abnormal_length;
    rec.kind = RecordKind::rib_entry;
    rec.as_path = attrs.as_path;
    rec.communities = attrs.communities;
    rec.aggregator = attrs.aggregator;
    rec.atomic_aggregate = attrs.atomic_aggregate;
    rec.origin_asn = origin_of(rec.as_path);
    pending_.push_back(std::move(rec));
  }
}

void MrtReader::parse_bgp4mp(TimeUs time_us, bool as4,
                             std::span<const std::uint8_t> body) {
  Cursor cur(body);
  std::uint32_t peer_asn = as4 ? cur.u32() : cur.u16();
  as4 ? cur.u32() : cur.u16();  // local AS
  cur.u16();                    // interface index
  std::uint16_t afi = cur.u16();
  Family header_family = afi == 2 ? Family::v6 : Family::v4;
  IpAddress peer_addr = read_address(cur, header_family);
  read_address(cur, header_family);  // local address
  // BGP message header
  cur.skip(16);  // marker
  std::uint16_t bgp_len = cur.u16();
  std::uint8_t bgp_type = cur.u8();
  if (bgp_len < 19 || bgp_len - 19u > cur.remaining()) throw Truncated{};
  auto msg = cur.bytes(bgp_len - 19u);
  if (bgp_type != 2) {  // not an UPDATE
    ++stats_.non_update_messages;
    return;
  }
  Cursor upd(msg);
  std::uint16_t withdrawn_len = upd.u16();
  auto withdrawn_raw = upd.bytes(withdrawn_len);
  std::uint16_t attrs_len = upd.u16();
  auto attrs_raw = upd.bytes(attrs_len);
  auto nlri_raw = upd.bytes(upd.remaining());

  ParsedAttrs attrs = read_attributes(attrs_raw, as4 ? 4 : 2,
                                      /*in_rib_entry=*/false);
  merge_as4(attrs);

  auto base_record = [&](RecordKind kind) {
    RouteRecord rec;
    rec.time_us = time_us;
    rec.collector = collector_;
    rec.peer_asn = peer_asn;
    rec.peer_address = peer_addr;
    rec.kind = kind;
    return rec;
  };
  auto emit = [&](const WirePrefix& wp, RecordKind kind, bool with_attrs) {
    if (wp.noncanonical) ++stats_.noncanonical_prefixes;
    if (wp.abnormal_length) ++stats_.abnormal_lengths;
    RouteRecord rec = base_record(kind);
    rec.prefix = wp.prefix;
    rec.abnormal_length = wp.abnormal_length;
    if (with_attrs) {
      rec.as_path = attrs.as_path;
      rec.communities = attrs.communities;
      rec.aggregator = attrs.aggregator;
      rec.atomic_aggregate = attrs.atomic_aggregate;
      rec.origin_asn = origin_of(rec.as_path);
    }
    pending_.push_back(std::move(rec));
  };

  Cursor wd(withdrawn_raw);
  while (!wd.done())
    emit(read_nlri_prefix(wd, Family::v4), RecordKind::withdrawal, false);
  for (const WirePrefix& wp : attrs.mp_withdraw)
    emit(wp, RecordKind::withdrawal, false);
  Cursor nlri(nlri_raw);
  while (!nlri.done())
    emit(read_nlri_prefix(nlri, Family::v4), RecordKind::announcement, true);
  for (const WirePrefix& wp : attrs.mp_announce)
    emit(wp, RecordKind::announcement, true);
}

std::vector<RouteRecord> decode_mrt(std::istream& in, DecodeStats& stats,
                                    std::string collector_id) {
  MrtReader reader(in, std::move(collector_id));
  std::vector<RouteRecord> out;
  while (auto rec = reader.next()) out.push_back(std::move(*rec));
  stats = reader.stats();
  return out;
}

}  // namespace hsp
