#pragma once

#include <cstdint>
#include <deque>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "hsp/route_record.hpp"

namespace hsp {

struct DecodeError {
  std::uint64_t offset = 0;  // byte offset of the offending MRT message
  std::string what;
};

struct DecodeStats {
  std::uint64_t messages = 0;
  std::uint64_t records = 0;
  std::uint64_t skipped_unknown = 0;   // unknown MRT type/subtype
  std::uint64_t non_update_messages = 0;  // BGP OPEN/KEEPALIVE/NOTIFICATION
  std::uint64_t malformed = 0;
  std::uint64_t noncanonical_prefixes = 0;  // host bits set on the wire
  std::uint64_t abnormal_lengths = 0;       // CIDR length beyond family max
  std::uint64_t missing_peer_index = 0;
  std::vector<DecodeError> errors;  // capped, see kMaxRecordedErrors
};

/// Streaming MRT decoder (RFC 6396): TABLE_DUMP_V2 RIB dumps and
/// BGP4MP/BGP4MP_ET update messages. Unknown types are counted and skipped;
/// arbitrary byte input never aborts the process.
class MrtReader {
 public:
  explicit MrtReader(std::istream& in, std::string collector_id = {});

  /// Next normalized record, or nullopt at end of stream.
  std::optional<RouteRecord> next();

  const DecodeStats& stats() const { return stats_; }

 private:
  struct PeerEntry {
    std::uint32_t asn = 0;
    IpAddress address;
  };

  bool refill();
  void parse_message(std::uint32_t ts, std::uint16_t type, std::uint16_t subtype,
                     std::span<const std::uint8_t> body, std::uint64_t offset);
  void parse_peer_index_table(std::span<const std::uint8_t> body);
  void parse_rib(std::uint32_t ts, Family family,
                 std::span<const std::uint8_t> body);
  void parse_bgp4mp(TimeUs time_us, bool as4,
                    std::span<const std::uint8_t> body);
  void note_error(std::uint64_t offset, std::string what);

  std::istream* in_;
  std::string collector_;
  std::deque<RouteRecord> pending_;
  std::vector<PeerEntry> peers_;
  DecodeStats stats_;
  std::uint64_t offset_ = 0;
  bool stream_done_ = false;
  std::vector<std::uint8_t> buf_;
};

/// Convenience wrapper decoding an entire stream.
std::vector<RouteRecord> decode_mrt(std::istream& in, DecodeStats& stats,
                                    std::string collector_id = {});

}  // namespace hsp
