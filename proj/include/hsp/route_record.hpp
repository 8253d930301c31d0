#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsp/prefix.hpp"

namespace hsp {

/// Microseconds since the Unix epoch.
using TimeUs = std::int64_t;

constexpr TimeUs kUsPerSec = 1'000'000;

struct PathSegment {
  enum class Kind : std::uint8_t { sequence, set };

  Kind kind = Kind::sequence;
  std::vector<std::uint32_t> asns;

  auto operator<=>(const PathSegment&) const = default;
};

struct Community {
  std::uint16_t global = 0;
  std::uint16_t local = 0;

  auto operator<=>(const Community&) const = default;
};

struct Aggregator {
  std::uint32_t asn = 0;
  IpAddress address;

  auto operator<=>(const Aggregator&) const = default;
};

enum class RecordKind : std::uint8_t { announcement, withdrawal, rib_entry };

/// One normalized announcement/withdrawal/RIB entry.
struct RouteRecord {
  TimeUs time_us = 0;
  std::string collector;
  std::uint32_t peer_asn = 0;
  IpAddress peer_address;
  Prefix prefix;
  RecordKind kind = RecordKind::announcement;
  std::vector<PathSegment> as_path;
  std::vector<Community> communities;
  std::optional<Aggregator> aggregator;
  bool atomic_aggregate = false;
  std::optional<std::uint32_t> origin_asn;
  // Wire-declared CIDR length when it exceeded the family maximum; the
  // prefix field is then truncated to the maximum. Sanitize counts these.
  std::optional<std::uint16_t> abnormal_length;

  bool operator==(const RouteRecord&) const = default;
};

/// Last ASN of the final segment if it is a plain sequence.
std::optional<std::uint32_t> origin_of(std::span<const PathSegment> path);

/// Distinct consecutive hops after collapsing prepending; an AS set is one hop.
int hops_of(std::span<const PathSegment> path);

}  // namespace hsp
