#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hsp/prefix.hpp"
#include "hsp/prefix_trie.hpp"
#include "hsp/route_record.hpp"

namespace hsp {

enum class UseCaseHint : std::uint8_t {
  traffic_engineering,  // v4 /25-/26
  other_v4,             // v4 /27-/28
  peering_subnet,       // v4 /29-/30
  blackholing_v4,       // v4 /31-/32
  reassignment,         // v6 /49-/64
  other_v6,             // v6 /65-/112
  blackholing_v6,       // v6 /113-/128
};

std::string_view to_string(UseCaseHint hint);

/// CIDR-size use-case bucket; total over hyper-specific lengths.
UseCaseHint cidr_bucket(const Prefix& p);

enum class CommunityLabel : std::uint8_t {
  blackhole,
  no_export,
  no_advertise,
  no_export_subconfed,
  other_community,
};

std::string_view to_string(CommunityLabel label);

struct CommunityConfig {
  // "X:666 is by far the most popular blackholing community"; recognize any
  // global part with local 666 when enabled.
  bool x666_heuristic = true;
  std::set<Community> extra_blackhole;  // operator-specific values
};

// Small text table "asn:value blackhole" per line, '#' comments.
CommunityConfig load_community_config(std::istream& in);

std::set<CommunityLabel> classify_communities(std::span<const Community> comms,
                                              const CommunityConfig& cfg = {});

bool is_any_res(const std::set<CommunityLabel>& labels);   // NO_EXP or NO_ADV
bool is_any_comm(const std::set<CommunityLabel>& labels);  // any community

struct ShareStats {
  double median = 0.0;
  double stddev = 0.0;  // population standard deviation over snapshots
  std::size_t snapshots = 0;
};

struct CommunityShareInput {
  std::uint64_t total_hsps = 0;
  std::map<std::string, std::uint64_t> label_counts;  // includes Any* groups
};

/// Per-label median share and stddev across snapshots; empty snapshots are
/// skipped and counted.
std::map<std::string, ShareStats> community_share_stats(
    std::span<const CommunityShareInput> snapshots,
    std::size_t* skipped_empty = nullptr);

enum class AggregationPosition : std::uint8_t {
  not_aggregated,
  excluded,  // ATOMIC_AGGREGATE set or AS_SET present
  origin,
  on_path,
  off_path,
};

enum class AnchorAggregation : std::uint8_t {
  not_aggregated,
  excluded,
  origin,
  on_path,
  off_path,
  multiple,  // inconsistent classes across routes
};

std::string_view to_string(AggregationPosition p);
std::string_view to_string(AnchorAggregation p);

/// Where along the route the aggregation happened, judged from the
/// AGGREGATOR attribute vs. the AS path.
AggregationPosition aggregation_position(const RouteRecord& rec);

/// Anchor-level vote over per-route positions; Excluded and NotAggregated
/// routes are removed before voting.
AnchorAggregation anchor_position(std::span<const AggregationPosition> routes);

struct ScanRecord {
  std::string protocol;
  IpAddress address;
  bool probed = false;
  bool responded = false;
};

// CSV columns: protocol,address,probed,responded (0/1 flags).
std::vector<ScanRecord> load_scan_csv(std::istream& in,
                                      std::uint64_t* malformed = nullptr);

/// responded/probed per protocol, restricted to addresses covered by scope.
/// Protocols with zero probed addresses in scope are absent from the result.
std::map<std::string, double> hit_rate(std::span<const ScanRecord> scan,
                                       const PrefixTrie<int>& scope);

/// Unrestricted variant (universal scope).
std::map<std::string, double> hit_rate_all(std::span<const ScanRecord> scan);

/// 100 * (scope - baseline) / baseline; baseline must be positive.
double relative_hit_rate_diff(double rate_scope, double rate_baseline);

}  // namespace hsp
