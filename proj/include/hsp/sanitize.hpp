#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsp/prefix.hpp"
#include "hsp/prefix_trie.hpp"
#include "hsp/route_record.hpp"
#include "hsp/time_util.hpp"

namespace hsp {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FilterKind : std::uint8_t {
  private_origin_asn,
  private_or_reserved_prefix,
  class_d_e,
  abnormal_length,
  no_origin,
  feeder_internal,
  noisy_origin,
  noisy_peer,
  unallocated_resource,
};

std::string_view to_string(FilterKind kind);
std::optional<FilterKind> filter_kind_from_string(std::string_view name);

struct AsnRange {
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;

  bool contains(std::uint32_t asn) const { return asn >= lo && asn <= hi; }
};

/// One timeframe-scoped isolation rule; empty timeframes = entire period.
struct FilterRule {
  FilterKind kind = FilterKind::no_origin;
  std::string id;
  std::optional<Family> family;  // noisy rules are per address family
  std::vector<AsnRange> asn_ranges;
  std::vector<Prefix> prefixes;
  std::vector<TimeSpanUs> timeframes;

  bool active_at(TimeUs t) const;
};

struct FilterOutcome {
  bool kept = true;
  std::optional<FilterKind> reason;
  std::string rule_id;  // empty when kept
};

/// Allocation data from RIR delegation files; used by the optional
/// unallocated-resource rule.
struct AllocationIndex {
  PrefixTrie<int> allocated_prefixes;
  std::vector<AsnRange> allocated_asns;

  bool covers_prefix(const Prefix& p) const;
  bool covers_asn(std::uint32_t asn) const;
};

// Extended delegation format: registry|cc|type|start|value|date|status.
AllocationIndex load_delegation_file(std::istream& in);

struct FilterPipelineOptions {
  bool v6_bogons = true;           // v6 extension of the "private IPs" rule
  bool check_allocation = false;   // off unless a delegation file is loaded
};

/// Ordered first-match-wins rule evaluation; pure and concurrent-safe after
/// construction.
class FilterPipeline {
 public:
  FilterPipeline(std::vector<FilterRule> rules,
                 FilterPipelineOptions options = {},
                 const AllocationIndex* allocations = nullptr);

  FilterOutcome apply(const RouteRecord& rec, std::uint32_t feeder_asn) const;

  const std::vector<FilterRule>& rules() const { return rules_; }

 private:
  bool matches(const FilterRule& rule, const RouteRecord& rec,
               std::uint32_t feeder_asn) const;

  std::vector<FilterRule> rules_;
  FilterPipelineOptions options_;
  const AllocationIndex* allocations_;
  PrefixTrie<int> bogons_;
};

/// The base rule rows applied to the entire period, in table order.
std::vector<FilterRule> base_rules(const FilterPipelineOptions& options = {});

/// Timeframe-scoped noisy origin/peer rules matching the bundled default
/// config (see data/default_noise_rules.csv).
std::vector<FilterRule> default_noise_rules();

/// The bundled config content as text, byte-identical to the shipped file.
std::string_view default_noise_rules_text();

// CSV columns: kind,family,asn,start,end (dates; empty = entire period).
std::vector<FilterRule> load_noise_rules(std::istream& in);

/// Full default pipeline: base rules followed by the noisy-AS rules.
std::vector<FilterRule> default_rules(const FilterPipelineOptions& options = {});

struct NoisyOriginFlag {
  std::uint32_t origin = 0;
  std::size_t snapshot_index = 0;
};

/// Origins whose per-snapshot HSP count is >= factor x the median of their
/// counts in the other snapshots.
std::vector<NoisyOriginFlag> detect_noisy_origins(
    const std::map<std::uint32_t, std::vector<std::uint64_t>>& counts,
    double factor = 100.0);

}  // namespace hsp
