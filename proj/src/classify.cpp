#include "hsp/classify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hsp {

namespace {

constexpr std::uint16_t kWellKnownGlobal = 65535;
constexpr std::uint16_t kBlackholeLocal = 666;
constexpr std::uint16_t kNoExportLocal = 65281;
constexpr std::uint16_t kNoAdvertiseLocal = 65282;
constexpr std::uint16_t kNoExportSubconfedLocal = 65283;

}  // namespace

std::string_view to_string(UseCaseHint hint) {
  switch (hint) {
    case UseCaseHint::traffic_engineering: return "traffic_engineering";
    case UseCaseHint::other_v4: return "other_v4";
    case UseCaseHint::peering_subnet: return "peering_subnet";
    case UseCaseHint::blackholing_v4: return "blackholing_v4";
    case UseCaseHint::reassignment: return "reassignment";
    case UseCaseHint::other_v6: return "other_v6";
    case UseCaseHint::blackholing_v6: return "blackholing_v6";
  }
  return "unknown";
}

UseCaseHint cidr_bucket(const Prefix& p) {
  if (!is_hyper_specific(p))
    throw std::invalid_argument("cidr_bucket: prefix is not hyper-specific");
  if (p.family == Family::v4) {
    if (p.length <= 26) return UseCaseHint::traffic_engineering;
    if (p.length <= 28) return UseCaseHint::other_v4;
    if (p.length <= 30) return UseCaseHint::peering_subnet;
    return UseCaseHint::blackholing_v4;
  }
  if (p.length <= 64) return UseCaseHint::reassignment;
  if (p.length <= 112) return UseCaseHint::other_v6;
  return UseCaseHint::blackholing_v6;
}

std::string_view to_string(CommunityLabel label) {
  switch (label) {
    case CommunityLabel::blackhole: return "blackhole";
    case CommunityLabel::no_export: return "no_export";
    case CommunityLabel::no_advertise: return "no_advertise";
    case CommunityLabel::no_export_subconfed: return "no_export_subconfed";
    case CommunityLabel::other_community: return "other_community";
  }
  return "unknown";
}

CommunityConfig load_community_config(std::istream& in) {
  CommunityConfig cfg;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string comm, label;
    if (!(ss >> comm >> label)) continue;
    auto colon = comm.find(':');
    if (colon == std::string::npos) continue;
    std::uint16_t global = 0, local = 0;
    auto g = comm.substr(0, colon);
    auto l = comm.substr(colon + 1);
    auto r1 = std::from_chars(g.data(), g.data() + g.size(), global);
    auto r2 = std::from_chars(l.data(), l.data() + l.size(), local);
    if (r1.ec != std::errc{} || r2.ec != std::errc{}) continue;
    if (label == "blackhole") cfg.extra_blackhole.insert({global, local});
  }
  return cfg;
}

std::set<CommunityLabel> classify_communities(std::span<const Community> comms,
                                              const CommunityConfig& cfg) {
  std::set<CommunityLabel> labels;
  for (const Community& c : comms) {
    if (c.global == kWellKnownGlobal && c.local == kBlackholeLocal) {
      labels.insert(CommunityLabel::blackhole);
    } else if (cfg.x666_heuristic && c.local == kBlackholeLocal) {
      labels.insert(CommunityLabel::blackhole);
    } else if (cfg.extra_blackhole.count(c)) {
      labels.insert(CommunityLabel::blackhole);
    } else if (c.global == kWellKnownGlobal && c.local == kNoExportLocal) {
      labels.insert(CommunityLabel::no_export);
    } else if (c.global == kWellKnownGlobal && c.local == kNoAdvertiseLocal) {
      labels.insert(CommunityLabel::no_advertise);
    } else if (c.global == kWellKnownGlobal &&
               c.local == kNoExportSubconfedLocal) {
      labels.insert(CommunityLabel::no_export_subconfed);
    } else {
      labels.insert(CommunityLabel::other_community);
    }
  }
  return labels;
}

bool is_any_res(const std::set<CommunityLabel>& labels) {
  return labels.count(CommunityLabel::no_export) ||
         labels.count(CommunityLabel::no_advertise);
}

bool is_any_comm(const std::set<CommunityLabel>& labels) {
  return !labels.empty();
}

std::map<std::string, ShareStats> community_share_stats(
    std::span<const CommunityShareInput> snapshots,
    std::size_t* skipped_empty) {
  std::map<std::string, std::vector<double>> shares;
  std::size_t skipped = 0;
  std::size_t used = 0;
  for (const CommunityShareInput& snap : snapshots) {
    if (snap.total_hsps == 0) {
      ++skipped;
      continue;
    }
    ++used;
    for (const auto& [label, count] : snap.label_counts)
      shares[label].push_back(static_cast<double>(count) /
                              static_cast<double>(snap.total_hsps));
  }
  if (skipped_empty) *skipped_empty = skipped;
  std::map<std::string, ShareStats> out;
  for (auto& [label, values] : shares) {
    // A label absent from a snapshot has share 0 there.
    while (values.size() < used) values.push_back(0.0);
    ShareStats stats;
    stats.snapshots = values.size();
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    std::size_t n = sorted.size();
    stats.median = n % 2 == 1 ? sorted[n / 2]
                              : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    stats.stddev = std::sqrt(var / static_cast<double>(n));
    out[label] = stats;
  }
  return out;
}

std::string_view to_string(AggregationPosition p) {
  switch (p) {
    case AggregationPosition::not_aggregated: return "not_aggregated";
    case AggregationPosition::excluded: return "excluded";
    case AggregationPosition::origin: return "origin";
    case AggregationPosition::on_path: return "on_path";
    case AggregationPosition::off_path: return "off_path";
  }
  return "unknown";
}

std::string_view to_string(AnchorAggregation p) {
  switch (p) {
    case AnchorAggregation::not_aggregated: return "not_aggregated";
    case AnchorAggregation::excluded: return "excluded";
    case AnchorAggregation::origin: return "origin";
    case AnchorAggregation::on_path: return "on_path";
    case AnchorAggregation::off_path: return "off_path";
    case AnchorAggregation::multiple: return "multiple";
  }
  return "unknown";
}

AggregationPosition aggregation_position(const RouteRecord& rec) {
  if (!rec.aggregator) return AggregationPosition::not_aggregated;
  // ATOMIC_AGGREGATE and AS_SETs signal path-based aggregation.
  if (rec.atomic_aggregate) return AggregationPosition::excluded;
  for (const PathSegment& seg : rec.as_path)
    if (seg.kind == PathSegment::Kind::set)
      return AggregationPosition::excluded;
  auto origin = origin_of(rec.as_path);
  if (origin && *origin == rec.aggregator->asn)
    return AggregationPosition::origin;
  for (const PathSegment& seg : rec.as_path)
    for (std::uint32_t asn : seg.asns)
      if (asn == rec.aggregator->asn) return AggregationPosition::on_path;
  // Reserved/private aggregator ASNs land here as well.
  return AggregationPosition::off_path;
}

AnchorAggregation anchor_position(
    std::span<const AggregationPosition> routes) {
  std::optional<AggregationPosition> common;
  bool saw_excluded = false;
  for (AggregationPosition p : routes) {
    if (p == AggregationPosition::excluded) {
      saw_excluded = true;
      continue;
    }
    if (p == AggregationPosition::not_aggregated) continue;
    if (!common) {
      common = p;
    } else if (*common != p) {
      return AnchorAggregation::multiple;
    }
  }
  if (!common)
    return saw_excluded ? AnchorAggregation::excluded
                        : AnchorAggregation::not_aggregated;
  switch (*common) {
    case AggregationPosition::origin: return AnchorAggregation::origin;
    case AggregationPosition::on_path: return AnchorAggregation::on_path;
    case AggregationPosition::off_path: return AnchorAggregation::off_path;
    default: return AnchorAggregation::not_aggregated;
  }
}

std::vector<ScanRecord> load_scan_csv(std::istream& in,
                                      std::uint64_t* malformed) {
  std::vector<ScanRecord> out;
  std::uint64_t bad = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.rfind("protocol,", 0) == 0) continue;
    std::istringstream ss(line);
    std::string proto, addr, probed, responded;
    if (!std::getline(ss, proto, ',') || !std::getline(ss, addr, ',') ||
        !std::getline(ss, probed, ',') || !std::getline(ss, responded)) {
      ++bad;
      continue;
    }
    auto ip = parse_ip(addr);
    if (!ip || (probed != "0" && probed != "1") ||
        (responded != "0" && responded != "1")) {
      ++bad;
      continue;
    }
    out.push_back({proto, *ip, probed == "1", responded == "1"});
  }
  if (malformed) *malformed = bad;
  return out;
}

namespace {

std::map<std::string, double> rates_from(
    const std::map<std::string, std::pair<std::uint64_t, std::uint64_t>>&
        counts) {
  std::map<std::string, double> out;
  for (const auto& [proto, pr] : counts) {
    if (pr.first == 0) continue;  // zero probed: rate undefined
    out[proto] =
        static_cast<double>(pr.second) / static_cast<double>(pr.first);
  }
  return out;
}

}  // namespace

std::map<std::string, double> hit_rate(std::span<const ScanRecord> scan,
                                       const PrefixTrie<int>& scope) {
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> counts;
  for (const ScanRecord& rec : scan) {
    if (!rec.probed) continue;
    Prefix host{rec.address.family, rec.address.bytes,
                static_cast<std::uint8_t>(max_prefix_length(rec.address.family))};
    if (scope.covering(host).empty()) continue;
    auto& pr = counts[rec.protocol];
    ++pr.first;
    if (rec.responded) ++pr.second;
  }
  return rates_from(counts);
}

std::map<std::string, double> hit_rate_all(std::span<const ScanRecord> scan) {
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> counts;
  for (const ScanRecord& rec : scan) {
    if (!rec.probed) continue;
    auto& pr = counts[rec.protocol];
    ++pr.first;
    if (rec.responded) ++pr.second;
  }
  return rates_from(counts);
}

double relative_hit_rate_diff(double rate_scope, double rate_baseline) {
  if (rate_baseline <= 0.0)
    throw std::invalid_argument("relative_hit_rate_diff: zero baseline");
  return 100.0 * (rate_scope - rate_baseline) / rate_baseline;
}

}  // namespace hsp
