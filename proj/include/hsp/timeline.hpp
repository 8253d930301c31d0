#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "hsp/prefix.hpp"
#include "hsp/route_record.hpp"
#include "hsp/time_util.hpp"

namespace hsp {

struct ObservationWindow {
  TimeUs start = 0;
  TimeUs end = 0;

  TimeUs length() const { return end - start; }
};

/// Collector tables are keyed by session, not by AS.
struct FeederSession {
  std::uint32_t asn = 0;
  IpAddress address;

  auto operator<=>(const FeederSession&) const = default;
};

/// Maximal span during which (prefix, session) was installed.
struct PresenceInterval {
  Prefix prefix;
  FeederSession feeder;
  TimeUs start = 0;
  TimeUs end = 0;
  bool uncertain = false;  // spans a data gap

  auto operator<=>(const PresenceInterval&) const = default;
};

struct ReplayStats {
  std::uint64_t updates_before_window = 0;  // rejected
  std::uint64_t updates_after_window = 0;
  std::uint64_t withdrawals_of_absent = 0;
  std::uint64_t reannouncements = 0;  // presence no-ops
};

/// Replay RIB seeds plus time-ordered updates into presence intervals.
/// RIB entries in `updates` act as re-seed announcements (gap recovery).
std::vector<PresenceInterval> replay(std::span<const RouteRecord> ribs,
                                     std::span<const RouteRecord> updates,
                                     const ObservationWindow& window,
                                     ReplayStats* stats = nullptr,
                                     std::span<const TimeSpanUs> gaps = {});

/// Distinct feeder ASes (not sessions) with at least one interval for prefix.
int visibility(const Prefix& prefix,
               std::span<const PresenceInterval> intervals);

/// Fraction of the window covered by the union of the prefix's intervals.
double consistency(const Prefix& prefix,
                   std::span<const PresenceInterval> intervals,
                   const ObservationWindow& window);

struct WindowConsistencyResult {
  std::vector<double> fractions;  // one per evaluated position n, in order
  std::size_t skipped_empty = 0;  // positions with an empty target-day set
  double mean = 0.0;
  double q1 = 0.0;  // interquartile range bounds across positions
  double q3 = 0.0;
};

/// For each n: |S(n+w+1) intersect union S(n..n+w)| / |S(n+w+1)|.
WindowConsistencyResult window_consistency(
    const std::vector<std::set<Prefix>>& daily_sets, int w);

struct PrefixStat {
  Prefix prefix;
  int visibility = 0;
  double consistency = 0.0;
};

struct HeatmapGrid {
  int group_size = 10;   // feeder ASes per visibility group
  int cell_days = 14;    // days of seen-time per consistency cell
  // counts[group-1][cell-1], both 1-based in exports
  std::vector<std::vector<std::uint64_t>> counts;

  std::uint64_t total() const;
};

HeatmapGrid heatmap_bins(std::span<const PrefixStat> stats, int window_days,
                         int group_size = 10, int cell_days = 14);

/// Per-prefix visibility/consistency over a replayed interval set.
std::vector<PrefixStat> prefix_stats(std::span<const PresenceInterval> intervals,
                                     const ObservationWindow& window);

}  // namespace hsp
