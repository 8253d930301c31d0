#include "hsp/timeline.hpp"

#include <algorithm>
#include <cmath>

namespace hsp {

namespace {

double quantile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  double pos = q * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

// Union length of [clipped] intervals.
TimeUs union_length(std::vector<TimeSpanUs> spans) {
  std::sort(spans.begin(), spans.end());
  TimeUs total = 0;
  TimeUs cur_start = 0, cur_end = 0;
  bool open = false;
  for (const TimeSpanUs& s : spans) {
    if (s.start >= s.end) continue;
    if (!open || s.start > cur_end) {
      if (open) total += cur_end - cur_start;
      cur_start = s.start;
      cur_end = s.end;
      open = true;
    } else {
      cur_end = std::max(cur_end, s.end);
    }
  }
  if (open) total += cur_end - cur_start;
  return total;
}

}  // namespace

std::vector<PresenceInterval> replay(std::span<const RouteRecord> ribs,
                                     std::span<const RouteRecord> updates,
                                     const ObservationWindow& window,
                                     ReplayStats* stats,
                                     std::span<const TimeSpanUs> gaps) {
  ReplayStats local;
  ReplayStats& st = stats ? *stats : local;
  std::map<std::pair<FeederSession, Prefix>, TimeUs> open;
  std::vector<PresenceInterval> out;

  for (const RouteRecord& rec : ribs) {
    FeederSession feeder{rec.peer_asn, rec.peer_address};
    open.emplace(std::make_pair(feeder, rec.prefix), window.start);
  }
  for (const RouteRecord& rec : updates) {
    if (rec.time_us < window.start) {
      ++st.updates_before_window;
      continue;
    }
    if (rec.time_us >= window.end) {
      ++st.updates_after_window;
      continue;
    }
    FeederSession feeder{rec.peer_asn, rec.peer_address};
    auto key = std::make_pair(feeder, rec.prefix);
    if (rec.kind == RecordKind::withdrawal) {
      auto it = open.find(key);
      if (it == open.end()) {
        ++st.withdrawals_of_absent;
        continue;
      }
      if (it->second < rec.time_us)
        out.push_back({rec.prefix, feeder, it->second, rec.time_us});
      open.erase(it);
    } else {  // announcement or mid-window RIB re-seed
      auto [it, inserted] = open.emplace(key, rec.time_us);
      if (!inserted) ++st.reannouncements;
    }
  }
  for (const auto& [key, start] : open) {
    if (start < window.end)
      out.push_back({key.second, key.first, start, window.end});
  }

  // Presence during a data gap is unknown: split crossing intervals and
  // flag the halves.
  if (!gaps.empty()) {
    std::vector<PresenceInterval> split;
    for (PresenceInterval iv : out) {
      for (const TimeSpanUs& gap : gaps) {
        if (iv.start < gap.start && iv.end > gap.end) {
          PresenceInterval left = iv, right = iv;
          left.end = gap.start;
          left.uncertain = true;
          right.start = gap.end;
          right.uncertain = true;
          split.push_back(left);
          iv = right;
        } else if (iv.start < gap.end && iv.end > gap.start) {
          // partial overlap: trim to the outside of the gap
          if (iv.start >= gap.start) iv.start = gap.end;
          if (iv.end <= gap.end) iv.end = gap.start;
          iv.uncertain = true;
        }
      }
      if (iv.start < iv.end) split.push_back(iv);
    }
    out = std::move(split);
  }

  std::sort(out.begin(), out.end());
  return out;
}

int visibility(const Prefix& prefix,
               std::span<const PresenceInterval> intervals) {
  std::set<std::uint32_t> feeders;
  for (const PresenceInterval& iv : intervals)
    if (iv.prefix == prefix) feeders.insert(iv.feeder.asn);
  return static_cast<int>(feeders.size());
}

double consistency(const Prefix& prefix,
                   std::span<const PresenceInterval> intervals,
                   const ObservationWindow& window) {
  if (window.length() <= 0) return 0.0;
  std::vector<TimeSpanUs> spans;
  for (const PresenceInterval& iv : intervals) {
    if (iv.prefix != prefix) continue;
    TimeUs s = std::max(iv.start, window.start);
    TimeUs e = std::min(iv.end, window.end);
    if (s < e) spans.push_back({s, e});
  }
  return static_cast<double>(union_length(std::move(spans))) /
         static_cast<double>(window.length());
}

WindowConsistencyResult window_consistency(
    const std::vector<std::set<Prefix>>& daily_sets, int w) {
  WindowConsistencyResult result;
  if (w < 0 || daily_sets.size() < static_cast<std::size_t>(w) + 2)
    return result;
  std::size_t d = daily_sets.size();
  for (std::size_t n = 0; n + static_cast<std::size_t>(w) + 1 < d; ++n) {
    const std::set<Prefix>& target = daily_sets[n + w + 1];
    if (target.empty()) {
      ++result.skipped_empty;
      continue;
    }
    std::set<Prefix> window_union;
    for (std::size_t i = n; i <= n + static_cast<std::size_t>(w); ++i)
      window_union.insert(daily_sets[i].begin(), daily_sets[i].end());
    std::size_t hits = 0;
    for (const Prefix& p : target)
      if (window_union.count(p)) ++hits;
    result.fractions.push_back(static_cast<double>(hits) /
                               static_cast<double>(target.size()));
  }
  if (!result.fractions.empty()) {
    double sum = 0.0;
    for (double f : result.fractions) sum += f;
    result.mean = sum / static_cast<double>(result.fractions.size());
    std::vector<double> sorted = result.fractions;
    std::sort(sorted.begin(), sorted.end());
    result.q1 = quantile(sorted, 0.25);
    result.q3 = quantile(sorted, 0.75);
  }
  return result;
}

std::uint64_t HeatmapGrid::total() const {
  std::uint64_t sum = 0;
  for (const auto& row : counts)
    for (std::uint64_t c : row) sum += c;
  return sum;
}

HeatmapGrid heatmap_bins(std::span<const PrefixStat> stats, int window_days,
                         int group_size, int cell_days) {
  HeatmapGrid grid;
  grid.group_size = group_size;
  grid.cell_days = cell_days;
  int max_cells = std::max(1, (window_days + cell_days - 1) / cell_days);
  int max_groups = 0;
  for (const PrefixStat& s : stats) {
    if (s.visibility <= 0) continue;
    max_groups =
        std::max(max_groups, (s.visibility + group_size - 1) / group_size);
  }
  grid.counts.assign(static_cast<std::size_t>(max_groups),
                     std::vector<std::uint64_t>(
                         static_cast<std::size_t>(max_cells), 0));
  for (const PrefixStat& s : stats) {
    if (s.visibility <= 0) continue;
    int group = (s.visibility + group_size - 1) / group_size;
    double seen_days = s.consistency * window_days;
    int cell = std::max(1, static_cast<int>(std::ceil(seen_days / cell_days)));
    cell = std::min(cell, max_cells);
    ++grid.counts[static_cast<std::size_t>(group - 1)]
                 [static_cast<std::size_t>(cell - 1)];
  }
  return grid;
}

std::vector<PrefixStat> prefix_stats(std::span<const PresenceInterval> intervals,
                                     const ObservationWindow& window) {
  std::map<Prefix, std::pair<std::set<std::uint32_t>, std::vector<TimeSpanUs>>>
      by_prefix;
  for (const PresenceInterval& iv : intervals) {
    auto& entry = by_prefix[iv.prefix];
    entry.first.insert(iv.feeder.asn);
    TimeUs s = std::max(iv.start, window.start);
    TimeUs e = std::min(iv.end, window.end);
    if (s < e) entry.second.push_back({s, e});
  }
  std::vector<PrefixStat> out;
  out.reserve(by_prefix.size());
  for (auto& [prefix, entry] : by_prefix) {
    PrefixStat stat;
    stat.prefix = prefix;
    stat.visibility = static_cast<int>(entry.first.size());
    stat.consistency =
        window.length() > 0
            ? static_cast<double>(union_length(std::move(entry.second))) /
                  static_cast<double>(window.length())
            : 0.0;
    out.push_back(std::move(stat));
  }
  return out;
}

}  // namespace hsp
