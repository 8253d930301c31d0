#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hsp/classify.hpp"
#include "hsp/registry.hpp"
#include "hsp/route_record.hpp"
#include "hsp/timeline.hpp"

namespace hsp {

inline constexpr int kReportSchemaVersion = 1;

enum class OutputFormat : std::uint8_t { csv, json };

/// All analyses emit this shape; rendering is centralized so every command
/// stays byte-stable.
struct Table {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string render_csv(const Table& table);
std::string render_json(const Table& table);

/// Writes <out_dir>/<kind>.<ext>; creates the directory if needed.
std::filesystem::path write_table(const Table& table,
                                  const std::filesystem::path& out_dir,
                                  OutputFormat format);

std::string format_fraction(double value);  // fixed "%.6f"

/// Snapshot name -> sanitized records, the unit every analysis consumes.
using SnapshotRecords = std::map<std::string, std::vector<RouteRecord>>;

std::optional<Family> family_filter_from_string(std::string_view text);

/// Distinct HSP and origin-AS counts per snapshot and family. Consistent
/// mode restricts to feeder ASes present in every snapshot.
Table growth_series(const SnapshotRecords& snapshots,
                    bool consistent_feeders_only,
                    std::optional<Family> family = {});

/// HSP share of all visible prefixes, per snapshot/family, with per
/// CIDR-bucket counts of the hyper-specific part.
Table share_series(const SnapshotRecords& snapshots,
                   std::optional<Family> family = {});

struct VisibilityBands {
  // upper bound of each band except the last, which is open-ended
  std::vector<int> upper = {1, 5, 10, 100};
};

std::string band_label(const VisibilityBands& bands, std::size_t index);

/// HSPs bucketed by how many feeder ASes saw them.
Table visibility_histogram(const SnapshotRecords& snapshots,
                           const VisibilityBands& bands = {},
                           std::optional<Family> family = {});

/// Per-prefix presence intervals plus a visibility/seen-time grid.
Table timeline_table(std::span<const PresenceInterval> intervals,
                     const ObservationWindow& window,
                     std::optional<Family> family = {});
Table heatmap_table(std::span<const PresenceInterval> intervals,
                    const ObservationWindow& window, int window_days,
                    int group_size = 10, int cell_days = 14,
                    std::optional<Family> family = {});

/// HSP counts per CIDR use-case bucket.
Table classify_table(const SnapshotRecords& snapshots,
                     std::optional<Family> family = {});

/// Community label counts per snapshot including AnyRes/AnyComm aggregates,
/// plus cross-snapshot median/stddev summary rows.
Table communities_table(const SnapshotRecords& snapshots,
                        const CommunityConfig& cfg = {},
                        std::optional<Family> family = {});

/// Anchor-level aggregation position distribution.
Table aggregation_table(const SnapshotRecords& snapshots,
                        std::optional<Family> family = {});

/// Four-way origin validation outcome distribution over distinct
/// (prefix, origin) pairs.
Table rov_table(const SnapshotRecords& snapshots, const RoaIndex& roas,
                std::optional<Family> family = {});

/// Origin-AS and anchor-prefix attribution across BGP/IRR/RPKI.
Table attribute_table(const SnapshotRecords& snapshots,
                      std::span<const IrrRouteObject> irr,
                      std::span<const RoaRecord> roas,
                      std::optional<Family> family = {});

enum class RankKey : std::uint8_t { origin_asn, feeder_asn };

/// Top-n ASes by distinct HSP count; ties broken by ascending ASN.
Table rank_table(const SnapshotRecords& snapshots, RankKey key, std::size_t n,
                 std::optional<Family> family = {});

// "asn,category" per line, '#' comments.
std::map<std::uint32_t, std::string> load_category_map(std::istream& in);

/// Category distribution of all origins vs HSP-announcing origins; unmapped
/// ASNs fall into "Others".
Table categories_table(const SnapshotRecords& snapshots,
                       const std::map<std::uint32_t, std::string>& category_map,
                       std::optional<Family> family = {});

/// One feed file per analysis; returns the written paths in order.
std::vector<std::filesystem::path> export_dashboard(
    const SnapshotRecords& snapshots, const std::filesystem::path& out_dir,
    OutputFormat format, std::optional<Family> family = {});

}  // namespace hsp
