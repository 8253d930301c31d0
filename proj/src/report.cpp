#include "hsp/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hsp/store.hpp"
#include "hsp/time_util.hpp"

namespace hsp {

namespace {

bool is_route(const RouteRecord& rec) {
  return rec.kind != RecordKind::withdrawal;
}

bool family_ok(const Prefix& p, const std::optional<Family>& family) {
  return !family || p.family == *family;
}

std::string family_name(Family f) { return f == Family::v4 ? "4" : "6"; }

std::vector<Family> families_for(const std::optional<Family>& family) {
  if (family) return {*family};
  return {Family::v4, Family::v6};
}

void json_escape(std::string& out, std::string_view s) {
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
}

}  // namespace

std::string format_fraction(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

std::string render_csv(const Table& table) {
  std::string out = "# kind=" + table.kind +
                    " schema_version=" + std::to_string(kReportSchemaVersion) +
                    " tool_version=" + std::string(kToolVersion) + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

std::string render_json(const Table& table) {
  std::string out = "{\"kind\":\"";
  json_escape(out, table.kind);
  out += "\",\"schema_version\":";
  out += std::to_string(kReportSchemaVersion);
  out += ",\"tool_version\":\"";
  json_escape(out, kToolVersion);
  out += "\",\"columns\":[";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += '"';
    json_escape(out, table.columns[i]);
    out += '"';
  }
  out += "],\"rows\":[";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (r) out += ',';
    out += '[';
    for (std::size_t i = 0; i < table.rows[r].size(); ++i) {
      if (i) out += ',';
      out += '"';
      json_escape(out, table.rows[r][i]);
      out += '"';
    }
    out += ']';
  }
  out += "]}\n";
  return out;
}

std::filesystem::path write_table(const Table& table,
                                  const std::filesystem::path& out_dir,
                                  OutputFormat format) {
  std::filesystem::create_directories(out_dir);
  auto path =
      out_dir / (table.kind + (format == OutputFormat::csv ? ".csv" : ".json"));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("report: cannot write " + path.string());
  out << (format == OutputFormat::csv ? render_csv(table)
                                      : render_json(table));
  return path;
}

std::optional<Family> family_filter_from_string(std::string_view text) {
  if (text == "4") return Family::v4;
  if (text == "6") return Family::v6;
  return std::nullopt;  // "both" and anything else
}

Table growth_series(const SnapshotRecords& snapshots,
                    bool consistent_feeders_only,
                    std::optional<Family> family) {
  Table table{consistent_feeders_only ? "growth_consistent" : "growth",
              {"snapshot", "family", "hsp_count", "origin_count"},
              {}};
  std::set<std::uint32_t> consistent;
  if (consistent_feeders_only && !snapshots.empty()) {
    bool first = true;
    for (const auto& [snap, records] : snapshots) {
      std::set<std::uint32_t> feeders;
      for (const RouteRecord& rec : records) feeders.insert(rec.peer_asn);
      if (first) {
        consistent = std::move(feeders);
        first = false;
      } else {
        std::set<std::uint32_t> inter;
        std::set_intersection(consistent.begin(), consistent.end(),
                              feeders.begin(), feeders.end(),
                              std::inserter(inter, inter.begin()));
        consistent = std::move(inter);
      }
    }
  }
  for (const auto& [snap, records] : snapshots) {
    std::map<Family, std::set<Prefix>> hsps;
    std::map<Family, std::set<std::uint32_t>> origins;
    for (const RouteRecord& rec : records) {
      if (!is_route(rec) || !is_hyper_specific(rec.prefix)) continue;
      if (!family_ok(rec.prefix, family)) continue;
      if (consistent_feeders_only && !consistent.count(rec.peer_asn)) continue;
      hsps[rec.prefix.family].insert(rec.prefix);
      if (rec.origin_asn) origins[rec.prefix.family].insert(*rec.origin_asn);
    }
    for (Family fam : families_for(family)) {
      table.rows.push_back({snap, family_name(fam),
                            std::to_string(hsps[fam].size()),
                            std::to_string(origins[fam].size())});
    }
  }
  return table;
}

Table share_series(const SnapshotRecords& snapshots,
                   std::optional<Family> family) {
  Table table{"share",
              {"snapshot", "family", "group", "count", "share"},
              {}};
  for (const auto& [snap, records] : snapshots) {
    for (Family fam : families_for(family)) {
      std::set<Prefix> all, hsp;
      std::map<UseCaseHint, std::set<Prefix>> buckets;
      for (const RouteRecord& rec : records) {
        if (!is_route(rec) || rec.prefix.family != fam) continue;
        all.insert(rec.prefix);
        if (is_hyper_specific(rec.prefix)) {
          hsp.insert(rec.prefix);
          buckets[cidr_bucket(rec.prefix)].insert(rec.prefix);
        }
      }
      double total = static_cast<double>(all.size());
      auto share = [&](std::size_t n) {
        return format_fraction(total > 0 ? static_cast<double>(n) / total
                                         : 0.0);
      };
      table.rows.push_back({snap, family_name(fam), "total",
                            std::to_string(all.size()),
                            format_fraction(total > 0 ? 1.0 : 0.0)});
      table.rows.push_back({snap, family_name(fam), "hsp",
                            std::to_string(hsp.size()), share(hsp.size())});
      for (const auto& [bucket, prefixes] : buckets) {
        table.rows.push_back({snap, family_name(fam),
                              std::string(to_string(bucket)),
                              std::to_string(prefixes.size()),
                              share(prefixes.size())});
      }
    }
  }
  return table;
}

std::string band_label(const VisibilityBands& bands, std::size_t index) {
  int lo = index == 0 ? 1 : bands.upper[index - 1] + 1;
  if (index >= bands.upper.size())
    return std::to_string(lo - 1) + "+";
  int hi = bands.upper[index];
  if (lo == hi) return std::to_string(lo);
  return std::to_string(lo) + "-" + std::to_string(hi);
}

Table visibility_histogram(const SnapshotRecords& snapshots,
                           const VisibilityBands& bands,
                           std::optional<Family> family) {
  Table table{"visibility", {"snapshot", "family", "band", "count"}, {}};
  for (const auto& [snap, records] : snapshots) {
    for (Family fam : families_for(family)) {
      std::map<Prefix, std::set<std::uint32_t>> feeders;
      for (const RouteRecord& rec : records) {
        if (!is_route(rec) || rec.prefix.family != fam) continue;
        if (!is_hyper_specific(rec.prefix)) continue;
        feeders[rec.prefix].insert(rec.peer_asn);
      }
      std::vector<std::uint64_t> counts(bands.upper.size() + 1, 0);
      for (const auto& [prefix, set] : feeders) {
        int vis = static_cast<int>(set.size());
        std::size_t band = bands.upper.size();
        for (std::size_t i = 0; i < bands.upper.size(); ++i) {
          if (vis <= bands.upper[i]) {
            band = i;
            break;
          }
        }
        ++counts[band];
      }
      for (std::size_t i = 0; i < counts.size(); ++i)
        table.rows.push_back({snap, family_name(fam), band_label(bands, i),
                              std::to_string(counts[i])});
    }
  }
  return table;
}

Table timeline_table(std::span<const PresenceInterval> intervals,
                     const ObservationWindow& window,
                     std::optional<Family> family) {
  Table table{"timeline",
              {"prefix", "feeder_asn", "feeder_address", "start", "end",
               "uncertain", "visibility", "consistency"},
              {}};
  auto stats = prefix_stats(intervals, window);
  std::map<Prefix, const PrefixStat*> by_prefix;
  for (const PrefixStat& s : stats) by_prefix[s.prefix] = &s;
  for (const PresenceInterval& iv : intervals) {
    if (!family_ok(iv.prefix, family)) continue;
    const PrefixStat* stat = by_prefix[iv.prefix];
    table.rows.push_back({to_string(iv.prefix),
                          std::to_string(iv.feeder.asn),
                          to_string(iv.feeder.address),
                          format_time_us(iv.start), format_time_us(iv.end),
                          iv.uncertain ? "1" : "0",
                          std::to_string(stat ? stat->visibility : 0),
                          format_fraction(stat ? stat->consistency : 0.0)});
  }
  return table;
}

Table heatmap_table(std::span<const PresenceInterval> intervals,
                    const ObservationWindow& window, int window_days,
                    int group_size, int cell_days,
                    std::optional<Family> family) {
  Table table{"heatmap",
              {"visibility_group", "seen_time_cell", "count"},
              {}};
  std::vector<PresenceInterval> filtered;
  for (const PresenceInterval& iv : intervals)
    if (family_ok(iv.prefix, family)) filtered.push_back(iv);
  auto stats = prefix_stats(filtered, window);
  auto grid = heatmap_bins(stats, window_days, group_size, cell_days);
  for (std::size_t g = 0; g < grid.counts.size(); ++g)
    for (std::size_t c = 0; c < grid.counts[g].size(); ++c)
      table.rows.push_back({std::to_string(g + 1), std::to_string(c + 1),
                            std::to_string(grid.counts[g][c])});
  return table;
}

Table classify_table(const SnapshotRecords& snapshots,
                     std::optional<Family> family) {
  Table table{"classify", {"snapshot", "family", "bucket", "count"}, {}};
  for (const auto& [snap, records] : snapshots) {
    std::map<Family, std::map<UseCaseHint, std::set<Prefix>>> buckets;
    for (const RouteRecord& rec : records) {
      if (!is_route(rec) || !is_hyper_specific(rec.prefix)) continue;
      if (!family_ok(rec.prefix, family)) continue;
      buckets[rec.prefix.family][cidr_bucket(rec.prefix)].insert(rec.prefix);
    }
    for (const auto& [fam, per_bucket] : buckets)
      for (const auto& [bucket, prefixes] : per_bucket)
        table.rows.push_back({snap, family_name(fam),
                              std::string(to_string(bucket)),
                              std::to_string(prefixes.size())});
  }
  return table;
}

Table communities_table(const SnapshotRecords& snapshots,
                        const CommunityConfig& cfg,
                        std::optional<Family> family) {
  Table table{"communities", {"snapshot", "label", "count", "share"}, {}};
  std::vector<CommunityShareInput> inputs;
  for (const auto& [snap, records] : snapshots) {
    std::set<Prefix> hsps;
    std::map<std::string, std::set<Prefix>> labeled;
    for (const RouteRecord& rec : records) {
      if (!is_route(rec) || !is_hyper_specific(rec.prefix)) continue;
      if (!family_ok(rec.prefix, family)) continue;
      hsps.insert(rec.prefix);
      auto labels = classify_communities(rec.communities, cfg);
      for (CommunityLabel label : labels)
        labeled[std::string(to_string(label))].insert(rec.prefix);
      if (is_any_res(labels)) labeled["AnyRes"].insert(rec.prefix);
      if (is_any_comm(labels)) labeled["AnyComm"].insert(rec.prefix);
    }
    CommunityShareInput input;
    input.total_hsps = hsps.size();
    for (const auto& [label, prefixes] : labeled) {
      input.label_counts[label] = prefixes.size();
      table.rows.push_back(
          {snap, label, std::to_string(prefixes.size()),
           format_fraction(hsps.empty()
                               ? 0.0
                               : static_cast<double>(prefixes.size()) /
                                     static_cast<double>(hsps.size()))});
    }
    inputs.push_back(std::move(input));
  }
  std::size_t skipped = 0;
  auto summary = community_share_stats(inputs, &skipped);
  for (const auto& [label, stats] : summary) {
    table.rows.push_back({"median", label, "", format_fraction(stats.median)});
    table.rows.push_back({"stddev", label, "", format_fraction(stats.stddev)});
  }
  (void)skipped;
  return table;
}

Table aggregation_table(const SnapshotRecords& snapshots,
                        std::optional<Family> family) {
  Table table{"aggregation",
              {"snapshot", "family", "level", "class", "count"},
              {}};
  for (const auto& [snap, records] : snapshots) {
    for (Family fam : families_for(family)) {
      std::map<AggregationPosition, std::uint64_t> route_counts;
      std::map<Prefix, std::vector<AggregationPosition>> per_anchor;
      for (const RouteRecord& rec : records) {
        if (!is_route(rec) || rec.prefix.family != fam) continue;
        if (!is_hyper_specific(rec.prefix)) continue;
        AggregationPosition pos = aggregation_position(rec);
        ++route_counts[pos];
        per_anchor[anchor_of(rec.prefix)].push_back(pos);
      }
      for (const auto& [pos, count] : route_counts)
        table.rows.push_back({snap, family_name(fam), "route",
                              std::string(to_string(pos)),
                              std::to_string(count)});
      std::map<AnchorAggregation, std::uint64_t> anchor_counts;
      for (const auto& [anchor, positions] : per_anchor)
        ++anchor_counts[anchor_position(positions)];
      for (const auto& [pos, count] : anchor_counts)
        table.rows.push_back({snap, family_name(fam), "anchor",
                              std::string(to_string(pos)),
                              std::to_string(count)});
    }
  }
  return table;
}

Table rov_table(const SnapshotRecords& snapshots, const RoaIndex& roas,
                std::optional<Family> family) {
  Table table{"rov", {"snapshot", "family", "status", "count", "share"}, {}};
  for (const auto& [snap, records] : snapshots) {
    for (Family fam : families_for(family)) {
      std::set<std::pair<Prefix, std::uint32_t>> pairs;
      for (const RouteRecord& rec : records) {
        if (!is_route(rec) || rec.prefix.family != fam) continue;
        if (!is_hyper_specific(rec.prefix) || !rec.origin_asn) continue;
        pairs.insert({rec.prefix, *rec.origin_asn});
      }
      std::map<RovStatus, std::uint64_t> counts;
      for (const auto& [prefix, origin] : pairs)
        ++counts[roas.validate(prefix, origin)];
      for (const auto& [status, count] : counts)
        table.rows.push_back(
            {snap, family_name(fam), std::string(to_string(status)),
             std::to_string(count),
             format_fraction(pairs.empty()
                                 ? 0.0
                                 : static_cast<double>(count) /
                                       static_cast<double>(pairs.size()))});
    }
  }
  return table;
}

Table attribute_table(const SnapshotRecords& snapshots,
                      std::span<const IrrRouteObject> irr,
                      std::span<const RoaRecord> roas,
                      std::optional<Family> family) {
  Table table{"attribute",
              {"snapshot", "family", "subject", "class", "count"},
              {}};
  std::map<Family, std::set<std::uint32_t>> irr_origins, rpki_origins;
  std::map<Family, std::set<Prefix>> irr_anchors, rpki_anchors;
  for (const IrrRouteObject& obj : irr) {
    if (!is_hyper_specific(obj.prefix)) continue;
    irr_origins[obj.prefix.family].insert(obj.origin_asn);
    irr_anchors[obj.prefix.family].insert(anchor_of(obj.prefix));
  }
  for (const RoaRecord& roa : roas) {
    if (roa_hsp_kind(roa) != RoaHspKind::explicit_hsp) continue;
    rpki_origins[roa.prefix.family].insert(roa.asn);
    rpki_anchors[roa.prefix.family].insert(anchor_of(roa.prefix));
  }
  for (const auto& [snap, records] : snapshots) {
    for (Family fam : families_for(family)) {
      std::set<std::uint32_t> bgp_origins;
      std::set<Prefix> bgp_anchors, agg_anchors;
      for (const RouteRecord& rec : records) {
        if (!is_route(rec) || rec.prefix.family != fam) continue;
        if (!is_hyper_specific(rec.prefix)) continue;
        if (rec.origin_asn) bgp_origins.insert(*rec.origin_asn);
        bgp_anchors.insert(anchor_of(rec.prefix));
        AggregationPosition pos = aggregation_position(rec);
        if (pos == AggregationPosition::origin ||
            pos == AggregationPosition::on_path)
          agg_anchors.insert(anchor_of(rec.prefix));
      }
      auto origins =
          attribute_origins(bgp_origins, irr_origins[fam], rpki_origins[fam]);
      std::map<OriginAttribution, std::uint64_t> origin_counts;
      for (const auto& [asn, attribution] : origins)
        ++origin_counts[attribution];
      for (const auto& [attribution, count] : origin_counts)
        table.rows.push_back({snap, family_name(fam), "origin_asn",
                              std::string(to_string(attribution)),
                              std::to_string(count)});
      auto anchors = anchor_dataset_attribution(
          bgp_anchors, irr_anchors[fam], rpki_anchors[fam], agg_anchors);
      std::map<AnchorDataset, std::uint64_t> anchor_counts;
      for (const auto& [prefix, dataset] : anchors) ++anchor_counts[dataset];
      for (const auto& [dataset, count] : anchor_counts)
        table.rows.push_back({snap, family_name(fam), "anchor",
                              std::string(to_string(dataset)),
                              std::to_string(count)});
    }
  }
  return table;
}

Table rank_table(const SnapshotRecords& snapshots, RankKey key, std::size_t n,
                 std::optional<Family> family) {
  Table table{key == RankKey::origin_asn ? "rank_origin" : "rank_feeder",
              {"rank", "asn", "hsp_count"},
              {}};
  std::map<std::uint32_t, std::set<Prefix>> per_asn;
  for (const auto& [snap, records] : snapshots) {
    for (const RouteRecord& rec : records) {
      if (!is_route(rec) || !is_hyper_specific(rec.prefix)) continue;
      if (!family_ok(rec.prefix, family)) continue;
      if (key == RankKey::origin_asn) {
        if (rec.origin_asn) per_asn[*rec.origin_asn].insert(rec.prefix);
      } else {
        per_asn[rec.peer_asn].insert(rec.prefix);
      }
    }
  }
  std::vector<std::pair<std::uint32_t, std::size_t>> ranked;
  for (const auto& [asn, prefixes] : per_asn)
    ranked.emplace_back(asn, prefixes.size());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;  // tie: ascending ASN
  });
  if (ranked.size() > n) ranked.resize(n);
  for (std::size_t i = 0; i < ranked.size(); ++i)
    table.rows.push_back({std::to_string(i + 1),
                          std::to_string(ranked[i].first),
                          std::to_string(ranked[i].second)});
  return table;
}

std::map<std::uint32_t, std::string> load_category_map(std::istream& in) {
  std::map<std::uint32_t, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    std::string asn_str = line.substr(0, comma);
    std::string category = line.substr(comma + 1);
    while (!category.empty() &&
           (category.back() == ' ' || category.back() == '\r'))
      category.pop_back();
    std::uint32_t asn = 0;
    auto [p, ec] = std::from_chars(asn_str.data(),
                                   asn_str.data() + asn_str.size(), asn);
    if (ec != std::errc{} || category.empty()) continue;
    out[asn] = category;
  }
  return out;
}

Table categories_table(const SnapshotRecords& snapshots,
                       const std::map<std::uint32_t, std::string>& category_map,
                       std::optional<Family> family) {
  Table table{"categories",
              {"snapshot", "scope", "category", "count"},
              {}};
  for (const auto& [snap, records] : snapshots) {
    std::set<std::uint32_t> all_origins, hsp_origins;
    for (const RouteRecord& rec : records) {
      if (!is_route(rec) || !rec.origin_asn) continue;
      if (!family_ok(rec.prefix, family)) continue;
      all_origins.insert(*rec.origin_asn);
      if (is_hyper_specific(rec.prefix)) hsp_origins.insert(*rec.origin_asn);
    }
    auto emit = [&](const char* scope, const std::set<std::uint32_t>& origins) {
      std::map<std::string, std::uint64_t> counts;
      for (std::uint32_t asn : origins) {
        auto it = category_map.find(asn);
        ++counts[it == category_map.end() ? "Others" : it->second];
      }
      for (const auto& [category, count] : counts)
        table.rows.push_back({snap, scope, category, std::to_string(count)});
    };
    emit("all_origins", all_origins);
    emit("hsp_origins", hsp_origins);
  }
  return table;
}

std::vector<std::filesystem::path> export_dashboard(
    const SnapshotRecords& snapshots, const std::filesystem::path& out_dir,
    OutputFormat format, std::optional<Family> family) {
  std::vector<std::filesystem::path> paths;
  paths.push_back(
      write_table(growth_series(snapshots, false, family), out_dir, format));
  paths.push_back(write_table(share_series(snapshots, family), out_dir, format));
  paths.push_back(
      write_table(visibility_histogram(snapshots, {}, family), out_dir, format));
  paths.push_back(write_table(classify_table(snapshots, family), out_dir, format));
  paths.push_back(
      write_table(communities_table(snapshots, {}, family), out_dir, format));
  paths.push_back(
      write_table(aggregation_table(snapshots, family), out_dir, format));
  paths.push_back(write_table(
      rank_table(snapshots, RankKey::origin_asn, 25, family), out_dir, format));
  return paths;
}

}  // namespace hsp
