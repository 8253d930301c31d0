// Command-line front end: decode + sanitize collector data into a record
// store, then run the individual analyses against it.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hsp/mrt.hpp"
#include "hsp/report.hpp"
#include "hsp/sanitize.hpp"
#include "hsp/store.hpp"
#include "hsp/time_util.hpp"
#include "hsp/timeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

struct GlobalOptions {
  std::string family = "both";
  int window_days = 7;
  std::string config;
  std::string out_dir = "out";
  std::string format = "csv";
};

std::optional<hsp::Family> family_of(const GlobalOptions& g) {
  return hsp::family_filter_from_string(g.family);
}

hsp::OutputFormat format_of(const GlobalOptions& g) {
  return g.format == "json" ? hsp::OutputFormat::json : hsp::OutputFormat::csv;
}

std::string store_root(const GlobalOptions& g) { return g.out_dir + "/store"; }

// FNV-1a over the effective filter configuration, recorded in snapshot meta.
std::string digest_of(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

hsp::SnapshotRecords load_store(const GlobalOptions& g) {
  hsp::RecordStore store(store_root(g));
  hsp::SnapshotRecords out;
  for (const std::string& snap : store.snapshots())
    out[snap] = store.read_snapshot(snap);
  return out;
}

int emit(const hsp::Table& table, const GlobalOptions& g) {
  auto path = hsp::write_table(table, g.out_dir, format_of(g));
  std::cout << path.string() << "\n";
  return kExitOk;
}

int run_scan(const GlobalOptions& g, const std::vector<std::string>& inputs,
             const std::string& snapshot, const std::string& collector) {
  std::vector<hsp::FilterRule> rules;
  std::string config_text;
  if (!g.config.empty()) {
    std::ifstream cfg(g.config, std::ios::binary);
    if (!cfg) {
      std::cerr << "cannot open config: " << g.config << "\n";
      return kExitConfig;
    }
    std::ostringstream buf;
    buf << cfg.rdbuf();
    config_text = buf.str();
    std::istringstream in(config_text);
    rules = hsp::base_rules();
    auto noise = hsp::load_noise_rules(in);
    rules.insert(rules.end(), noise.begin(), noise.end());
  } else {
    config_text = std::string(hsp::default_noise_rules_text());
    rules = hsp::default_rules();
  }
  hsp::FilterPipeline pipeline(std::move(rules));

  std::vector<hsp::RouteRecord> kept;
  std::map<std::string, std::uint64_t> drops;
  std::uint64_t decode_warnings = 0;
  std::uint64_t unreadable = 0;
  for (const std::string& input : inputs) {
    std::ifstream in(input, std::ios::binary);
    if (!in) {
      std::cerr << "cannot open input: " << input << "\n";
      ++unreadable;
      continue;
    }
    hsp::DecodeStats stats;
    auto records = hsp::decode_mrt(in, stats, collector);
    decode_warnings += stats.malformed;
    for (const auto& err : stats.errors)
      std::cerr << input << " @" << err.offset << ": " << err.what << "\n";
    for (auto& rec : records) {
      auto outcome = pipeline.apply(rec, rec.peer_asn);
      if (outcome.kept)
        kept.push_back(std::move(rec));
      else
        ++drops[outcome.rule_id];
    }
  }
  if (unreadable == inputs.size() && !inputs.empty()) return kExitInput;

  hsp::RecordStore store(store_root(g));
  store.write_snapshot(snapshot, std::move(kept), drops,
                       digest_of(config_text));
  std::cout << (store.root() / snapshot).string() << "\n";
  if (unreadable > 0 || decode_warnings > 0) {
    std::cerr << "warnings: " << decode_warnings << " malformed messages, "
              << unreadable << " unreadable inputs\n";
    return kExitPartial;
  }
  return kExitOk;
}

int run_timeline(const GlobalOptions& g, const std::string& snapshot,
                 const std::string& start_text, bool heatmap) {
  hsp::RecordStore store(store_root(g));
  auto records = store.read_snapshot(snapshot);
  auto family = family_of(g);

  std::vector<hsp::RouteRecord> ribs, updates;
  hsp::TimeUs min_time = 0;
  bool have_time = false;
  for (auto& rec : records) {
    if (family && rec.prefix.family != *family) continue;
    if (!have_time || rec.time_us < min_time) {
      min_time = rec.time_us;
      have_time = true;
    }
    (rec.kind == hsp::RecordKind::rib_entry ? ribs : updates)
        .push_back(std::move(rec));
  }
  hsp::ObservationWindow window;
  if (!start_text.empty()) {
    auto start = hsp::parse_time_us(start_text);
    if (!start) {
      std::cerr << "bad --window-start: " << start_text << "\n";
      return kExitConfig;
    }
    window.start = *start;
  } else {
    window.start = have_time ? min_time : 0;
  }
  window.end = window.start +
               static_cast<hsp::TimeUs>(g.window_days) * 86400 * hsp::kUsPerSec;
  std::sort(updates.begin(), updates.end(),
            [](const hsp::RouteRecord& a, const hsp::RouteRecord& b) {
              return a.time_us < b.time_us;
            });
  auto intervals = hsp::replay(ribs, updates, window);
  if (heatmap)
    return emit(hsp::heatmap_table(intervals, window, g.window_days, 10, 14,
                                   family),
                g);
  return emit(hsp::timeline_table(intervals, window, family), g);
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const hsp::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyper-specific prefix toolkit"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--family", g.family, "address family: 4, 6, or both")
      ->check(CLI::IsMember({"4", "6", "both"}));
  app.add_option("--window-days", g.window_days, "observation window in days")
      ->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "verb-specific config file");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));

  // scan
  auto* scan = app.add_subcommand("scan", "decode + sanitize MRT inputs");
  std::vector<std::string> scan_inputs;
  std::string scan_snapshot = "snapshot";
  std::string scan_collector = "collector";
  scan->add_option("inputs", scan_inputs, "MRT files");
  scan->add_option("--snapshot", scan_snapshot, "snapshot name");
  scan->add_option("--collector", scan_collector, "collector id");

  auto* growth = app.add_subcommand("growth", "HSP and origin counts");
  bool growth_consistent = false;
  growth->add_flag("--consistent", growth_consistent,
                   "restrict to feeders present in every snapshot");

  app.add_subcommand("share", "HSP share of visible prefixes");

  auto* visibility = app.add_subcommand("visibility", "feeder-count bands");
  std::string bands_text;
  visibility->add_option("--bands", bands_text,
                         "comma-separated band upper bounds");

  auto* timeline = app.add_subcommand("timeline", "presence intervals");
  std::string timeline_snapshot;
  std::string timeline_start;
  bool timeline_heatmap = false;
  timeline->add_option("--snapshot", timeline_snapshot, "snapshot name")
      ->required();
  timeline->add_option("--window-start", timeline_start,
                       "window start (YYYY-MM-DD[THH:MM:SS])");
  timeline->add_flag("--heatmap", timeline_heatmap,
                     "emit the visibility/seen-time grid instead");

  app.add_subcommand("classify", "CIDR use-case buckets");
  app.add_subcommand("communities", "community label distribution");
  app.add_subcommand("aggregation", "aggregation position classes");

  auto* rov = app.add_subcommand("rov", "origin validation outcomes");
  std::string roa_file;
  rov->add_option("--roa-file", roa_file, "ROA CSV")->required();

  auto* attribute = app.add_subcommand("attribute", "cross-dataset origins");
  std::string attr_irr, attr_roa;
  attribute->add_option("--irr-file", attr_irr, "RPSL dump");
  attribute->add_option("--roa-file", attr_roa, "ROA CSV");

  auto* rank = app.add_subcommand("rank", "top HSP contributors");
  std::string rank_key = "origin";
  std::size_t rank_n = 25;
  rank->add_option("--key", rank_key, "origin or feeder")
      ->check(CLI::IsMember({"origin", "feeder"}));
  rank->add_option("--top", rank_n, "table size");

  auto* categories = app.add_subcommand("categories", "origin-AS categories");
  std::string category_file;
  categories->add_option("--map", category_file, "asn,category CSV")
      ->required();

  app.add_subcommand("export", "write all dashboard feeds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  auto family = family_of(g);

  if (scan->parsed())
    return guarded(
        [&] { return run_scan(g, scan_inputs, scan_snapshot, scan_collector); });
  if (timeline->parsed())
    return guarded([&] {
      return run_timeline(g, timeline_snapshot, timeline_start,
                          timeline_heatmap);
    });

  return guarded([&] {
    auto snapshots = load_store(g);
    if (growth->parsed())
      return emit(hsp::growth_series(snapshots, growth_consistent, family), g);
    if (app.get_subcommand("share")->parsed())
      return emit(hsp::share_series(snapshots, family), g);
    if (visibility->parsed()) {
      hsp::VisibilityBands bands;
      if (!bands_text.empty()) {
        bands.upper.clear();
        std::istringstream ss(bands_text);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          try {
            bands.upper.push_back(std::stoi(tok));
          } catch (...) {
            throw hsp::ConfigError("bad --bands value: " + tok);
          }
        }
        if (bands.upper.empty() ||
            !std::is_sorted(bands.upper.begin(), bands.upper.end()))
          throw hsp::ConfigError("--bands must be increasing");
      }
      return emit(hsp::visibility_histogram(snapshots, bands, family), g);
    }
    if (app.get_subcommand("classify")->parsed())
      return emit(hsp::classify_table(snapshots, family), g);
    if (app.get_subcommand("communities")->parsed()) {
      hsp::CommunityConfig cfg;
      if (!g.config.empty()) {
        std::ifstream in(g.config);
        if (!in) throw hsp::ConfigError("cannot open config: " + g.config);
        cfg = hsp::load_community_config(in);
      }
      return emit(hsp::communities_table(snapshots, cfg, family), g);
    }
    if (app.get_subcommand("aggregation")->parsed())
      return emit(hsp::aggregation_table(snapshots, family), g);
    if (rov->parsed()) {
      std::ifstream in(roa_file);
      if (!in) throw hsp::ConfigError("cannot open ROA file: " + roa_file);
      auto roas = hsp::load_roa_csv(in);
      hsp::RoaIndex index(roas);
      return emit(hsp::rov_table(snapshots, index, family), g);
    }
    if (attribute->parsed()) {
      std::vector<hsp::IrrRouteObject> irr;
      std::vector<hsp::RoaRecord> roas;
      if (!attr_irr.empty()) {
        std::ifstream in(attr_irr);
        if (!in) throw hsp::ConfigError("cannot open IRR file: " + attr_irr);
        irr = hsp::parse_rpsl(in, "IRR", "").objects;
      }
      if (!attr_roa.empty()) {
        std::ifstream in(attr_roa);
        if (!in) throw hsp::ConfigError("cannot open ROA file: " + attr_roa);
        roas = hsp::load_roa_csv(in);
      }
      return emit(hsp::attribute_table(snapshots, irr, roas, family), g);
    }
    if (rank->parsed())
      return emit(hsp::rank_table(snapshots,
                                  rank_key == "feeder"
                                      ? hsp::RankKey::feeder_asn
                                      : hsp::RankKey::origin_asn,
                                  rank_n, family),
                  g);
    if (categories->parsed()) {
      std::ifstream in(category_file);
      if (!in)
        throw hsp::ConfigError("cannot open category map: " + category_file);
      auto map = hsp::load_category_map(in);
      return emit(hsp::categories_table(snapshots, map, family), g);
    }
    if (app.get_subcommand("export")->parsed()) {
      auto paths = hsp::export_dashboard(snapshots, g.out_dir + "/dashboard",
                                         format_of(g), family);
      for (const auto& path : paths) std::cout << path.string() << "\n";
      return kExitOk;
    }
    return kExitInput;
  });
}
