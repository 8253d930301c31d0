#include "hsp/sanitize.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace hsp {

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::private_origin_asn: return "private_origin_asn";
    case FilterKind::private_or_reserved_prefix: return "private_or_reserved_prefix";
    case FilterKind::class_d_e: return "class_d_e";
    case FilterKind::abnormal_length: return "abnormal_length";
    case FilterKind::no_origin: return "no_origin";
    case FilterKind::feeder_internal: return "feeder_internal";
    case FilterKind::noisy_origin: return "noisy_origin";
    case FilterKind::noisy_peer: return "noisy_peer";
    case FilterKind::unallocated_resource: return "unallocated_resource";
  }
  return "unknown";
}

std::optional<FilterKind> filter_kind_from_string(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(FilterKind::unallocated_resource); ++i) {
    auto kind = static_cast<FilterKind>(i);
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

bool FilterRule::active_at(TimeUs t) const {
  if (timeframes.empty()) return true;
  for (const TimeSpanUs& span : timeframes)
    if (span.contains(t)) return true;
  return false;
}

bool AllocationIndex::covers_prefix(const Prefix& p) const {
  return !allocated_prefixes.covering(p).empty();
}

bool AllocationIndex::covers_asn(std::uint32_t asn) const {
  for (const AsnRange& r : allocated_asns)
    if (r.contains(asn)) return true;
  return false;
}

namespace {

Prefix must_prefix(std::string_view text) {
  auto p = parse_prefix(text);
  if (!p) throw ConfigError("bad builtin prefix: " + std::string(text));
  return *p;
}

std::vector<Prefix> v4_bogons() {
  static const char* kRanges[] = {
      "0.0.0.0/8",      "10.0.0.0/8",     "100.64.0.0/10", "127.0.0.0/8",
      "169.254.0.0/16", "172.16.0.0/12",  "192.0.0.0/24",  "192.0.2.0/24",
      "192.88.99.0/24", "192.168.0.0/16", "198.18.0.0/15", "198.51.100.0/24",
      "203.0.113.0/24",
  };
  std::vector<Prefix> out;
  for (const char* r : kRanges) out.push_back(must_prefix(r));
  return out;
}

std::vector<Prefix> v6_bogons() {
  static const char* kRanges[] = {
      "fc00::/7", "fe80::/10", "2001:db8::/32", "::/128", "::1/128",
  };
  std::vector<Prefix> out;
  for (const char* r : kRanges) out.push_back(must_prefix(r));
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double median_of(std::vector<std::uint64_t> values) {
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  if (n == 0) return 0.0;
  if (n % 2 == 1) return static_cast<double>(values[n / 2]);
  return (static_cast<double>(values[n / 2 - 1]) +
          static_cast<double>(values[n / 2])) /
         2.0;
}

}  // namespace

std::vector<FilterRule> base_rules(const FilterPipelineOptions& options) {
  std::vector<FilterRule> rules;
  rules.push_back({FilterKind::private_origin_asn,
                   "private-asn-16",
                   std::nullopt,
                   {{64512, 65534}},
                   {},
                   {}});
  rules.push_back({FilterKind::private_origin_asn,
                   "private-asn-32",
                   std::nullopt,
                   {{4200000000u, 4294967294u}},
                   {},
                   {}});
  FilterRule reserved{FilterKind::private_or_reserved_prefix,
                      "private-reserved-prefix",
                      std::nullopt,
                      {},
                      v4_bogons(),
                      {}};
  if (options.v6_bogons) {
    auto v6 = v6_bogons();
    reserved.prefixes.insert(reserved.prefixes.end(), v6.begin(), v6.end());
  }
  rules.push_back(std::move(reserved));
  rules.push_back({FilterKind::class_d_e, "class-d-e", Family::v4, {}, {}, {}});
  rules.push_back(
      {FilterKind::abnormal_length, "abnormal-length", std::nullopt, {}, {}, {}});
  rules.push_back({FilterKind::no_origin, "no-origin", std::nullopt, {}, {}, {}});
  rules.push_back(
      {FilterKind::feeder_internal, "feeder-internal", std::nullopt, {}, {}, {}});
  if (options.check_allocation)
    rules.push_back({FilterKind::unallocated_resource,
                     "unallocated-resource",
                     std::nullopt,
                     {},
                     {},
                     {}});
  return rules;
}

std::string_view default_noise_rules_text() {
  // Mirrors the noisy origin/peer rows of the published isolation-rule table.
  // Multi-month timeframes are expanded to the quarterly snapshot months they
  // cover; end dates are exclusive.
  return "kind,family,asn,start,end\n"
         "noisy_origin,4,9498,2015-10-01,2015-10-08\n"
         "noisy_origin,4,36937,2016-10-01,2016-10-08\n"
         "noisy_origin,4,9498,2017-04-01,2017-04-08\n"
         "noisy_origin,4,7122,2019-07-01,2019-07-08\n"
         "noisy_origin,4,12400,,\n"
         "noisy_peer,4,35908,2016-07-01,2016-07-08\n"
         "noisy_peer,4,60924,2017-01-01,2017-01-08\n"
         "noisy_peer,4,27630,2017-01-01,2017-01-08\n"
         "noisy_peer,4,37497,2017-10-01,2017-10-08\n"
         "noisy_peer,4,14361,2018-10-01,2018-10-08\n"
         "noisy_peer,4,262757,2019-01-01,2019-01-08\n"
         "noisy_peer,4,268430,2020-04-01,2020-04-08\n"
         "noisy_peer,4,268430,2020-07-01,2020-07-08\n"
         "noisy_peer,4,398465,2021-04-01,2021-04-08\n"
         "noisy_peer,4,398465,2021-07-01,2021-07-08\n"
         "noisy_peer,4,203125,2021-01-01,2021-01-08\n"
         "noisy_peer,4,203125,2021-04-01,2021-04-08\n"
         "noisy_peer,4,203125,2021-07-01,2021-07-08\n"
         "noisy_peer,4,203125,2021-10-01,2021-10-08\n"
         "noisy_origin,6,4761,,\n"
         "noisy_origin,6,17451,2017-07-01,2017-07-08\n"
         "noisy_origin,6,45899,2017-07-01,2017-07-08\n"
         "noisy_origin,6,7713,2019-04-01,2019-04-08\n"
         "noisy_origin,6,8100,2021-07-01,2021-07-08\n"
         "noisy_peer,6,199036,2018-07-01,2018-07-08\n";
}

std::vector<FilterRule> load_noise_rules(std::istream& in) {
  std::vector<FilterRule> rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.rfind("kind,", 0) == 0) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 5)
      throw ConfigError("noise rule line " + std::to_string(lineno) +
                        ": expected 5 columns");
    auto kind = filter_kind_from_string(fields[0]);
    if (!kind ||
        (*kind != FilterKind::noisy_origin && *kind != FilterKind::noisy_peer))
      throw ConfigError("noise rule line " + std::to_string(lineno) +
                        ": kind must be noisy_origin or noisy_peer");
    if (fields[1] != "4" && fields[1] != "6")
      throw ConfigError("noise rule line " + std::to_string(lineno) +
                        ": family must be 4 or 6");
    Family family = fields[1] == "4" ? Family::v4 : Family::v6;
    std::uint32_t asn = 0;
    auto [ptr, ec] = std::from_chars(fields[2].data(),
                                     fields[2].data() + fields[2].size(), asn);
    if (ec != std::errc{} || ptr != fields[2].data() + fields[2].size())
      throw ConfigError("noise rule line " + std::to_string(lineno) +
                        ": bad ASN");
    std::vector<TimeSpanUs> timeframes;
    if (fields[3].empty() != fields[4].empty())
      throw ConfigError("noise rule line " + std::to_string(lineno) +
                        ": start and end must both be set or both empty");
    if (!fields[3].empty()) {
      auto start = parse_date_us(fields[3]);
      auto end = parse_date_us(fields[4]);
      if (!start || !end)
        throw ConfigError("noise rule line " + std::to_string(lineno) +
                          ": bad date");
      if (*start >= *end)
        throw ConfigError("noise rule line " + std::to_string(lineno) +
                          ": start must precede end");
      timeframes.push_back({*start, *end});
    }
    // Rows repeating the same (kind, family, asn) merge into one rule; a
    // timeframe-less row subsumes any scoped ones.
    auto existing = std::find_if(rules.begin(), rules.end(), [&](const FilterRule& r) {
      return r.kind == *kind && r.family == family &&
             r.asn_ranges.front().lo == asn;
    });
    if (existing != rules.end()) {
      if (existing->timeframes.empty() || timeframes.empty())
        existing->timeframes.clear();
      else
        existing->timeframes.push_back(timeframes.front());
      continue;
    }
    FilterRule rule;
    rule.kind = *kind;
    rule.family = family;
    rule.asn_ranges = {{asn, asn}};
    rule.timeframes = std::move(timeframes);
    rule.id = std::string(*kind == FilterKind::noisy_origin ? "noisy-origin-"
                                                            : "noisy-peer-") +
              std::to_string(asn) + "-v" + fields[1];
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<FilterRule> default_noise_rules() {
  std::istringstream in{std::string(default_noise_rules_text())};
  return load_noise_rules(in);
}

std::vector<FilterRule> default_rules(const FilterPipelineOptions& options) {
  auto rules = base_rules(options);
  auto noise = default_noise_rules();
  rules.insert(rules.end(), std::make_move_iterator(noise.begin()),
               std::make_move_iterator(noise.end()));
  return rules;
}

FilterPipeline::FilterPipeline(std::vector<FilterRule> rules,
                               FilterPipelineOptions options,
                               const AllocationIndex* allocations)
    : rules_(std::move(rules)), options_(options), allocations_(allocations) {
  for (std::size_t i = 0; i < rules_.size(); ++i)
    for (const Prefix& p : rules_[i].prefixes)
      bogons_.insert(p, static_cast<int>(i));
}

FilterOutcome FilterPipeline::apply(const RouteRecord& rec,
                                    std::uint32_t feeder_asn) const {
  for (const FilterRule& rule : rules_) {
    if (matches(rule, rec, feeder_asn))
      return {false, rule.kind, rule.id};
  }
  return {true, std::nullopt, {}};
}

bool FilterPipeline::matches(const FilterRule& rule, const RouteRecord& rec,
                             std::uint32_t feeder_asn) const {
  if (rule.family && rec.prefix.family != *rule.family) return false;
  if (!rule.active_at(rec.time_us)) return false;
  // Withdrawals legitimately carry no path attributes; origin-based rules
  // do not apply to them.
  bool is_route = rec.kind != RecordKind::withdrawal;
  switch (rule.kind) {
    case FilterKind::private_origin_asn:
    case FilterKind::noisy_origin: {
      if (!is_route || !rec.origin_asn) return false;
      for (const AsnRange& r : rule.asn_ranges)
        if (r.contains(*rec.origin_asn)) return true;
      return false;
    }
    case FilterKind::private_or_reserved_prefix: {
      for (const auto& hit : bogons_.covering(rec.prefix)) {
        for (int idx : *hit.payloads)
          if (&rules_[static_cast<std::size_t>(idx)] == &rule) return true;
      }
      return false;
    }
    case FilterKind::class_d_e:
      return rec.prefix.family == Family::v4 && rec.prefix.bits[0] >= 224;
    case FilterKind::abnormal_length:
      return rec.abnormal_length.has_value();
    case FilterKind::no_origin:
      return is_route && !rec.origin_asn;
    case FilterKind::feeder_internal:
      return is_route && is_hyper_specific(rec.prefix) && rec.origin_asn &&
             *rec.origin_asn == feeder_asn && hops_of(rec.as_path) < 2;
    case FilterKind::noisy_peer: {
      for (const AsnRange& r : rule.asn_ranges)
        if (r.contains(rec.peer_asn)) return true;
      return false;
    }
    case FilterKind::unallocated_resource: {
      if (!options_.check_allocation || !allocations_) return false;
      if (!allocations_->covers_prefix(rec.prefix)) return true;
      return is_route && rec.origin_asn &&
             !allocations_->covers_asn(*rec.origin_asn);
    }
  }
  return false;
}

AllocationIndex load_delegation_file(std::istream& in) {
  AllocationIndex index;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string f;
    while (std::getline(ss, f, '|')) fields.push_back(f);
    if (fields.size() < 7) continue;
    const std::string& type = fields[2];
    const std::string& start = fields[3];
    const std::string& value = fields[4];
    const std::string& status = fields[6];
    if (status != "allocated" && status != "assigned") continue;
    unsigned long count = 0;
    try {
      count = std::stoul(value);
    } catch (...) {
      continue;
    }
    if (type == "asn") {
      std::uint32_t first = 0;
      auto [p, ec] =
          std::from_chars(start.data(), start.data() + start.size(), first);
      if (ec != std::errc{} || count == 0) continue;
      index.allocated_asns.push_back(
          {first, static_cast<std::uint32_t>(first + count - 1)});
    } else if (type == "ipv6") {
      auto prefix = parse_prefix(start + "/" + value);
      if (prefix) index.allocated_prefixes.insert(*prefix, 0);
    } else if (type == "ipv4") {
      auto addr = parse_ip(start);
      if (!addr || count == 0) continue;
      std::uint32_t base = static_cast<std::uint32_t>(addr->bytes[0]) << 24 |
                           static_cast<std::uint32_t>(addr->bytes[1]) << 16 |
                           static_cast<std::uint32_t>(addr->bytes[2]) << 8 |
                           addr->bytes[3];
      // Address counts need not be powers of two; decompose into CIDR blocks.
      std::uint64_t remaining = count;
      std::uint64_t cur = base;
      while (remaining > 0 && cur <= 0xFFFFFFFFull) {
        std::uint64_t align = cur == 0 ? (1ull << 32) : (cur & (~cur + 1));
        std::uint64_t size = 1;
        while (size * 2 <= remaining && size * 2 <= align) size *= 2;
        int length = 32;
        for (std::uint64_t s = size; s > 1; s /= 2) --length;
        AddrBytes bytes{};
        bytes[0] = static_cast<std::uint8_t>(cur >> 24);
        bytes[1] = static_cast<std::uint8_t>(cur >> 16);
        bytes[2] = static_cast<std::uint8_t>(cur >> 8);
        bytes[3] = static_cast<std::uint8_t>(cur);
        auto prefix = make_canonical(Family::v4, bytes, length);
        if (prefix) index.allocated_prefixes.insert(*prefix, 0);
        cur += size;
        remaining -= size;
      }
    }
  }
  return index;
}

std::vector<NoisyOriginFlag> detect_noisy_origins(
    const std::map<std::uint32_t, std::vector<std::uint64_t>>& counts,
    double factor) {
  std::vector<NoisyOriginFlag> flags;
  for (const auto& [origin, per_snapshot] : counts) {
    if (per_snapshot.size() < 2) continue;
    for (std::size_t i = 0; i < per_snapshot.size(); ++i) {
      if (per_snapshot[i] == 0) continue;
      std::vector<std::uint64_t> others;
      others.reserve(per_snapshot.size() - 1);
      for (std::size_t j = 0; j < per_snapshot.size(); ++j)
        if (j != i) others.push_back(per_snapshot[j]);
      double baseline = median_of(std::move(others));
      if (static_cast<double>(per_snapshot[i]) >= factor * baseline)
        flags.push_back({origin, i});
    }
  }
  return flags;
}

}  // namespace hsp
