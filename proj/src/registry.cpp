#include "hsp/registry.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace hsp {

RoaHspKind roa_hsp_kind(const RoaRecord& roa) {
  int boundary = hsp_boundary(roa.prefix.family);
  bool min_hsp = roa.prefix.length > boundary;
  bool max_hsp = roa.max_length > boundary;
  if (min_hsp && max_hsp) return RoaHspKind::explicit_hsp;
  if (max_hsp) return RoaHspKind::implicit_hsp;
  return RoaHspKind::non_hsp;
}

std::string_view to_string(RovStatus s) {
  switch (s) {
    case RovStatus::not_found: return "not_found";
    case RovStatus::valid: return "valid";
    case RovStatus::invalid_length: return "invalid_length";
    case RovStatus::invalid_origin: return "invalid_origin";
    case RovStatus::invalid_both: return "invalid_both";
  }
  return "unknown";
}

std::string_view to_string(RoaHspKind k) {
  switch (k) {
    case RoaHspKind::explicit_hsp: return "explicit";
    case RoaHspKind::implicit_hsp: return "implicit";
    case RoaHspKind::non_hsp: return "non_hsp";
  }
  return "unknown";
}

RoaIndex::RoaIndex(std::span<const RoaRecord> roas)
    : roas_(roas.begin(), roas.end()) {
  for (std::size_t i = 0; i < roas_.size(); ++i)
    trie_.insert(roas_[i].prefix, i);
}

std::vector<const RoaRecord*> RoaIndex::covering(const Prefix& p) const {
  std::vector<const RoaRecord*> out;
  for (const auto& hit : trie_.covering(p))
    for (std::size_t idx : *hit.payloads) out.push_back(&roas_[idx]);
  return out;
}

RovStatus RoaIndex::validate(const Prefix& prefix, std::uint32_t origin) const {
  auto covers = covering(prefix);
  if (covers.empty()) return RovStatus::not_found;
  // Best achievable status: Valid > InvalidLength > InvalidOrigin > InvalidBoth.
  RovStatus best = RovStatus::invalid_both;
  for (const RoaRecord* roa : covers) {
    bool length_ok = prefix.length <= roa->max_length;
    bool origin_ok = origin == roa->asn;
    RovStatus status;
    if (length_ok && origin_ok)
      return RovStatus::valid;
    else if (origin_ok)
      status = RovStatus::invalid_length;
    else if (length_ok)
      status = RovStatus::invalid_origin;
    else
      status = RovStatus::invalid_both;
    if (static_cast<int>(status) < static_cast<int>(best)) best = status;
  }
  return best;
}

namespace {

std::optional<std::uint32_t> parse_asn(std::string_view text) {
  if (text.size() >= 2 && (text[0] == 'A' || text[0] == 'a') &&
      (text[1] == 'S' || text[1] == 's'))
    text.remove_prefix(2);
  std::uint32_t asn = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), asn);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    return std::nullopt;
  return asn;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::vector<RoaRecord> load_roa_csv(std::istream& in, std::uint64_t* malformed) {
  std::vector<RoaRecord> out;
  std::uint64_t bad = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.rfind("prefix,", 0) == 0) continue;
    std::istringstream ss(line);
    std::string prefix_str, max_len_str, asn_str, date;
    if (!std::getline(ss, prefix_str, ',') ||
        !std::getline(ss, max_len_str, ',') ||
        !std::getline(ss, asn_str, ',')) {
      ++bad;
      continue;
    }
    std::getline(ss, date);
    auto prefix = parse_prefix(prefix_str);
    auto asn = parse_asn(asn_str);
    int max_len = -1;
    auto [p, ec] = std::from_chars(max_len_str.data(),
                                   max_len_str.data() + max_len_str.size(),
                                   max_len);
    if (!prefix || !asn || ec != std::errc{} || max_len < prefix->length ||
        max_len > max_prefix_length(prefix->family)) {
      ++bad;
      continue;
    }
    out.push_back({*prefix, static_cast<std::uint8_t>(max_len), *asn, date});
  }
  if (malformed) *malformed = bad;
  return out;
}

RpslParseResult parse_rpsl(std::istream& in, std::string_view default_source,
                           std::string snapshot_date) {
  RpslParseResult result;
  std::string line;
  std::optional<std::string> route_value;
  bool route_is_v6 = false;
  std::optional<std::string> origin_value;
  std::string source_value;
  bool in_object = false;
  std::string last_attr;

  auto flush = [&]() {
    if (!in_object) return;
    in_object = false;
    auto route = route_value;
    auto origin = origin_value;
    auto source = source_value;
    route_value.reset();
    origin_value.reset();
    source_value.clear();
    last_attr.clear();
    if (!route) return;  // not a route(6) object
    if (!origin) {
      ++result.skipped_no_origin;
      return;
    }
    auto prefix = parse_prefix(*route);
    auto asn = parse_asn(*origin);
    if (!prefix || !asn || (route_is_v6 != (prefix->family == Family::v6))) {
      ++result.malformed;
      return;
    }
    result.objects.push_back(
        {*prefix, *asn, source.empty() ? std::string(default_source) : source,
         snapshot_date});
  };

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && (line[0] == '%' || line[0] == '#')) continue;
    if (line.empty()) {
      flush();
      continue;
    }
    // Continuation lines start with whitespace or '+'.
    if (line[0] == ' ' || line[0] == '\t' || line[0] == '+') {
      if (last_attr == "route" && route_value)
        *route_value += trim(line.substr(1));
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    in_object = true;
    std::string attr = trim(line.substr(0, colon));
    std::transform(attr.begin(), attr.end(), attr.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    std::string value = trim(line.substr(colon + 1));
    auto comment = value.find('#');
    if (comment != std::string::npos) value = trim(value.substr(0, comment));
    if (attr == "route" || attr == "route6") {
      route_value = value;
      route_is_v6 = attr == "route6";
      last_attr = "route";
    } else if (attr == "origin") {
      origin_value = value;
      last_attr = "origin";
    } else if (attr == "source") {
      source_value = value;
      last_attr = "source";
    } else {
      last_attr = attr;
    }
  }
  flush();
  return result;
}

std::string_view to_string(OriginAttribution a) {
  switch (a) {
    case OriginAttribution::bgp_only: return "bgp_only";
    case OriginAttribution::irr_only: return "irr_only";
    case OriginAttribution::rpki_only: return "rpki_only";
    case OriginAttribution::multiple: return "multiple";
  }
  return "unknown";
}

std::map<std::uint32_t, OriginAttribution> attribute_origins(
    const std::set<std::uint32_t>& bgp_origins,
    const std::set<std::uint32_t>& irr_origins,
    const std::set<std::uint32_t>& rpki_explicit_origins) {
  std::map<std::uint32_t, OriginAttribution> out;
  std::set<std::uint32_t> all;
  all.insert(bgp_origins.begin(), bgp_origins.end());
  all.insert(irr_origins.begin(), irr_origins.end());
  all.insert(rpki_explicit_origins.begin(), rpki_explicit_origins.end());
  for (std::uint32_t asn : all) {
    int n = (bgp_origins.count(asn) ? 1 : 0) + (irr_origins.count(asn) ? 1 : 0) +
            (rpki_explicit_origins.count(asn) ? 1 : 0);
    if (n > 1)
      out[asn] = OriginAttribution::multiple;
    else if (bgp_origins.count(asn))
      out[asn] = OriginAttribution::bgp_only;
    else if (irr_origins.count(asn))
      out[asn] = OriginAttribution::irr_only;
    else
      out[asn] = OriginAttribution::rpki_only;
  }
  return out;
}

std::string_view to_string(AnchorDataset d) {
  switch (d) {
    case AnchorDataset::collectors: return "collectors";
    case AnchorDataset::irr: return "irr";
    case AnchorDataset::rpki: return "rpki";
    case AnchorDataset::aggregated: return "aggregated";
    case AnchorDataset::multiple: return "multiple";
  }
  return "unknown";
}

std::map<Prefix, AnchorDataset> anchor_dataset_attribution(
    const std::set<Prefix>& collector_anchors,
    const std::set<Prefix>& irr_anchors,
    const std::set<Prefix>& rpki_explicit_anchors,
    const std::set<Prefix>& aggregated_anchors) {
  std::map<Prefix, AnchorDataset> out;
  std::set<Prefix> all;
  for (const auto* s : {&collector_anchors, &irr_anchors,
                        &rpki_explicit_anchors, &aggregated_anchors})
    all.insert(s->begin(), s->end());
  for (const Prefix& p : all) {
    int n = (collector_anchors.count(p) ? 1 : 0) +
            (irr_anchors.count(p) ? 1 : 0) +
            (rpki_explicit_anchors.count(p) ? 1 : 0) +
            (aggregated_anchors.count(p) ? 1 : 0);
    if (n > 1)
      out[p] = AnchorDataset::multiple;
    else if (collector_anchors.count(p))
      out[p] = AnchorDataset::collectors;
    else if (irr_anchors.count(p))
      out[p] = AnchorDataset::irr;
    else if (rpki_explicit_anchors.count(p))
      out[p] = AnchorDataset::rpki;
    else
      out[p] = AnchorDataset::aggregated;
  }
  return out;
}

}  // namespace hsp
