#include "hsp/store.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "hsp/time_util.hpp"

namespace hsp {

namespace {

constexpr std::string_view kHeader =
    "time,collector,peer_asn,peer_address,prefix,kind,as_path,communities,"
    "aggregator,atomic,origin,abnormal_length";

char kind_char(RecordKind kind) {
  switch (kind) {
    case RecordKind::announcement: return 'A';
    case RecordKind::withdrawal: return 'W';
    case RecordKind::rib_entry: return 'R';
  }
  return '?';
}

std::optional<RecordKind> kind_from(std::string_view s) {
  if (s == "A") return RecordKind::announcement;
  if (s == "W") return RecordKind::withdrawal;
  if (s == "R") return RecordKind::rib_entry;
  return std::nullopt;
}

std::string path_to_string(const std::vector<PathSegment>& path) {
  std::string out;
  for (const PathSegment& seg : path) {
    if (seg.kind == PathSegment::Kind::set) {
      if (!out.empty()) out += ' ';
      out += '{';
      for (std::size_t i = 0; i < seg.asns.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(seg.asns[i]);
      }
      out += '}';
    } else {
      for (std::uint32_t asn : seg.asns) {
        if (!out.empty()) out += ' ';
        out += std::to_string(asn);
      }
    }
  }
  return out;
}

std::optional<std::uint32_t> parse_u32(std::string_view s) {
  std::uint32_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
    return std::nullopt;
  return v;
}

bool path_from_string(std::string_view text, std::vector<PathSegment>* out) {
  std::istringstream ss{std::string(text)};
  std::string token;
  while (ss >> token) {
    if (token.front() == '{') {
      if (token.back() != '}' || token.size() < 3) return false;
      PathSegment seg;
      seg.kind = PathSegment::Kind::set;
      std::string inner = token.substr(1, token.size() - 2);
      std::istringstream is(inner);
      std::string asn;
      while (std::getline(is, asn, ';')) {
        auto v = parse_u32(asn);
        if (!v) return false;
        seg.asns.push_back(*v);
      }
      if (seg.asns.empty()) return false;
      out->push_back(std::move(seg));
    } else {
      auto v = parse_u32(token);
      if (!v) return false;
      if (out->empty() || out->back().kind != PathSegment::Kind::sequence)
        out->push_back({PathSegment::Kind::sequence, {}});
      out->back().asns.push_back(*v);
    }
  }
  return true;
}

std::optional<TimeUs> parse_store_time(std::string_view s) {
  auto dot = s.find('.');
  if (dot == std::string_view::npos || s.size() - dot != 7) return std::nullopt;
  std::int64_t sec = 0;
  std::int64_t usec = 0;
  auto [p1, ec1] = std::from_chars(s.data(), s.data() + dot, sec);
  auto [p2, ec2] =
      std::from_chars(s.data() + dot + 1, s.data() + s.size(), usec);
  if (ec1 != std::errc{} || p1 != s.data() + dot || ec2 != std::errc{} ||
      p2 != s.data() + s.size())
    return std::nullopt;
  return sec * kUsPerSec + usec;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

auto sort_key(const RouteRecord& r) {
  return std::tie(r.time_us, r.peer_asn, r.peer_address, r.prefix, r.kind,
                  r.collector);
}

}  // namespace

std::string_view record_csv_header() { return kHeader; }

std::string record_to_csv(const RouteRecord& rec) {
  std::string out = format_time_us(rec.time_us);
  out += ',';
  out += rec.collector;
  out += ',';
  out += std::to_string(rec.peer_asn);
  out += ',';
  out += to_string(rec.peer_address);
  out += ',';
  out += to_string(rec.prefix);
  out += ',';
  out += kind_char(rec.kind);
  out += ',';
  out += path_to_string(rec.as_path);
  out += ',';
  for (std::size_t i = 0; i < rec.communities.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(rec.communities[i].global);
    out += ':';
    out += std::to_string(rec.communities[i].local);
  }
  out += ',';
  if (rec.aggregator) {
    out += std::to_string(rec.aggregator->asn);
    out += '@';
    out += to_string(rec.aggregator->address);
  }
  out += ',';
  out += rec.atomic_aggregate ? '1' : '0';
  out += ',';
  if (rec.origin_asn) out += std::to_string(*rec.origin_asn);
  out += ',';
  if (rec.abnormal_length) out += std::to_string(*rec.abnormal_length);
  return out;
}

std::optional<RouteRecord> record_from_csv(const std::string& line) {
  // 12 fields; list-valued fields use ' '/':'/'@' so a comma split is exact
  auto fields = split(line, ',');
  if (fields.size() != 12) return std::nullopt;
  RouteRecord rec;
  auto t = parse_store_time(fields[0]);
  if (!t) return std::nullopt;
  rec.time_us = *t;
  rec.collector = fields[1];
  auto peer = parse_u32(fields[2]);
  auto peer_addr = parse_ip(fields[3]);
  auto prefix = parse_prefix(fields[4]);
  auto kind = kind_from(fields[5]);
  if (!peer || !peer_addr || !prefix || !kind) return std::nullopt;
  rec.peer_asn = *peer;
  rec.peer_address = *peer_addr;
  rec.prefix = *prefix;
  rec.kind = *kind;
  if (!path_from_string(fields[6], &rec.as_path)) return std::nullopt;
  {
    std::istringstream ss(fields[7]);
    std::string comm;
    while (ss >> comm) {
      auto colon = comm.find(':');
      if (colon == std::string::npos) return std::nullopt;
      auto g = parse_u32(comm.substr(0, colon));
      auto l = parse_u32(comm.substr(colon + 1));
      if (!g || !l || *g > 65535 || *l > 65535) return std::nullopt;
      rec.communities.push_back({static_cast<std::uint16_t>(*g),
                                 static_cast<std::uint16_t>(*l)});
    }
  }
  if (!fields[8].empty()) {
    auto at = fields[8].find('@');
    if (at == std::string::npos) return std::nullopt;
    auto asn = parse_u32(fields[8].substr(0, at));
    auto addr = parse_ip(fields[8].substr(at + 1));
    if (!asn || !addr) return std::nullopt;
    rec.aggregator = Aggregator{*asn, *addr};
  }
  if (fields[9] != "0" && fields[9] != "1") return std::nullopt;
  rec.atomic_aggregate = fields[9] == "1";
  if (!fields[10].empty()) {
    auto origin = parse_u32(fields[10]);
    if (!origin) return std::nullopt;
    rec.origin_asn = *origin;
  }
  if (!fields[11].empty()) {
    auto ab = parse_u32(fields[11]);
    if (!ab || *ab > 65535) return std::nullopt;
    rec.abnormal_length = static_cast<std::uint16_t>(*ab);
  }
  return rec;
}

RecordStore::RecordStore(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

void RecordStore::write_snapshot(
    const std::string& snapshot, std::vector<RouteRecord> records,
    const std::map<std::string, std::uint64_t>& drops,
    const std::string& config_digest) {
  auto dir = root_ / snapshot;
  std::filesystem::create_directories(dir);
  std::stable_sort(records.begin(), records.end(),
                   [](const RouteRecord& a, const RouteRecord& b) {
                     return sort_key(a) < sort_key(b);
                   });
  std::uint64_t kept_v4 = 0, kept_v6 = 0;
  for (Family fam : {Family::v4, Family::v6}) {
    std::ofstream out(dir / (fam == Family::v4 ? "records_v4.csv"
                                               : "records_v6.csv"),
                      std::ios::trunc);
    if (!out) throw std::runtime_error("store: cannot write " + snapshot);
    out << kHeader << '\n';
    for (const RouteRecord& rec : records) {
      if (rec.prefix.family != fam) continue;
      out << record_to_csv(rec) << '\n';
      ++(fam == Family::v4 ? kept_v4 : kept_v6);
    }
  }
  {
    std::ofstream out(dir / "drops.csv", std::ios::trunc);
    out << "reason,count\n";
    for (const auto& [reason, count] : drops)
      out << reason << ',' << count << '\n';
  }
  {
    std::ofstream out(dir / "meta.txt", std::ios::trunc);
    std::uint64_t dropped = 0;
    for (const auto& [reason, count] : drops) dropped += count;
    out << "config_digest=" << config_digest << '\n'
        << "dropped=" << dropped << '\n'
        << "kept_v4=" << kept_v4 << '\n'
        << "kept_v6=" << kept_v6 << '\n'
        << "tool_version=" << kToolVersion << '\n';
  }
}

std::vector<RouteRecord> RecordStore::read_snapshot(
    const std::string& snapshot) const {
  std::vector<RouteRecord> out;
  for (const char* name : {"records_v4.csv", "records_v6.csv"}) {
    std::ifstream in(root_ / snapshot / name);
    if (!in) throw std::runtime_error("store: missing " + snapshot);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (first) {
        first = false;
        if (line != kHeader)
          throw std::runtime_error("store: bad header in " + snapshot);
        continue;
      }
      auto rec = record_from_csv(line);
      if (!rec) throw std::runtime_error("store: bad row in " + snapshot);
      out.push_back(std::move(*rec));
    }
  }
  return out;
}

std::map<std::string, std::uint64_t> RecordStore::read_drops(
    const std::string& snapshot) const {
  std::map<std::string, std::uint64_t> out;
  std::ifstream in(root_ / snapshot / "drops.csv");
  if (!in) throw std::runtime_error("store: missing drops in " + snapshot);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.rfind(',');
    if (comma == std::string::npos)
      throw std::runtime_error("store: bad drops row in " + snapshot);
    out[line.substr(0, comma)] =
        std::stoull(line.substr(comma + 1));
  }
  return out;
}

std::map<std::string, std::string> RecordStore::read_meta(
    const std::string& snapshot) const {
  std::map<std::string, std::string> out;
  std::ifstream in(root_ / snapshot / "meta.txt");
  if (!in) throw std::runtime_error("store: missing meta in " + snapshot);
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

std::vector<std::string> RecordStore::snapshots() const {
  std::vector<std::string> out;
  if (!std::filesystem::exists(root_)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(root_))
    if (entry.is_directory()) out.push_back(entry.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hsp
