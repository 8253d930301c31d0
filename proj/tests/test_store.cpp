#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "hsp/store.hpp"
#include "support/roundtrip.hpp"

using namespace hsp;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const char* tag) {
    path = std::filesystem::temp_directory_path() /
           (std::string("hsp-store-test-") + tag);
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("record CSV row survives a round trip") {
  RouteRecord rec;
  rec.time_us = 1577836801ll * kUsPerSec + 250000;
  rec.collector = "rrc00";
  rec.peer_asn = 64500;
  rec.peer_address = *parse_ip("2001:db8::1");
  rec.prefix = *parse_prefix("185.99.1.0/25");
  rec.kind = RecordKind::announcement;
  rec.as_path = {{PathSegment::Kind::sequence, {64500, 64500, 1299}},
                 {PathSegment::Kind::set, {64496, 64497}}};
  rec.communities = {{65535, 666}, {3303, 100}};
  rec.aggregator = Aggregator{1299, *parse_ip("192.0.2.1")};
  rec.atomic_aggregate = true;
  rec.origin_asn = 1299;
  rec.abnormal_length = 33;

  std::string row = record_to_csv(rec);
  CHECK(row.rfind("1577836801.250000,rrc00,64500,", 0) == 0);
  auto parsed = record_from_csv(row);
  REQUIRE(parsed);
  CHECK(*parsed == rec);

  // sparse record: withdrawals have almost nothing set
  RouteRecord w;
  w.time_us = 1577836802ll * kUsPerSec;
  w.collector = "rrc01";
  w.peer_asn = 64501;
  w.peer_address = *parse_ip("10.0.0.1");
  w.prefix = *parse_prefix("2001:400::/49");
  w.kind = RecordKind::withdrawal;
  auto parsed_w = record_from_csv(record_to_csv(w));
  REQUIRE(parsed_w);
  CHECK(*parsed_w == w);

  CHECK(!record_from_csv("not,a,row"));
  CHECK(!record_from_csv(""));
}

TEST_CASE("snapshot write/read round trip with drop accounting") {
  TempDir tmp("roundtrip");
  RecordStore store(tmp.path);
  std::mt19937 rng(11);
  auto records = testenc::random_records(rng, 200, "rrc00");
  std::map<std::string, std::uint64_t> drops{{"no-origin", 3},
                                             {"private-asn-16", 7}};
  store.write_snapshot("2021-09-01", records, drops, "cfgdigest123");

  auto loaded = store.read_snapshot("2021-09-01");
  REQUIRE(loaded.size() == records.size());
  // loading returns v4 then v6, each sorted; compare as multisets via sort
  auto key = [](const RouteRecord& r) { return record_to_csv(r); };
  std::vector<std::string> want, got;
  for (const auto& r : records) want.push_back(key(r));
  for (const auto& r : loaded) got.push_back(key(r));
  std::sort(want.begin(), want.end());
  std::sort(got.begin(), got.end());
  CHECK(want == got);

  CHECK(store.read_drops("2021-09-01") == drops);
  auto meta = store.read_meta("2021-09-01");
  CHECK(meta["config_digest"] == "cfgdigest123");
  CHECK(meta["dropped"] == "10");
  CHECK(std::stoull(meta["kept_v4"]) + std::stoull(meta["kept_v6"]) ==
        records.size());
  CHECK(meta["tool_version"] == kToolVersion);
  CHECK(store.snapshots() == std::vector<std::string>{"2021-09-01"});
}

TEST_CASE("snapshot writes are byte-identical across reruns") {
  std::mt19937 rng(12);
  auto records = testenc::random_records(rng, 150, "rrc00");
  std::map<std::string, std::uint64_t> drops{{"class-d-e", 1}};

  TempDir a("bytes-a"), b("bytes-b");
  RecordStore sa(a.path), sb(b.path);
  // shuffle differently: output must not depend on input order
  auto shuffled = records;
  std::mt19937 shuffle_rng(999);
  std::shuffle(shuffled.begin(), shuffled.end(), shuffle_rng);
  sa.write_snapshot("snap", records, drops, "digest");
  sb.write_snapshot("snap", shuffled, drops, "digest");
  for (const char* name :
       {"records_v4.csv", "records_v6.csv", "drops.csv", "meta.txt"}) {
    CHECK(slurp(a.path / "snap" / name) == slurp(b.path / "snap" / name));
  }
}
