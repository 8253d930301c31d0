#include <random>
#include <sstream>

#include "doctest.h"
#include "hsp/mrt.hpp"
#include "support/roundtrip.hpp"

using namespace hsp;

namespace {

std::vector<RouteRecord> decode_string(const std::string& bytes,
                                       DecodeStats& stats,
                                       const std::string& collector = "test") {
  std::istringstream in(bytes);
  return decode_mrt(in, stats, collector);
}

}  // namespace

TEST_CASE("empty input yields no records and no errors") {
  DecodeStats stats;
  auto records = decode_string("", stats);
  CHECK(records.empty());
  CHECK(stats.malformed == 0);
  CHECK(stats.messages == 0);
}

TEST_CASE("peer index table plus one RIB entry") {
  testenc::ByteWriter out;
  testenc::PeerTable table;
  RouteRecord rec;
  rec.collector = "test";
  rec.peer_asn = 64500;
  rec.peer_address = *parse_ip("10.0.0.1");
  rec.prefix = *parse_prefix("198.51.100.0/25");
  rec.kind = RecordKind::rib_entry;
  rec.time_us = 1577836800ll * kUsPerSec;
  rec.as_path = {{PathSegment::Kind::sequence, {64500, 64496}}};
  rec.origin_asn = 64496;
  table.index_of(rec.peer_asn, rec.peer_address);
  testenc::encode_peer_index_table(out, 1577836800, table);
  testenc::encode_rib_entry(out, rec, 0, 0);

  DecodeStats stats;
  auto records = decode_string(out.str(), stats);
  REQUIRE(records.size() == 1);
  CHECK(records[0] == rec);
  CHECK(stats.malformed == 0);
}

TEST_CASE("one update announcing two NLRI prefixes shares attributes") {
  testenc::UpdateSpec spec;
  spec.peer_asn = 64500;
  spec.peer_address = *parse_ip("10.0.0.1");
  spec.time_us = 1577836801ll * kUsPerSec;
  spec.as4 = false;
  spec.announced = {*parse_prefix("203.0.113.0/25"),
                    *parse_prefix("203.0.113.128/25")};
  spec.attr_template.as_path = {{PathSegment::Kind::sequence, {64500, 64496}}};
  spec.attr_template.communities = {{64500, 666}};
  testenc::ByteWriter out;
  testenc::encode_update(out, spec);

  DecodeStats stats;
  auto records = decode_string(out.str(), stats);
  REQUIRE(records.size() == 2);
  CHECK(records[0].prefix == spec.announced[0]);
  CHECK(records[1].prefix == spec.announced[1]);
  for (const auto& rec : records) {
    CHECK(rec.kind == RecordKind::announcement);
    CHECK(rec.as_path == spec.attr_template.as_path);
    CHECK(rec.communities == spec.attr_template.communities);
    CHECK(rec.origin_asn == 64496);
    CHECK(rec.time_us == spec.time_us);
  }
}

TEST_CASE("BGP4MP_ET keeps microseconds, plain BGP4MP gets .000000") {
  testenc::UpdateSpec spec;
  spec.peer_asn = 64500;
  spec.peer_address = *parse_ip("10.0.0.1");
  spec.time_us = 1577836801ll * kUsPerSec + 250000;
  spec.announced = {*parse_prefix("203.0.113.0/25")};
  spec.attr_template.as_path = {{PathSegment::Kind::sequence, {64500}}};
  testenc::ByteWriter out;
  testenc::encode_update(out, spec);
  DecodeStats stats;
  auto records = decode_string(out.str(), stats);
  REQUIRE(records.size() == 1);
  CHECK(records[0].time_us == spec.time_us);

  spec.time_us = 1577836801ll * kUsPerSec;  // whole second -> plain BGP4MP
  testenc::ByteWriter out2;
  testenc::encode_update(out2, spec);
  auto records2 = decode_string(out2.str(), stats);
  REQUIRE(records2.size() == 1);
  CHECK(records2[0].time_us % kUsPerSec == 0);
}

TEST_CASE("withdrawals carry no path attributes") {
  testenc::UpdateSpec spec;
  spec.peer_asn = 64500;
  spec.peer_address = *parse_ip("10.0.0.1");
  spec.time_us = 1577836802ll * kUsPerSec;
  spec.withdrawn = {*parse_prefix("203.0.113.0/25")};
  spec.mp_withdrawn = {*parse_prefix("2001:db8:1::/49")};
  testenc::ByteWriter out;
  testenc::encode_update(out, spec);
  DecodeStats stats;
  auto records = decode_string(out.str(), stats);
  REQUIRE(records.size() == 2);
  for (const auto& rec : records) {
    CHECK(rec.kind == RecordKind::withdrawal);
    CHECK(rec.as_path.empty());
    CHECK(!rec.origin_asn);
  }
}

TEST_CASE("unknown MRT types are counted and skipped, never fatal") {
  testenc::ByteWriter out;
  testenc::ByteWriter body;
  body.u32(0xdeadbeef);
  testenc::mrt_header(out, 1577836800, 99, 1, body);
  // then a valid update must still decode
  testenc::UpdateSpec spec;
  spec.peer_asn = 64500;
  spec.peer_address = *parse_ip("10.0.0.1");
  spec.time_us = 1577836801ll * kUsPerSec;
  spec.announced = {*parse_prefix("203.0.113.0/25")};
  spec.attr_template.as_path = {{PathSegment::Kind::sequence, {64500}}};
  testenc::encode_update(out, spec);

  DecodeStats stats;
  auto records = decode_string(out.str(), stats);
  CHECK(records.size() == 1);
  CHECK(stats.skipped_unknown == 1);
}

TEST_CASE("truncated body reports an error with the message offset") {
  testenc::ByteWriter valid;
  testenc::UpdateSpec spec;
  spec.peer_asn = 64500;
  spec.peer_address = *parse_ip("10.0.0.1");
  spec.time_us = 1577836801ll * kUsPerSec;
  spec.announced = {*parse_prefix("203.0.113.0/25")};
  spec.attr_template.as_path = {{PathSegment::Kind::sequence, {64500}}};
  testenc::encode_update(valid, spec);

  std::string bytes = valid.str();
  std::string truncated = bytes + bytes.substr(0, bytes.size() / 2);
  DecodeStats stats;
  auto records = decode_string(truncated, stats);
  CHECK(records.size() == 1);
  CHECK(stats.malformed >= 1);
  REQUIRE(!stats.errors.empty());
  CHECK(stats.errors[0].offset == bytes.size());
}

TEST_CASE("abnormal wire lengths are surfaced, prefix truncated") {
  // hand-build an update whose NLRI declares /33 on IPv4
  testenc::ByteWriter bgp;
  for (int i = 0; i < 16; ++i) bgp.u8(0xFF);
  testenc::ByteWriter upd;
  upd.u16(0);  // no withdrawals
  RouteRecord tmpl;
  tmpl.as_path = {{PathSegment::Kind::sequence, {64500}}};
  testenc::ByteWriter attrs = testenc::encode_attrs(tmpl, 2);
  upd.u16(static_cast<std::uint16_t>(attrs.size()));
  upd.append(attrs);
  upd.u8(33);  // bogus length
  upd.u8(203);
  upd.u8(0);
  upd.u8(113);
  upd.u8(0);
  upd.u8(0x80);  // 33rd bit set
  bgp.u16(static_cast<std::uint16_t>(19 + upd.size()));
  bgp.u8(2);
  bgp.append(upd);
  testenc::ByteWriter body;
  body.u16(64500);
  body.u16(64999);
  body.u16(7);
  body.u16(1);
  body.raw("\x0a\x00\x00\x01", 4);
  body.raw("\x0a\x00\x00\x02", 4);
  body.append(bgp);
  testenc::ByteWriter out;
  testenc::mrt_header(out, 1577836800, 16, 1, body);

  DecodeStats stats;
  auto records = decode_string(out.str(), stats);
  REQUIRE(records.size() == 1);
  CHECK(records[0].abnormal_length == 33);
  CHECK(records[0].prefix.length == 32);
  CHECK(stats.abnormal_lengths == 1);
}

TEST_CASE("AS4_PATH supersedes the 2-byte AS_PATH") {
  // 2-byte message carrying AS_TRANS plus an AS4_PATH with the real ASN
  RouteRecord tmpl;
  tmpl.as_path = {{PathSegment::Kind::sequence, {23456, 64496}}};
  testenc::ByteWriter attrs = testenc::encode_attrs(tmpl, 2);
  std::vector<PathSegment> real_path{
      {PathSegment::Kind::sequence, {4200000000u, 64496}}};
  testenc::write_attr(attrs, 0xC0, 17, testenc::encode_as_path(real_path, 4));

  testenc::ByteWriter bgp;
  for (int i = 0; i < 16; ++i) bgp.u8(0xFF);
  testenc::ByteWriter upd;
  upd.u16(0);
  upd.u16(static_cast<std::uint16_t>(attrs.size()));
  upd.append(attrs);
  Prefix p = *parse_prefix("203.0.113.0/25");
  testenc::write_nlri(upd, p);
  bgp.u16(static_cast<std::uint16_t>(19 + upd.size()));
  bgp.u8(2);
  bgp.append(upd);
  testenc::ByteWriter body;
  body.u16(64500);
  body.u16(64999);
  body.u16(7);
  body.u16(1);
  body.raw("\x0a\x00\x00\x01", 4);
  body.raw("\x0a\x00\x00\x02", 4);
  body.append(bgp);
  testenc::ByteWriter out;
  testenc::mrt_header(out, 1577836800, 16, 1, body);

  DecodeStats stats;
  auto records = decode_string(out.str(), stats);
  REQUIRE(records.size() == 1);
  CHECK(records[0].as_path == real_path);
  CHECK(records[0].origin_asn == 64496);
}

TEST_CASE("round-trip: encode then decode preserves every field") {
  std::mt19937 rng(2024);
  auto records = testenc::random_records(rng, 300, "rrc-test");
  std::string bytes = testenc::encode_records(records, rng);
  DecodeStats stats;
  auto decoded = decode_string(bytes, stats, "rrc-test");
  REQUIRE(decoded.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) CHECK(decoded[i] == records[i]);
  CHECK(stats.malformed == 0);
}

TEST_CASE("decoder survives random garbage") {
  std::mt19937 rng(99);
  for (int i = 0; i < 2000; ++i) {
    std::string junk(rng() % 200, '\0');
    for (auto& c : junk) c = static_cast<char>(rng() & 0xFF);
    DecodeStats stats;
    auto records = decode_string(junk, stats);
    (void)records;  // any outcome is fine as long as it returns
  }
}
