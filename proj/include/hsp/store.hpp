#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hsp/route_record.hpp"

namespace hsp {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// One stable CSV row per record; the exact byte layout is part of the
/// on-disk contract, do not change without bumping the store version.
std::string record_to_csv(const RouteRecord& rec);
std::optional<RouteRecord> record_from_csv(const std::string& line);

std::string_view record_csv_header();

/// Snapshot-partitioned record store:
///   <root>/<snapshot>/records_v4.csv
///   <root>/<snapshot>/records_v6.csv
///   <root>/<snapshot>/drops.csv       per-reason accounting
///   <root>/<snapshot>/meta.txt        version + config digest + counts
/// Writes are deterministic: records are sorted, reruns are byte-identical.
class RecordStore {
 public:
  explicit RecordStore(std::filesystem::path root);

  void write_snapshot(const std::string& snapshot,
                      std::vector<RouteRecord> records,
                      const std::map<std::string, std::uint64_t>& drops,
                      const std::string& config_digest);

  std::vector<RouteRecord> read_snapshot(const std::string& snapshot) const;
  std::map<std::string, std::uint64_t> read_drops(
      const std::string& snapshot) const;
  std::map<std::string, std::string> read_meta(
      const std::string& snapshot) const;

  /// Snapshot directory names, sorted.
  std::vector<std::string> snapshots() const;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

}  // namespace hsp
