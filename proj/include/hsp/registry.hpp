#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hsp/prefix.hpp"
#include "hsp/prefix_trie.hpp"

namespace hsp {

/// One validated ROA: prefix + max length bound to an origin ASN.
struct RoaRecord {
  Prefix prefix;
  std::uint8_t max_length = 0;
  std::uint32_t asn = 0;
  std::string snapshot_date;

  auto operator<=>(const RoaRecord&) const = default;
};

struct IrrRouteObject {
  Prefix prefix;
  std::uint32_t origin_asn = 0;
  std::string source_db;
  std::string snapshot_date;

  auto operator<=>(const IrrRouteObject&) const = default;
};

enum class RoaHspKind : std::uint8_t {
  explicit_hsp,  // min and max length both hyper-specific
  implicit_hsp,  // only the max length is
  non_hsp,
};

RoaHspKind roa_hsp_kind(const RoaRecord& roa);

enum class RovStatus : std::uint8_t {
  not_found,
  valid,
  invalid_length,
  invalid_origin,
  invalid_both,
};

std::string_view to_string(RovStatus s);
std::string_view to_string(RoaHspKind k);

/// Covering-ROA index; built once per snapshot, queries are pure.
class RoaIndex {
 public:
  explicit RoaIndex(std::span<const RoaRecord> roas);

  std::vector<const RoaRecord*> covering(const Prefix& p) const;

  /// Four-way origin validation. A prefix is InvalidBoth only when every
  /// covering ROA fails both the length and the origin condition.
  RovStatus validate(const Prefix& prefix, std::uint32_t origin) const;

  std::size_t size() const { return roas_.size(); }

 private:
  std::vector<RoaRecord> roas_;
  PrefixTrie<std::size_t> trie_;
};

// CSV columns: prefix,max_length,asn,date ("AS64496" or bare number).
std::vector<RoaRecord> load_roa_csv(std::istream& in,
                                    std::uint64_t* malformed = nullptr);

struct RpslParseResult {
  std::vector<IrrRouteObject> objects;
  std::uint64_t skipped_no_origin = 0;
  std::uint64_t malformed = 0;
};

/// Extract route/route6 + origin pairs from an RPSL dump (RFC 2622 object
/// syntax); other object classes are ignored.
RpslParseResult parse_rpsl(std::istream& in, std::string_view default_source,
                           std::string snapshot_date);

enum class OriginAttribution : std::uint8_t {
  bgp_only,
  irr_only,
  rpki_only,
  multiple,
};

std::string_view to_string(OriginAttribution a);

/// Each origin ASN mapped to the dataset(s) it appears in; the RPKI set must
/// be built from explicit HSP ROAs only.
std::map<std::uint32_t, OriginAttribution> attribute_origins(
    const std::set<std::uint32_t>& bgp_origins,
    const std::set<std::uint32_t>& irr_origins,
    const std::set<std::uint32_t>& rpki_explicit_origins);

enum class AnchorDataset : std::uint8_t {
  collectors,
  irr,
  rpki,
  aggregated,  // inferred from on-path aggregation only
  multiple,
};

std::string_view to_string(AnchorDataset d);

std::map<Prefix, AnchorDataset> anchor_dataset_attribution(
    const std::set<Prefix>& collector_anchors,
    const std::set<Prefix>& irr_anchors,
    const std::set<Prefix>& rpki_explicit_anchors,
    const std::set<Prefix>& aggregated_anchors);

}  // namespace hsp
