#include "hsp/route_record.hpp"

namespace hsp {

std::optional<std::uint32_t> origin_of(std::span<const PathSegment> path) {
  if (path.empty()) return std::nullopt;
  const PathSegment& last = path.back();
  if (last.kind != PathSegment::Kind::sequence || last.asns.empty())
    return std::nullopt;
  return last.asns.back();
}

int hops_of(std::span<const PathSegment> path) {
  int hops = 0;
  bool have_prev = false;
  std::uint32_t prev = 0;
  for (const PathSegment& seg : path) {
    if (seg.kind == PathSegment::Kind::set) {
      if (!seg.asns.empty()) ++hops;
      have_prev = false;
      continue;
    }
    for (std::uint32_t asn : seg.asns) {
      if (have_prev && asn == prev) continue;
      ++hops;
      prev = asn;
      have_prev = true;
    }
  }
  return hops;
}

}  // namespace hsp
