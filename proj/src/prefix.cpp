#include "hsp/prefix.hpp"

#include <arpa/inet.h>

#include <charconv>
#include <cstring>
#include <stdexcept>

namespace hsp {

std::optional<IpAddress> parse_ip(std::string_view text) {
  std::string buf(text);
  IpAddress out;
  if (text.find(':') != std::string_view::npos) {
    out.family = Family::v6;
    if (inet_pton(AF_INET6, buf.c_str(), out.bytes.data()) != 1)
      return std::nullopt;
  } else {
    out.family = Family::v4;
    if (inet_pton(AF_INET, buf.c_str(), out.bytes.data()) != 1)
      return std::nullopt;
  }
  return out;
}

std::string to_string(const IpAddress& a) {
  char buf[INET6_ADDRSTRLEN] = {};
  if (a.family == Family::v4)
    inet_ntop(AF_INET, a.bytes.data(), buf, sizeof(buf));
  else
    inet_ntop(AF_INET6, a.bytes.data(), buf, sizeof(buf));
  return buf;
}

bool bit_at(const AddrBytes& bytes, int index) {
  return (bytes[static_cast<std::size_t>(index) / 8] >> (7 - index % 8)) & 1u;
}

namespace {

// True if any bit in [length, max) is set.
bool has_host_bits(const AddrBytes& bytes, int length, int max_bits) {
  for (int i = length; i < max_bits; ++i)
    if (bit_at(bytes, i)) return true;
  return false;
}

void clear_host_bits(AddrBytes& bytes, int length) {
  int full = length / 8;
  int rem = length % 8;
  if (rem != 0) {
    bytes[static_cast<std::size_t>(full)] &=
        static_cast<std::uint8_t>(0xFFu << (8 - rem));
    ++full;
  }
  for (int i = full; i < 16; ++i) bytes[static_cast<std::size_t>(i)] = 0;
}

}  // namespace

std::optional<Prefix> parse_prefix(std::string_view text, PrefixParseError* err) {
  auto fail = [&](PrefixParseError e) -> std::optional<Prefix> {
    if (err) *err = e;
    return std::nullopt;
  };
  auto slash = text.rfind('/');
  if (slash == std::string_view::npos)
    return fail(PrefixParseError::malformed_address);
  auto addr = parse_ip(text.substr(0, slash));
  if (!addr) return fail(PrefixParseError::malformed_address);
  int length = -1;
  auto len_str = text.substr(slash + 1);
  auto [ptr, ec] =
      std::from_chars(len_str.data(), len_str.data() + len_str.size(), length);
  if (ec != std::errc{} || ptr != len_str.data() + len_str.size())
    return fail(PrefixParseError::malformed_address);
  if (length < 0 || length > max_prefix_length(addr->family))
    return fail(PrefixParseError::length_out_of_range);
  int max_bits = max_prefix_length(addr->family);
  if (has_host_bits(addr->bytes, length, max_bits))
    return fail(PrefixParseError::host_bits_set);
  return Prefix{addr->family, addr->bytes, static_cast<std::uint8_t>(length)};
}

std::optional<Prefix> make_canonical(Family family, const AddrBytes& raw,
                                     int length, bool* truncated) {
  if (length < 0 || length > max_prefix_length(family)) return std::nullopt;
  Prefix p{family, raw, static_cast<std::uint8_t>(length)};
  bool had_host_bits = has_host_bits(p.bits, length, max_prefix_length(family));
  if (had_host_bits) clear_host_bits(p.bits, length);
  if (truncated) *truncated = had_host_bits;
  return p;
}

std::string to_string(const Prefix& p) {
  return to_string(p.address()) + "/" + std::to_string(p.length);
}

bool is_hyper_specific(const Prefix& p) {
  return p.length > hsp_boundary(p.family);
}

bool is_more_specific_of(const Prefix& p, const Prefix& q) {
  if (p.family != q.family)
    throw std::invalid_argument("is_more_specific_of: family mismatch");
  if (q.length >= p.length) return false;
  for (int i = 0; i < q.length; ++i)
    if (bit_at(p.bits, i) != bit_at(q.bits, i)) return false;
  return true;
}

Prefix anchor_of(const Prefix& p) {
  if (!is_hyper_specific(p))
    throw std::invalid_argument("anchor_of: prefix is not hyper-specific");
  Prefix anchor = p;
  anchor.length = static_cast<std::uint8_t>(hsp_boundary(p.family));
  clear_host_bits(anchor.bits, anchor.length);
  return anchor;
}

}  // namespace hsp
