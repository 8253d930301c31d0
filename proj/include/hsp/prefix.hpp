#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hsp {

enum class Family : std::uint8_t { v4, v6 };

constexpr int max_prefix_length(Family f) {
  return f == Family::v4 ? 32 : 128;
}

// Acceptability boundary: anything more specific is hyper-specific.
constexpr int hsp_boundary(Family f) {
  return f == Family::v4 ? 24 : 48;
}

using AddrBytes = std::array<std::uint8_t, 16>;  // network byte order; v4 uses [0..3]

struct IpAddress {
  Family family = Family::v4;
  AddrBytes bytes{};

  auto operator<=>(const IpAddress&) const = default;
};

std::optional<IpAddress> parse_ip(std::string_view text);
std::string to_string(const IpAddress& a);

/// A CIDR prefix in canonical form: every bit past `length` is zero.
struct Prefix {
  Family family = Family::v4;
  AddrBytes bits{};
  std::uint8_t length = 0;

  auto operator<=>(const Prefix&) const = default;

  IpAddress address() const { return IpAddress{family, bits}; }
};

enum class PrefixParseError {
  malformed_address,
  length_out_of_range,
  host_bits_set,
};

// Strict "addr/len" parser; rejects host bits set past the mask.
std::optional<Prefix> parse_prefix(std::string_view text,
                                   PrefixParseError* err = nullptr);

// Zeroes host bits instead of rejecting; reports whether any were set.
// Returns nullopt only for out-of-range lengths.
std::optional<Prefix> make_canonical(Family family, const AddrBytes& raw,
                                     int length, bool* truncated = nullptr);

std::string to_string(const Prefix& p);

bool bit_at(const AddrBytes& bytes, int index);

bool is_hyper_specific(const Prefix& p);

// True iff p's address space is strictly contained in q's.
bool is_more_specific_of(const Prefix& p, const Prefix& q);

// Covering /24 (v4) or /48 (v6) of a hyper-specific prefix.
Prefix anchor_of(const Prefix& p);

}  // namespace hsp
