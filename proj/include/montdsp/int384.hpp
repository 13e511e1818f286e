#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace montdsp {

using u128 = unsigned __int128;

// Fixed 384-bit unsigned integer, six 64-bit words, least significant first.
// Arithmetic wraps modulo 2^384; add/sub report the carry/borrow out.
struct Int384 {
  static constexpr unsigned kBits = 384;
  static constexpr unsigned kWords = 6;
  static constexpr std::size_t kBytes = 48;

  std::array<std::uint64_t, kWords> words{};

  constexpr Int384() = default;
  constexpr explicit Int384(std::uint64_t v) : words{v, 0, 0, 0, 0, 0} {}
  constexpr explicit Int384(const std::array<std::uint64_t, kWords>& w) : words(w) {}

  constexpr bool is_zero() const {
    return std::all_of(words.begin(), words.end(), [](std::uint64_t x) { return x == 0; });
  }
  constexpr bool is_odd() const { return (words[0] & 1U) != 0; }

  constexpr bool bit(unsigned i) const { return ((words[i / 64] >> (i % 64)) & 1U) != 0; }

  constexpr void set_bit(unsigned i) { words[i / 64] |= std::uint64_t{1} << (i % 64); }

  constexpr unsigned bit_length() const {
    for (int i = kWords - 1; i >= 0; --i) {
      if (words[i] != 0) {
        return static_cast<unsigned>(i) * 64 + (64 - static_cast<unsigned>(__builtin_clzll(words[i])));
      }
    }
    return 0;
  }

  // Extracts `width` bits (<= 64) starting at bit `lo`.
  constexpr std::uint64_t bits(unsigned lo, unsigned width) const {
    if (width == 0 || lo >= kBits) return 0;
    const unsigned idx = lo / 64;
    const unsigned off = lo % 64;
    u128 chunk = words[idx];
    if (idx + 1 < kWords) chunk |= static_cast<u128>(words[idx + 1]) << 64;
    chunk >>= off;
    const std::uint64_t mask = width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
    return static_cast<std::uint64_t>(chunk) & mask;
  }

  // Overwrites `width` bits (<= 64) at bit `lo` with the low bits of `value`.
  constexpr void set_bits(unsigned lo, unsigned width, std::uint64_t value) {
    for (unsigned k = 0; k < width && lo + k < kBits; ++k) {
      const unsigned pos = lo + k;
      const std::uint64_t m = std::uint64_t{1} << (pos % 64);
      if ((value >> k) & 1U) {
        words[pos / 64] |= m;
      } else {
        words[pos / 64] &= ~m;
      }
    }
  }

  friend constexpr bool operator==(const Int384&, const Int384&) = default;

  friend constexpr std::strong_ordering operator<=>(const Int384& a, const Int384& b) {
    for (int i = kWords - 1; i >= 0; --i) {
      if (a.words[i] != b.words[i]) return a.words[i] <=> b.words[i];
    }
    return std::strong_ordering::equal;
  }

  static constexpr Int384 max() {
    Int384 r;
    r.words.fill(~std::uint64_t{0});
    return r;
  }

  static Int384 from_hex(std::string_view hex);
  std::string to_hex() const;  // always 96 lowercase digits

  static Int384 from_bytes_le(std::span<const std::uint8_t> bytes);
  std::array<std::uint8_t, kBytes> to_bytes_le() const;
};

// r = a + b mod 2^384, returns carry out.
constexpr bool add_into(Int384& r, const Int384& a, const Int384& b) {
  u128 carry = 0;
  for (unsigned i = 0; i < Int384::kWords; ++i) {
    const u128 s = static_cast<u128>(a.words[i]) + b.words[i] + carry;
    r.words[i] = static_cast<std::uint64_t>(s);
    carry = s >> 64;
  }
  return carry != 0;
}

// r = a - b mod 2^384, returns borrow out.
constexpr bool sub_into(Int384& r, const Int384& a, const Int384& b) {
  std::uint64_t borrow = 0;
  for (unsigned i = 0; i < Int384::kWords; ++i) {
    const u128 d = static_cast<u128>(a.words[i]) - b.words[i] - borrow;
    r.words[i] = static_cast<std::uint64_t>(d);
    borrow = static_cast<std::uint64_t>(d >> 64) & 1U;
  }
  return borrow != 0;
}

constexpr Int384 operator+(const Int384& a, const Int384& b) {
  Int384 r;
  add_into(r, a, b);
  return r;
}

constexpr Int384 operator-(const Int384& a, const Int384& b) {
  Int384 r;
  sub_into(r, a, b);
  return r;
}

// Shift left by one bit; returns the bit shifted out of position 383.
constexpr bool shl1(Int384& x) {
  std::uint64_t carry = 0;
  for (unsigned i = 0; i < Int384::kWords; ++i) {
    const std::uint64_t next = x.words[i] >> 63;
    x.words[i] = (x.words[i] << 1) | carry;
    carry = next;
  }
  return carry != 0;
}

// Shift right by one bit, shifting `top` into position 383.
constexpr void shr1(Int384& x, bool top = false) {
  for (unsigned i = 0; i < Int384::kWords; ++i) {
    const std::uint64_t hi = (i + 1 < Int384::kWords) ? (x.words[i + 1] & 1U) : (top ? 1U : 0U);
    x.words[i] = (x.words[i] >> 1) | (hi << 63);
  }
}

namespace detail {
inline int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace detail

inline Int384 Int384::from_hex(std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.empty()) throw std::invalid_argument("empty hex string");
  // Leading zeros are allowed beyond 96 digits; significant digits are not.
  std::size_t first = hex.find_first_not_of('0');
  if (first == std::string_view::npos) return Int384{};
  std::string_view digits = hex.substr(first);
  if (digits.size() > 96) throw std::invalid_argument("hex value exceeds 384 bits");
  Int384 r;
  unsigned pos = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it, pos += 4) {
    const int d = detail::hex_digit(*it);
    if (d < 0) throw std::invalid_argument("invalid hex digit in '" + std::string(hex) + "'");
    r.words[pos / 64] |= static_cast<std::uint64_t>(d) << (pos % 64);
  }
  return r;
}

inline std::string Int384::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(96, '0');
  for (unsigned i = 0; i < 96; ++i) {
    const unsigned pos = (95 - i) * 4;
    out[i] = kDigits[(words[pos / 64] >> (pos % 64)) & 0xF];
  }
  return out;
}

inline Int384 Int384::from_bytes_le(std::span<const std::uint8_t> bytes) {
  if (bytes.size() > kBytes) {
    for (std::size_t i = kBytes; i < bytes.size(); ++i) {
      if (bytes[i] != 0) throw std::invalid_argument("byte encoding exceeds 384 bits");
    }
  }
  Int384 r;
  for (std::size_t i = 0; i < std::min(bytes.size(), kBytes); ++i) {
    r.words[i / 8] |= static_cast<std::uint64_t>(bytes[i]) << (8 * (i % 8));
  }
  return r;
}

inline std::array<std::uint8_t, Int384::kBytes> Int384::to_bytes_le() const {
  std::array<std::uint8_t, kBytes> out{};
  for (std::size_t i = 0; i < kBytes; ++i) {
    out[i] = static_cast<std::uint8_t>(words[i / 8] >> (8 * (i % 8)));
  }
  return out;
}

}  // namespace montdsp
