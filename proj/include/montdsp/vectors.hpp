#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "montdsp/int384.hpp"

namespace montdsp {

/// One golden record: Montgomery-domain operands, their Montgomery product
/// and the product's field value, all produced by the reference oracle.
struct TestVector {
  Int384 a;
  Int384 b;
  Int384 expected_mont;
  Int384 expected_field;
};

struct VectorFileHeader {
  std::uint64_t seed = 0;
  std::uint64_t count = 0;
  std::uint64_t modulus_digest = 0;
};

struct ParseIssue {
  std::size_t line = 0;
  std::string message;
};

struct VectorFile {
  VectorFileHeader header;
  std::vector<TestVector> vectors;
  std::vector<std::size_t> lines;  // source line of each vector
  std::vector<ParseIssue> issues;
};

/// FNV-1a (64-bit) over the 48-byte little-endian encoding of the modulus.
inline std::uint64_t modulus_digest(const Int384& p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t byte : p.to_bytes_le()) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline void write_vector_header(std::ostream& os, const VectorFileHeader& h) {
  std::ostringstream digest;
  digest << std::hex;
  digest.width(16);
  digest.fill('0');
  digest << h.modulus_digest;
  os << "# montdsp test vectors\n"
     << "# seed=" << h.seed << "\n"
     << "# n=" << h.count << "\n"
     << "# modulus_fnv1a64=" << digest.str() << "\n"
     << "# columns: a,b,expected_mont,expected_field (a, b in the Montgomery domain)\n";
}

inline void write_vector(std::ostream& os, const TestVector& v) {
  os << v.a.to_hex() << ',' << v.b.to_hex() << ',' << v.expected_mont.to_hex() << ',' << v.expected_field.to_hex()
     << '\n';
}

namespace detail {

inline bool parse_field(std::string_view text, Int384& out, std::string& error) {
  if (text.size() != 96) {
    error = "expected 96 hex digits, got " + std::to_string(text.size());
    return false;
  }
  for (char c : text) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
      error = "invalid character '" + std::string(1, c) + "' (lowercase hex only)";
      return false;
    }
  }
  out = Int384::from_hex(text);
  return true;
}

inline void parse_header_line(std::string_view line, VectorFileHeader& h) {
  auto value_of = [&](std::string_view key, std::uint64_t& dst, int base) {
    if (line.starts_with(key)) dst = std::stoull(std::string(line.substr(key.size())), nullptr, base);
  };
  if (line.starts_with("# ")) line.remove_prefix(2);
  value_of("seed=", h.seed, 10);
  value_of("n=", h.count, 10);
  value_of("modulus_fnv1a64=", h.modulus_digest, 16);
}

}  // namespace detail

/// Reads a vector file. Malformed records are collected as issues with
/// their line numbers; parsing carries on with the next line.
inline VectorFile read_vectors(std::istream& is) {
  VectorFile vf;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      vf.issues.push_back({line_no, "CRLF line ending"});
      continue;
    }
    if (line.empty()) continue;
    if (line.front() == '#') {
      try {
        detail::parse_header_line(line, vf.header);
      } catch (const std::exception&) {
        vf.issues.push_back({line_no, "malformed header line"});
      }
      continue;
    }
    std::vector<std::string_view> parts;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      parts.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (parts.size() != 4) {
      vf.issues.push_back({line_no, "expected 4 comma-separated fields, got " + std::to_string(parts.size())});
      continue;
    }
    TestVector v;
    Int384* dst[4] = {&v.a, &v.b, &v.expected_mont, &v.expected_field};
    static constexpr const char* kNames[4] = {"a", "b", "expected_mont", "expected_field"};
    bool ok = true;
    for (int k = 0; k < 4 && ok; ++k) {
      std::string error;
      if (!detail::parse_field(parts[k], *dst[k], error)) {
        vf.issues.push_back({line_no, std::string(kNames[k]) + ": " + error});
        ok = false;
      }
    }
    if (ok) {
      vf.vectors.push_back(v);
      vf.lines.push_back(line_no);
    }
  }
  return vf;
}

inline VectorFile read_vectors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open vector file '" + path + "'");
  return read_vectors(in);
}

}  // namespace montdsp
