#pragma once

#include <vector>

#include "montdsp/cios.hpp"
#include "montdsp/oracle.hpp"
#include "montdsp/params.hpp"
#include "montdsp/random.hpp"

namespace montdsp::testing {

inline const oracle::Field& bls_oracle() {
  static const oracle::Field f;
  return f;
}

inline Int384 bls_p() { return Int384::from_hex(kBls12381ModulusHex); }

// Operand values that sit on every boundary the < 2p contract cares about.
inline std::vector<Int384> edge_values() {
  const Int384 p = bls_p();
  const Int384 two_p = p + p;
  return {Int384{0}, Int384{1}, p - Int384{1}, p, p + Int384{1}, two_p - Int384{1}};
}

}  // namespace montdsp::testing
