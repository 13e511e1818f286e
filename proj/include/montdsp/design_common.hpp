#pragma once

#include <cstdint>
#include <string>

#include "montdsp/cios.hpp"

namespace montdsp {

template <unsigned W>
struct RunResult {
  FieldElement<W> result;
  std::uint64_t cycles = 0;
};

/// Latency, throughput and DSP accounting of one design configuration.
struct DesignReport {
  std::string design;
  unsigned word_bits = 0;
  std::uint64_t first_result_latency = 0;  // cycles
  std::uint64_t pipeline_interval = 0;     // cycles; equals the latency for blocking designs
  unsigned dsp_count = 0;
  double assumed_frequency_hz = 0.0;

  double ideal_throughput() const {
    return pipeline_interval == 0 ? 0.0 : assumed_frequency_hz / static_cast<double>(pipeline_interval);
  }
};

/// Operand contract shared by all designs: both inputs below 2p, so that
/// results can be chained without a final subtraction.
template <unsigned W>
void require_operands_below_2p(const FieldElement<W>& a, const FieldElement<W>& b, const MontgomeryParams<W>& params) {
  if (join_words(a) >= params.two_p || join_words(b) >= params.two_p) {
    throw ContractViolation("design operands must be below 2p");
  }
}

}  // namespace montdsp
