#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "montdsp/cios.hpp"

namespace montdsp {

enum class TStorageKind { Lutram, Bram };

/// Cycles from presenting a read address to having the word usable as a
/// unit operand. LUTRAM: one output register. BRAM: address register, the
/// two-cycle read of the memory primitive and the >>X word-select register.
constexpr unsigned read_latency(TStorageKind kind) { return kind == TStorageKind::Lutram ? 1 : 4; }

/// Word-addressed partial-product memory with a hazard scoreboard. A write
/// issued on cycle c commits at the end of c; a read issued on c + 1 can be
/// used from c + 1 + R. Reading a word before that throws, which catches
/// any schedule that would consume a stale value.
class TStorage {
 public:
  TStorage(std::size_t words, unsigned read_latency) : data_(words), ready_(words), read_latency_(read_latency) {}

  std::size_t size() const { return data_.size(); }
  unsigned latency() const { return read_latency_; }

  void write(std::size_t idx, std::uint64_t value, std::uint64_t cycle) {
    data_.at(idx) = value;
    ready_.at(idx) = cycle + 1 + read_latency_;
  }

  /// Value for an operand issued on `cycle`.
  std::uint64_t read(std::size_t idx, std::uint64_t cycle) const {
    if (ready_.at(idx) > cycle) {
      throw ContractViolation("t-storage hazard: word " + std::to_string(idx) + " used on cycle " +
                              std::to_string(cycle) + ", ready on " + std::to_string(ready_[idx]));
    }
    return data_[idx];
  }

  /// Untimed access for loading/unloading and inspection.
  std::uint64_t peek(std::size_t idx) const { return data_.at(idx); }

  void clear(std::uint64_t cycle) {
    for (std::size_t i = 0; i < data_.size(); ++i) write(i, 0, cycle);
  }

 private:
  std::vector<std::uint64_t> data_;
  std::vector<std::uint64_t> ready_;
  unsigned read_latency_;
};

}  // namespace montdsp
