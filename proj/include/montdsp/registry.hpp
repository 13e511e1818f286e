#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "montdsp/karatsuba.hpp"
#include "montdsp/oup.hpp"
#include "montdsp/row_parallel.hpp"
#include "montdsp/row_serial.hpp"

namespace montdsp {

/// Unknown design id, unsupported word size or inconsistent options.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::array<std::string_view, 6> kDesignIds = {"rs", "rs-bram", "rp", "oup", "kara32", "kara64"};

struct DesignConfig {
  std::string id;
  unsigned word = 0;
  DspMode mode = DspMode::Forced;

  std::string label() const {
    std::string l = id + "-" + std::to_string(word);
    if (id.starts_with("kara")) l += "-" + std::string(to_string(mode));
    return l;
  }
};

/// Every (design, word) pair the models support; Karatsuba in forced mode.
inline std::vector<DesignConfig> all_configurations() {
  std::vector<DesignConfig> out;
  for (std::string_view id : {"rs", "rs-bram", "rp", "oup"}) {
    for (unsigned w : {24U, 32U, 64U}) out.push_back({std::string(id), w, DspMode::Forced});
  }
  out.push_back({"kara32", 32, DspMode::Forced});
  out.push_back({"kara64", 64, DspMode::Forced});
  return out;
}

using OperandPair = std::pair<Int384, Int384>;

struct BatchResult {
  std::vector<Int384> results;
  std::uint64_t cycles = 0;  // from first input cycle to last output cycle
};

/// Word-size independent handle on one design instance. Operands and
/// results are plain 384-bit integers in the Montgomery domain.
class AnyDesign {
 public:
  virtual ~AnyDesign() = default;
  virtual const DesignConfig& config() const = 0;
  virtual DesignReport report(double frequency_hz) const = 0;
  virtual BatchResult run_batch(const std::vector<OperandPair>& ops) = 0;
  virtual Int384 reference(const Int384& a, const Int384& b) const = 0;
  virtual Int384 modulus() const = 0;

  Int384 run(const Int384& a, const Int384& b, std::uint64_t& cycles) {
    auto r = run_batch({{a, b}});
    cycles = r.cycles;
    return r.results.front();
  }
};

namespace detail {

template <unsigned W, typename Design>
class BlockingAdapter final : public AnyDesign {
 public:
  template <typename... Args>
  explicit BlockingAdapter(DesignConfig cfg, Args&&... args) : cfg_(std::move(cfg)), design_(std::forward<Args>(args)...) {}

  const DesignConfig& config() const override { return cfg_; }
  DesignReport report(double f) const override { return design_.report(f); }
  Int384 reference(const Int384& a, const Int384& b) const override { return montmul<W>(a, b, bls12_381<W>()); }
  Int384 modulus() const override { return bls12_381<W>().p; }

  BatchResult run_batch(const std::vector<OperandPair>& ops) override {
    BatchResult out;
    out.results.reserve(ops.size());
    for (const auto& [a, b] : ops) {
      auto r = design_.run_blocking(split_words<W>(a), split_words<W>(b));
      out.results.push_back(join_words(r.result));
      out.cycles += r.cycles;
    }
    return out;
  }

 private:
  DesignConfig cfg_;
  Design design_;
};

template <unsigned W>
class PipelineAdapter final : public AnyDesign {
 public:
  explicit PipelineAdapter(DesignConfig cfg) : cfg_(std::move(cfg)) {}

  const DesignConfig& config() const override { return cfg_; }
  DesignReport report(double f) const override { return pipe_.report(f); }
  Int384 reference(const Int384& a, const Int384& b) const override { return montmul<W>(a, b, bls12_381<W>()); }
  Int384 modulus() const override { return bls12_381<W>().p; }

  // Feeds whenever stage 0 is free and collects results in order.
  BatchResult run_batch(const std::vector<OperandPair>& ops) override {
    BatchResult out;
    out.results.reserve(ops.size());
    std::size_t fed = 0;
    std::uint64_t cycles = 0;
    while (out.results.size() < ops.size()) {
      if (fed < ops.size() && pipe_.can_accept()) {
        pipe_.feed(split_words<W>(ops[fed].first), split_words<W>(ops[fed].second));
        ++fed;
      }
      ++cycles;
      if (auto r = pipe_.tick()) out.results.push_back(join_words(*r));
    }
    out.cycles = cycles;
    return out;
  }

 private:
  DesignConfig cfg_;
  OuterUnrolledPipeline<W> pipe_;
};

template <unsigned W>
std::unique_ptr<AnyDesign> make_for_word(const DesignConfig& cfg) {
  if (cfg.id == "rs") return std::make_unique<BlockingAdapter<W, RowSerialDesign<W>>>(cfg, TStorageKind::Lutram);
  if (cfg.id == "rs-bram") return std::make_unique<BlockingAdapter<W, RowSerialDesign<W>>>(cfg, TStorageKind::Bram);
  if (cfg.id == "rp") return std::make_unique<BlockingAdapter<W, RowParallelDesign<W>>>(cfg);
  if (cfg.id == "oup") return std::make_unique<PipelineAdapter<W>>(cfg);
  if constexpr (W == 32 || W == 64) {
    if (cfg.id == (W == 32 ? "kara32" : "kara64")) {
      return std::make_unique<BlockingAdapter<W, KaratsubaCiosDesign<W>>>(cfg, cfg.mode);
    }
  }
  return nullptr;
}

}  // namespace detail

inline DspMode parse_dsp_mode(std::string_view s) {
  if (s == "forced") return DspMode::Forced;
  if (s == "auto") return DspMode::Auto;
  throw UsageError("unknown dsp mode '" + std::string(s) + "' (expected forced or auto)");
}

/// Builds a design by id. Throws UsageError for unknown ids, unsupported
/// word sizes and Karatsuba ids paired with the wrong word size.
inline std::unique_ptr<AnyDesign> make_design(const DesignConfig& cfg) {
  if (std::find(kDesignIds.begin(), kDesignIds.end(), cfg.id) == kDesignIds.end()) {
    throw UsageError("unknown design '" + cfg.id + "'");
  }
  std::unique_ptr<AnyDesign> d;
  switch (cfg.word) {
    case 24: d = detail::make_for_word<24>(cfg); break;
    case 32: d = detail::make_for_word<32>(cfg); break;
    case 64: d = detail::make_for_word<64>(cfg); break;
    default: throw UsageError("unsupported word size " + std::to_string(cfg.word) + " (expected 24, 32 or 64)");
  }
  if (!d) throw UsageError("design '" + cfg.id + "' is not available at word size " + std::to_string(cfg.word));
  return d;
}

}  // namespace montdsp
