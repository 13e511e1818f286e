#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "montdsp/oracle.hpp"
#include "montdsp/random.hpp"
#include "montdsp/reference.hpp"
#include "montdsp/registry.hpp"
#include "montdsp/vectors.hpp"

namespace montdsp {

// ---------------------------------------------------------------- vecgen

/// Generates n golden vectors for BLS12-381: operands uniform in [0, p),
/// expected values from the GMP oracle only.
inline VectorFile generate_vectors(std::uint64_t seed, std::uint64_t n) {
  if (n == 0) throw UsageError("vector count must be at least 1");
  const oracle::Field field;
  const Int384 p = oracle::from_mpz(field.p());
  Int384Sampler sampler(seed);
  VectorFile vf;
  vf.header = {seed, n, modulus_digest(p)};
  vf.vectors.reserve(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    TestVector v;
    v.a = sampler.below(p);
    v.b = sampler.below(p);
    v.expected_mont = field.mont_product(v.a, v.b);
    v.expected_field = field.to_field(v.expected_mont);
    vf.vectors.push_back(v);
  }
  return vf;
}

inline void write_vectors(std::ostream& os, const VectorFile& vf) {
  write_vector_header(os, vf.header);
  for (const auto& v : vf.vectors) write_vector(os, v);
}

inline void write_vectors(const std::string& path, const VectorFile& vf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write vector file '" + path + "'");
  write_vectors(out, vf);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

// ---------------------------------------------------------------- verify

/// Field value of a Montgomery-domain residue below R, via mont-core.
inline Int384 mont_to_field(const Int384& x) {
  const auto& params = bls12_381<64>();
  return join_words(from_montgomery<64>(split_words<64>(x), params));
}

struct Mismatch {
  std::size_t line = 0;
  bool mont = false;
  bool field = false;
};

struct VerifyReport {
  std::string design;
  std::size_t checked = 0;
  std::size_t mont_mismatches = 0;
  std::size_t field_mismatches = 0;
  std::vector<Mismatch> mismatches;  // first few, for diagnostics
  std::vector<ParseIssue> issues;    // malformed or unusable records
  std::uint64_t cycles = 0;

  bool pass() const { return field_mismatches == 0 && issues.empty(); }
};

/// Runs every vector through the design and double-checks the output: first
/// against expected_mont, then, on a mismatch, both values converted to the
/// field domain. Outputs differing by a multiple of p count as Montgomery
/// mismatches only.
inline VerifyReport verify(AnyDesign& design, const VectorFile& vf, std::size_t keep_mismatches = 20) {
  VerifyReport rep;
  rep.design = design.config().label();
  rep.issues = vf.issues;
  const Int384 p = design.modulus();
  if (vf.header.modulus_digest != 0 && vf.header.modulus_digest != modulus_digest(p)) {
    rep.issues.push_back({0, "modulus digest in header does not match BLS12-381"});
  }

  const Int384 two_p = p + p;
  std::vector<OperandPair> ops;
  std::vector<std::size_t> index;
  for (std::size_t k = 0; k < vf.vectors.size(); ++k) {
    const auto& v = vf.vectors[k];
    if (v.a >= two_p || v.b >= two_p) {
      rep.issues.push_back({vf.lines.empty() ? k + 1 : vf.lines[k], "operand not below 2p"});
      continue;
    }
    ops.emplace_back(v.a, v.b);
    index.push_back(k);
  }

  const BatchResult out = design.run_batch(ops);
  rep.cycles = out.cycles;
  for (std::size_t n = 0; n < ops.size(); ++n) {
    const auto& v = vf.vectors[index[n]];
    const Int384& got = out.results[n];
    ++rep.checked;
    if (got == v.expected_mont) continue;
    Mismatch m;
    m.line = vf.lines.empty() ? index[n] + 1 : vf.lines[index[n]];
    m.mont = true;
    ++rep.mont_mismatches;
    const Int384 got_field = mont_to_field(got);
    if (got_field != mont_to_field(v.expected_mont) || got_field != v.expected_field) {
      m.field = true;
      ++rep.field_mismatches;
    }
    if (rep.mismatches.size() < keep_mismatches) rep.mismatches.push_back(m);
  }
  return rep;
}

// ---------------------------------------------------------------- bench

struct BenchConfig {
  DesignConfig design;
  double frequency_hz = 0.0;
  std::vector<std::size_t> batch_sizes = {100000, 200000, 250000, 500000, 1000000};
  unsigned iterations = 10;
  std::size_t warmup_batches = 100;
  std::size_t warmup_size = 10000;
  std::uint64_t seed = 1;
};

struct BatchStats {
  std::size_t size = 0;
  double mean_cycles = 0.0;
  double mean_wall_seconds = 0.0;
  double simulated_ops_per_second = 0.0;  // size * f / mean cycles
  double wall_ops_per_second = 0.0;
};

struct BenchReport {
  std::string design;
  double frequency_hz = 0.0;
  std::vector<BatchStats> batches;
  double grand_mean_simulated_ops = 0.0;
  double grand_mean_wall_ops = 0.0;
  std::size_t mismatches = 0;  // results differing from the mont-core reference mod p
};

/// Runs warm-up batches, then `iterations` runs of every batch size with
/// fresh design instances, averaging cycles and wall-clock per size. When
/// `pool` is empty operands are drawn from the seeded sampler; otherwise the
/// pool must hold at least the largest batch.
inline BenchReport bench(const BenchConfig& cfg, const std::vector<OperandPair>& pool = {}) {
  if (cfg.batch_sizes.empty()) throw UsageError("at least one batch size is required");
  if (cfg.iterations == 0) throw UsageError("iterations must be at least 1");
  if (cfg.frequency_hz <= 0) throw UsageError("frequency must be positive");
  std::size_t largest = std::max(cfg.warmup_size, *std::max_element(cfg.batch_sizes.begin(), cfg.batch_sizes.end()));
  if (cfg.warmup_batches == 0) largest = *std::max_element(cfg.batch_sizes.begin(), cfg.batch_sizes.end());

  std::vector<OperandPair> ops = pool;
  if (ops.empty()) {
    Int384Sampler sampler(cfg.seed);
    const Int384 p = bls12_381<64>().p;
    ops.reserve(largest);
    for (std::size_t k = 0; k < largest; ++k) {
      Int384 a = sampler.below(p);
      Int384 b = sampler.below(p);
      ops.emplace_back(a, b);
    }
  } else if (ops.size() < largest) {
    throw UsageError("insufficient vectors: need " + std::to_string(largest) + ", have " + std::to_string(ops.size()));
  }

  BenchReport rep;
  rep.design = cfg.design.label();
  rep.frequency_hz = cfg.frequency_hz;

  auto run = [&](std::size_t n, std::uint64_t& cycles, double& seconds) {
    auto design = make_design(cfg.design);
    const std::vector<OperandPair> slice(ops.begin(), ops.begin() + static_cast<std::ptrdiff_t>(n));
    const auto t0 = std::chrono::steady_clock::now();
    const BatchResult r = design->run_batch(slice);
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    cycles = r.cycles;
    for (std::size_t k = 0; k < n; ++k) {
      if (mont_to_field(r.results[k]) != mont_to_field(design->reference(slice[k].first, slice[k].second))) {
        ++rep.mismatches;
      }
    }
  };

  for (std::size_t w = 0; w < cfg.warmup_batches; ++w) {
    std::uint64_t c = 0;
    double s = 0;
    run(cfg.warmup_size, c, s);
  }

  for (std::size_t size : cfg.batch_sizes) {
    if (size == 0) throw UsageError("batch sizes must be positive");
    BatchStats st;
    st.size = size;
    for (unsigned it = 0; it < cfg.iterations; ++it) {
      std::uint64_t c = 0;
      double s = 0;
      run(size, c, s);
      st.mean_cycles += static_cast<double>(c);
      st.mean_wall_seconds += s;
    }
    st.mean_cycles /= cfg.iterations;
    st.mean_wall_seconds /= cfg.iterations;
    st.simulated_ops_per_second = static_cast<double>(size) * cfg.frequency_hz / st.mean_cycles;
    st.wall_ops_per_second = st.mean_wall_seconds > 0 ? static_cast<double>(size) / st.mean_wall_seconds : 0.0;
    rep.batches.push_back(st);
  }
  for (const auto& b : rep.batches) {
    rep.grand_mean_simulated_ops += b.simulated_ops_per_second;
    rep.grand_mean_wall_ops += b.wall_ops_per_second;
  }
  rep.grand_mean_simulated_ops /= static_cast<double>(rep.batches.size());
  rep.grand_mean_wall_ops /= static_cast<double>(rep.batches.size());
  return rep;
}

// ---------------------------------------------------------------- report

enum class Verdict { Pass, Deviation, Flagged, Fail };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Deviation: return "DEVIATION";
    case Verdict::Flagged: return "FLAGGED";
    case Verdict::Fail: return "FAIL";
  }
  return "?";
}

/// One compared value. `allowed` names the rule the verdict applied.
struct ReportCell {
  std::string table;
  std::string item;
  unsigned word = 0;
  std::string metric;
  double model = 0.0;
  double reference = 0.0;
  double ratio = 0.0;  // throughput cells: measured / ideal
  std::string allowed;
  Verdict verdict = Verdict::Fail;
  std::string note;

  double delta_pct() const { return reference == 0 ? 0.0 : 100.0 * (model - reference) / reference; }
};

struct Report {
  std::vector<ReportCell> cells;

  bool pass() const {
    return std::none_of(cells.begin(), cells.end(), [](const ReportCell& c) { return c.verdict == Verdict::Fail; });
  }
  std::size_t count(Verdict v) const {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [v](const ReportCell& c) { return c.verdict == v; }));
  }
};

namespace detail {

// Exact match, or a documented deviation within `tolerance` (relative);
// with tolerance 0 a documented cell is only flagged.
inline ReportCell compare_cell(std::string table, std::string item, unsigned word, std::string metric, double model,
                               double reference, double tolerance = 0.0) {
  ReportCell c{std::move(table), std::move(item), word, std::move(metric), model, reference, 0.0, "exact",
               Verdict::Fail, ""};
  if (model == reference) {
    c.verdict = Verdict::Pass;
    return c;
  }
  const auto dev = reference::find_deviation(c.metric, c.item, word);
  if (!dev) return c;
  c.note = std::string(dev->reason);
  if (tolerance > 0) {
    c.allowed = "documented <=" + std::to_string(static_cast<int>(tolerance * 100)) + "%";
    c.verdict = std::abs(model - reference) <= tolerance * reference ? Verdict::Deviation : Verdict::Fail;
  } else {
    c.allowed = "documented delta";
    c.verdict = Verdict::Flagged;
  }
  return c;
}

template <typename Unit, typename In>
unsigned measure_latency(Unit& unit, const In& in) {
  auto out = unit.step(in);
  unsigned cycles = 1;
  while (!out.valid) {
    out = unit.step(In{});
    if (++cycles > 10000) throw std::logic_error("unit never produced a result");
  }
  return cycles;
}

template <unsigned W>
std::array<unsigned, 5> measured_unit_latencies() {
  std::array<unsigned, 5> l{};
  {
    MulUnit<W> u;
    l[0] = measure_latency(u, WordOperands{true, 1, 1, 0});
  }
  {
    MaddUnit<W> u;
    l[1] = measure_latency(u, WordOperands{true, 1, 1, 1});
  }
  {
    Madd384Unit<W> u;
    typename Madd384Unit<W>::Input in;
    in.valid = true;
    l[2] = measure_latency(u, in);
  }
  {
    MaddCarryUnit<W> u;
    l[3] = measure_latency(u, WordOperands{true, 1, 1, 1});
  }
  {
    Add384Unit u;
    l[4] = measure_latency(u, Add384Unit::Input{true, Int384{1}, Int384{1}});
  }
  return l;
}

template <unsigned W>
std::array<unsigned, 5> unit_dsps() {
  return {MulUnit<W>::dsp_count(), MaddUnit<W>::dsp_count(), Madd384Unit<W>::dsp_count(),
          MaddCarryUnit<W>::dsp_count(), Add384Unit::dsp_count()};
}

template <unsigned W>
unsigned measured_karatsuba_unit_latency() {
  KaratsubaUnit<W> u;
  auto out = u.step(true, 3, 5);
  unsigned cycles = 1;
  while (!out.valid) {
    out = u.step(false, 0, 0);
    ++cycles;
  }
  return cycles;
}

/// First-result latency and result interval measured by simulation.
struct MeasuredTiming {
  std::uint64_t first = 0;
  std::uint64_t interval = 0;
};

inline MeasuredTiming measure_design(AnyDesign& d) {
  Int384Sampler sampler(7);
  const Int384 p = d.modulus();
  std::vector<OperandPair> ops;
  for (int k = 0; k < 3; ++k) ops.emplace_back(sampler.below(p), sampler.below(p));
  std::uint64_t one = 0;
  d.run(ops[0].first, ops[0].second, one);
  const auto three = make_design(d.config())->run_batch(ops);
  return {one, (three.cycles - one) / 2};
}

}  // namespace detail

/// Builds the comparison of models against the published tables: units
/// (when `include_units`), the listed designs and their throughput bound.
inline Report build_report(const std::vector<DesignConfig>& designs, bool include_units) {
  Report rep;
  if (include_units) {
    const std::array<std::array<unsigned, 5>, 3> lat = {detail::measured_unit_latencies<24>(),
                                                         detail::measured_unit_latencies<32>(),
                                                         detail::measured_unit_latencies<64>()};
    const std::array<std::array<unsigned, 5>, 3> dsp = {detail::unit_dsps<24>(), detail::unit_dsps<32>(),
                                                        detail::unit_dsps<64>()};
    for (std::size_t u = 0; u < reference::kUnits.size(); ++u) {
      const auto& row = reference::kUnits[u];
      for (std::size_t w = 0; w < 3; ++w) {
        const unsigned word = reference::kWords[w];
        rep.cells.push_back(detail::compare_cell("units", std::string(row.unit), word, "latency", lat[w][u],
                                                 row.latency[w]));
        rep.cells.push_back(
            detail::compare_cell("units", std::string(row.unit), word, "dsps", dsp[w][u], row.dsps[w]));
      }
    }
    for (const auto& k : reference::kKaratsuba) {
      const bool w32 = k.word == 32;
      const unsigned lat_k = w32 ? detail::measured_karatsuba_unit_latency<32>()
                                 : detail::measured_karatsuba_unit_latency<64>();
      const unsigned forced = w32 ? KaratsubaUnit<32>::dsp_count(DspMode::Forced)
                                  : KaratsubaUnit<64>::dsp_count(DspMode::Forced);
      const unsigned autom = w32 ? KaratsubaUnit<32>::dsp_count(DspMode::Auto)
                                 : KaratsubaUnit<64>::dsp_count(DspMode::Auto);
      rep.cells.push_back(detail::compare_cell("karatsuba", "unit", k.word, "latency", lat_k, k.unit_latency));
      rep.cells.push_back(
          detail::compare_cell("karatsuba", "unit", k.word, "dsps_forced", forced, k.unit_dsps_forced));
      auto c = detail::compare_cell("karatsuba", "unit", k.word, "dsps_auto", autom, k.unit_dsps_auto);
      c.note = "tool-attributed";
      rep.cells.push_back(c);
    }
  }

  for (const auto& cfg : designs) {
    auto d = make_design(cfg);
    const auto t = detail::measure_design(*d);
    const auto model = d->report(0.0);
    if (cfg.id.starts_with("kara")) {
      const auto& k = reference::kKaratsuba[cfg.word == 32 ? 0 : 1];
      rep.cells.push_back(detail::compare_cell("karatsuba", cfg.id, cfg.word, "latency", static_cast<double>(t.first),
                                               k.multiplier_latency, reference::kDocumentedTolerance));
      const bool forced = cfg.mode == DspMode::Forced;
      auto c = detail::compare_cell("karatsuba", cfg.id, cfg.word, forced ? "dsps_forced" : "dsps_auto",
                                    model.dsp_count, forced ? k.multiplier_dsps_forced : k.multiplier_dsps_auto);
      if (!forced) c.note = "tool-attributed";
      rep.cells.push_back(c);
    } else {
      const auto& row = *std::find_if(reference::kDesigns.begin(), reference::kDesigns.end(),
                                      [&](const auto& r) { return r.id == cfg.id; });
      const std::size_t w = reference::word_index(cfg.word);
      rep.cells.push_back(detail::compare_cell("designs", cfg.id, cfg.word, "latency", static_cast<double>(t.first),
                                               row.latency[w], reference::kDocumentedTolerance));
      if (cfg.id == "oup") {
        rep.cells.push_back(detail::compare_cell("designs", cfg.id, cfg.word, "interval",
                                                 static_cast<double>(t.interval), row.interval[w]));
      }
      rep.cells.push_back(
          detail::compare_cell("designs", cfg.id, cfg.word, "dsps", model.dsp_count, row.dsps[w]));
    }

    for (const auto& tr : reference::kThroughput) {
      if (tr.id != cfg.id || tr.word != cfg.word) continue;
      if (!tr.mode.empty() && tr.mode != to_string(cfg.mode)) continue;
      ReportCell c;
      c.table = "throughput";
      c.item = cfg.id;
      c.word = cfg.word;
      c.metric = "mops";
      c.model = tr.mhz / static_cast<double>(t.interval);  // ideal, 10^6 ops/s at the published clock
      c.reference = tr.mops;
      c.ratio = tr.mops / c.model;
      c.allowed = "ratio in [0.70, 1.00]";
      c.verdict = c.ratio >= reference::kThroughputRatioMin && c.ratio <= reference::kThroughputRatioMax
                      ? Verdict::Pass
                      : Verdict::Fail;
      c.note = "measured at " + std::to_string(static_cast<int>(tr.mhz)) + " MHz";
      rep.cells.push_back(c);
    }
  }
  return rep;
}

/// All configurations plus the Karatsuba auto-mode variants.
inline std::vector<DesignConfig> report_configurations() {
  auto cfgs = all_configurations();
  cfgs.push_back({"kara32", 32, DspMode::Auto});
  cfgs.push_back({"kara64", 64, DspMode::Auto});
  return cfgs;
}

}  // namespace montdsp
