// montdsp: vector generation, verification, benchmarking and table reports
// for the simulated Montgomery multiplier designs.
//
// Exit codes: 0 all gates pass, 1 verification failure, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "montdsp/harness.hpp"
#include "montdsp/report_format.hpp"

namespace {

using namespace montdsp;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct DesignArgs {
  std::string id;
  unsigned word = 0;
  std::string dsp_mode = "forced";

  DesignConfig config() const { return {id, word, parse_dsp_mode(dsp_mode)}; }
};

void add_design_options(CLI::App& cmd, DesignArgs& args) {
  cmd.add_option("--design", args.id, "Design id")
      ->required()
      ->check(CLI::IsMember({"rs", "rs-bram", "rp", "oup", "kara32", "kara64"}));
  cmd.add_option("--word", args.word, "Word size in bits")->required()->check(CLI::IsMember({24, 32, 64}));
  cmd.add_option("--dsp-mode", args.dsp_mode, "DSP mapping of the Karatsuba datapath")
      ->check(CLI::IsMember({"forced", "auto"}));
}

std::vector<std::size_t> parse_batches(const std::string& csv) {
  std::vector<std::size_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty() || v == 0) throw UsageError("bad batch size '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw UsageError("no batch sizes given");
  return out;
}

// "NxM": N warm-up batches of M operations each.
std::pair<std::size_t, std::size_t> parse_warmup(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x != std::string::npos) {
      std::size_t u1 = 0;
      std::size_t u2 = 0;
      const auto n = std::stoull(text.substr(0, x), &u1);
      const auto m = std::stoull(text.substr(x + 1), &u2);
      if (u1 == x && u2 == text.size() - x - 1) return {n, m};
    }
  } catch (const std::exception&) {
  }
  throw UsageError("warm-up must look like NxM, got '" + text + "'");
}

int run_vecgen(std::uint64_t seed, std::uint64_t count, const std::string& out) {
  const auto vf = generate_vectors(seed, count);
  write_vectors(out, vf);
  std::cout << "wrote " << count << " vectors (seed " << seed << ") to " << out << '\n';
  return kExitPass;
}

int run_verify(const DesignArgs& args, const std::string& path) {
  auto design = make_design(args.config());
  const auto vf = read_vectors(path);
  const auto rep = verify(*design, vf);
  for (const auto& issue : rep.issues) {
    std::cerr << path << ':' << issue.line << ": " << issue.message << '\n';
  }
  // Montgomery-only mismatches are the documented +p slack and only counted.
  for (const auto& m : rep.mismatches) {
    if (m.field) std::cerr << path << ':' << m.line << ": field mismatch\n";
  }
  std::cout << "verify " << rep.design << ": " << rep.checked << " vectors, " << rep.mont_mismatches
            << " montgomery mismatches, " << rep.field_mismatches << " field mismatches, " << rep.issues.size()
            << " issues, " << rep.cycles << " cycles: " << (rep.pass() ? "PASS" : "FAIL") << '\n';
  return rep.pass() ? kExitPass : kExitFail;
}

int run_bench(const DesignArgs& args, double mhz, const std::string& batches, unsigned iters,
              const std::string& warmup, std::uint64_t seed, const std::string& vectors) {
  BenchConfig cfg;
  cfg.design = args.config();
  cfg.frequency_hz = mhz * 1e6;
  cfg.batch_sizes = parse_batches(batches);
  cfg.iterations = iters;
  std::tie(cfg.warmup_batches, cfg.warmup_size) = parse_warmup(warmup);
  cfg.seed = seed;
  make_design(cfg.design);  // validate the id/word pair before any work

  std::vector<OperandPair> pool;
  if (!vectors.empty()) {
    const auto vf = read_vectors(vectors);
    if (!vf.issues.empty()) {
      std::cerr << vectors << ':' << vf.issues.front().line << ": " << vf.issues.front().message << '\n';
      return kExitFail;
    }
    for (const auto& v : vf.vectors) pool.emplace_back(v.a, v.b);
  }

  const auto rep = bench(cfg, pool);
  std::cout << "bench " << rep.design << " at " << mhz << " MHz\n";
  std::cout << std::setw(10) << "batch" << std::setw(16) << "mean cycles" << std::setw(14) << "wall s"
            << std::setw(16) << "sim Mops/s" << std::setw(16) << "wall Mops/s" << '\n';
  for (const auto& b : rep.batches) {
    std::cout << std::setw(10) << b.size << std::setw(16) << std::fixed << std::setprecision(1) << b.mean_cycles
              << std::setw(14) << std::setprecision(4) << b.mean_wall_seconds << std::setw(16) << std::setprecision(5)
              << b.simulated_ops_per_second / 1e6 << std::setw(16) << b.wall_ops_per_second / 1e6 << '\n';
  }
  std::cout << "grand mean: " << std::setprecision(5) << rep.grand_mean_simulated_ops / 1e6 << " sim Mops/s, "
            << rep.grand_mean_wall_ops / 1e6 << " wall Mops/s\n";
  std::cout << "result check: " << rep.mismatches << " mismatches: " << (rep.mismatches == 0 ? "PASS" : "FAIL")
            << '\n';
  return rep.mismatches == 0 ? kExitPass : kExitFail;
}

int run_report(const std::string& out_dir, const std::string& format) {
  std::vector<ReportFormat> formats;
  if (format.empty()) {
    formats = {ReportFormat::Csv, ReportFormat::Json, ReportFormat::Table};
  } else {
    formats = {parse_report_format(format)};
  }
  const Report rep = build_report(report_configurations(), true);
  std::filesystem::create_directories(out_dir);
  for (auto f : formats) {
    const auto path = std::filesystem::path(out_dir) / ("report." + std::string(extension(f)));
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_report(out, rep, f);
    std::cout << "wrote " << path.string() << '\n';
  }
  write_report_table(std::cout, rep);
  std::cout << "summary: " << rep.count(Verdict::Pass) << " PASS, " << rep.count(Verdict::Deviation)
            << " DEVIATION, " << rep.count(Verdict::Flagged) << " FLAGGED, " << rep.count(Verdict::Fail)
            << " FAIL\n";
  return rep.pass() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-accurate DSP48E2 Montgomery multiplier models: vectors, verification, benchmarks, reports"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::uint64_t count = 100000;
  std::string out_file;
  auto* vecgen = app.add_subcommand("vecgen", "Generate golden test vectors with the GMP oracle");
  vecgen->add_option("--seed", seed, "RNG seed");
  vecgen->add_option("--count", count, "Number of vectors")->check(CLI::PositiveNumber);
  vecgen->add_option("--out", out_file, "Output file")->required();

  DesignArgs verify_args;
  std::string vectors_file;
  auto* verify_cmd = app.add_subcommand("verify", "Run a design over a vector file with double verification");
  add_design_options(*verify_cmd, verify_args);
  verify_cmd->add_option("--vectors", vectors_file, "Vector file")->required();

  DesignArgs bench_args;
  double mhz = 0;
  std::string batches = "100000,200000,250000,500000,1000000";
  unsigned iters = 10;
  std::string warmup = "100x10000";
  std::string bench_vectors;
  auto* bench_cmd = app.add_subcommand("bench", "Batch benchmark with cycle-derived throughput");
  add_design_options(*bench_cmd, bench_args);
  bench_cmd->add_option("--freq-mhz", mhz, "Assumed clock for throughput projection")
      ->required()
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--batches", batches, "Comma-separated batch sizes");
  bench_cmd->add_option("--iters", iters, "Iterations per batch size")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--warmup", warmup, "Warm-up as NxM (N batches of M operations)");
  bench_cmd->add_option("--seed", seed, "Seed for generated operands");
  bench_cmd->add_option("--vectors", bench_vectors, "Take operands from a vector file instead");

  std::string out_dir;
  std::string format;
  auto* report_cmd = app.add_subcommand("report", "Compare every model against the published tables");
  report_cmd->add_option("--out-dir", out_dir, "Directory for report files")->required();
  report_cmd->add_option("--format", format, "Single output format (default: all three)")
      ->check(CLI::IsMember({"csv", "json", "table"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*vecgen) return run_vecgen(seed, count, out_file);
    if (*verify_cmd) return run_verify(verify_args, vectors_file);
    if (*bench_cmd) return run_bench(bench_args, mhz, batches, iters, warmup, seed, bench_vectors);
    if (*report_cmd) return run_report(out_dir, format);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}
