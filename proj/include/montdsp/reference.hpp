#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace montdsp::reference {

// Published figures the models are diffed against. Values are per word
// size in the order 24, 32, 64 unless a table only covers 32 and 64.

inline constexpr std::array<unsigned, 3> kWords = {24, 32, 64};

inline constexpr std::size_t word_index(unsigned w) { return w == 24 ? 0 : w == 32 ? 1 : 2; }

struct UnitRow {
  std::string_view unit;
  std::array<unsigned, 3> latency;
  std::array<unsigned, 3> dsps;
};

// Word arithmetic units: latency in cycles and DSP slices.
inline constexpr std::array<UnitRow, 5> kUnits = {{
    {"MUL", {4, 6, 18}, {2, 4, 16}},
    {"MADD", {4, 6, 20}, {2, 4, 17}},
    {"MADD384", {13, 15, 29}, {40, 56, 110}},
    {"MADDCARRY", {6, 8, 23}, {3, 5, 19}},
    {"ADD384", {9, 9, 9}, {8, 8, 8}},
}};

struct DesignRow {
  std::string_view id;
  std::array<unsigned, 3> latency;   // first result, cycles
  std::array<unsigned, 3> interval;  // next result, cycles
  std::array<unsigned, 3> dsps;
};

// Montgomery multiplier designs.
inline constexpr std::array<DesignRow, 4> kDesigns = {{
    {"rs", {802, 554, 494}, {802, 554, 494}, {3, 5, 19}},
    {"rs-bram", {917, 641, 557}, {917, 641, 557}, {3, 5, 19}},
    {"rp", {497, 421, 427}, {497, 421, 427}, {42, 59, 120}},
    {"oup", {844, 576, 504}, {52, 48, 84}, {48, 60, 114}},
}};

struct KaratsubaRow {
  unsigned word;
  unsigned unit_latency;
  unsigned unit_dsps_forced;
  unsigned unit_dsps_auto;
  unsigned multiplier_latency;
  unsigned multiplier_dsps_forced;
  unsigned multiplier_dsps_auto;
};

// Karatsuba word units and the Karatsuba-based Row-Serial multiplier.
inline constexpr std::array<KaratsubaRow, 2> kKaratsuba = {{
    {32, 6, 8, 4, 493, 9, 4},
    {64, 11, 35, 12, 290, 37, 12},
}};

struct ThroughputRow {
  std::string_view id;  // design id; kara rows carry the dsp mode in `mode`
  std::string_view mode;
  unsigned word;
  double mops;  // measured, 10^6 multiplications per second
  double mhz;   // achieved clock
};

inline constexpr std::array<ThroughputRow, 16> kThroughput = {{
    {"oup", "", 24, 7.11826, 448},     {"oup", "", 32, 7.96803, 467},     {"oup", "", 64, 5.07897, 486},
    {"rp", "", 24, 1.07218, 553},      {"rp", "", 32, 1.21388, 530},      {"rp", "", 64, 1.17854, 526},
    {"rs", "", 24, 0.66702, 548},      {"rs", "", 32, 0.95838, 545},      {"rs", "", 64, 1.00634, 516},
    {"rs-bram", "", 24, 0.56229, 526}, {"rs-bram", "", 32, 0.78013, 516}, {"rs-bram", "", 64, 0.90251, 523},
    {"kara32", "forced", 32, 0.57552, 290}, {"kara64", "forced", 64, 1.01629, 305},
    {"kara32", "auto", 32, 0.64422, 328},   {"kara64", "auto", 64, 1.21230, 368},
}};

/// Accepted band for measured / (clock / simulated interval).
inline constexpr double kThroughputRatioMin = 0.70;
inline constexpr double kThroughputRatioMax = 1.00;

/// Relative tolerance for latency cells with a documented model deviation.
inline constexpr double kDocumentedTolerance = 0.03;

struct Deviation {
  std::string_view metric;  // "latency" or "dsps"
  std::string_view id;
  unsigned word;
  std::string_view reason;
};

// Cells where the structural model differs from the published value. Each
// one is reported with its delta; everything else must match exactly.
inline constexpr std::array<Deviation, 5> kDeviations = {{
    {"latency", "oup", 24,
     "first result modeled as stages x interval; the 12 extra published cycles at w=24 have no structural source"},
    {"latency", "kara32", 32, "FSM transition overhead around the fabric carry fold is not specified"},
    {"latency", "kara64", 64, "FSM transition overhead around the fabric carry fold is not specified"},
    {"dsps", "rp", 32, "published count is post-synthesis; model reports the structural MADD384 + MUL sum"},
    {"dsps", "rp", 64, "published count is post-synthesis; model reports the structural MADD384 + MUL sum"},
}};

inline std::optional<Deviation> find_deviation(std::string_view metric, std::string_view id, unsigned word) {
  for (const auto& d : kDeviations) {
    if (d.metric == metric && d.id == id && d.word == word) return d;
  }
  return std::nullopt;
}

}  // namespace montdsp::reference
