#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "montdsp/registry.hpp"
#include "support/fixtures.hpp"

namespace montdsp {
namespace {

using testing::bls_oracle;
using testing::bls_p;
using testing::edge_values;

std::vector<DesignConfig> configurations_with_auto() {
  auto cfgs = all_configurations();
  cfgs.push_back({"kara32", 32, DspMode::Auto});
  cfgs.push_back({"kara64", 64, DspMode::Auto});
  return cfgs;
}

std::string config_name(const ::testing::TestParamInfo<DesignConfig>& info) {
  std::string n = info.param.label();
  for (char& c : n) {
    if (c == '-') c = '_';
  }
  return n;
}

class EveryDesign : public ::testing::TestWithParam<DesignConfig> {};

TEST_P(EveryDesign, RandomPairsMatchCiosAndOracle) {
  auto d = make_design(GetParam());
  Int384Sampler sampler(11);
  const Int384 two_p = bls_p() + bls_p();
  std::vector<OperandPair> ops;
  for (int k = 0; k < 300; ++k) ops.emplace_back(sampler.below(two_p), sampler.below(two_p));
  const auto out = d->run_batch(ops);
  ASSERT_EQ(out.results.size(), ops.size());
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const auto& [a, b] = ops[k];
    ASSERT_EQ(out.results[k], d->reference(a, b)) << "pair " << k;
    ASSERT_EQ(bls_oracle().reduce(out.results[k]), bls_oracle().mont_product(a, b)) << "pair " << k;
    ASSERT_LT(out.results[k], two_p);
  }
}

TEST_P(EveryDesign, EdgeOperandsMatchCios) {
  auto d = make_design(GetParam());
  std::vector<OperandPair> ops;
  for (const auto& a : edge_values()) {
    for (const auto& b : edge_values()) ops.emplace_back(a, b);
  }
  const auto out = d->run_batch(ops);
  for (std::size_t k = 0; k < ops.size(); ++k) {
    EXPECT_EQ(out.results[k], d->reference(ops[k].first, ops[k].second))
        << ops[k].first.to_hex() << " * " << ops[k].second.to_hex();
  }
}

TEST_P(EveryDesign, CycleCountIsInputIndependent) {
  auto d = make_design(GetParam());
  Int384Sampler sampler(12);
  const std::uint64_t expected = d->report(0).first_result_latency;
  for (int k = 0; k < 100; ++k) {
    std::uint64_t cycles = 0;
    auto fresh = make_design(GetParam());
    fresh->run(sampler.below(bls_p()), sampler.below(bls_p()), cycles);
    ASSERT_EQ(cycles, expected) << "input " << k;
  }
}

TEST_P(EveryDesign, OperandAtTwoPIsRejected) {
  auto d = make_design(GetParam());
  std::uint64_t cycles = 0;
  EXPECT_THROW(d->run(bls_p() + bls_p(), Int384{1}, cycles), ContractViolation);
}

INSTANTIATE_TEST_SUITE_P(Designs, EveryDesign, ::testing::ValuesIn(configurations_with_auto()), config_name);

// ---------------------------------------------------------------- totals

TEST(DesignCycles, BlockingDesignsLandOnPublishedTotals) {
  EXPECT_EQ(RowSerialDesign<24>::expected_cycles(TStorageKind::Lutram), 802U);
  EXPECT_EQ(RowSerialDesign<32>::expected_cycles(TStorageKind::Lutram), 554U);
  EXPECT_EQ(RowSerialDesign<64>::expected_cycles(TStorageKind::Lutram), 494U);
  EXPECT_EQ(RowSerialDesign<24>::expected_cycles(TStorageKind::Bram), 917U);
  EXPECT_EQ(RowSerialDesign<32>::expected_cycles(TStorageKind::Bram), 641U);
  EXPECT_EQ(RowSerialDesign<64>::expected_cycles(TStorageKind::Bram), 557U);
  EXPECT_EQ(RowParallelDesign<24>::expected_cycles(), 497U);
  EXPECT_EQ(RowParallelDesign<32>::expected_cycles(), 421U);
  EXPECT_EQ(RowParallelDesign<64>::expected_cycles(), 427U);
}

TEST(DesignCycles, OupStagesAndInterval) {
  EXPECT_EQ(OuterUnrolledPipeline<24>::stage_count(), 16U);
  EXPECT_EQ(OuterUnrolledPipeline<32>::stage_count(), 12U);
  EXPECT_EQ(OuterUnrolledPipeline<64>::stage_count(), 6U);
  EXPECT_EQ(OuterUnrolledPipeline<24>::interval(), 52U);
  EXPECT_EQ(OuterUnrolledPipeline<32>::interval(), 48U);
  EXPECT_EQ(OuterUnrolledPipeline<64>::interval(), 84U);
  EXPECT_EQ(OuterUnrolledPipeline<32>::first_result_latency(), 576U);
  EXPECT_EQ(OuterUnrolledPipeline<64>::first_result_latency(), 504U);
  // The w=24 first result lands 12 cycles under the published 844.
  EXPECT_EQ(OuterUnrolledPipeline<24>::first_result_latency(), 832U);
}

TEST(DesignResources, StructuralDspCounts) {
  EXPECT_EQ(RowSerialDesign<24>::dsp_count(), 3U);
  EXPECT_EQ(RowSerialDesign<64>::dsp_count(), 19U);
  EXPECT_EQ(RowParallelDesign<24>::dsp_count(), 42U);
  EXPECT_EQ(RowParallelDesign<32>::dsp_count(), 60U);  // published 59 after synthesis
  EXPECT_EQ(RowParallelDesign<64>::dsp_count(), 126U);  // published 120 after synthesis
  EXPECT_EQ(OuterUnrolledPipeline<32>::dsp_count(), 60U);
  EXPECT_EQ(OuterUnrolledPipeline<64>::dsp_count(), 114U);
}

TEST(DesignResources, RowSerialIdealThroughputBoundsMeasured) {
  const auto rep = RowSerialDesign<32>().report(545e6);
  EXPECT_NEAR(rep.ideal_throughput(), 0.9837e6, 0.0001e6);
  EXPECT_GE(rep.ideal_throughput(), 0.95838e6);
}

// ---------------------------------------------------------------- Row-Serial

TEST(RowSerialSchedule, QuotientIssuedAfterLoopOneAtThirtyTwoBits) {
  const auto k = RowSerialSchedule::make(12, MaddCarryUnit<32>::latency(), 1);
  // Counting the first LOOP_1 pair as cycle 1, the quotient goes in at S+2.
  EXPECT_EQ(k.q - k.E1, 12U + 2U);
  EXPECT_FALSE(k.pre_clear);
}

TEST(RowSerialSchedule, QuotientWaitsForFirstWordAtSixtyFourBits) {
  const auto k = RowSerialSchedule::make(6, MaddCarryUnit<64>::latency(), 1);
  // t[i] from the first pair has to be written back and read again.
  EXPECT_EQ(k.q, k.E1 + 1 + k.D + 1 + k.R);
  EXPECT_TRUE(k.pre_clear);
}

TEST(RowSerial, TraceShowsLoopStructure) {
  RowSerialDesign<32> d;
  std::vector<std::string> lines;
  std::vector<TraceEvent> events;
  d.set_trace([&](const TraceEvent& e) {
    lines.push_back(format_trace(e));
    events.push_back(e);
  });
  Int384Sampler sampler(3);
  d.run_blocking(split_words<32>(sampler.below(bls_p())), split_words<32>(sampler.below(bls_p())));

  ASSERT_FALSE(lines.empty());
  EXPECT_EQ(lines.front(), "1,LOAD,0,0,load");
  EXPECT_EQ(lines.back(), "554,DONE,12,0,done");
  unsigned pairs = 0;
  unsigned quotients = 0;
  for (const auto& e : events) {
    if (e.event == "pair") ++pairs;
    if (e.event == "quotient") {
      ++quotients;
      EXPECT_EQ(e.state, FsmState::Quotient);
    }
  }
  EXPECT_EQ(pairs, 12U * 24U);
  EXPECT_EQ(quotients, 12U);

  // First iteration: the quotient follows the first LOOP_1 pair by S+1 cycles.
  std::uint64_t first_pair = 0;
  std::uint64_t quotient = 0;
  for (const auto& e : events) {
    if (e.event == "pair" && first_pair == 0) first_pair = e.cycle;
    if (e.event == "quotient" && quotient == 0) quotient = e.cycle;
  }
  EXPECT_EQ(quotient - first_pair + 1, 14U);
}

TEST(RowSerial, StartWhileBusyIsIgnored) {
  RowSerialDesign<24> d;
  Int384Sampler sampler(4);
  const auto a = split_words<24>(sampler.below(bls_p()));
  const auto b = split_words<24>(sampler.below(bls_p()));
  const auto other = split_words<24>(sampler.below(bls_p()));
  ASSERT_TRUE(d.ap_ready());
  ASSERT_TRUE(d.start(a, b));
  std::optional<FieldElement<24>> result;
  std::uint64_t cycles = 0;
  while (!result) {
    ++cycles;
    result = d.tick();
    if (cycles == 50) {
      EXPECT_FALSE(d.ap_ready());
      EXPECT_FALSE(d.start(other, other));
    }
  }
  EXPECT_TRUE(d.ap_done());
  EXPECT_EQ(cycles, 802U);
  EXPECT_EQ(join_words(*result), montmul<24>(join_words(a), join_words(b), bls12_381<24>()));
  EXPECT_TRUE(d.ap_ready());
}

TEST(RowSerial, BramVariantMatchesLutramOutput) {
  Int384Sampler sampler(5);
  for (int k = 0; k < 50; ++k) {
    const auto a = split_words<32>(sampler.below(bls_p()));
    const auto b = split_words<32>(sampler.below(bls_p()));
    RowSerialDesign<32> lut(TStorageKind::Lutram);
    RowSerialDesign<32> bram(TStorageKind::Bram);
    const auto x = lut.run_blocking(a, b);
    const auto y = bram.run_blocking(a, b);
    ASSERT_EQ(x.result, y.result);
    ASSERT_EQ(y.cycles - x.cycles, 641U - 554U);
  }
}

TEST(RowSerial, BramExtraCyclesComeFromReadLatencyAndUnload) {
  constexpr unsigned s = 12;
  const auto lut = RowSerialSchedule::make(s, MaddCarryUnit<32>::latency(), read_latency(TStorageKind::Lutram));
  const auto bram = RowSerialSchedule::make(s, MaddCarryUnit<32>::latency(), read_latency(TStorageKind::Bram));
  const std::uint64_t per_iteration = bram.iter - lut.iter;
  const std::uint64_t unload = RowSerialDesign<32>::unload_cycles(TStorageKind::Bram) -
                               RowSerialDesign<32>::unload_cycles(TStorageKind::Lutram);
  EXPECT_EQ(s * per_iteration + unload, 641U - 554U);
}

// ---------------------------------------------------------------- Row-Parallel

TEST(RowParallel, TraceOrdersLoopsAroundQuotient) {
  RowParallelDesign<64> d;
  std::vector<TraceEvent> events;
  d.set_trace([&](const TraceEvent& e) { events.push_back(e); });
  Int384Sampler sampler(6);
  const auto r = d.run_blocking(split_words<64>(sampler.below(bls_p())), split_words<64>(sampler.below(bls_p())));
  EXPECT_EQ(r.cycles, 427U);
  std::vector<std::string_view> iteration;
  for (const auto& e : events) {
    if (e.counter_i == 0 && e.event != "load") iteration.push_back(e.event);
  }
  ASSERT_GE(iteration.size(), 4U);
  EXPECT_EQ(iteration[0], "loop1_issue");
  EXPECT_EQ(iteration[1], "quotient_issue");
  EXPECT_EQ(iteration[2], "m_latched");
  EXPECT_EQ(iteration[3], "loop2_issue");
}

TEST(RowParallel, StartWhileBusyIsIgnored) {
  RowParallelDesign<32> d;
  const auto one = split_words<32>(Int384{1});
  ASSERT_TRUE(d.start(one, one));
  d.tick();
  EXPECT_FALSE(d.start(one, one));
}

// ---------------------------------------------------------------- OUP

template <unsigned W>
void stream_pairs(std::size_t n, std::uint64_t seed, double stall_probability) {
  OuterUnrolledPipeline<W> pipe;
  Int384Sampler sampler(seed);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution stall(stall_probability);
  std::vector<OperandPair> ops;
  for (std::size_t k = 0; k < n; ++k) ops.emplace_back(sampler.below(bls_p()), sampler.below(bls_p()));

  std::vector<Int384> out;
  std::size_t fed = 0;
  std::uint64_t cycles = 0;
  std::uint64_t stalled_cycles = 0;
  while (out.size() < n) {
    pipe.set_stall(stall_probability > 0 && stall(rng));
    if (pipe.stalled()) ++stalled_cycles;
    if (fed < n && pipe.can_accept()) {
      ASSERT_TRUE(pipe.feed(split_words<W>(ops[fed].first), split_words<W>(ops[fed].second)));
      ++fed;
    }
    ++cycles;
    if (auto r = pipe.tick()) out.push_back(join_words(*r));
    ASSERT_LT(cycles, 10'000'000U);
  }
  EXPECT_EQ(pipe.in_flight(), 0U);
  for (std::size_t k = 0; k < n; ++k) {
    ASSERT_EQ(out[k], montmul<W>(ops[k].first, ops[k].second, bls12_381<W>())) << "result " << k;
  }
  if (stall_probability == 0) {
    EXPECT_EQ(cycles, OuterUnrolledPipeline<W>::first_result_latency() + (n - 1) * OuterUnrolledPipeline<W>::interval());
  } else {
    EXPECT_GT(stalled_cycles, 0U);
  }
}

TEST(Oup, ThousandPairsInOrderAtFullRate) {
  stream_pairs<24>(1000, 21, 0.0);
  stream_pairs<32>(1000, 22, 0.0);
  stream_pairs<64>(1000, 23, 0.0);
}

TEST(Oup, RandomStallsLoseNothing) {
  stream_pairs<24>(200, 31, 0.3);
  stream_pairs<32>(200, 32, 0.05);
  stream_pairs<64>(200, 33, 0.5);
}

TEST(Oup, StallFreezesEveryStage) {
  OuterUnrolledPipeline<64> pipe;
  const auto one = split_words<64>(Int384{1});
  ASSERT_TRUE(pipe.feed(one, one));
  for (int k = 0; k < 10; ++k) pipe.tick();
  pipe.set_stall(true);
  EXPECT_FALSE(pipe.can_accept());
  EXPECT_FALSE(pipe.feed(one, one));
  for (int k = 0; k < 1000; ++k) ASSERT_FALSE(pipe.tick().has_value());
  pipe.set_stall(false);
  std::uint64_t active = 10;
  std::optional<FieldElement<64>> r;
  while (!r) {
    r = pipe.tick();
    ++active;
  }
  EXPECT_EQ(active, OuterUnrolledPipeline<64>::first_result_latency());
  EXPECT_EQ(join_words(*r), montmul<64>(Int384{1}, Int384{1}, bls12_381<64>()));
}

TEST(Oup, FeedRefusedWhileStageZeroBusy) {
  OuterUnrolledPipeline<32> pipe;
  const auto one = split_words<32>(Int384{1});
  ASSERT_TRUE(pipe.feed(one, one));
  pipe.tick();
  EXPECT_FALSE(pipe.can_accept());
  EXPECT_FALSE(pipe.feed(one, one));
  EXPECT_EQ(pipe.in_flight(), 1U);
}

// ---------------------------------------------------------------- registry

TEST(Registry, RejectsUnknownDesignsAndWords) {
  EXPECT_THROW(make_design({"nope", 32, DspMode::Forced}), UsageError);
  EXPECT_THROW(make_design({"rs", 16, DspMode::Forced}), UsageError);
  EXPECT_THROW(make_design({"kara32", 64, DspMode::Forced}), UsageError);
  EXPECT_THROW(make_design({"kara64", 24, DspMode::Forced}), UsageError);
  EXPECT_THROW(parse_dsp_mode("sometimes"), UsageError);
  EXPECT_EQ(all_configurations().size(), 14U);
}

}  // namespace
}  // namespace montdsp
