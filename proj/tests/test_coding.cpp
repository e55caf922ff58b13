#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace snnforge;
using namespace testsupport;

namespace {

// |count - n p| <= 3 sqrt(n p (1 - p))
void expect_binomial(double count, double n, double p) {
  const double sigma = std::sqrt(n * p * (1.0 - p));
  EXPECT_LE(std::abs(count - n * p), 3.0 * sigma) << "count " << count << " expected " << n * p;
}

coding::Raster random_raster(std::mt19937_64& rng, std::size_t steps, std::size_t n, double p) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  coding::Raster r(steps, std::vector<double>(n));
  for (auto& row : r)
    for (auto& x : row) x = u(rng) < p ? 1.0 : 0.0;
  return r;
}

}  // namespace

TEST(PoissonEncode, ZeroNeverFires) {
  const std::vector<double> x{0.0, -0.5};
  for (std::uint64_t k = 0; k < 20000; ++k)
    for (double s : coding::poisson_encode(x, 100.0, 1.0, 9, 0, k)) ASSERT_EQ(s, 0.0);
}

TEST(PoissonEncode, ThirtyHertzExpectedCount) {
  // rate 30 Hz at dt = 1 ms is a 0.03 per-step probability: 3 spikes per 100 ms
  const std::vector<double> x{0.3};
  double total = 0.0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t)
    for (std::uint64_t k = 0; k < 100; ++k) total += coding::poisson_encode(x, 100.0, 1.0, 3, t, k)[0];
  expect_binomial(total, trials * 100.0, 0.03);
  EXPECT_NEAR(total / trials, 3.0, 0.1);
}

TEST(PoissonEncode, EmpiricalRateWithinBinomialInterval) {
  const std::vector<double> x{1.0, 0.5, 0.25, 0.05, 2.0};
  std::vector<double> counts(x.size(), 0.0);
  const std::uint64_t n = 100000;
  for (std::uint64_t k = 0; k < n; ++k) {
    const auto s = coding::poisson_encode(x, 100.0, 1.0, 77, 0, k);
    for (std::size_t i = 0; i < x.size(); ++i) counts[i] += s[i];
  }
  for (std::size_t i = 0; i < x.size(); ++i)
    expect_binomial(counts[i], static_cast<double>(n), std::min(x[i], 1.0) * 100.0 / 1000.0);
}

TEST(PoissonEncode, ClampsProbabilityToOne) {
  const std::vector<double> x{1.0};
  for (std::uint64_t k = 0; k < 100; ++k) EXPECT_EQ(coding::poisson_encode(x, 5000.0, 1.0, 1, 0, k)[0], 1.0);
}

TEST(LatencyEncode, Examples) {
  EXPECT_EQ(coding::latency_step(1.0, 20), 0);
  EXPECT_EQ(coding::latency_step(0.0, 20), 19);
  EXPECT_EQ(coding::latency_step(0.5, 11), 5);
  EXPECT_THROW(coding::latency_encode(std::vector<double>{0.5}, 0), Error);
}

TEST(LatencyEncode, OneSpikePerElement) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (long long window : {1, 2, 7, 30}) {
    std::vector<double> x(25);
    for (auto& v : x) v = u(rng);
    const auto r = coding::latency_encode(x, window);
    ASSERT_EQ(r.size(), static_cast<std::size_t>(window));
    for (std::size_t i = 0; i < x.size(); ++i) {
      double total = 0.0;
      long long at = -1;
      for (std::size_t t = 0; t < r.size(); ++t)
        if (r[t][i] != 0.0) total += r[t][i], at = static_cast<long long>(t);
      EXPECT_EQ(total, 1.0);
      EXPECT_EQ(at, static_cast<long long>(std::floor((1.0 - x[i]) * static_cast<double>(window - 1))));
    }
  }
}

TEST(LatencyEncode, GraphEmitsOncePerWindow) {
  NetworkSpec s;
  s.nodes.push_back({"lat", NodeKind::encoder, "latency_encode", 3, "", "O", {{"T_window", 11.0}}});
  const auto g = compile(s);
  auto st = SimState::create(g);
  st.set_input(g, "lat:x", std::vector<double>{1.0, 0.5, 0.0});
  std::vector<std::vector<long long>> fired(3);
  for (int k = 0; k < 22; ++k) {
    step(g, st);
    const auto o = st.value(g, "lat:O");
    for (std::size_t i = 0; i < 3; ++i)
      if (o[i] != 0.0) fired[i].push_back(k);
  }
  EXPECT_EQ(fired[0], (std::vector<long long>{0, 11}));
  EXPECT_EQ(fired[1], (std::vector<long long>{5, 16}));
  EXPECT_EQ(fired[2], (std::vector<long long>{10, 21}));
}

TEST(Generators, SilentAndConstant) {
  for (std::uint64_t k = 0; k < 1000; ++k)
    for (double s : coding::poisson_generate(0.0, 4, 1.0, 5, 0, k)) ASSERT_EQ(s, 0.0);
  EXPECT_EQ(coding::constant_current_generate(1.5, 3), (std::vector<double>{1.5, 1.5, 1.5}));
  EXPECT_THROW(coding::poisson_generate(-1.0, 1, 1.0, 0, 0, 0), Error);
}

TEST(Generators, EightHertz) {
  double total = 0.0;
  const std::uint64_t n = 100000;
  for (std::uint64_t k = 0; k < n; ++k) total += coding::poisson_generate(8.0, 1, 1.0, 13, 0, k)[0];
  expect_binomial(total, static_cast<double>(n), 0.008);
}

TEST(Generators, GraphOps) {
  NetworkSpec s;
  s.seed = 3;
  s.nodes.push_back({"noise", NodeKind::generator, "poisson_generate", 10, "", "O", {{"rate", 8.0}}});
  s.nodes.push_back({"dc", NodeKind::generator, "constant_current_generate", 4, "", "O", {{"amplitude", 1.5}}});
  const auto g = compile(s);
  auto st = SimState::create(g);
  double total = 0.0;
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    step(g, st);
    for (double x : st.value(g, "noise:O")) total += x;
    for (double x : st.value(g, "dc:O")) ASSERT_EQ(x, 1.5);
  }
  expect_binomial(total, 10.0 * n, 0.008);
}

TEST(SpikeCountDecode, Examples) {
  const coding::Raster r{{0, 1, 1}, {0, 1, 0}, {0, 1, 1}, {0, 1, 0}, {0, 1, 0}};
  const auto d = coding::spike_count_decode(r, 3);
  EXPECT_EQ(d.counts, (std::vector<double>{0, 5, 2}));
  EXPECT_EQ(d.predicted, 1u);
  EXPECT_EQ(coding::spike_count_decode(coding::Raster(4, std::vector<double>(3, 0.0)), 3).predicted, 0u);
}

TEST(SpikeCountDecode, ColumnSums) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = random_raster(rng, 40, 6, 0.2);
    std::vector<double> cols(6, 0.0);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t t = 0; t < r.size(); ++t) cols[i] += r[t][i];
    EXPECT_EQ(coding::spike_count_decode(r, 6).counts, cols);
    // 6 neurons as 3 classes of 2
    EXPECT_EQ(coding::spike_count_decode(r, 3).counts,
              (std::vector<double>{cols[0] + cols[1], cols[2] + cols[3], cols[4] + cols[5]}));
  }
}

TEST(SpikeCountDecode, ArgmaxInvariantUnderWindowScaling) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> period(2, 9);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<int> per(5);
    for (auto& p : per) p = period(rng);
    auto raster = [&](std::size_t steps) {
      coding::Raster r(steps, std::vector<double>(5, 0.0));
      for (std::size_t t = 0; t < steps; ++t)
        for (std::size_t i = 0; i < 5; ++i) r[t][i] = (t + 1) % static_cast<std::size_t>(per[i]) == 0 ? 1.0 : 0.0;
      return r;
    };
    const std::size_t base = 9 * 8 * 7 * 5;  // a multiple of every period
    const auto p1 = coding::spike_count_decode(raster(base), 5).predicted;
    for (std::size_t k : {2u, 3u, 5u}) EXPECT_EQ(coding::spike_count_decode(raster(base * k), 5).predicted, p1);
  }
}

TEST(FirstSpikeDecode, Examples) {
  coding::Raster r(10, std::vector<double>(4, 0.0));
  r[3][2] = 1;
  r[7][0] = 1;
  EXPECT_EQ(coding::first_spike_decode(r), 2u);
  EXPECT_FALSE(coding::first_spike_decode(coding::Raster(5, std::vector<double>(4, 0.0))).has_value());
  coding::Raster tie(10, std::vector<double>(4, 0.0));
  tie[4][1] = tie[4][3] = 1;
  EXPECT_EQ(coding::first_spike_decode(tie), 1u);
  EXPECT_EQ(coding::first_spike_decode(std::vector<double>{7, -1, 3, 3}), 2u);
  EXPECT_FALSE(coding::first_spike_decode(std::vector<double>{-1, -1}).has_value());
}

TEST(Decoders, Pure) {
  std::mt19937_64 rng(6);
  const auto r = random_raster(rng, 30, 4, 0.1);
  EXPECT_EQ(coding::spike_count_decode(r, 4).counts, coding::spike_count_decode(r, 4).counts);
  EXPECT_EQ(coding::first_spike_decode(r), coding::first_spike_decode(r));
  EXPECT_EQ(coding::population_rate_action(r, 2), coding::population_rate_action(r, 2));
}

TEST(DecoderNode, CountsAndFirstSpikeMatchRaster) {
  NetworkSpec s;
  s.seed = 8;
  s.nodes.push_back({"in", NodeKind::generator, "poisson_generate", 10, "", "O", {{"rate", 200.0}}});
  GroupSpec g;
  g.id = "out";
  g.num = 4;
  g.params = {{"tau_m", 5.0}, {"V_th", 0.6}};
  s.groups.push_back(g);
  ConnectionSpec c;
  c.id = "in_out";
  c.pre = "in";
  c.post = "out";
  c.weight_init = InitRule::uniform(0.0, 1.0);
  s.connections.push_back(c);
  s.nodes.push_back({"dec", NodeKind::decoder, "spike_count_decode", 4, "out", "O", {}});
  s.monitors.push_back({"raster", "out", MonitorKind::spike, ""});
  const auto cg = compile(s);
  auto st = SimState::create(cg);
  Recorder rec(cg);
  run(cg, st, 60.0, &rec);
  coding::Raster r(60, std::vector<double>(4, 0.0));
  for (const auto& e : rec.spike("raster")->events) r[static_cast<std::size_t>(e.step)][e.neuron] = 1.0;
  const auto counts = st.value(cg, "dec:count");
  EXPECT_EQ(std::vector<double>(counts.begin(), counts.end()), coding::spike_count_decode(r, 4).counts);
  EXPECT_EQ(coding::first_spike_decode(st.value(cg, "dec:first")), coding::first_spike_decode(r));
  EXPECT_FALSE(rec.spike("raster")->events.empty());
}

TEST(GlobalReward, Examples) {
  EXPECT_EQ(coding::global_reward(3, 3), 1.0);
  EXPECT_EQ(coding::global_reward(2, 7), -1.0);
  const std::vector<std::size_t> pred{0, 1, 2, 3}, lab{0, 2, 2, 1};
  EXPECT_EQ(coding::global_reward(pred, lab), (std::vector<double>{1, -1, 1, -1}));
  EXPECT_EQ(coding::global_reward(pred, lab, 0.5, -0.25), (std::vector<double>{0.5, -0.25, 0.5, -0.25}));
}

TEST(PopulationAction, Examples) {
  // 1000 steps at dt = 1 ms: 1 and 4 spikes per neuron are 1 Hz and 4 Hz
  coding::Raster r(1000, std::vector<double>(2, 0.0));
  r[10][0] = 1;
  for (int k : {1, 2, 3, 4}) r[static_cast<std::size_t>(k * 100)][1] = 1;
  const std::vector<std::size_t> sizes{1, 1};
  EXPECT_EQ(coding::population_rates(r, sizes, 1.0), (std::vector<double>{1.0, 4.0}));
  EXPECT_EQ(coding::population_rate_action(r, sizes, 1.0), 1u);
  EXPECT_EQ(coding::population_rate_action(coding::Raster(10, std::vector<double>(4, 1.0)), 2), 0u);
}

TEST(PopulationAction, GroupedMeanOracle) {
  std::mt19937_64 rng(10);
  const std::vector<std::size_t> sizes{2, 5, 3};
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = random_raster(rng, 50, 10, 0.05 + 0.01 * (trial % 7));
    std::vector<double> mean(3, 0.0);
    std::size_t start = 0;
    for (std::size_t a = 0; a < 3; ++a) {
      double c = 0;
      for (const auto& row : r)
        for (std::size_t i = start; i < start + sizes[a]; ++i) c += row[i];
      mean[a] = c / static_cast<double>(sizes[a]);
      start += sizes[a];
    }
    std::size_t want = 0;
    for (std::size_t a = 1; a < 3; ++a)
      if (mean[a] > mean[want]) want = a;
    EXPECT_EQ(coding::population_rate_action(r, sizes, 1.0), want);
  }
}
