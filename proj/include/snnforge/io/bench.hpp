#pragma once

// Benchmark harness: a Poisson input layer fully connected to n LIF neurons,
// simulated for a number of timed cycles after one warm-up cycle. Each cycle
// starts from reset state.

#include <chrono>
#include <cmath>
#include <new>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "snnforge/compiler/lower.hpp"
#include "snnforge/engine/executor.hpp"
#include "snnforge/io/config.hpp"
#include "snnforge/io/csv.hpp"

namespace snnforge {

struct BenchOptions {
  std::size_t neurons = 10000;
  int cycles = 100;
  double duration_ms = 100.0;
  double dt = 1.0;
  double input_rate = 30.0;  // Hz
  std::size_t inputs = 100;
  std::uint64_t seed = 42;
  int warmup = 1;
};

struct BenchReport {
  BenchOptions options;
  double build_s = 0.0;
  double total_s = 0.0;  // timed cycles only
  std::vector<double> cycle_s;
  std::vector<long long> spikes;  // output spikes per timed cycle
  double mean_s = 0.0;
  std::optional<double> stddev_s;  // undefined for a single cycle
  double steps_per_s = 0.0;

  std::string text() const {
    std::ostringstream os;
    os << "neurons " << options.neurons << "\n"
       << "cycles " << options.cycles << "\n"
       << "duration_ms " << format_double(options.duration_ms) << "\n"
       << "dt_ms " << format_double(options.dt) << "\n"
       << "build_s " << build_s << "\n"
       << "total_s " << total_s << "\n"
       << "cycle_mean_s " << mean_s << "\n"
       << "cycle_std_s ";
    if (stddev_s) os << *stddev_s;
    else os << "n/a";
    os << "\n"
       << "steps_per_s " << steps_per_s << "\n"
       << "spikes_total " << std::accumulate(spikes.begin(), spikes.end(), 0LL) << "\n";
    return os.str();
  }

  json to_json() const {
    json j{{"neurons", options.neurons},     {"cycles", options.cycles},         {"duration_ms", options.duration_ms},
           {"dt_ms", options.dt},            {"input_rate_hz", options.input_rate}, {"inputs", options.inputs},
           {"seed", options.seed},           {"build_s", build_s},               {"total_s", total_s},
           {"cycle_s", cycle_s},             {"cycle_mean_s", mean_s},           {"steps_per_s", steps_per_s},
           {"spikes_per_cycle", spikes}};
    j["cycle_std_s"] = stddev_s ? json(*stddev_s) : json("n/a");
    return j;
  }
};

inline NetworkSpec bench_network(const BenchOptions& o) {
  NetworkSpec s;
  s.name = "bench";
  s.dt = o.dt;
  s.seed = o.seed;
  s.nodes.push_back({"input", NodeKind::generator, "poisson_generate", static_cast<int>(o.inputs), "", "O",
                     {{"rate", o.input_rate}}});
  GroupSpec g;
  g.id = "test";
  g.num = static_cast<int>(o.neurons);
  s.groups.push_back(g);
  ConnectionSpec c;
  c.id = "input_test";
  c.pre = "input";
  c.post = "test";
  c.weight_init = InitRule::uniform(0.0, 1.0);
  s.connections.push_back(c);
  return s;
}

inline BenchReport bench(const BenchOptions& o) {
  if (o.cycles < 1) throw Error(ErrorCode::invalid_argument, "cycles", "must be >= 1");
  if (o.neurons < 1) throw Error(ErrorCode::invalid_argument, "neurons", "must be >= 1");
  using clock = std::chrono::steady_clock;
  BenchReport r;
  r.options = o;
  try {
    const auto t0 = clock::now();
    const auto g = compile(bench_network(o));
    auto s = SimState::create(g);
    r.build_s = std::chrono::duration<double>(clock::now() - t0).count();
    const int out = g.group("test")->spikes;
    const auto steps = to_steps(o.duration_ms, o.dt);
    for (int c = 0; c < o.warmup + o.cycles; ++c) {
      s.reset(g);
      long long count = 0;
      const auto start = clock::now();
      for (long long k = 0; k < steps; ++k) {
        step(g, s);
        for (double x : s.values[static_cast<std::size_t>(out)]) count += x != 0.0;
      }
      const double secs = std::chrono::duration<double>(clock::now() - start).count();
      if (c < o.warmup) continue;
      r.cycle_s.push_back(secs);
      r.spikes.push_back(count);
    }
  } catch (const std::bad_alloc&) {
    throw Error(ErrorCode::out_of_memory, "neurons=" + std::to_string(o.neurons));
  } catch (const std::length_error&) {
    throw Error(ErrorCode::out_of_memory, "neurons=" + std::to_string(o.neurons));
  }
  r.total_s = std::accumulate(r.cycle_s.begin(), r.cycle_s.end(), 0.0);
  const double n = static_cast<double>(r.cycle_s.size());
  r.mean_s = r.total_s / n;
  if (r.cycle_s.size() > 1) {
    double ss = 0.0;
    for (double x : r.cycle_s) ss += (x - r.mean_s) * (x - r.mean_s);
    r.stddev_s = std::sqrt(ss / (n - 1.0));
  }
  const double steps_total = n * static_cast<double>(to_steps(o.duration_ms, o.dt));
  r.steps_per_s = r.total_s > 0 ? steps_total / r.total_s : 0.0;
  return r;
}

}  // namespace snnforge
