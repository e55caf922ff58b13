#pragma once

// Pure encoders, generators and decoders. The graph ops of the same names
// (kernels/builtin_ops.hpp) share the random streams and formulas used here, so
// a node inside a compiled network and a direct call agree bit for bit.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "snnforge/core/error.hpp"
#include "snnforge/core/rng.hpp"
#include "snnforge/kernels/builtin_ops.hpp"

namespace snnforge::coding {

/// steps x neurons, entries 0/1.
using Raster = std::vector<std::vector<double>>;

/// One step of rate coding: element i fires with probability
/// min(x_i * rate_max * dt / 1000, 1), x clamped to [0, 1].
inline std::vector<double> poisson_encode(std::span<const double> x, double rate_max, double dt,
                                          std::uint64_t stream, std::uint64_t trial, std::uint64_t step,
                                          std::uint64_t row = 0) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = std::min(std::clamp(x[i], 0.0, 1.0) * rate_max * dt / 1000.0, 1.0);
    out[i] = counter_uniform(stream, trial, step, row, i) < p ? 1.0 : 0.0;
  }
  return out;
}

/// Step at which intensity x fires within a window of `window` steps.
inline long long latency_step(double x, long long window) { return kernels::latency_step(x, window); }

/// The full window: one spike per element.
inline Raster latency_encode(std::span<const double> x, long long window) {
  if (window < 1) throw Error(ErrorCode::invalid_argument, "T_window", "must be >= 1");
  Raster r(static_cast<std::size_t>(window), std::vector<double>(x.size(), 0.0));
  for (std::size_t i = 0; i < x.size(); ++i) r[static_cast<std::size_t>(latency_step(x[i], window))][i] = 1.0;
  return r;
}

inline std::vector<double> poisson_generate(double rate_hz, std::size_t num, double dt, std::uint64_t stream,
                                            std::uint64_t trial, std::uint64_t step, std::uint64_t row = 0) {
  if (rate_hz < 0) throw Error(ErrorCode::invalid_argument, "rate", "must be >= 0");
  const double p = std::min(rate_hz * dt / 1000.0, 1.0);
  std::vector<double> out(num);
  for (std::size_t i = 0; i < num; ++i) out[i] = counter_uniform(stream, trial, step, row, i) < p ? 1.0 : 0.0;
  return out;
}

inline std::vector<double> constant_current_generate(double amplitude, std::size_t num) {
  return std::vector<double>(num, amplitude);
}

/// Index of the largest value; ties go to the lowest index.
inline std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

struct CountDecode {
  std::vector<double> counts;  // per class
  std::size_t predicted = 0;
};

/// Per-neuron spike counts. With more neurons than classes the neurons are
/// split into equal contiguous blocks, one per class.
inline CountDecode spike_count_decode(const Raster& raster, std::size_t num_classes) {
  const std::size_t n = raster.empty() ? num_classes : raster.front().size();
  if (num_classes == 0 || n % num_classes != 0)
    throw Error(ErrorCode::shape_mismatch, "num_classes", "must divide the neuron count");
  const std::size_t per = n / num_classes;
  CountDecode d;
  d.counts.assign(num_classes, 0.0);
  for (const auto& row : raster)
    for (std::size_t i = 0; i < n; ++i) d.counts[i / per] += row[i];
  d.predicted = argmax(d.counts);
  return d;
}

/// Neuron with the earliest first spike (lowest index on ties), none if silent.
inline std::optional<std::size_t> first_spike_decode(const Raster& raster) {
  for (const auto& row : raster)
    for (std::size_t i = 0; i < row.size(); ++i)
      if (row[i] != 0.0) return i;
  return std::nullopt;
}

/// Same rule on per-neuron first-spike steps (negative = silent).
inline std::optional<std::size_t> first_spike_decode(std::span<const double> first_steps) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < first_steps.size(); ++i)
    if (first_steps[i] >= 0 && (!best || first_steps[i] < first_steps[*best])) best = i;
  return best;
}

inline double global_reward(std::size_t predicted, std::size_t label, double pos = 1.0, double neg = -1.0) {
  return predicted == label ? pos : neg;
}

inline std::vector<double> global_reward(std::span<const std::size_t> predicted, std::span<const std::size_t> labels,
                                         double pos = 1.0, double neg = -1.0) {
  if (predicted.size() != labels.size()) throw Error(ErrorCode::shape_mismatch, "labels", "batch sizes differ");
  std::vector<double> r(labels.size());
  for (std::size_t b = 0; b < labels.size(); ++b) r[b] = global_reward(predicted[b], labels[b], pos, neg);
  return r;
}

/// Mean rate (Hz) of each population; `sizes` partitions the neurons in order.
inline std::vector<double> population_rates(const Raster& raster, std::span<const std::size_t> sizes, double dt) {
  std::vector<double> rates(sizes.size(), 0.0);
  const double seconds = static_cast<double>(raster.size()) * dt / 1000.0;
  std::size_t start = 0;
  for (std::size_t a = 0; a < sizes.size(); ++a) {
    double total = 0.0;
    for (const auto& row : raster)
      for (std::size_t i = start; i < start + sizes[a]; ++i) total += row.at(i);
    rates[a] = (sizes[a] == 0 || seconds <= 0.0) ? 0.0 : total / static_cast<double>(sizes[a]) / seconds;
    start += sizes[a];
  }
  return rates;
}

inline std::size_t population_rate_action(const Raster& raster, std::span<const std::size_t> sizes, double dt = 1.0) {
  return argmax(population_rates(raster, sizes, dt));
}

/// Equal contiguous populations.
inline std::size_t population_rate_action(const Raster& raster, std::size_t populations, double dt = 1.0) {
  const std::size_t n = raster.empty() ? populations : raster.front().size();
  if (populations == 0 || n % populations != 0)
    throw Error(ErrorCode::shape_mismatch, "populations", "must divide the neuron count");
  const std::vector<std::size_t> sizes(populations, n / populations);
  return population_rate_action(raster, sizes, dt);
}

}  // namespace snnforge::coding
