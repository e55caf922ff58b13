#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "snnforge/core/error.hpp"
#include "snnforge/core/rng.hpp"

namespace snnforge {

struct Sample {
  std::vector<double> x;  // intensities in [0, 1]
  std::size_t label = 0;
  bool operator==(const Sample&) const = default;
};

struct SyntheticDataset {
  std::size_t classes = 2, n = 20, samples_per_class = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> templates;
  std::vector<Sample> samples;  // labels cycle 0, 1, ..., classes-1, 0, ...
};

/// Class c's template is 0.8 on its block of n/classes inputs (the last block
/// absorbs the remainder) and 0 elsewhere; samples add N(0, sigma) noise and
/// clip to [0, 1].
inline SyntheticDataset make_dataset(std::size_t classes, std::size_t n, std::size_t samples_per_class, double sigma,
                                     std::uint64_t seed) {
  if (classes < 2) throw Error(ErrorCode::invalid_argument, "classes", "must be >= 2");
  if (n < classes) throw Error(ErrorCode::invalid_argument, "n", "must be >= classes");
  if (sigma < 0) throw Error(ErrorCode::invalid_argument, "sigma", "must be >= 0");
  SyntheticDataset d{classes, n, samples_per_class, sigma, seed, {}, {}};
  const std::size_t block = n / classes;
  for (std::size_t c = 0; c < classes; ++c) {
    std::vector<double> t(n, 0.0);
    const std::size_t end = c + 1 == classes ? n : (c + 1) * block;
    for (std::size_t i = c * block; i < end; ++i) t[i] = 0.8;
    d.templates.push_back(std::move(t));
  }
  InitRng rng(stream_key(seed, "dataset"));
  for (std::size_t k = 0; k < samples_per_class; ++k)
    for (std::size_t c = 0; c < classes; ++c) {
      Sample s{d.templates[c], c};
      for (auto& v : s.x) v = std::clamp(v + (sigma > 0 ? rng.normal(0.0, sigma) : 0.0), 0.0, 1.0);
      d.samples.push_back(std::move(s));
    }
  return d;
}

}  // namespace snnforge
