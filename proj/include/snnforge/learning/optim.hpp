#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "snnforge/core/error.hpp"

namespace snnforge {

inline void sgd_step(std::span<double> params, std::span<const double> grads, double lr) {
  if (params.size() != grads.size()) throw Error(ErrorCode::shape_mismatch, "sgd", "params and grads differ");
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grads[i];
}

struct AdamParams {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m, v;
  long long t = 0;
};

inline void adam_step(std::span<double> params, std::span<const double> grads, AdamState& s, const AdamParams& p) {
  if (params.size() != grads.size()) throw Error(ErrorCode::shape_mismatch, "adam", "params and grads differ");
  if (s.m.size() != params.size()) {
    s.m.assign(params.size(), 0.0);
    s.v.assign(params.size(), 0.0);
    s.t = 0;
  }
  ++s.t;
  const double c1 = 1.0 - std::pow(p.beta1, static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(p.beta2, static_cast<double>(s.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    s.m[i] = p.beta1 * s.m[i] + (1.0 - p.beta1) * grads[i];
    s.v[i] = p.beta2 * s.v[i] + (1.0 - p.beta2) * grads[i] * grads[i];
    params[i] -= p.lr * (s.m[i] / c1) / (std::sqrt(s.v[i] / c2) + p.eps);
  }
}

}  // namespace snnforge
