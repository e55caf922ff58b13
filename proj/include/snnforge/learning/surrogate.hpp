#pragma once

#include <cmath>

#include "snnforge/frontend/spec.hpp"

namespace snnforge {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Pseudo-derivative dO/dV of the hard threshold, used only on the backward
/// pass.
inline double surrogate_spike_backward(double V, double V_th, const SurrogateSpec& s) {
  const double x = V - V_th;
  if (s.kind == SurrogateSpec::Kind::rectangular)
    return std::abs(x) < s.width ? 1.0 / (2.0 * s.width) : 0.0;
  const double z = sigmoid(s.beta * x);
  return s.beta * z * (1.0 - z);
}

inline SurrogateSpec rectangular_surrogate(double a = 0.5) {
  return {SurrogateSpec::Kind::rectangular, a, 2.0};
}
inline SurrogateSpec sigmoid_surrogate(double beta = 2.0) {
  return {SurrogateSpec::Kind::sigmoid, 0.5, beta};
}

}  // namespace snnforge
