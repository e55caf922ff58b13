#pragma once

#include <cmath>
#include <span>

#include "snnforge/frontend/spec.hpp"
#include "snnforge/kernels/neurons.hpp"

namespace snnforge::kernels {

struct SynapseParams {
  double tau = 5.0;  // ms
  double E = 0.0;    // mV reversal
  double Mg = 1.0;   // mM, nmda only

  static SynapseParams defaults(SynapseKind k) {
    switch (k) {
      case SynapseKind::gaba: return {10.0, -70.0, 1.0};
      case SynapseKind::nmda: return {100.0, 0.0, 1.0};
      default: return {5.0, 0.0, 1.0};
    }
  }

  static SynapseParams from(SynapseKind k, const ParamTable& p) {
    SynapseParams r = defaults(k);
    r.tau = param_or(p, "tau", r.tau);
    r.E = param_or(p, "E", r.E);
    r.Mg = param_or(p, "Mg", r.Mg);
    return r;
  }
};

inline double nmda_block(double V, double Mg) {
  return 1.0 / (1.0 + std::exp(-0.062 * V) * Mg / 3.57);
}

/// Exponential conductance step: g' = g e^{-dt/tau} + x, I = g' (E - V),
/// times the Mg block for NMDA. Updates g in place.
inline void conductance_step(SynapseKind kind, std::span<double> g, std::span<const double> x,
                             std::span<const double> v_post, std::span<double> i_syn,
                             const SynapseParams& p, double dt) {
  const double decay = std::exp(-dt / p.tau);
  for (std::size_t k = 0; k < g.size(); ++k) {
    g[k] = g[k] * decay + x[k];
    double i = g[k] * (p.E - v_post[k]);
    if (kind == SynapseKind::nmda) i *= nmda_block(v_post[k], p.Mg);
    i_syn[k] = i;
  }
}

}  // namespace snnforge::kernels
