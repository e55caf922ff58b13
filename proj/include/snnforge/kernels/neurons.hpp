#pragma once

// Per-element neuron update rules. The batched op kernels in builtin_ops.hpp
// loop over these; the test oracles re-derive the same equations separately.

#include <algorithm>
#include <cmath>

#include "snnforge/frontend/spec.hpp"

namespace snnforge::kernels {

inline double param_or(const ParamTable& p, const char* name, double fallback) {
  auto it = p.find(name);
  return it == p.end() ? fallback : it->second;
}

// ---------------------------------------------------------------- LIF

struct LifParams {
  double tau_m = 20.0;
  double V_rest = 0.0;
  double V_reset = 0.0;
  double V_th = 1.0;
  double R = 1.0;
  double t_refrac = 0.0;

  static LifParams from(const ParamTable& p) {
    LifParams r;
    r.tau_m = param_or(p, "tau_m", r.tau_m);
    r.V_rest = param_or(p, "V_rest", r.V_rest);
    r.V_reset = param_or(p, "V_reset", r.V_reset);
    r.V_th = param_or(p, "V_th", r.V_th);
    r.R = param_or(p, "R", r.R);
    r.t_refrac = param_or(p, "t_refrac", r.t_refrac);
    return r;
  }
};

/// Euler candidate voltage before the threshold test.
inline double lif_candidate(double V, double I, const LifParams& p, double dt) {
  return V + (dt / p.tau_m) * (-(V - p.V_rest) + p.R * I);
}

/// One hard-threshold LIF step. `refrac` counts remaining clamped steps.
/// Returns the spike flag.
inline bool lif_step(double& V, double I, double& refrac, const LifParams& p, double dt) {
  if (refrac > 0.0) {
    V = p.V_reset;
    refrac -= 1.0;
    return false;
  }
  const double vc = lif_candidate(V, I, p, dt);
  if (vc >= p.V_th) {
    V = p.V_reset;
    refrac = static_cast<double>(to_steps(p.t_refrac, dt));
    return true;
  }
  V = vc;
  return false;
}

// ---------------------------------------------------------------- aEIF

struct AeifParams {
  double C = 281.0;       // pF
  double gL = 30.0;       // nS
  double EL = -70.6;      // mV
  double delta_T = 2.0;   // mV
  double VT = -50.4;      // mV
  double a = 4.0;         // nS
  double b = 80.5;        // pA
  double tau_w = 144.0;   // ms
  double V_reset = -70.6; // mV
  double V_peak = 0.0;    // mV

  static AeifParams from(const ParamTable& p) {
    AeifParams r;
    r.C = param_or(p, "C", r.C);
    r.gL = param_or(p, "gL", r.gL);
    r.EL = param_or(p, "EL", r.EL);
    r.delta_T = param_or(p, "delta_T", r.delta_T);
    r.VT = param_or(p, "VT", r.VT);
    r.a = param_or(p, "a", r.a);
    r.b = param_or(p, "b", r.b);
    r.tau_w = param_or(p, "tau_w", r.tau_w);
    r.V_reset = param_or(p, "V_reset", r.EL);
    r.V_peak = param_or(p, "V_peak", r.V_peak);
    return r;
  }
};

inline constexpr double kAeifExpClamp = 20.0;

inline bool aeif_step(double& V, double& w, double I, const AeifParams& p, double dt) {
  const double ex = std::exp(std::min((V - p.VT) / p.delta_T, kAeifExpClamp));
  const double dv = -p.gL * (V - p.EL) + p.gL * p.delta_T * ex - w + I;
  const double dw = p.a * (V - p.EL) - w;
  double v_next = V + (dt / p.C) * dv;
  double w_next = w + (dt / p.tau_w) * dw;
  bool spike = false;
  if (v_next >= p.V_peak) {
    spike = true;
    v_next = p.V_reset;
    w_next += p.b;
  }
  V = v_next;
  w = w_next;
  return spike;
}

// ---------------------------------------------------------------- Izhikevich

struct IzhParams {
  double a = 0.02;
  double b = 0.2;
  double c = -65.0;
  double d = 8.0;
  double v_peak = 30.0;

  static IzhParams from(const ParamTable& p) {
    IzhParams r;
    r.a = param_or(p, "a", r.a);
    r.b = param_or(p, "b", r.b);
    r.c = param_or(p, "c", r.c);
    r.d = param_or(p, "d", r.d);
    r.v_peak = param_or(p, "v_peak", r.v_peak);
    return r;
  }
};

inline bool izh_step(double& v, double& u, double I, const IzhParams& p, double dt) {
  double v_next = v + dt * (0.04 * v * v + 5.0 * v + 140.0 - u + I);
  double u_next = u + dt * p.a * (p.b * v - u);
  bool spike = false;
  if (v_next >= p.v_peak) {
    spike = true;
    v_next = p.c;
    u_next += p.d;
  }
  v = v_next;
  u = u_next;
  return spike;
}

// ---------------------------------------------------------------- Hodgkin-Huxley

struct HhParams {
  double gNa = 120.0;  // mS/cm^2
  double gK = 36.0;
  double gL = 0.3;
  double ENa = 50.0;   // mV
  double EK = -77.0;
  double EL = -54.387;
  double C = 1.0;      // uF/cm^2

  static HhParams from(const ParamTable& p) {
    HhParams r;
    r.gNa = param_or(p, "gNa", r.gNa);
    r.gK = param_or(p, "gK", r.gK);
    r.gL = param_or(p, "gL", r.gL);
    r.ENa = param_or(p, "ENa", r.ENa);
    r.EK = param_or(p, "EK", r.EK);
    r.EL = param_or(p, "EL", r.EL);
    r.C = param_or(p, "C", r.C);
    return r;
  }
};

namespace hh {

// x / (1 - exp(-x / s)) with its removable singularity at x = 0.
inline double vtrap(double x, double s) {
  if (std::abs(x / s) < 1e-7) return s * (1.0 + x / (2.0 * s));
  return x / (1.0 - std::exp(-x / s));
}

inline double alpha_m(double V) { return 0.1 * vtrap(V + 40.0, 10.0); }
inline double beta_m(double V) { return 4.0 * std::exp(-(V + 65.0) / 18.0); }
inline double alpha_h(double V) { return 0.07 * std::exp(-(V + 65.0) / 20.0); }
inline double beta_h(double V) { return 1.0 / (1.0 + std::exp(-(V + 35.0) / 10.0)); }
inline double alpha_n(double V) { return 0.01 * vtrap(V + 55.0, 10.0); }
inline double beta_n(double V) { return 0.125 * std::exp(-(V + 65.0) / 80.0); }

inline double m_inf(double V) { return alpha_m(V) / (alpha_m(V) + beta_m(V)); }
inline double h_inf(double V) { return alpha_h(V) / (alpha_h(V) + beta_h(V)); }
inline double n_inf(double V) { return alpha_n(V) / (alpha_n(V) + beta_n(V)); }

inline double ionic_current(double V, double m, double h, double n, const HhParams& p) {
  return p.gNa * m * m * m * h * (V - p.ENa) + p.gK * n * n * n * n * (V - p.EK) +
         p.gL * (V - p.EL);
}

/// Membrane potential where the steady-state ionic current vanishes,
/// bracketed in [-90, -40] mV.
inline double resting_potential(const HhParams& p) {
  auto f = [&](double V) { return ionic_current(V, m_inf(V), h_inf(V), n_inf(V), p); };
  double lo = -90.0, hi = -40.0;
  if (f(lo) * f(hi) > 0) return -65.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((f(lo) < 0) == (f(mid) < 0)) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double gate_step(double x, double alpha, double beta, double dt) {
  const double tau = 1.0 / (alpha + beta);
  const double inf = alpha * tau;
  return std::clamp(inf + (x - inf) * std::exp(-dt / tau), 0.0, 1.0);
}

}  // namespace hh

/// Euler on V, exponential Euler on the gates; both from the previous state.
/// Spike = upward crossing of 0 mV.
inline bool hh_step(double& V, double& m, double& h, double& n, double I, const HhParams& p,
                    double dt) {
  const double v0 = V;
  const double v_next = v0 + (dt / p.C) * (I - hh::ionic_current(v0, m, h, n, p));
  m = hh::gate_step(m, hh::alpha_m(v0), hh::beta_m(v0), dt);
  h = hh::gate_step(h, hh::alpha_h(v0), hh::beta_h(v0), dt);
  n = hh::gate_step(n, hh::alpha_n(v0), hh::beta_n(v0), dt);
  V = v_next;
  return v0 < 0.0 && v_next >= 0.0;
}

}  // namespace snnforge::kernels
