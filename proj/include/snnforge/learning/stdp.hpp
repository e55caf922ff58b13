#pragma once

// All-to-all trace STDP and its reward-modulated variant. Each tick, in this
// order: traces (and eligibility) decay; every presynaptic spike depresses its
// synapses by A- x_post and bumps x_pre; every postsynaptic spike potentiates
// by A+ x_pre and bumps x_post; weights are clipped.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "snnforge/compiler/ir.hpp"
#include "snnforge/core/error.hpp"
#include "snnforge/engine/state.hpp"
#include "snnforge/kernels/neurons.hpp"

namespace snnforge {

struct StdpParams {
  double A_plus = 0.01;
  double A_minus = 0.0105;
  double tau_plus = 20.0;
  double tau_minus = 20.0;
  double w_min = 0.0;
  double w_max = 1.0;
  double tau_e = 1000.0;  // rstdp eligibility
  double lr = 1.0;        // rstdp

  static StdpParams from(const ParamTable& h) {
    StdpParams p;
    p.A_plus = kernels::param_or(h, "A_plus", p.A_plus);
    p.A_minus = kernels::param_or(h, "A_minus", p.A_minus);
    p.tau_plus = kernels::param_or(h, "tau_plus", p.tau_plus);
    p.tau_minus = kernels::param_or(h, "tau_minus", p.tau_minus);
    p.w_min = kernels::param_or(h, "w_min", p.w_min);
    p.w_max = kernels::param_or(h, "w_max", p.w_max);
    p.tau_e = kernels::param_or(h, "tau_e", p.tau_e);
    p.lr = kernels::param_or(h, "lr", p.lr);
    return p;
  }
};

// Synapse layout a learning rule walks: row i of a CSR structure lists the
// (edge, post) pairs of presynaptic neuron i.
struct SynapseLayout {
  enum class Kind { dense, csr, diagonal } kind = Kind::dense;
  std::size_t n_pre = 0, n_post = 0;
  std::vector<std::size_t> row_ptr, post_idx;  // csr only

  static SynapseLayout dense(std::size_t n_pre, std::size_t n_post) { return {Kind::dense, n_pre, n_post, {}, {}}; }
  static SynapseLayout diagonal(std::size_t n) { return {Kind::diagonal, n, n, {}, {}}; }
  static SynapseLayout csr(std::size_t n_pre, std::size_t n_post, std::span<const double> row_ptr,
                           std::span<const double> post_idx) {
    SynapseLayout l{Kind::csr, n_pre, n_post, {}, {}};
    for (double r : row_ptr) l.row_ptr.push_back(static_cast<std::size_t>(r));
    for (double p : post_idx) l.post_idx.push_back(static_cast<std::size_t>(p));
    return l;
  }

  std::size_t synapses() const {
    switch (kind) {
      case Kind::dense: return n_pre * n_post;
      case Kind::diagonal: return n_pre;
      case Kind::csr: return post_idx.size();
    }
    return 0;
  }

  template <class F>  // f(edge, pre, post)
  void for_row(std::size_t i, F&& f) const {
    switch (kind) {
      case Kind::dense:
        for (std::size_t j = 0; j < n_post; ++j) f(i * n_post + j, i, j);
        break;
      case Kind::diagonal: f(i, i, i); break;
      case Kind::csr:
        for (std::size_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e) f(e, i, post_idx[e]);
        break;
    }
  }
};

struct TraceState {
  std::vector<double> x_pre, x_post;  // batch rows back to back
  std::vector<double> e;              // per batch row and synapse (rstdp)

  static TraceState create(const SynapseLayout& l, std::size_t batch = 1, bool eligibility = false) {
    TraceState t;
    t.x_pre.assign(batch * l.n_pre, 0.0);
    t.x_post.assign(batch * l.n_post, 0.0);
    if (eligibility) t.e.assign(batch * l.synapses(), 0.0);
    return t;
  }
  void clear() {
    std::fill(x_pre.begin(), x_pre.end(), 0.0);
    std::fill(x_post.begin(), x_post.end(), 0.0);
    std::fill(e.begin(), e.end(), 0.0);
  }
};

namespace detail {

// Adds the STDP increment of every synapse of batch row b to out[edge]
// (out has one slot per synapse) and advances the traces of that row.
inline void stdp_increments(const SynapseLayout& l, std::span<const double> pre, std::span<const double> post,
                            TraceState& t, const StdpParams& p, double dt, std::size_t b, std::span<double> out) {
  const double dp = std::exp(-dt / p.tau_plus), dm = std::exp(-dt / p.tau_minus);
  double* xpre = t.x_pre.data() + b * l.n_pre;
  double* xpost = t.x_post.data() + b * l.n_post;
  const double* s_pre = pre.data() + b * l.n_pre;
  const double* s_post = post.data() + b * l.n_post;
  for (std::size_t i = 0; i < l.n_pre; ++i) xpre[i] *= dp;
  for (std::size_t j = 0; j < l.n_post; ++j) xpost[j] *= dm;
  bool any_post = false;
  for (std::size_t j = 0; j < l.n_post; ++j) any_post = any_post || s_post[j] != 0.0;

  // Depression reads x_post before this tick's post spikes; potentiation
  // reads x_pre after this tick's pre spikes.
  for (std::size_t i = 0; i < l.n_pre; ++i) {
    const bool fired = s_pre[i] != 0.0;
    if (!fired && !any_post) continue;
    const double xi = xpre[i] + (fired ? 1.0 : 0.0);
    l.for_row(i, [&](std::size_t e, std::size_t, std::size_t j) {
      if (fired) out[e] -= p.A_minus * xpost[j];
      if (s_post[j] != 0.0) out[e] += p.A_plus * xi;
    });
  }
  for (std::size_t i = 0; i < l.n_pre; ++i)
    if (s_pre[i] != 0.0) xpre[i] += 1.0;
  for (std::size_t j = 0; j < l.n_post; ++j)
    if (s_post[j] != 0.0) xpost[j] += 1.0;
}

inline std::size_t batch_rows(const SynapseLayout& l, std::span<const double> pre, std::span<const double> post) {
  const std::size_t b = l.n_pre ? pre.size() / l.n_pre : 0;
  if (pre.size() != b * l.n_pre || post.size() != b * l.n_post || b == 0)
    throw Error(ErrorCode::shape_mismatch, "stdp", "spike vectors do not match the layout");
  return b;
}

}  // namespace detail

/// One STDP tick. Weight changes of all batch rows are summed.
inline void stdp_step(std::span<double> W, const SynapseLayout& l, std::span<const double> pre,
                      std::span<const double> post, TraceState& t, const StdpParams& p, double dt) {
  const std::size_t rows = detail::batch_rows(l, pre, post);
  for (std::size_t b = 0; b < rows; ++b) detail::stdp_increments(l, pre, post, t, p, dt, b, W);
  for (auto& w : W) w = std::clamp(w, p.w_min, p.w_max);
}

/// Dense single-row overload: W is (n_pre, n_post), pre-major.
inline void stdp_step(std::span<double> W, std::span<const double> pre, std::span<const double> post, TraceState& t,
                      const StdpParams& p, double dt) {
  stdp_step(W, SynapseLayout::dense(t.x_pre.size(), t.x_post.size()), pre, post, t, p, dt);
}

/// One reward-modulated tick: STDP increments go into the eligibility trace,
/// which decays with tau_e; W += lr * reward_b * e_b summed over rows.
inline void rstdp_step(std::span<double> W, const SynapseLayout& l, std::span<const double> pre,
                       std::span<const double> post, TraceState& t, std::span<const double> reward,
                       const StdpParams& p, double dt) {
  const std::size_t rows = detail::batch_rows(l, pre, post);
  const std::size_t ns = l.synapses();
  if (t.e.size() != rows * ns) t.e.assign(rows * ns, 0.0);
  if (reward.size() != rows && reward.size() != 1)
    throw Error(ErrorCode::shape_mismatch, "reward", "one value per batch row expected");
  const double de = std::exp(-dt / p.tau_e);
  for (auto& e : t.e) e *= de;
  for (std::size_t b = 0; b < rows; ++b) {
    std::span<double> eb(t.e.data() + b * ns, ns);
    detail::stdp_increments(l, pre, post, t, p, dt, b, eb);
    const double r = reward.size() == 1 ? reward[0] : reward[b];
    if (r == 0.0) continue;
    for (std::size_t s = 0; s < ns; ++s) W[s] += p.lr * r * eb[s];
  }
  for (auto& w : W) w = std::clamp(w, p.w_min, p.w_max);
}

/// Learning-rule view of a compiled connection.
inline SynapseLayout layout_of(const SimState& s, const LoweredConnection& c) {
  switch (c.link_type) {
    case LinkType::full: return SynapseLayout::dense(c.n_pre, c.n_post);
    case LinkType::one_to_one: return SynapseLayout::diagonal(c.n_post);
    case LinkType::sparse_random:
      return SynapseLayout::csr(c.n_pre, c.n_post, s.values[static_cast<std::size_t>(c.row_ptr)],
                                s.values[static_cast<std::size_t>(c.post_idx)]);
    case LinkType::conv2d: break;
  }
  throw Error(ErrorCode::invalid_argument, c.id, "plasticity is not defined for conv2d connections");
}

}  // namespace snnforge
