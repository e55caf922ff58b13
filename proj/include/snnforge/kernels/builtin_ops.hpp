#pragma once

// The builtin kernel set: forward (and, where defined, backward) rules for
// every op name the compiler emits.

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "snnforge/compiler/op_def.hpp"
#include "snnforge/core/rng.hpp"
#include "snnforge/kernels/aggregate.hpp"
#include "snnforge/kernels/neurons.hpp"
#include "snnforge/kernels/synapses.hpp"
#include "snnforge/learning/surrogate.hpp"

namespace snnforge::kernels {

namespace shape_rules {

inline std::vector<Shape> elementwise(const std::vector<Shape>& args, const ParamTable&) {
  Shape out{1};
  for (const auto& s : args)
    if (numel(s) != 1) {
      if (numel(out) != 1 && numel(out) != numel(s))
        throw Error(ErrorCode::shape_mismatch, "elementwise", "operand sizes differ");
      out = s;
    }
  return {out};
}

/// k results, each shaped like argument 0, after checking the others conform.
inline ShapeRule same_as_first(std::size_t results) {
  return [results](const std::vector<Shape>& args, const ParamTable&) {
    if (args.empty()) throw Error(ErrorCode::shape_mismatch, "neuron", "no operands");
    const auto n = numel(args[0]);
    for (const auto& s : args)
      if (numel(s) != n && numel(s) != 1)
        throw Error(ErrorCode::shape_mismatch, "neuron", "operand sizes differ");
    return std::vector<Shape>(results, args[0]);
  };
}

inline Shape from_attr_num(const ParamTable& attrs) {
  auto it = attrs.find("num");
  if (it == attrs.end()) throw Error(ErrorCode::shape_mismatch, "source", "missing num");
  return {static_cast<std::size_t>(it->second)};
}

}  // namespace shape_rules

namespace detail {

inline std::size_t grad_index(const VariableDecl& d, std::size_t b, std::size_t i) {
  const std::size_t w = d.size();
  return (d.batched() ? b * w : 0) + (w == 1 ? 0 : i);
}

inline std::size_t rows(const VariableDecl& d, std::size_t batch) {
  return d.batched() ? batch : 1;
}

template <class F>
void elementwise_forward(OpContext& c, F f) {
  const auto& rd = *c.result_decls[0];
  const std::size_t w = rd.size();
  const std::size_t nb = rows(rd, c.batch);
  std::vector<ArrayView> views;
  for (std::size_t k = 0; k < c.args.size(); ++k) views.push_back(c.arg(k));
  std::vector<double> vals(views.size());
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t i = 0; i < w; ++i) {
      for (std::size_t k = 0; k < views.size(); ++k) vals[k] = views[k].at(b, i);
      c.results[0][b * w + i] = f(vals.data());
    }
}

// `df(vals, out, k)` returns d out / d arg k.
template <class DF>
void elementwise_backward(BackwardContext& c, DF df) {
  const auto& rd = *c.result_decls[0];
  const std::size_t w = rd.size();
  const std::size_t nb = rows(rd, c.batch);
  std::vector<ArrayView> views;
  for (std::size_t k = 0; k < c.args.size(); ++k)
    views.push_back({c.args[k], c.arg_decls[k]->size(), c.arg_decls[k]->batched()});
  std::vector<double> vals(views.size());
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t i = 0; i < w; ++i) {
      const double g = c.g_results[0][b * w + i];
      if (g == 0.0) continue;
      for (std::size_t k = 0; k < views.size(); ++k) vals[k] = views[k].at(b, i);
      const double out = c.results[0][b * w + i];
      for (std::size_t k = 0; k < views.size(); ++k)
        if (!c.g_args[k].empty())
          c.g_args[k][grad_index(*c.arg_decls[k], b, i)] += g * df(vals.data(), out, k);
    }
}

inline OpDef make(std::string name, ForwardFn f, BackwardFn b, ShapeRule s) {
  OpDef d;
  d.name = std::move(name);
  d.forward = std::move(f);
  d.backward = std::move(b);
  d.shape_rule = std::move(s);
  return d;
}

inline double spike_value(double vc, double vth, const SpikeMode& m) {
  if (m.soft) return sigmoid(m.beta * (vc - vth));
  return vc >= vth ? 1.0 : 0.0;
}

inline double spike_slope(double vc, double vth, const SpikeMode& m, const SurrogateSpec& s) {
  if (m.soft) {
    const double z = sigmoid(m.beta * (vc - vth));
    return m.beta * z * (1.0 - z);
  }
  return surrogate_spike_backward(vc, vth, s);
}

}  // namespace detail

// ---------------------------------------------------------------- neurons

inline OpDef lif_update_op() {
  auto fwd = [](OpContext& c) {
    const auto p = LifParams::from(c.op.attrs);
    const auto I = c.arg(1);
    const std::size_t n = c.result_decls[0]->size();
    auto V = c.results[0];
    auto O = c.results[1];
    auto R = c.results[2];
    for (std::size_t b = 0; b < c.batch; ++b)
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = b * n + i;
        double v = c.args[0][k];
        double refrac = c.args[2][k];
        const double in = I.at(b, i);
        if (c.spikes.soft && refrac <= 0.0) {
          const double vc = lif_candidate(v, in, p, c.dt);
          const double o = detail::spike_value(vc, p.V_th, c.spikes);
          V[k] = vc * (1.0 - o) + p.V_reset * o;
          O[k] = o;
          R[k] = 0.0;
          continue;
        }
        const bool s = lif_step(v, in, refrac, p, c.dt);
        V[k] = v;
        O[k] = s ? 1.0 : 0.0;
        R[k] = refrac;
      }
  };
  auto bwd = [](BackwardContext& c) {
    const auto p = LifParams::from(c.op.attrs);
    const std::size_t n = c.result_decls[0]->size();
    const ArrayView I{c.args[1], c.arg_decls[1]->size(), c.arg_decls[1]->batched()};
    const double leak = 1.0 - c.dt / p.tau_m;
    const double gain = (c.dt / p.tau_m) * p.R;
    for (std::size_t b = 0; b < c.batch; ++b)
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = b * n + i;
        if (c.args[2][k] > 0.0) continue;  // clamped: no dependence on V or I
        const double vc = lif_candidate(c.args[0][k], I.at(b, i), p, c.dt);
        const double o = c.results[1][k];
        const double slope = detail::spike_slope(vc, p.V_th, c.spikes, c.surrogate);
        const double dv_dvc = (1.0 - o) + (p.V_reset - vc) * slope;
        const double g_vc = c.g_results[0][k] * dv_dvc + c.g_results[1][k] * slope;
        if (g_vc == 0.0) continue;
        if (!c.g_args[0].empty()) c.g_args[0][k] += g_vc * leak;
        if (!c.g_args[1].empty()) c.g_args[1][detail::grad_index(*c.arg_decls[1], b, i)] += g_vc * gain;
      }
  };
  return detail::make("lif_update", fwd, bwd, shape_rules::same_as_first(3));
}

inline OpDef aeif_update_op() {
  auto fwd = [](OpContext& c) {
    const auto p = AeifParams::from(c.op.attrs);
    const auto I = c.arg(2);
    const std::size_t n = c.result_decls[0]->size();
    for (std::size_t b = 0; b < c.batch; ++b)
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = b * n + i;
        double v = c.args[0][k], w = c.args[1][k];
        const bool s = aeif_step(v, w, I.at(b, i), p, c.dt);
        c.results[0][k] = v;
        c.results[1][k] = w;
        c.results[2][k] = s ? 1.0 : 0.0;
      }
  };
  return detail::make("aeif_update", fwd, {}, shape_rules::same_as_first(3));
}

inline OpDef izh_update_op() {
  auto fwd = [](OpContext& c) {
    const auto p = IzhParams::from(c.op.attrs);
    const auto I = c.arg(2);
    const std::size_t n = c.result_decls[0]->size();
    for (std::size_t b = 0; b < c.batch; ++b)
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = b * n + i;
        double v = c.args[0][k], u = c.args[1][k];
        const bool s = izh_step(v, u, I.at(b, i), p, c.dt);
        c.results[0][k] = v;
        c.results[1][k] = u;
        c.results[2][k] = s ? 1.0 : 0.0;
      }
  };
  return detail::make("izh_update", fwd, {}, shape_rules::same_as_first(3));
}

inline OpDef hh_update_op() {
  auto fwd = [](OpContext& c) {
    const auto p = HhParams::from(c.op.attrs);
    const auto I = c.arg(4);
    const std::size_t n = c.result_decls[0]->size();
    for (std::size_t b = 0; b < c.batch; ++b)
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = b * n + i;
        double v = c.args[0][k], m = c.args[1][k], h = c.args[2][k], nn = c.args[3][k];
        const bool s = hh_step(v, m, h, nn, I.at(b, i), p, c.dt);
        c.results[0][k] = v;
        c.results[1][k] = m;
        c.results[2][k] = h;
        c.results[3][k] = nn;
        c.results[4][k] = s ? 1.0 : 0.0;
      }
  };
  return detail::make("hh_update", fwd, {}, shape_rules::same_as_first(5));
}

inline OpDef rate_mass_update_op() {
  auto fwd = [](OpContext& c) {
    const auto I = c.arg(0);
    const double rate = c.attr("rate", 0.0), gain = c.attr("gain", 0.0);
    const double rmax = c.attr("rate_max", 1000.0);
    const std::size_t n = c.result_decls[0]->size();
    for (std::size_t b = 0; b < c.batch; ++b)
      for (std::size_t i = 0; i < n; ++i) {
        const double r = std::clamp(rate + gain * I.at(b, i), 0.0, rmax);
        const double prob = std::min(r * c.dt / 1000.0, 1.0);
        const double u = counter_uniform(c.op.stream, c.trial, static_cast<std::uint64_t>(c.step), b, i);
        c.results[0][b * n + i] = u < prob ? 1.0 : 0.0;
      }
  };
  auto d = detail::make("rate_mass_update", fwd, {}, shape_rules::same_as_first(1));
  d.stochastic = true;
  return d;
}

// ---------------------------------------------------------------- aggregation

inline OpDef weight_sum_op() {
  auto fwd = [](OpContext& c) {
    const auto& ws = c.arg_decls[0]->shape;
    weight_sum(c.args[0], c.args[1], c.results[0], c.batch, ws[0], ws[1]);
  };
  auto bwd = [](BackwardContext& c) {
    const auto& ws = c.arg_decls[0]->shape;
    weight_sum_backward(c.args[0], c.args[1], c.g_results[0], c.g_args[0], c.g_args[1], c.batch,
                        ws[0], ws[1]);
  };
  auto shape = [](const std::vector<Shape>& a, const ParamTable&) {
    if (a.size() != 2 || a[0].size() != 2 || numel(a[1]) != a[0][0])
      throw Error(ErrorCode::shape_mismatch, "weight_sum", "W must be (pre, post) with s of size pre");
    return std::vector<Shape>{Shape{a[0][1]}};
  };
  return detail::make("weight_sum", fwd, bwd, shape);
}

inline OpDef sparse_weight_sum_op() {
  auto fwd = [](OpContext& c) {
    const std::size_t n_pre = c.arg_decls[3]->size();
    const std::size_t n_post = c.result_decls[0]->size();
    sparse_weight_sum<double>(c.args[1], c.args[2], c.args[0], c.args[3], c.results[0], c.batch,
                              n_pre, n_post);
  };
  auto bwd = [](BackwardContext& c) {
    const std::size_t n_pre = c.arg_decls[3]->size();
    const std::size_t n_post = c.result_decls[0]->size();
    sparse_weight_sum_backward<double>(c.args[1], c.args[2], c.args[0], c.args[3], c.g_results[0],
                                       c.g_args[0], c.g_args[3], c.batch, n_pre, n_post);
  };
  auto shape = [](const std::vector<Shape>& a, const ParamTable& attrs) {
    if (a.size() != 4 || numel(a[1]) != numel(a[3]) + 1 || numel(a[0]) != numel(a[2]))
      throw Error(ErrorCode::shape_mismatch, "sparse_weight_sum", "inconsistent CSR layout");
    return std::vector<Shape>{shape_rules::from_attr_num(attrs)};
  };
  return detail::make("sparse_weight_sum", fwd, bwd, shape);
}

inline OpDef one_to_one_sum_op() {
  auto fwd = [](OpContext& c) {
    one_to_one_sum(c.args[0], c.args[1], c.results[0], c.batch, c.result_decls[0]->size());
  };
  auto bwd = [](BackwardContext& c) {
    one_to_one_sum_backward(c.args[0], c.args[1], c.g_results[0], c.g_args[0], c.g_args[1],
                            c.batch, c.result_decls[0]->size());
  };
  auto shape = [](const std::vector<Shape>& a, const ParamTable&) {
    if (a.size() != 2 || numel(a[0]) != numel(a[1]))
      throw Error(ErrorCode::shape_mismatch, "one_to_one_sum", "pre and post sizes differ");
    return std::vector<Shape>{a[1]};
  };
  return detail::make("one_to_one_sum", fwd, bwd, shape);
}

inline Conv2dGeometry conv_geometry(const ParamTable& a) {
  auto get = [&](const char* k) {
    auto it = a.find(k);
    return it == a.end() ? std::size_t{0} : static_cast<std::size_t>(it->second);
  };
  Conv2dGeometry g;
  g.in_channels = get("in_channels");
  g.in_height = get("in_height");
  g.in_width = get("in_width");
  g.out_channels = get("out_channels");
  g.out_height = get("out_height");
  g.out_width = get("out_width");
  g.kernel = get("kernel");
  g.stride = get("stride");
  g.padding = get("padding");
  return g;
}

inline OpDef conv2d_weight_sum_op() {
  auto fwd = [](OpContext& c) {
    conv2d_weight_sum(c.args[0], c.args[1], c.results[0], c.batch, conv_geometry(c.op.attrs));
  };
  auto bwd = [](BackwardContext& c) {
    conv2d_weight_sum_backward(c.args[0], c.args[1], c.g_results[0], c.g_args[0], c.g_args[1],
                               c.batch, conv_geometry(c.op.attrs));
  };
  auto shape = [](const std::vector<Shape>& a, const ParamTable& attrs) {
    const auto g = conv_geometry(attrs);
    if (a.size() != 2 || numel(a[0]) != g.kernel_size() || numel(a[1]) != g.in_size() ||
        g.out_height != Conv2dGeometry::out_extent(g.in_height, g.kernel, g.stride, g.padding) ||
        g.out_width != Conv2dGeometry::out_extent(g.in_width, g.kernel, g.stride, g.padding))
      throw Error(ErrorCode::shape_mismatch, "conv2d_weight_sum", "geometry does not conform");
    return std::vector<Shape>{Shape{g.out_channels, g.out_height, g.out_width}};
  };
  return detail::make("conv2d_weight_sum", fwd, bwd, shape);
}

/// y = M x with M row-major (rows, cols).
inline OpDef mat_mult_op() {
  auto fwd = [](OpContext& c) {
    const auto& ms = c.arg_decls[0]->shape;
    const auto x = c.arg(1);
    const std::size_t nb = detail::rows(*c.result_decls[0], c.batch);
    for (std::size_t b = 0; b < nb; ++b)
      for (std::size_t r = 0; r < ms[0]; ++r) {
        double acc = 0.0;
        for (std::size_t k = 0; k < ms[1]; ++k) acc += c.args[0][r * ms[1] + k] * x.at(b, k);
        c.results[0][b * ms[0] + r] = acc;
      }
  };
  auto bwd = [](BackwardContext& c) {
    const auto& ms = c.arg_decls[0]->shape;
    const ArrayView x{c.args[1], c.arg_decls[1]->size(), c.arg_decls[1]->batched()};
    const std::size_t nb = detail::rows(*c.result_decls[0], c.batch);
    for (std::size_t b = 0; b < nb; ++b)
      for (std::size_t r = 0; r < ms[0]; ++r) {
        const double g = c.g_results[0][b * ms[0] + r];
        for (std::size_t k = 0; k < ms[1]; ++k) {
          if (!c.g_args[0].empty()) c.g_args[0][r * ms[1] + k] += g * x.at(b, k);
          if (!c.g_args[1].empty())
            c.g_args[1][detail::grad_index(*c.arg_decls[1], b, k)] += g * c.args[0][r * ms[1] + k];
        }
      }
  };
  auto shape = [](const std::vector<Shape>& a, const ParamTable&) {
    if (a.size() != 2 || a[0].size() != 2 || numel(a[1]) != a[0][1])
      throw Error(ErrorCode::shape_mismatch, "mat_mult", "M must be (rows, cols) with x of size cols");
    return std::vector<Shape>{Shape{a[0][0]}};
  };
  return detail::make("mat_mult", fwd, bwd, shape);
}

inline OpDef add_n_op() {
  auto fwd = [](OpContext& c) {
    detail::elementwise_forward(c, [n = c.args.size()](const double* v) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += v[k];
      return s;
    });
  };
  auto bwd = [](BackwardContext& c) {
    detail::elementwise_backward(c, [](const double*, double, std::size_t) { return 1.0; });
  };
  return detail::make("add_n", fwd, bwd, shape_rules::elementwise);
}

// ---------------------------------------------------------------- synapses

inline OpDef synapse_conductance_op() {
  auto fwd = [](OpContext& c) {
    const auto kind = static_cast<SynapseKind>(static_cast<int>(c.attr("kind")));
    SynapseParams p{c.attr("tau", 5.0), c.attr("E", 0.0), c.attr("Mg", 1.0)};
    // g is updated in place; x and V are read before g is written.
    std::vector<double> g(c.args[0].begin(), c.args[0].end());
    conductance_step(kind, g, c.args[1], c.args[2], c.results[1], p, c.dt);
    std::copy(g.begin(), g.end(), c.results[0].begin());
  };
  return detail::make("synapse_conductance", fwd, {}, shape_rules::same_as_first(2));
}

/// I_j = sum_i w_ij (V_pre_i - V_post_j). attr link: 0 full, 1 sparse, 2 one_to_one.
inline OpDef gap_junction_op() {
  auto fwd = [](OpContext& c) {
    const int link = static_cast<int>(c.attr("link"));
    const std::size_t n_post = c.result_decls[0]->size();
    auto out = c.results[0];
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t pre_arg = link == 1 ? 3 : 1;
    const auto v_pre = c.args[pre_arg], v_post = c.args[pre_arg + 1];
    const std::size_t n_pre = c.arg_decls[pre_arg]->size();
    const auto w = c.args[0];
    for (std::size_t b = 0; b < c.batch; ++b) {
      const double* vp = v_pre.data() + b * n_pre;
      const double* vq = v_post.data() + b * n_post;
      double* ob = out.data() + b * n_post;
      if (link == 0) {
        for (std::size_t i = 0; i < n_pre; ++i)
          for (std::size_t j = 0; j < n_post; ++j) ob[j] += w[i * n_post + j] * (vp[i] - vq[j]);
      } else if (link == 1) {
        const auto row_ptr = c.args[1], post_idx = c.args[2];
        for (std::size_t i = 0; i < n_pre; ++i)
          for (auto e = static_cast<std::size_t>(row_ptr[i]); e < static_cast<std::size_t>(row_ptr[i + 1]); ++e) {
            const auto j = static_cast<std::size_t>(post_idx[e]);
            ob[j] += w[e] * (vp[i] - vq[j]);
          }
      } else {
        for (std::size_t j = 0; j < n_post; ++j) ob[j] = w[j] * (vp[j] - vq[j]);
      }
    }
  };
  auto shape = [](const std::vector<Shape>&, const ParamTable& attrs) {
    return std::vector<Shape>{shape_rules::from_attr_num(attrs)};
  };
  return detail::make("gap_junction", fwd, {}, shape);
}

// ---------------------------------------------------------------- delay

inline OpDef delay_op() {
  auto fwd = [](OpContext& c) {
    if (c.delay == nullptr) throw Error(ErrorCode::invalid_argument, c.op.results[0], "no delay buffer bound");
    c.delay->push_pop(c.args[0], c.results[0]);
  };
  auto bwd = [](BackwardContext& c) {
    if (c.g_args[0].empty()) return;
    std::vector<double> shifted(c.g_results[0].size());
    c.delay->push_pop(c.g_results[0], shifted);
    for (std::size_t k = 0; k < shifted.size(); ++k) c.g_args[0][k] += shifted[k];
  };
  auto d = detail::make("delay", fwd, bwd, shape_rules::same_as_first(1));
  d.uses_delay = true;
  return d;
}

// ---------------------------------------------------------------- nodes

inline OpDef poisson_encode_op() {
  auto fwd = [](OpContext& c) {
    const double rate_max = c.attr("rate_max", 100.0);
    const auto x = c.arg(0);
    const std::size_t n = c.result_decls[0]->size();
    for (std::size_t b = 0; b < c.batch; ++b)
      for (std::size_t i = 0; i < n; ++i) {
        const double xi = std::clamp(x.at(b, i), 0.0, 1.0);
        const double prob = std::min(xi * rate_max * c.dt / 1000.0, 1.0);
        const double u = counter_uniform(c.op.stream, c.trial, static_cast<std::uint64_t>(c.step), b, i);
        c.results[0][b * n + i] = u < prob ? 1.0 : 0.0;
      }
  };
  auto d = detail::make("poisson_encode", fwd, {}, shape_rules::same_as_first(1));
  d.stochastic = true;
  return d;
}

inline long long latency_step(double x, long long window) {
  const double xi = std::clamp(x, 0.0, 1.0);
  return static_cast<long long>(std::floor((1.0 - xi) * static_cast<double>(window - 1)));
}

inline OpDef latency_encode_op() {
  auto fwd = [](OpContext& c) {
    const auto window = std::max<long long>(1, static_cast<long long>(c.attr("T_window", 1.0)));
    const long long local = c.step % window;
    const auto x = c.arg(0);
    const std::size_t n = c.result_decls[0]->size();
    for (std::size_t b = 0; b < c.batch; ++b)
      for (std::size_t i = 0; i < n; ++i)
        c.results[0][b * n + i] = latency_step(x.at(b, i), window) == local ? 1.0 : 0.0;
  };
  return detail::make("latency_encode", fwd, {}, shape_rules::same_as_first(1));
}

inline OpDef poisson_generate_op() {
  auto fwd = [](OpContext& c) {
    const double prob = std::min(std::max(c.attr("rate"), 0.0) * c.dt / 1000.0, 1.0);
    const std::size_t n = c.result_decls[0]->size();
    for (std::size_t b = 0; b < c.batch; ++b)
      for (std::size_t i = 0; i < n; ++i) {
        const double u = counter_uniform(c.op.stream, c.trial, static_cast<std::uint64_t>(c.step), b, i);
        c.results[0][b * n + i] = u < prob ? 1.0 : 0.0;
      }
  };
  auto shape = [](const std::vector<Shape>&, const ParamTable& attrs) {
    return std::vector<Shape>{shape_rules::from_attr_num(attrs)};
  };
  auto d = detail::make("poisson_generate", fwd, {}, shape);
  d.stochastic = true;
  return d;
}

inline OpDef constant_current_generate_op() {
  auto fwd = [](OpContext& c) {
    std::fill(c.results[0].begin(), c.results[0].end(), c.attr("amplitude"));
  };
  auto shape = [](const std::vector<Shape>&, const ParamTable& attrs) {
    return std::vector<Shape>{shape_rules::from_attr_num(attrs)};
  };
  return detail::make("constant_current_generate", fwd, {}, shape);
}

inline OpDef spike_count_op() {
  auto fwd = [](OpContext& c) {
    for (std::size_t k = 0; k < c.results[0].size(); ++k) c.results[0][k] = c.args[0][k] + c.args[1][k];
  };
  return detail::make("spike_count", fwd, {}, shape_rules::same_as_first(1));
}

inline OpDef first_spike_op() {
  auto fwd = [](OpContext& c) {
    for (std::size_t k = 0; k < c.results[0].size(); ++k) {
      const double f = c.args[0][k];
      c.results[0][k] = (f < 0.0 && c.args[1][k] > 0.0) ? static_cast<double>(c.step) : f;
    }
  };
  return detail::make("first_spike", fwd, {}, shape_rules::same_as_first(1));
}

// ---------------------------------------------------------------- elementwise

inline OpDef binary_op(std::string name, double (*f)(double, double),
                       double (*da)(double, double, double), double (*db)(double, double, double)) {
  auto fwd = [f](OpContext& c) { detail::elementwise_forward(c, [f](const double* v) { return f(v[0], v[1]); }); };
  auto bwd = [da, db](BackwardContext& c) {
    detail::elementwise_backward(c, [da, db](const double* v, double out, std::size_t k) {
      return k == 0 ? da(v[0], v[1], out) : db(v[0], v[1], out);
    });
  };
  return detail::make(std::move(name), fwd, bwd, shape_rules::elementwise);
}

inline OpDef unary_op(std::string name, double (*f)(double), double (*df)(double, double)) {
  auto fwd = [f](OpContext& c) { detail::elementwise_forward(c, [f](const double* v) { return f(v[0]); }); };
  auto bwd = [df](BackwardContext& c) {
    detail::elementwise_backward(c, [df](const double* v, double out, std::size_t) { return df(v[0], out); });
  };
  return detail::make(std::move(name), fwd, bwd, shape_rules::elementwise);
}

/// O = [V >= V_th] forward; surrogate slope backward.
inline OpDef threshold_op() {
  auto fwd = [](OpContext& c) {
    const auto mode = c.spikes;
    detail::elementwise_forward(c, [mode](const double* v) { return detail::spike_value(v[0], v[1], mode); });
  };
  auto bwd = [](BackwardContext& c) {
    const auto mode = c.spikes;
    const auto sur = c.surrogate;
    detail::elementwise_backward(c, [mode, sur](const double* v, double, std::size_t k) {
      const double s = detail::spike_slope(v[0], v[1], mode, sur);
      return k == 0 ? s : -s;
    });
  };
  return detail::make("threshold", fwd, bwd, shape_rules::elementwise);
}

/// V' = V (1 - O) + V_reset O.
inline OpDef reset_op() {
  auto fwd = [](OpContext& c) {
    detail::elementwise_forward(c, [](const double* v) { return v[0] * (1.0 - v[1]) + v[2] * v[1]; });
  };
  auto bwd = [](BackwardContext& c) {
    detail::elementwise_backward(c, [](const double* v, double, std::size_t k) {
      if (k == 0) return 1.0 - v[1];
      if (k == 1) return v[2] - v[0];
      return v[1];
    });
  };
  return detail::make("reset", fwd, bwd, shape_rules::elementwise);
}

inline std::vector<OpDef> builtin_ops() {
  std::vector<OpDef> ops{
      lif_update_op(),       aeif_update_op(),     izh_update_op(),
      hh_update_op(),        rate_mass_update_op(), weight_sum_op(),
      sparse_weight_sum_op(), one_to_one_sum_op(),  conv2d_weight_sum_op(),
      mat_mult_op(),         add_n_op(),           synapse_conductance_op(),
      gap_junction_op(),     delay_op(),           poisson_encode_op(),
      latency_encode_op(),   poisson_generate_op(), constant_current_generate_op(),
      spike_count_op(),      first_spike_op(),     threshold_op(),
      reset_op(),
  };
  ops.push_back(binary_op(
      "add", [](double a, double b) { return a + b; }, [](double, double, double) { return 1.0; },
      [](double, double, double) { return 1.0; }));
  ops.push_back(binary_op(
      "sub", [](double a, double b) { return a - b; }, [](double, double, double) { return 1.0; },
      [](double, double, double) { return -1.0; }));
  ops.push_back(binary_op(
      "mul", [](double a, double b) { return a * b; }, [](double, double b, double) { return b; },
      [](double a, double, double) { return a; }));
  ops.push_back(binary_op(
      "div", [](double a, double b) { return a / b; }, [](double, double b, double) { return 1.0 / b; },
      [](double a, double b, double) { return -a / (b * b); }));
  ops.push_back(unary_op(
      "neg", [](double a) { return -a; }, [](double, double) { return -1.0; }));
  ops.push_back(unary_op(
      "exp", [](double a) { return std::exp(a); }, [](double, double out) { return out; }));
  ops.push_back(unary_op(
      "copy", [](double a) { return a; }, [](double, double) { return 1.0; }));
  return ops;
}

}  // namespace snnforge::kernels
