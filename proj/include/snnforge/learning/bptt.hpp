#pragma once

// Surrogate-gradient backpropagation through time over a compiled graph.
// The forward pass snapshots every op on a gradient path; the reverse pass
// walks steps and ops backwards, keeping one adjoint array per variable. For
// each op the result adjoints are consumed (and zeroed) before the argument
// adjoints are accumulated, so in-place state updates chain correctly.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "snnforge/coding/coding.hpp"
#include "snnforge/compiler/analysis.hpp"
#include "snnforge/engine/executor.hpp"
#include "snnforge/learning/surrogate.hpp"

namespace snnforge {

struct LossSpec {
  enum class Kind { cross_entropy, mse };
  Kind kind = Kind::cross_entropy;
  double target_rate = 0.8;  // mse: desired rate of the labelled output, per step
};

struct LossValue {
  double loss = 0.0;
  std::vector<double> grad_counts;  // dL/dcount, batch x classes
};

/// Loss on spike counts accumulated over `steps`, averaged over the batch.
/// cross_entropy: softmax over counts. mse: rates counts/steps against
/// target_rate for the label and 0 elsewhere, summed over classes.
inline LossValue spike_count_loss(const std::vector<double>& counts, std::size_t classes,
                                  const std::vector<std::size_t>& labels, long long steps, const LossSpec& spec) {
  const std::size_t batch = labels.size();
  LossValue out;
  out.grad_counts.assign(batch * classes, 0.0);
  const double inv_b = 1.0 / static_cast<double>(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    const double* c = counts.data() + b * classes;
    double* g = out.grad_counts.data() + b * classes;
    if (spec.kind == LossSpec::Kind::cross_entropy) {
      const double mx = *std::max_element(c, c + classes);
      double z = 0.0;
      for (std::size_t j = 0; j < classes; ++j) z += std::exp(c[j] - mx);
      out.loss += -(c[labels[b]] - mx - std::log(z)) * inv_b;
      for (std::size_t j = 0; j < classes; ++j)
        g[j] = (std::exp(c[j] - mx) / z - (j == labels[b] ? 1.0 : 0.0)) * inv_b;
    } else {
      const double t = static_cast<double>(steps);
      for (std::size_t j = 0; j < classes; ++j) {
        const double diff = c[j] / t - (j == labels[b] ? spec.target_rate : 0.0);
        out.loss += diff * diff * inv_b;
        g[j] = 2.0 * diff / t * inv_b;
      }
    }
  }
  return out;
}

inline LossSpec::Kind parse_loss(const std::string& s) {
  if (s == "cross_entropy") return LossSpec::Kind::cross_entropy;
  if (s == "mse") return LossSpec::Kind::mse;
  throw Error(ErrorCode::invalid_argument, s, "unknown loss");
}

/// Surrogate and loss a learner config implies. STCA and STBP are presets:
/// rectangular + cross_entropy and sigmoid + mse.
inline std::pair<SurrogateSpec, LossSpec> resolve_gradient_setup(const LearnerConfig& l) {
  SurrogateSpec s = l.surrogate;
  LossSpec loss;
  if (l.algorithm == "STCA") {
    s.kind = SurrogateSpec::Kind::rectangular;
    loss.kind = LossSpec::Kind::cross_entropy;
  } else if (l.algorithm == "STBP") {
    s.kind = SurrogateSpec::Kind::sigmoid;
    loss.kind = LossSpec::Kind::mse;
  }
  if (!l.loss.empty()) loss.kind = parse_loss(l.loss);
  auto it = l.hyperparams.find("target_rate");
  if (it != l.hyperparams.end()) loss.target_rate = it->second;
  return {s, loss};
}

using GradientTable = std::map<std::string, std::vector<double>>;  // connection id -> dL/dW

struct BpttBatch {
  std::vector<std::pair<std::string, std::vector<double>>> inputs;  // input variable -> batch rows
  std::vector<std::size_t> labels;
  long long steps = 1;
};

struct BpttResult {
  double loss = 0.0;
  std::vector<double> counts;  // batch x classes
  std::vector<std::size_t> predicted;
  GradientTable grads;
};

namespace detail {

inline void set_batch_inputs(const CompiledGraph& g, SimState& s, const BpttBatch& batch) {
  for (const auto& [id, x] : batch.inputs) s.set_input(g, id, x);
}

inline const LoweredGroup& output_group(const CompiledGraph& g) {
  const auto* out = g.group(learner_output(g));
  if (!out) throw Error(ErrorCode::invalid_argument, "learner.output", "no output group");
  return *out;
}

inline void accumulate_counts(const SimState& s, const LoweredGroup& out, std::vector<double>& counts) {
  const auto& o = s.values[static_cast<std::size_t>(out.spikes)];
  for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += o[k];
}

inline std::vector<std::size_t> predictions(const std::vector<double>& counts, std::size_t batch, std::size_t classes) {
  std::vector<std::size_t> p(batch);
  for (std::size_t b = 0; b < batch; ++b)
    p[b] = coding::argmax(std::span<const double>(counts.data() + b * classes, classes));
  return p;
}

}  // namespace detail

/// Forward only: run `steps` from the current state and score the output.
inline BpttResult evaluate_batch(const CompiledGraph& g, SimState& s, const BpttBatch& batch, const LossSpec& loss) {
  const auto& out = detail::output_group(g);
  detail::set_batch_inputs(g, s, batch);
  BpttResult r;
  r.counts.assign(s.batch * out.num, 0.0);
  for (long long t = 0; t < batch.steps; ++t) {
    step(g, s);
    detail::accumulate_counts(s, out, r.counts);
  }
  r.loss = spike_count_loss(r.counts, out.num, batch.labels, batch.steps, loss).loss;
  r.predicted = detail::predictions(r.counts, s.batch, out.num);
  return r;
}

/// Forward `steps` from the current state with a tape, then the reverse pass.
/// Returns dL/dW for every trainable connection.
inline BpttResult bptt_train_step(const CompiledGraph& g, SimState& s, const BpttBatch& batch, const LossSpec& loss,
                                  const SurrogateSpec& surrogate) {
  for (const auto& d : gradient_path_diagnostics(g)) {
    if (d.kind == DiagKind::non_differentiable_op) throw Error(ErrorCode::non_differentiable_op, d.path, d.message);
    if (d.kind == DiagKind::pathway_incomplete) throw Error(ErrorCode::validation_failed, d.path, d.to_string());
  }
  if (batch.labels.size() != s.batch) throw Error(ErrorCode::shape_mismatch, "labels", "one label per batch row");
  const auto& out = detail::output_group(g);
  const auto path = gradient_path(g);

  Tape tape;
  tape.record = path.on_path;
  detail::set_batch_inputs(g, s, batch);
  BpttResult r;
  r.counts.assign(s.batch * out.num, 0.0);
  for (long long t = 0; t < batch.steps; ++t) {
    step(g, s, nullptr, &tape);
    detail::accumulate_counts(s, out, r.counts);
  }
  const auto lv = spike_count_loss(r.counts, out.num, batch.labels, batch.steps, loss);
  r.loss = lv.loss;
  r.predicted = detail::predictions(r.counts, s.batch, out.num);

  // Adjoints exist only for variables that depend on a trainable weight.
  std::vector<std::vector<double>> adj(g.variables.size());
  for (std::size_t v = 0; v < g.variables.size(); ++v)
    if (path.needs_grad[v]) adj[v].assign(s.values[v].size(), 0.0);
  std::vector<DelayBuffer> reverse_delays;
  for (const auto& d : s.delays) reverse_delays.emplace_back(d.steps(), d.width());

  const auto o_id = static_cast<std::size_t>(out.spikes);
  for (long long t = batch.steps - 1; t >= 0; --t) {
    if (!adj[o_id].empty())
      for (std::size_t k = 0; k < adj[o_id].size(); ++k) adj[o_id][k] += lv.grad_counts[k];
    const auto& frame = tape.frames[static_cast<std::size_t>(t)];
    for (std::size_t k = g.schedule.size(); k-- > 0;) {
      if (!path.on_path[k]) continue;
      const auto& op = g.schedule[k];
      const auto& snap = frame.ops[k];
      std::vector<std::vector<double>> g_res(op.result_ids.size());
      for (std::size_t q = 0; q < op.result_ids.size(); ++q) {
        auto& a = adj[static_cast<std::size_t>(op.result_ids[q])];
        if (a.empty()) {
          g_res[q].assign(snap.results[q].size(), 0.0);
        } else {
          g_res[q] = a;
          std::fill(a.begin(), a.end(), 0.0);
        }
      }
      BackwardContext c{op, {}, {}, {}, {}, {}, {}, s.batch, g.dt, s.spikes, surrogate, nullptr};
      for (std::size_t q = 0; q < op.arg_ids.size(); ++q) {
        const auto v = static_cast<std::size_t>(op.arg_ids[q]);
        const auto& d = g.variables[v];
        c.args.emplace_back(d.batched() ? std::span<const double>(snap.args[q]) : std::span<const double>(s.values[v]));
        c.arg_decls.push_back(&d);
        c.g_args.emplace_back(adj[v].empty() ? std::span<double>() : std::span<double>(adj[v]));
      }
      for (std::size_t q = 0; q < op.result_ids.size(); ++q) {
        c.results.emplace_back(snap.results[q]);
        c.result_decls.push_back(&g.decl(op.result_ids[q]));
        c.g_results.emplace_back(g_res[q]);
      }
      if (op.aux >= 0) c.delay = &reverse_delays.at(static_cast<std::size_t>(op.aux));
      g.kernels[k]->backward(c);
    }
  }

  for (const auto* conn : trainable_connections(g)) {
    auto grad = adj[static_cast<std::size_t>(conn->weight)];
    if (grad.empty()) grad.assign(s.values[static_cast<std::size_t>(conn->weight)].size(), 0.0);
    for (double x : grad)
      if (!std::isfinite(x)) throw Error(ErrorCode::non_finite_gradient, conn->id);
    r.grads[conn->id] = std::move(grad);
  }
  return r;
}

}  // namespace snnforge
