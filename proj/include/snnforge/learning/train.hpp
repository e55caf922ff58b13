#pragma once

// Epoch loops over a synthetic dataset for the three learner families.
// Encoders receive the sample vector split across them in node order.

#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "snnforge/engine/executor.hpp"
#include "snnforge/io/dataset.hpp"
#include "snnforge/learning/learner.hpp"

namespace snnforge {

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;      // mean training loss (gradient learners) or evaluation loss
  double accuracy = 0.0;  // evaluation accuracy after the epoch
};

struct TrainOptions {
  int epochs = 50;
  long long steps = 0;         // presentation window; 0 = hyperparam "T", else 20
  std::size_t batch_size = 0;  // 0 = hyperparam "batch", else 16
  std::function<void(const EpochLog&)> on_epoch;
};

struct TrainReport {
  std::vector<EpochLog> log;
  double final_accuracy = 0.0;
  double best_accuracy = 0.0;
};

inline void copy_parameters(const CompiledGraph& g, const SimState& from, SimState& to) {
  for (std::size_t v = 0; v < g.variables.size(); ++v)
    if (g.variables[v].kind == VarKind::parameter) to.values[v] = from.values[v];
}

/// Encoder input variables in node order, with their widths.
inline std::vector<std::pair<std::string, std::size_t>> encoder_inputs(const CompiledGraph& g) {
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& n : g.nodes)
    if (n.spec.kind == NodeKind::encoder && n.input >= 0)
      out.emplace_back(g.decl(n.input).id, g.decl(n.input).size());
  return out;
}

/// Build the batch: sample vectors split across the encoders.
inline BpttBatch make_batch(const CompiledGraph& g, const SyntheticDataset& data, const std::vector<std::size_t>& idx,
                            long long steps) {
  BpttBatch b;
  b.steps = steps;
  const auto enc = encoder_inputs(g);
  std::size_t total = 0;
  for (const auto& e : enc) total += e.second;
  if (total != data.n) throw Error(ErrorCode::shape_mismatch, "dataset", "encoder widths do not sum to the sample size");
  std::size_t offset = 0;
  for (const auto& [id, w] : enc) {
    std::vector<double> rows;
    for (auto k : idx) rows.insert(rows.end(), data.samples[k].x.begin() + static_cast<std::ptrdiff_t>(offset),
                                   data.samples[k].x.begin() + static_cast<std::ptrdiff_t>(offset + w));
    b.inputs.emplace_back(id, std::move(rows));
    offset += w;
  }
  for (auto k : idx) b.labels.push_back(data.samples[k].label);
  return b;
}

/// Accuracy and loss of the current weights on the whole dataset.
inline EpochLog evaluate(const CompiledGraph& g, const SimState& weights, const SyntheticDataset& data, long long steps,
                         const LossSpec& loss, std::uint64_t trial = 0) {
  std::vector<std::size_t> idx(data.samples.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto s = SimState::create(g, idx.size());
  copy_parameters(g, weights, s);
  s.trial = trial;
  const auto batch = make_batch(g, data, idx, steps);
  const auto r = evaluate_batch(g, s, batch, loss);
  EpochLog e;
  e.loss = r.loss;
  std::size_t correct = 0;
  for (std::size_t b = 0; b < idx.size(); ++b) correct += r.predicted[b] == batch.labels[b];
  e.accuracy = static_cast<double>(correct) / static_cast<double>(idx.size());
  return e;
}

inline TrainReport train(const CompiledGraph& g, SimState& weights, const SyntheticDataset& data,
                         TrainOptions opt = {}) {
  Learner learner(g);
  const auto& hp = learner.config().hyperparams;
  const long long steps = opt.steps > 0 ? opt.steps : static_cast<long long>(kernels::param_or(hp, "T", 20.0));
  const std::size_t bs = opt.batch_size > 0 ? opt.batch_size
                                            : static_cast<std::size_t>(kernels::param_or(hp, "batch", 16.0));
  const std::size_t n = data.samples.size();
  TrainReport report;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::map<std::size_t, SimState> states;
  auto state_for = [&](std::size_t rows) -> SimState& {
    auto it = states.find(rows);
    if (it == states.end()) it = states.emplace(rows, SimState::create(g, rows)).first;
    return it->second;
  };

  for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
    InitRng rng(stream_key(g.seed, "shuffle:" + std::to_string(epoch)));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.next() % i]);
    double loss_sum = 0.0;
    std::size_t batches = 0;

    if (learner.gradient_based()) {
      for (std::size_t start = 0; start < n; start += bs) {
        const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                           order.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + bs)));
        auto& s = state_for(idx.size());
        copy_parameters(g, weights, s);
        s.reset(g);
        learner.optim_zero_grad();
        const auto r = bptt_train_step(g, s, make_batch(g, data, idx, steps), learner.loss(), learner.surrogate());
        learner.accumulate(r.grads);
        learner.optim_step(s);
        copy_parameters(g, s, weights);
        loss_sum += r.loss;
        ++batches;
      }
    } else {
      auto& s = state_for(1);
      copy_parameters(g, weights, s);
      const auto& pos_neg = learner.config().hyperparams;
      const double pos = kernels::param_or(pos_neg, "reward_pos", 1.0);
      const double neg = kernels::param_or(pos_neg, "reward_neg", -1.0);
      const auto* out = g.group(learner_output(g));
      for (auto k : order) {
        s.reset(g);
        learner.reset_traces(s);
        const auto batch = make_batch(g, data, {k}, steps);
        for (const auto& [id, x] : batch.inputs) s.set_input(g, id, x);
        std::vector<double> counts(out->num, 0.0);
        for (long long t = 0; t < steps; ++t) {
          step(g, s);
          const auto& o = s.values[static_cast<std::size_t>(out->spikes)];
          for (std::size_t j = 0; j < out->num; ++j) counts[j] += o[j];
          std::vector<double> reward{0.0};
          if (t + 1 == steps) reward[0] = coding::global_reward(coding::argmax(counts), data.samples[k].label, pos, neg);
          learner.plasticity_step(s, reward);
        }
      }
      copy_parameters(g, s, weights);
    }

    auto e = evaluate(g, weights, data, steps, learner.loss(), static_cast<std::uint64_t>(epoch) << 32);
    e.epoch = epoch;
    if (batches) e.loss = loss_sum / static_cast<double>(batches);
    report.log.push_back(e);
    report.final_accuracy = e.accuracy;
    report.best_accuracy = std::max(report.best_accuracy, e.accuracy);
    if (opt.on_epoch) opt.on_epoch(e);
  }
  return report;
}

}  // namespace snnforge
