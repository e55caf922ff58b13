#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "snnforge/compiler/analysis.hpp"
#include "snnforge/engine/state.hpp"
#include "snnforge/learning/bptt.hpp"
#include "snnforge/learning/optim.hpp"
#include "snnforge/learning/stdp.hpp"

namespace snnforge {

inline bool is_gradient_algorithm(const std::string& a) {
  return a == "surrogate_bptt" || a == "STCA" || a == "STBP";
}

// Owns everything a training loop mutates besides the simulation state:
// accumulated gradients, optimizer moments and plasticity traces.
class Learner {
 public:
  explicit Learner(const CompiledGraph& g) : g_(&g) {
    if (!g.learner) throw Error(ErrorCode::invalid_argument, g.name, "network has no learner");
    config_ = *g.learner;
    std::tie(surrogate_, loss_) = resolve_gradient_setup(config_);
    params_ = StdpParams::from(config_.hyperparams);
    params_.lr = kernels::param_or(config_.hyperparams, "lr", config_.lr);
    for (const auto* c : trainable_connections(g)) conns_.push_back(c);
  }

  const LearnerConfig& config() const { return config_; }
  const SurrogateSpec& surrogate() const { return surrogate_; }
  const LossSpec& loss() const { return loss_; }
  const StdpParams& plasticity() const { return params_; }
  bool gradient_based() const { return is_gradient_algorithm(config_.algorithm); }
  const std::vector<const LoweredConnection*>& trainables() const { return conns_; }
  const GradientTable& grads() const { return grads_; }

  void optim_zero_grad() {
    for (auto& [id, g] : grads_) std::fill(g.begin(), g.end(), 0.0);
  }

  void accumulate(const GradientTable& t) {
    for (const auto& [id, g] : t) {
      auto& dst = grads_[id];
      if (dst.size() != g.size()) dst.assign(g.size(), 0.0);
      for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
    }
  }

  /// Apply the accumulated gradients to the weights held in `s`.
  void optim_step(SimState& s) {
    AdamParams ap;
    ap.lr = config_.lr;
    ap.beta1 = kernels::param_or(config_.hyperparams, "beta1", ap.beta1);
    ap.beta2 = kernels::param_or(config_.hyperparams, "beta2", ap.beta2);
    ap.eps = kernels::param_or(config_.hyperparams, "eps", ap.eps);
    for (const auto* c : conns_) {
      auto it = grads_.find(c->id);
      if (it == grads_.end()) continue;
      auto& w = s.values[static_cast<std::size_t>(c->weight)];
      if (config_.optimizer == "sgd") sgd_step(w, it->second, config_.lr);
      else adam_step(w, it->second, adam_[c->id], ap);
    }
  }

  /// Clear plasticity traces for a new trial.
  void reset_traces(const SimState& s) {
    traces_.clear();
    for (const auto* c : conns_) {
      auto l = layout_of(s, *c);
      traces_.emplace(c->id, TraceState::create(l, s.batch, config_.algorithm == "rstdp"));
      layouts_.insert_or_assign(c->id, std::move(l));
    }
  }

  /// One plasticity tick after a dynamics step. `reward` is ignored by stdp.
  void plasticity_step(SimState& s, std::span<const double> reward = {}) {
    if (traces_.empty()) reset_traces(s);
    const std::vector<double> zero(1, 0.0);
    for (const auto* c : conns_) {
      auto& w = s.values[static_cast<std::size_t>(c->weight)];
      const auto& pre = s.values[static_cast<std::size_t>(c->input)];
      const auto& post = s.values[static_cast<std::size_t>(c->post_spikes)];
      auto& t = traces_.at(c->id);
      const auto& l = layouts_.at(c->id);
      if (config_.algorithm == "rstdp")
        rstdp_step(w, l, pre, post, t, reward.empty() ? std::span<const double>(zero) : reward, params_, g_->dt);
      else
        stdp_step(w, l, pre, post, t, params_, g_->dt);
    }
  }

 private:
  const CompiledGraph* g_;
  LearnerConfig config_;
  SurrogateSpec surrogate_;
  LossSpec loss_;
  StdpParams params_;
  std::vector<const LoweredConnection*> conns_;
  GradientTable grads_;
  std::map<std::string, AdamState> adam_;
  std::map<std::string, TraceState> traces_;
  std::map<std::string, SynapseLayout> layouts_;
};

}  // namespace snnforge
