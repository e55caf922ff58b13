#pragma once

// Neuron model definitions: state variables, parameter defaults and the update
// rule as a short list of ops over local variable names. "I" names the summed
// synaptic input supplied by the compiler.

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "snnforge/core/error.hpp"
#include "snnforge/frontend/spec.hpp"
#include "snnforge/kernels/neurons.hpp"

namespace snnforge {

struct ModelOp {
  std::vector<std::string> results;
  std::string op;
  std::vector<std::string> args;
};

struct NeuronModelDef {
  std::string name;
  std::vector<std::string> state_vars;
  ParamTable param_defaults;
  ParamTable state_defaults;
  std::function<ParamTable(const ParamTable& params)> initial_state;  // optional
  std::function<ParamTable(const ParamTable& user)> resolve_params;   // optional
  std::vector<ModelOp> update;
  std::string spike_var = "O";
  std::string voltage_var = "V";  // empty when the model has no membrane potential
  std::string input_var = "I";

  ParamTable params_for(const ParamTable& user) const {
    if (resolve_params) return resolve_params(user);
    ParamTable p = param_defaults;
    for (const auto& [k, v] : user) p[k] = v;
    return p;
  }

  ParamTable init_for(const ParamTable& params) const {
    ParamTable s = state_defaults;
    if (initial_state)
      for (const auto& [k, v] : initial_state(params)) s[k] = v;
    return s;
  }

  /// Variables a monitor may observe.
  std::vector<std::string> exposed_vars() const {
    auto v = state_vars;
    v.push_back(input_var);
    return v;
  }
};

namespace models {

inline NeuronModelDef lif() {
  NeuronModelDef d;
  d.name = "lif";
  d.state_vars = {"V", "O", "refrac"};
  const kernels::LifParams p;
  d.param_defaults = {{"tau_m", p.tau_m}, {"V_rest", p.V_rest}, {"V_reset", p.V_reset},
                      {"V_th", p.V_th},   {"R", p.R},           {"t_refrac", p.t_refrac}};
  d.initial_state = [](const ParamTable& q) { return ParamTable{{"V", q.at("V_rest")}}; };
  d.update = {{{"V", "O", "refrac"}, "lif_update", {"V", "I", "refrac"}}};
  return d;
}

inline NeuronModelDef aeif() {
  NeuronModelDef d;
  d.name = "aeif";
  d.state_vars = {"V", "w", "O"};
  const kernels::AeifParams p;
  d.param_defaults = {{"C", p.C},   {"gL", p.gL}, {"EL", p.EL},       {"delta_T", p.delta_T},
                      {"VT", p.VT}, {"a", p.a},   {"b", p.b},         {"tau_w", p.tau_w},
                      {"V_reset", p.V_reset},     {"V_peak", p.V_peak}};
  d.resolve_params = [defaults = d.param_defaults](const ParamTable& user) {
    ParamTable q = defaults;
    for (const auto& [k, v] : user) q[k] = v;
    if (!user.count("V_reset")) q["V_reset"] = q["EL"];
    return q;
  };
  d.initial_state = [](const ParamTable& q) { return ParamTable{{"V", q.at("EL")}, {"w", 0.0}}; };
  d.update = {{{"V", "w", "O"}, "aeif_update", {"V", "w", "I"}}};
  return d;
}

inline NeuronModelDef izh() {
  NeuronModelDef d;
  d.name = "izh";
  d.state_vars = {"V", "u", "O"};
  const kernels::IzhParams p;
  d.param_defaults = {{"a", p.a}, {"b", p.b}, {"c", p.c}, {"d", p.d}, {"v_peak", p.v_peak}};
  d.initial_state = [](const ParamTable& q) {
    return ParamTable{{"V", q.at("c")}, {"u", q.at("b") * q.at("c")}};
  };
  d.update = {{{"V", "u", "O"}, "izh_update", {"V", "u", "I"}}};
  return d;
}

inline NeuronModelDef hh() {
  NeuronModelDef d;
  d.name = "hh";
  d.state_vars = {"V", "m", "h", "n", "O"};
  const kernels::HhParams p;
  d.param_defaults = {{"gNa", p.gNa}, {"gK", p.gK}, {"gL", p.gL}, {"ENa", p.ENa},
                      {"EK", p.EK},   {"EL", p.EL}, {"C", p.C}};
  d.initial_state = [](const ParamTable& q) {
    const double v = kernels::hh::resting_potential(kernels::HhParams::from(q));
    return ParamTable{{"V", v},
                      {"m", kernels::hh::m_inf(v)},
                      {"h", kernels::hh::h_inf(v)},
                      {"n", kernels::hh::n_inf(v)}};
  };
  d.update = {{{"V", "m", "h", "n", "O"}, "hh_update", {"V", "m", "h", "n", "I"}}};
  return d;
}

inline NeuronModelDef poisson_rate_mass() {
  NeuronModelDef d;
  d.name = "poisson_rate_mass";
  d.state_vars = {"O"};
  d.param_defaults = {{"rate", 0.0}, {"gain", 0.0}, {"rate_max", 1000.0}};
  d.update = {{{"O"}, "rate_mass_update", {"I"}}};
  d.voltage_var.clear();
  return d;
}

}  // namespace models

class ModelRegistry {
 public:
  ModelRegistry() {
    for (auto d : {models::lif(), models::aeif(), models::izh(), models::hh(), models::poisson_rate_mass()})
      defs_.emplace(d.name, std::make_shared<const NeuronModelDef>(d));
  }

  static ModelRegistry& global() {
    static ModelRegistry r;
    return r;
  }

  std::shared_ptr<const NeuronModelDef> find(const std::string& name) const {
    auto it = defs_.find(name);
    return it == defs_.end() ? nullptr : it->second;
  }

  void register_model(NeuronModelDef def) {
    if (defs_.count(def.name)) throw Error(ErrorCode::duplicate_name, def.name);
    auto name = def.name;
    defs_.emplace(std::move(name), std::make_shared<const NeuronModelDef>(std::move(def)));
  }

 private:
  std::map<std::string, std::shared_ptr<const NeuronModelDef>> defs_;
};

}  // namespace snnforge
