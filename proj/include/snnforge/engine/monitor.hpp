#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snnforge/compiler/ir.hpp"
#include "snnforge/engine/state.hpp"

namespace snnforge {

struct SpikeEvent {
  std::int64_t step = 0;
  std::uint32_t neuron = 0;
  bool operator==(const SpikeEvent&) const = default;
};

struct SpikeRecord {
  std::string monitor;
  std::string target;
  std::size_t width = 0;
  std::vector<SpikeEvent> events;  // in (step, neuron) order
};

struct StateRecord {
  std::string monitor;
  std::string target;
  std::string var;
  std::size_t width = 0;
  std::vector<std::int64_t> steps;
  std::vector<std::vector<double>> rows;  // one row per recorded step
};

// Collects monitor output for batch row 0.
class Recorder {
 public:
  Recorder() = default;
  explicit Recorder(const CompiledGraph& g) : dt_(g.dt) {
    for (std::size_t m = 0; m < g.monitors.size(); ++m) {
      const auto& lm = g.monitors[m];
      if (lm.spec.kind == MonitorKind::spike) {
        spikes_.push_back({lm.spec.id, lm.spec.target, lm.width, {}});
        spike_src_.push_back(lm.var);
      } else {
        states_.push_back({lm.spec.id, lm.spec.target, lm.spec.var_name, lm.width, {}, {}});
        state_src_.push_back(lm.var);
      }
    }
  }

  void record(const SimState& s) {
    for (std::size_t k = 0; k < spikes_.size(); ++k) {
      const auto& v = s.values[static_cast<std::size_t>(spike_src_[k])];
      for (std::size_t i = 0; i < spikes_[k].width; ++i)
        if (v[i] != 0.0) spikes_[k].events.push_back({s.step, static_cast<std::uint32_t>(i)});
    }
    for (std::size_t k = 0; k < states_.size(); ++k) {
      const auto& v = s.values[static_cast<std::size_t>(state_src_[k])];
      states_[k].steps.push_back(s.step);
      states_[k].rows.emplace_back(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(states_[k].width));
    }
  }

  double dt() const { return dt_; }
  const std::vector<SpikeRecord>& spikes() const { return spikes_; }
  const std::vector<StateRecord>& states() const { return states_; }

  const SpikeRecord* spike(const std::string& id) const {
    for (const auto& r : spikes_)
      if (r.monitor == id) return &r;
    return nullptr;
  }
  const StateRecord* state(const std::string& id) const {
    for (const auto& r : states_)
      if (r.monitor == id) return &r;
    return nullptr;
  }

 private:
  double dt_ = 1.0;
  std::vector<SpikeRecord> spikes_;
  std::vector<StateRecord> states_;
  std::vector<int> spike_src_, state_src_;
};

}  // namespace snnforge
