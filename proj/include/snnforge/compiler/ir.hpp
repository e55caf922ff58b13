#pragma once

// Backend IR: a flat variables table plus an ordered list of operations
// executed once per timestep.

#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "snnforge/frontend/diagnostics.hpp"
#include "snnforge/frontend/spec.hpp"

namespace snnforge {

using Shape = std::vector<std::size_t>;

inline std::size_t numel(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

enum class VarKind { state, parameter, input, output, constant, temp };

inline std::string_view to_string(VarKind k) {
  switch (k) {
    case VarKind::state: return "state";
    case VarKind::parameter: return "parameter";
    case VarKind::input: return "input";
    case VarKind::output: return "output";
    case VarKind::constant: return "constant";
    case VarKind::temp: return "temp";
  }
  return "";
}

/// Batched variables carry a leading batch dimension at runtime; parameters
/// and constants are shared across batch rows.
inline bool is_batched(VarKind k) { return k != VarKind::parameter && k != VarKind::constant; }

struct VariableDecl {
  std::string id;
  VarKind kind = VarKind::state;
  Shape shape{1};
  std::vector<double> init;  // numel(shape) values, or one value broadcast
  bool differentiable = false;
  std::string owner;

  std::size_t size() const { return numel(shape); }
  bool batched() const { return is_batched(kind); }
  double init_at(std::size_t i) const {
    if (init.empty()) return 0.0;
    return init.size() == 1 ? init[0] : init[i];
  }
};

struct OpRecord {
  std::vector<std::string> results;
  std::string op;
  std::vector<std::string> args;
  ParamTable attrs;
  int delay = 0;  // display tag: extra steps this op introduces on its edge
  std::string owner;
  std::uint64_t stream = 0;  // random stream key for stochastic ops
  int aux = -1;              // delay buffer slot for `delay` ops

  std::vector<int> result_ids;
  std::vector<int> arg_ids;
};

enum class Strategy { parallel, serial };

inline std::string_view to_string(Strategy s) { return s == Strategy::serial ? "serial" : "parallel"; }

struct DelayEdge {
  std::string connection;
  long long steps = 0;
  bool operator==(const DelayEdge&) const = default;
};

struct LoweredConnection {
  std::string id;
  std::string pre, post;
  LinkType link_type = LinkType::full;
  SynapseKind synapse = SynapseKind::none;
  std::size_t n_pre = 0, n_post = 0;
  int weight = -1;        // weight variable
  int input = -1;         // presynaptic vector the aggregation reads
  int post_spikes = -1;   // post group's spike output
  int row_ptr = -1, post_idx = -1;  // sparse layout
  bool trainable = false;
};

struct LoweredGroup {
  std::string id;
  std::string model;
  std::size_t num = 0;
  int spikes = -1;
  int input = -1;
  std::map<std::string, int> vars;  // local name -> variable
};

struct LoweredNode {
  NodeSpec spec;
  int output = -1;     // encoder/generator spike/current output
  int input = -1;      // encoder intensity input
  int count = -1;      // decoder/action spike counts
  int first = -1;      // decoder first-spike step
};

struct LoweredMonitor {
  MonitorSpec spec;
  int var = -1;
  std::size_t width = 0;
};

class OpDef;

struct CompiledGraph {
  std::string name;
  double dt = 1.0;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::parallel;
  std::vector<VariableDecl> variables;
  std::map<std::string, int> index;
  std::vector<OpRecord> schedule;
  std::vector<std::shared_ptr<const OpDef>> kernels;  // parallel to schedule
  std::vector<DelayEdge> delay_edges;
  std::vector<std::string> cycle_breaks;  // connections delayed to break cycles
  std::vector<LoweredConnection> connections;
  std::vector<LoweredGroup> groups;
  std::vector<LoweredNode> nodes;
  std::vector<LoweredMonitor> monitors;
  std::optional<LearnerConfig> learner;
  Diagnostics diagnostics;  // non-fatal compile findings

  int var(const std::string& id) const {
    auto it = index.find(id);
    return it == index.end() ? -1 : it->second;
  }
  const VariableDecl& decl(int id) const { return variables.at(static_cast<std::size_t>(id)); }

  const LoweredConnection* connection(const std::string& id) const {
    for (const auto& c : connections)
      if (c.id == id) return &c;
    return nullptr;
  }
  const LoweredGroup* group(const std::string& id) const {
    for (const auto& g : groups)
      if (g.id == id) return &g;
    return nullptr;
  }
  const LoweredNode* node(const std::string& id) const {
    for (const auto& n : nodes)
      if (n.spec.id == id) return &n;
    return nullptr;
  }
};

}  // namespace snnforge
