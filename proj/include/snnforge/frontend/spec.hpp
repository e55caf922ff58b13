#pragma once

// Declarative network description. Everything here is plain data: a spec can
// be built in code, loaded from JSON, validated and then flattened.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace snnforge {

using ParamTable = std::map<std::string, double>;

enum class LinkType { full, sparse_random, one_to_one, conv2d };
enum class SynapseKind { none, ampa, gaba, nmda, gap_junction };
enum class NodeKind { encoder, decoder, generator, reward, action };
enum class MonitorKind { spike, state };

struct InitRule {
  enum class Kind { constant, uniform, normal, explicit_matrix };
  Kind kind = Kind::uniform;
  double a = 0.0;  // constant value | uniform low | normal mean
  double b = 0.0;  // uniform high | normal stddev
  std::vector<std::vector<double>> matrix;  // (post, pre) for explicit

  static InitRule constant(double v) { return {Kind::constant, v, 0.0, {}}; }
  static InitRule uniform(double lo, double hi) { return {Kind::uniform, lo, hi, {}}; }
  static InitRule normal(double mean, double sd) { return {Kind::normal, mean, sd, {}}; }
  static InitRule explicit_matrix(std::vector<std::vector<double>> m) {
    return {Kind::explicit_matrix, 0.0, 0.0, std::move(m)};
  }

  bool operator==(const InitRule&) const = default;
};

struct ConvSpec {
  int kernel = 3;
  int stride = 1;
  int padding = 0;
  bool operator==(const ConvSpec&) const = default;
};

struct GroupSpec {
  std::string id;
  int num = 0;
  std::string model = "lif";
  ParamTable params;
  std::vector<std::string> tags;
  std::optional<std::array<int, 3>> shape;  // (channels, height, width)

  bool operator==(const GroupSpec&) const = default;
};

struct ConnectionSpec {
  std::string id;
  std::string pre;
  std::string post;
  LinkType link_type = LinkType::full;
  SynapseKind synapse = SynapseKind::none;
  std::optional<InitRule> weight_init;  // default uniform(0, 1/sqrt(fan_in))
  double sparsity = 1.0;
  double delay_ms = 0.0;
  std::optional<ConvSpec> conv;
  bool trainable = false;
  ParamTable synapse_params;

  bool operator==(const ConnectionSpec&) const = default;
};

struct ConnectPolicy {
  std::string kind = "include_type";
  std::vector<std::string> pre_types;
  std::vector<std::string> post_types;

  bool operator==(const ConnectPolicy&) const = default;
};

struct ProjectionSpec {
  std::string id;
  std::string pre;   // assembly path
  std::string post;  // assembly path
  std::vector<ConnectPolicy> policies;
  ConnectionSpec templ;  // id/pre/post ignored

  bool operator==(const ProjectionSpec&) const = default;
};

struct NodeSpec {
  std::string id;
  NodeKind kind = NodeKind::encoder;
  std::string method;
  int num = 0;
  std::string target;
  std::string var_name = "O";
  ParamTable params;

  bool operator==(const NodeSpec&) const = default;
};

struct MonitorSpec {
  std::string id;
  std::string target;
  MonitorKind kind = MonitorKind::spike;
  std::string var_name;

  bool operator==(const MonitorSpec&) const = default;
};

struct SurrogateSpec {
  enum class Kind { rectangular, sigmoid };
  Kind kind = Kind::sigmoid;
  double width = 0.5;  // rectangular half-width a
  double beta = 2.0;   // sigmoid slope

  bool operator==(const SurrogateSpec&) const = default;
};

struct LearnerConfig {
  std::string algorithm = "surrogate_bptt";  // stdp | rstdp | surrogate_bptt | STCA | STBP
  std::vector<std::string> trainable;
  std::vector<std::string> pathway;
  ParamTable hyperparams;
  std::string optimizer = "adam";
  double lr = 0.01;
  SurrogateSpec surrogate;
  std::string loss;    // cross_entropy | mse; empty = preset default
  std::string output;  // output group; empty = first decoder's target

  bool operator==(const LearnerConfig&) const = default;
};

// Library-level custom variables/operations ("variables dictionary and
// operations list"). Operations reference variables by their full id.
struct CustomVariable {
  std::string id;
  std::vector<std::size_t> shape{1};
  double init = 0.0;
  bool state = true;
  bool operator==(const CustomVariable&) const = default;
};

struct CustomOp {
  std::string result;
  std::string op;
  std::vector<std::string> args;
  bool operator==(const CustomOp&) const = default;
};

// A nested sub-network. Member ids are local; flatten() prefixes them with the
// assembly path. Connection endpoints resolve locally first, then globally.
struct AssemblySpec {
  std::string id;
  std::vector<GroupSpec> groups;
  std::vector<ConnectionSpec> connections;
  std::vector<ProjectionSpec> projections;
  std::vector<AssemblySpec> assemblies;

  bool operator==(const AssemblySpec&) const = default;
};

struct NetworkSpec {
  std::string name = "network";
  double dt = 1.0;
  std::uint64_t seed = 0;
  std::vector<GroupSpec> groups;
  std::vector<ConnectionSpec> connections;
  std::vector<ProjectionSpec> projections;
  std::vector<NodeSpec> nodes;
  std::vector<MonitorSpec> monitors;
  std::optional<LearnerConfig> learner;
  std::vector<AssemblySpec> assemblies;
  std::vector<CustomVariable> variables;
  std::vector<CustomOp> operations;

  bool operator==(const NetworkSpec&) const = default;
};

// Enum <-> config-name mappings.

inline std::string_view to_string(LinkType t) {
  switch (t) {
    case LinkType::full: return "full";
    case LinkType::sparse_random: return "sparse_random";
    case LinkType::one_to_one: return "one_to_one";
    case LinkType::conv2d: return "conv2d";
  }
  return "";
}

inline std::string_view to_string(SynapseKind k) {
  switch (k) {
    case SynapseKind::none: return "none";
    case SynapseKind::ampa: return "ampa";
    case SynapseKind::gaba: return "gaba";
    case SynapseKind::nmda: return "nmda";
    case SynapseKind::gap_junction: return "gap_junction";
  }
  return "";
}

inline std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::encoder: return "encoder";
    case NodeKind::decoder: return "decoder";
    case NodeKind::generator: return "generator";
    case NodeKind::reward: return "reward";
    case NodeKind::action: return "action";
  }
  return "";
}

inline std::string_view to_string(MonitorKind k) {
  return k == MonitorKind::spike ? "spike" : "state";
}

inline std::string_view to_string(InitRule::Kind k) {
  switch (k) {
    case InitRule::Kind::constant: return "constant";
    case InitRule::Kind::uniform: return "uniform";
    case InitRule::Kind::normal: return "normal";
    case InitRule::Kind::explicit_matrix: return "explicit";
  }
  return "";
}

inline std::optional<LinkType> parse_link_type(std::string_view s) {
  for (auto t : {LinkType::full, LinkType::sparse_random, LinkType::one_to_one, LinkType::conv2d})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

inline std::optional<SynapseKind> parse_synapse(std::string_view s) {
  for (auto k : {SynapseKind::none, SynapseKind::ampa, SynapseKind::gaba, SynapseKind::nmda,
                 SynapseKind::gap_junction})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

inline std::optional<NodeKind> parse_node_kind(std::string_view s) {
  for (auto k : {NodeKind::encoder, NodeKind::decoder, NodeKind::generator, NodeKind::reward,
                 NodeKind::action})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

inline std::optional<MonitorKind> parse_monitor_kind(std::string_view s) {
  if (s == "spike") return MonitorKind::spike;
  if (s == "state") return MonitorKind::state;
  return std::nullopt;
}

/// Round a duration to whole steps, round-half-up.
inline long long to_steps(double ms, double dt) {
  return static_cast<long long>(ms / dt + 0.5 + 1e-9);
}

}  // namespace snnforge
