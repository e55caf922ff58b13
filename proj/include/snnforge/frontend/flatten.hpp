#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "snnforge/core/error.hpp"
#include "snnforge/frontend/spec.hpp"
#include "snnforge/frontend/validate.hpp"

namespace snnforge {

// The hierarchy-free view of a network: every id is a fully-qualified path,
// endpoints are resolved, and assemblies are gone.
struct FlatModel {
  std::string name;
  double dt = 1.0;
  std::uint64_t seed = 0;
  std::vector<GroupSpec> groups;
  std::vector<ConnectionSpec> connections;
  std::vector<ProjectionSpec> projections;
  std::vector<NodeSpec> nodes;
  std::vector<MonitorSpec> monitors;
  std::optional<LearnerConfig> learner;
  std::vector<CustomVariable> variables;
  std::vector<CustomOp> operations;

  bool operator==(const FlatModel&) const = default;

  const GroupSpec* group(const std::string& id) const {
    for (const auto& g : groups)
      if (g.id == id) return &g;
    return nullptr;
  }
  const NodeSpec* node(const std::string& id) const {
    for (const auto& n : nodes)
      if (n.id == id) return &n;
    return nullptr;
  }

  NetworkSpec to_spec() const {
    NetworkSpec s;
    s.name = name;
    s.dt = dt;
    s.seed = seed;
    s.groups = groups;
    s.connections = connections;
    s.projections = projections;
    s.nodes = nodes;
    s.monitors = monitors;
    s.learner = learner;
    s.variables = variables;
    s.operations = operations;
    return s;
  }
};

namespace detail {

inline void flatten_assembly(const AssemblySpec& a, const std::string& scope, const Catalog& cat,
                             FlatModel& out, std::vector<std::pair<std::string, ConnectionSpec>>& conns,
                             std::vector<std::pair<std::string, ProjectionSpec>>& projs) {
  const auto path = join_path(scope, a.id);
  for (auto g : a.groups) {
    g.id = join_path(path, g.id);
    out.groups.push_back(std::move(g));
  }
  for (const auto& sub : a.assemblies) flatten_assembly(sub, path, cat, out, conns, projs);
  for (const auto& c : a.connections) conns.emplace_back(path, c);
  for (const auto& p : a.projections) projs.emplace_back(path, p);
}

}  // namespace detail

/// Resolve the assembly hierarchy into path-named groups and connections.
/// Order: top-level groups, then each assembly depth-first; connections and
/// projections likewise.
inline FlatModel flatten(const NetworkSpec& spec,
                         const ModelRegistry& models = ModelRegistry::global()) {
  const auto diags = validate(spec, models);
  if (!diags.empty()) throw Error(ErrorCode::validation_failed, diags.front().path, diags.front().to_string());

  const auto cat = detail::catalog(spec);
  FlatModel out;
  out.name = spec.name;
  out.dt = spec.dt;
  out.seed = spec.seed;
  out.groups = spec.groups;
  out.nodes = spec.nodes;
  out.monitors = spec.monitors;
  out.learner = spec.learner;
  out.variables = spec.variables;
  out.operations = spec.operations;

  std::vector<std::pair<std::string, ConnectionSpec>> conns;
  std::vector<std::pair<std::string, ProjectionSpec>> projs;
  for (const auto& c : spec.connections) conns.emplace_back("", c);
  for (const auto& p : spec.projections) projs.emplace_back("", p);
  for (const auto& a : spec.assemblies) detail::flatten_assembly(a, "", cat, out, conns, projs);

  auto endpoint_exists = [&](const std::string& p) {
    return cat.groups.count(p) != 0 || cat.nodes.count(p) != 0;
  };
  auto asm_exists = [&](const std::string& p) { return cat.assemblies.count(p) != 0; };
  for (auto& [scope, c] : conns) {
    c.id = detail::join_path(scope, c.id);
    c.pre = detail::resolve(scope, c.pre, endpoint_exists);
    c.post = detail::resolve(scope, c.post, endpoint_exists);
    out.connections.push_back(std::move(c));
  }
  for (auto& [scope, p] : projs) {
    p.id = detail::join_path(scope, p.id);
    p.pre = detail::resolve(scope, p.pre, asm_exists);
    p.post = detail::resolve(scope, p.post, asm_exists);
    out.projections.push_back(std::move(p));
  }
  return out;
}

inline bool in_assembly(const std::string& group, const std::string& assembly) {
  return group == assembly ||
         (group.size() > assembly.size() && group.compare(0, assembly.size(), assembly) == 0 &&
          group[assembly.size()] == '.');
}

inline bool has_any_tag(const GroupSpec& g, const std::vector<std::string>& tags) {
  for (const auto& t : g.tags)
    if (std::find(tags.begin(), tags.end(), t) != tags.end()) return true;
  return false;
}

/// Generate the connections a projection describes: one per (pre group,
/// post group) pair matched by any policy, ordered by (pre, post).
inline std::vector<ConnectionSpec> expand_projection(const ProjectionSpec& proj, const FlatModel& flat,
                                                     Diagnostics* warnings = nullptr) {
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& pol : proj.policies) {
    if (pol.kind != "include_type") continue;
    for (const auto& a : flat.groups) {
      if (!in_assembly(a.id, proj.pre) || !has_any_tag(a, pol.pre_types)) continue;
      for (const auto& b : flat.groups)
        if (in_assembly(b.id, proj.post) && has_any_tag(b, pol.post_types)) pairs.emplace(a.id, b.id);
    }
  }
  std::vector<ConnectionSpec> out;
  for (const auto& [pre, post] : pairs) {
    ConnectionSpec c = proj.templ;
    c.id = proj.id + ":" + pre + "->" + post;
    c.pre = pre;
    c.post = post;
    out.push_back(std::move(c));
  }
  if (out.empty() && warnings) warnings->push_back({DiagKind::empty_expansion, proj.id, "no group pair matched"});
  return out;
}

/// All concrete connections: explicit ones followed by every projection's
/// expansion.
inline std::vector<ConnectionSpec> all_connections(const FlatModel& flat, Diagnostics* warnings = nullptr) {
  auto out = flat.connections;
  for (const auto& p : flat.projections) {
    auto gen = expand_projection(p, flat, warnings);
    out.insert(out.end(), gen.begin(), gen.end());
  }
  return out;
}

}  // namespace snnforge
