#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "snnforge/frontend/diagnostics.hpp"
#include "snnforge/frontend/spec.hpp"
#include "snnforge/kernels/models.hpp"

namespace snnforge {

/// Methods accepted for each node kind; the names double as config strings.
inline const std::vector<std::string>& node_methods(NodeKind k) {
  static const std::map<NodeKind, std::vector<std::string>> table{
      {NodeKind::encoder, {"poisson_encode", "latency_encode"}},
      {NodeKind::generator, {"poisson_generate", "constant_current_generate"}},
      {NodeKind::decoder, {"spike_count_decode", "first_spike_decode"}},
      {NodeKind::reward, {"global_reward"}},
      {NodeKind::action, {"population_rate_action"}},
  };
  return table.at(k);
}

inline bool is_source(NodeKind k) { return k == NodeKind::encoder || k == NodeKind::generator; }

inline bool is_known_algorithm(const std::string& a) {
  return a == "stdp" || a == "rstdp" || a == "surrogate_bptt" || a == "STCA" || a == "STBP";
}

namespace detail {

// Everything validate() needs to know about a component once its path is
// resolved.
struct Catalog {
  std::map<std::string, const GroupSpec*> groups;
  std::map<std::string, const NodeSpec*> nodes;
  std::set<std::string> assemblies;
  std::vector<std::pair<std::string, const ConnectionSpec*>> connections;  // (scope, conn)
  std::vector<std::pair<std::string, const ProjectionSpec*>> projections;
  std::vector<std::string> ids;  // every component path, document order
};

inline std::string join_path(const std::string& scope, const std::string& id) {
  return scope.empty() ? id : scope + "." + id;
}

inline void catalog_assembly(const AssemblySpec& a, const std::string& scope, Catalog& c) {
  const std::string path = join_path(scope, a.id);
  c.assemblies.insert(path);
  c.ids.push_back(path);
  for (const auto& g : a.groups) {
    const auto p = join_path(path, g.id);
    c.groups.emplace(p, &g);
    c.ids.push_back(p);
  }
  for (const auto& sub : a.assemblies) catalog_assembly(sub, path, c);
  for (const auto& conn : a.connections) {
    c.connections.emplace_back(path, &conn);
    c.ids.push_back(join_path(path, conn.id));
  }
  for (const auto& pr : a.projections) {
    c.projections.emplace_back(path, &pr);
    c.ids.push_back(join_path(path, pr.id));
  }
}

inline Catalog catalog(const NetworkSpec& spec) {
  Catalog c;
  for (const auto& g : spec.groups) {
    c.groups.emplace(g.id, &g);
    c.ids.push_back(g.id);
    // Dotted group ids imply their enclosing assemblies.
    for (auto pos = g.id.find('.'); pos != std::string::npos; pos = g.id.find('.', pos + 1))
      c.assemblies.insert(g.id.substr(0, pos));
  }
  for (const auto& a : spec.assemblies) catalog_assembly(a, "", c);
  for (const auto& n : spec.nodes) {
    c.nodes.emplace(n.id, &n);
    c.ids.push_back(n.id);
  }
  for (const auto& conn : spec.connections) {
    c.connections.emplace_back("", &conn);
    c.ids.push_back(conn.id);
  }
  for (const auto& pr : spec.projections) {
    c.projections.emplace_back("", &pr);
    c.ids.push_back(pr.id);
  }
  for (const auto& m : spec.monitors) c.ids.push_back(m.id);
  return c;
}

/// Resolve `name` relative to `scope`: innermost enclosing scope first, then
/// the global namespace. Returns empty when nothing matches.
template <class Pred>
std::string resolve(const std::string& scope, const std::string& name, Pred exists) {
  std::string s = scope;
  while (true) {
    const auto candidate = join_path(s, name);
    if (exists(candidate)) return candidate;
    if (s.empty()) return {};
    const auto pos = s.rfind('.');
    s = pos == std::string::npos ? std::string{} : s.substr(0, pos);
  }
}

}  // namespace detail

/// Check every structural invariant of a spec. Returns one diagnostic per
/// violation; an empty result means the spec is well formed.
inline Diagnostics validate(const NetworkSpec& spec,
                            const ModelRegistry& models = ModelRegistry::global()) {
  Diagnostics out;
  auto diag = [&](DiagKind k, std::string path, std::string msg = {}) {
    out.push_back({k, std::move(path), std::move(msg)});
  };

  if (!(spec.dt > 0.0)) diag(DiagKind::invalid_value, "dt", "dt must be positive");

  const auto cat = detail::catalog(spec);
  {
    std::set<std::string> seen;
    for (const auto& id : cat.ids) {
      if (id.empty()) diag(DiagKind::invalid_value, id, "empty id");
      else if (!seen.insert(id).second) diag(DiagKind::duplicate_id, id);
    }
  }

  for (const auto& [path, g] : cat.groups) {
    if (g->num < 1) diag(DiagKind::invalid_count, path);
    const auto model = models.find(g->model);
    if (!model) {
      diag(DiagKind::unknown_model, path, g->model);
    } else {
      for (const auto& [k, v] : g->params)
        if (!model->param_defaults.count(k)) diag(DiagKind::unknown_param, path + "." + k);
    }
    if (g->shape) {
      const auto& s = *g->shape;
      if (s[0] < 1 || s[1] < 1 || s[2] < 1 || s[0] * s[1] * s[2] != g->num)
        diag(DiagKind::shape_mismatch, path, "channels*height*width must equal num");
    }
  }

  auto group_exists = [&](const std::string& p) { return cat.groups.count(p) != 0; };
  auto endpoint_exists = [&](const std::string& p) {
    return cat.groups.count(p) != 0 || cat.nodes.count(p) != 0;
  };

  auto check_connection = [&](const std::string& scope, const ConnectionSpec& c, const std::string& path) {
    const auto pre = detail::resolve(scope, c.pre, endpoint_exists);
    const auto post = detail::resolve(scope, c.post, endpoint_exists);
    if (pre.empty()) diag(DiagKind::unknown_id, c.pre, "pre of " + path);
    if (post.empty()) diag(DiagKind::unknown_id, c.post, "post of " + path);
    if (c.sparsity < 0.0 || c.sparsity > 1.0) diag(DiagKind::invalid_value, path, "sparsity outside [0,1]");
    if (c.delay_ms < 0.0) diag(DiagKind::invalid_value, path, "negative delay");
    if (pre.empty() || post.empty()) return;

    const GroupSpec* pg = group_exists(pre) ? cat.groups.at(pre) : nullptr;
    const GroupSpec* qg = group_exists(post) ? cat.groups.at(post) : nullptr;
    if (!qg) {
      diag(DiagKind::invalid_endpoint, path, "post must be a neuron group");
      return;
    }
    std::size_t n_pre = 0;
    if (pg) {
      n_pre = static_cast<std::size_t>(std::max(pg->num, 0));
    } else {
      const auto* node = cat.nodes.at(pre);
      if (!is_source(node->kind)) {
        diag(DiagKind::invalid_endpoint, path, "pre node must be an encoder or generator");
        return;
      }
      n_pre = static_cast<std::size_t>(std::max(node->num, 0));
    }
    const auto n_post = static_cast<std::size_t>(std::max(qg->num, 0));

    if (c.synapse == SynapseKind::gap_junction) {
      if (!pg) {
        diag(DiagKind::invalid_endpoint, path, "gap_junction requires a neuron group on both ends");
      } else {
        auto pm = models.find(pg->model), qm = models.find(qg->model);
        if ((pm && pm->voltage_var.empty()) || (qm && qm->voltage_var.empty()))
          diag(DiagKind::invalid_endpoint, path, "gap_junction endpoints need a membrane potential");
      }
      if (c.link_type == LinkType::conv2d)
        diag(DiagKind::invalid_value, path, "gap_junction does not support conv2d");
    }
    if (c.synapse != SynapseKind::none && c.synapse != SynapseKind::gap_junction) {
      auto qm = models.find(qg->model);
      if (qm && qm->voltage_var.empty())
        diag(DiagKind::invalid_endpoint, path, "conductance synapse needs a postsynaptic membrane potential");
    }

    switch (c.link_type) {
      case LinkType::one_to_one:
        if (n_pre != n_post) diag(DiagKind::shape_mismatch, path, "one_to_one needs equal sizes");
        break;
      case LinkType::conv2d:
        if (!c.conv) diag(DiagKind::invalid_value, path, "conv2d needs conv parameters");
        if (!pg || !pg->shape || !qg->shape)
          diag(DiagKind::shape_mismatch, path, "conv2d requires both endpoint shapes");
        if (c.conv && (c.conv->kernel < 1 || c.conv->stride < 1 || c.conv->padding < 0))
          diag(DiagKind::invalid_value, path, "invalid conv parameters");
        break;
      default:
        break;
    }
    if (c.weight_init && c.weight_init->kind == InitRule::Kind::explicit_matrix) {
      const auto& m = c.weight_init->matrix;
      bool ok = true;
      if (c.link_type == LinkType::one_to_one) {
        ok = m.size() == 1 && m[0].size() == n_post;
      } else if (c.link_type == LinkType::conv2d) {
        ok = false;
      } else {
        ok = m.size() == n_post;
        for (const auto& row : m) ok = ok && row.size() == n_pre;
      }
      if (!ok) diag(DiagKind::shape_mismatch, path, "explicit weight matrix has the wrong shape");
    }
  };

  for (const auto& [scope, c] : cat.connections) check_connection(scope, *c, detail::join_path(scope, c->id));

  for (const auto& [scope, p] : cat.projections) {
    const auto path = detail::join_path(scope, p->id);
    auto asm_exists = [&](const std::string& x) { return cat.assemblies.count(x) != 0; };
    if (detail::resolve(scope, p->pre, asm_exists).empty()) diag(DiagKind::unknown_id, p->pre, "pre of " + path);
    if (detail::resolve(scope, p->post, asm_exists).empty()) diag(DiagKind::unknown_id, p->post, "post of " + path);
    for (const auto& pol : p->policies)
      if (pol.kind != "include_type") diag(DiagKind::invalid_value, path, "unknown policy " + pol.kind);
  }

  for (const auto& n : spec.nodes) {
    const auto& methods = node_methods(n.kind);
    if (std::find(methods.begin(), methods.end(), n.method) == methods.end())
      diag(DiagKind::invalid_value, n.id, "method '" + n.method + "' not valid for this node kind");
    if (n.num < 1) diag(DiagKind::invalid_count, n.id);
    if (n.kind == NodeKind::decoder || n.kind == NodeKind::action) {
      if (!group_exists(n.target)) {
        diag(DiagKind::unknown_id, n.target.empty() ? n.id : n.target, "target of " + n.id);
      } else {
        const int tn = cat.groups.at(n.target)->num;
        if (n.kind == NodeKind::decoder && n.num != tn)
          diag(DiagKind::shape_mismatch, n.id, "decoder num must equal target size");
        if (n.kind == NodeKind::action && (n.num < 1 || tn % std::max(n.num, 1) != 0))
          diag(DiagKind::shape_mismatch, n.id, "populations must partition the target");
      }
    }
    if (n.kind == NodeKind::reward) {
      auto it = cat.nodes.find(n.target);
      if (it == cat.nodes.end() || it->second->kind != NodeKind::decoder)
        diag(DiagKind::unknown_id, n.target.empty() ? n.id : n.target, "reward target must be a decoder");
    }
  }

  for (const auto& m : spec.monitors) {
    if (cat.groups.count(m.target)) {
      if (m.kind == MonitorKind::state) {
        const auto model = models.find(cat.groups.at(m.target)->model);
        if (model) {
          const auto vars = model->exposed_vars();
          if (std::find(vars.begin(), vars.end(), m.var_name) == vars.end())
            diag(DiagKind::unknown_variable, m.id, m.var_name);
        }
      }
    } else if (cat.nodes.count(m.target)) {
      const auto* node = cat.nodes.at(m.target);
      if (!is_source(node->kind)) diag(DiagKind::invalid_endpoint, m.id, "only source nodes can be monitored");
      if (m.kind == MonitorKind::state && m.var_name != "O" && m.var_name != "x")
        diag(DiagKind::unknown_variable, m.id, m.var_name);
    } else {
      diag(DiagKind::unknown_id, m.target, "target of " + m.id);
    }
  }

  if (spec.learner) {
    const auto& l = *spec.learner;
    if (!is_known_algorithm(l.algorithm)) diag(DiagKind::invalid_value, "learner", "unknown algorithm " + l.algorithm);
    if (l.optimizer != "sgd" && l.optimizer != "adam")
      diag(DiagKind::invalid_value, "learner", "unknown optimizer " + l.optimizer);
    if (!l.loss.empty() && l.loss != "cross_entropy" && l.loss != "mse")
      diag(DiagKind::invalid_value, "learner", "unknown loss " + l.loss);
    for (const auto& t : l.trainable) {
      const ConnectionSpec* found = nullptr;
      for (const auto& [scope, c] : cat.connections)
        if (detail::join_path(scope, c->id) == t) found = c;
      for (const auto& [scope, p] : cat.projections) {
        const auto prefix = detail::join_path(scope, p->id) + ":";
        if (t.compare(0, prefix.size(), prefix) == 0) found = &p->templ;
      }
      if (!found) diag(DiagKind::unknown_id, t, "trainable");
      else if (!found->trainable) diag(DiagKind::not_trainable, t);
    }
    if (!l.output.empty() && !group_exists(l.output)) diag(DiagKind::unknown_id, l.output, "learner output");
  }
  return out;
}

}  // namespace snnforge
