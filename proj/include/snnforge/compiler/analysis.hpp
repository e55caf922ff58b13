#pragma once

// Static checks over a compiled graph: read-before-write scan, gradient-path
// analysis for the learner and the inspect listing.

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "snnforge/compiler/ir.hpp"
#include "snnforge/compiler/op_def.hpp"

namespace snnforge {

/// Temps read before they are written within a step, in schedule order.
inline Diagnostics verify_schedule(const CompiledGraph& g) {
  Diagnostics out;
  std::vector<bool> written(g.variables.size(), false);
  for (const auto& op : g.schedule) {
    for (std::size_t k = 0; k < op.arg_ids.size(); ++k) {
      const int id = op.arg_ids[k];
      if (g.decl(id).kind == VarKind::temp && !written[static_cast<std::size_t>(id)])
        out.push_back({DiagKind::unknown_variable, op.args[k], "read by " + op.op + " before it is written"});
    }
    for (int id : op.result_ids) written[static_cast<std::size_t>(id)] = true;
  }
  return out;
}

/// One line per op: `r1,r2 <= op(a, b) [delay=k]`.
inline std::string format_schedule(const CompiledGraph& g) {
  std::ostringstream os;
  for (const auto& op : g.schedule) {
    for (std::size_t k = 0; k < op.results.size(); ++k) os << (k ? "," : "") << op.results[k];
    os << " <= " << op.op << "(";
    for (std::size_t k = 0; k < op.args.size(); ++k) os << (k ? ", " : "") << op.args[k];
    os << ")";
    if (op.delay > 0) os << " [delay=" << op.delay << "]";
    os << "\n";
  }
  return os.str();
}

/// Group whose spikes feed the loss: explicit learner output, else the first
/// decoder's target, else the last group.
inline std::string learner_output(const CompiledGraph& g) {
  if (g.learner && !g.learner->output.empty()) return g.learner->output;
  for (const auto& n : g.nodes)
    if (n.spec.kind == NodeKind::decoder) return n.spec.target;
  return g.groups.empty() ? std::string{} : g.groups.back().id;
}

/// Connections whose weights the learner updates.
inline std::vector<const LoweredConnection*> trainable_connections(const CompiledGraph& g) {
  std::vector<const LoweredConnection*> out;
  const std::vector<std::string> empty;
  const auto& ids = g.learner ? g.learner->trainable : empty;
  for (const auto& c : g.connections) {
    if (!c.trainable) continue;
    if (ids.empty()) {
      out.push_back(&c);
      continue;
    }
    for (const auto& t : ids)
      if (t == c.id || (c.id.size() > t.size() && c.id.compare(0, t.size() + 1, t + ":") == 0)) {
        out.push_back(&c);
        break;
      }
  }
  return out;
}

struct GradientPath {
  std::vector<bool> needs_grad;  // per variable: depends on a trainable weight
  std::vector<bool> relevant;    // per variable: the loss depends on it
  std::vector<bool> on_path;     // per op
};

inline GradientPath gradient_path(const CompiledGraph& g) {
  const std::size_t nv = g.variables.size();
  GradientPath p{std::vector<bool>(nv, false), std::vector<bool>(nv, false),
                 std::vector<bool>(g.schedule.size(), false)};
  for (const auto* c : trainable_connections(g))
    if (c->weight >= 0) p.needs_grad[static_cast<std::size_t>(c->weight)] = true;
  if (const auto* out = g.group(learner_output(g)); out && out->spikes >= 0)
    p.relevant[static_cast<std::size_t>(out->spikes)] = true;

  // State variables carry values across steps, so both closures iterate to a
  // fixed point over the whole schedule.
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& op : g.schedule) {
      bool any = false;
      for (int a : op.arg_ids) any = any || p.needs_grad[static_cast<std::size_t>(a)];
      if (!any) continue;
      for (int r : op.result_ids)
        if (!p.needs_grad[static_cast<std::size_t>(r)]) p.needs_grad[static_cast<std::size_t>(r)] = changed = true;
    }
    for (auto it = g.schedule.rbegin(); it != g.schedule.rend(); ++it) {
      bool any = false;
      for (int r : it->result_ids) any = any || p.relevant[static_cast<std::size_t>(r)];
      if (!any) continue;
      for (int a : it->arg_ids)
        if (!p.relevant[static_cast<std::size_t>(a)]) p.relevant[static_cast<std::size_t>(a)] = changed = true;
    }
  }
  for (std::size_t k = 0; k < g.schedule.size(); ++k) {
    const auto& op = g.schedule[k];
    bool in = false, out = false;
    for (int a : op.arg_ids) in = in || p.needs_grad[static_cast<std::size_t>(a)];
    for (int r : op.result_ids) out = out || p.relevant[static_cast<std::size_t>(r)];
    p.on_path[k] = in && out;
  }
  return p;
}

/// NonDifferentiableOp for path ops without a backward rule, PathwayIncomplete
/// for path components missing from a non-empty pathway. Only meaningful for
/// gradient learners.
inline Diagnostics gradient_path_diagnostics(const CompiledGraph& g) {
  Diagnostics out;
  if (!g.learner) return out;
  const auto& alg = g.learner->algorithm;
  if (alg != "surrogate_bptt" && alg != "STCA" && alg != "STBP") return out;
  const auto p = gradient_path(g);
  const std::set<std::string> pathway(g.learner->pathway.begin(), g.learner->pathway.end());
  std::set<std::string> reported;
  for (std::size_t k = 0; k < g.schedule.size(); ++k) {
    if (!p.on_path[k]) continue;
    const auto& op = g.schedule[k];
    if (!g.kernels[k]->differentiable())
      out.push_back({DiagKind::non_differentiable_op, op.owner, op.op + " has no backward rule"});
    if (!pathway.empty() && !pathway.count(op.owner) && reported.insert(op.owner).second)
      out.push_back({DiagKind::pathway_incomplete, op.owner, "on a gradient path but not in the pathway"});
  }
  return out;
}

}  // namespace snnforge
