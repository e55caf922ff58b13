#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "snnforge/compiler/ir.hpp"
#include "snnforge/compiler/op_def.hpp"
#include "snnforge/engine/monitor.hpp"
#include "snnforge/engine/state.hpp"

namespace snnforge {

// Values an op saw and produced during one step. Parameters and constants are
// not copied (they do not change within a forward pass); their slots stay empty.
struct OpSnapshot {
  std::vector<std::vector<double>> args;
  std::vector<std::vector<double>> results;
};

struct TapeFrame {
  std::vector<OpSnapshot> ops;  // parallel to the schedule; unrecorded ops empty
};

struct Tape {
  std::vector<bool> record;  // which ops to snapshot
  std::vector<TapeFrame> frames;

  void clear() { frames.clear(); }
  std::size_t size() const { return frames.size(); }
};

namespace detail {

inline OpContext make_context(const CompiledGraph& g, SimState& s, std::size_t k) {
  const auto& op = g.schedule[k];
  OpContext c{op, {}, {}, {}, {}, s.batch, g.dt, s.step, s.trial, nullptr, s.spikes};
  c.args.reserve(op.arg_ids.size());
  c.arg_decls.reserve(op.arg_ids.size());
  for (int a : op.arg_ids) {
    c.args.emplace_back(s.values[static_cast<std::size_t>(a)]);
    c.arg_decls.push_back(&g.decl(a));
  }
  c.results.reserve(op.result_ids.size());
  c.result_decls.reserve(op.result_ids.size());
  for (int r : op.result_ids) {
    c.results.emplace_back(s.values[static_cast<std::size_t>(r)]);
    c.result_decls.push_back(&g.decl(r));
  }
  if (op.aux >= 0) c.delay = &s.delays.at(static_cast<std::size_t>(op.aux));
  return c;
}

inline void check_finite(const CompiledGraph& g, const SimState& s) {
  for (std::size_t v = 0; v < g.variables.size(); ++v) {
    if (g.variables[v].kind != VarKind::state) continue;
    for (double x : s.values[v])
      if (!std::isfinite(x)) throw Error(ErrorCode::non_finite_value, g.variables[v].id);
  }
}

}  // namespace detail

/// Execute the schedule once and advance the step counter.
inline void step(const CompiledGraph& g, SimState& s, Recorder* rec = nullptr, Tape* tape = nullptr) {
  TapeFrame* frame = nullptr;
  if (tape) {
    tape->frames.emplace_back();
    frame = &tape->frames.back();
    frame->ops.resize(g.schedule.size());
  }
  for (std::size_t k = 0; k < g.schedule.size(); ++k) {
    auto c = detail::make_context(g, s, k);
    const bool snap = frame && k < tape->record.size() && tape->record[k];
    if (snap) {
      auto& o = frame->ops[k];
      o.args.resize(c.args.size());
      for (std::size_t a = 0; a < c.args.size(); ++a)
        if (c.arg_decls[a]->batched()) o.args[a].assign(c.args[a].begin(), c.args[a].end());
    }
    g.kernels[k]->forward(c);
    if (snap) {
      auto& o = frame->ops[k];
      o.results.resize(c.results.size());
      for (std::size_t r = 0; r < c.results.size(); ++r) o.results[r].assign(c.results[r].begin(), c.results[r].end());
    }
  }
  detail::check_finite(g, s);
  if (rec) rec->record(s);
  ++s.step;
}

/// Run round(duration_ms / dt) steps.
inline void run(const CompiledGraph& g, SimState& s, double duration_ms, Recorder* rec = nullptr) {
  if (duration_ms < g.dt) throw Error(ErrorCode::invalid_argument, "duration", "must be >= dt");
  const auto n = to_steps(duration_ms, g.dt);
  for (long long i = 0; i < n; ++i) {
    try {
      step(g, s, rec);
    } catch (const Error& e) {
      throw Error(e.code(), e.subject(), "at step " + std::to_string(s.step) + ": " + e.what());
    }
  }
}

}  // namespace snnforge
