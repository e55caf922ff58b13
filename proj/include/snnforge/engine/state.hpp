#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "snnforge/compiler/ir.hpp"
#include "snnforge/compiler/op_def.hpp"
#include "snnforge/core/error.hpp"
#include "snnforge/kernels/delay.hpp"

namespace snnforge {

// Every mutable value of one simulation. Batched variables hold batch rows
// back to back; parameters and constants hold a single copy.
struct SimState {
  std::vector<std::vector<double>> values;
  std::int64_t step = 0;
  std::uint64_t trial = 0;  // bumped by reset(); keys the runtime random streams
  std::size_t batch = 1;
  std::vector<DelayBuffer> delays;  // parallel to graph.delay_edges
  SpikeMode spikes;

  static SimState create(const CompiledGraph& g, std::size_t batch = 1) {
    if (batch == 0) throw Error(ErrorCode::invalid_argument, "batch", "must be >= 1");
    SimState s;
    s.batch = batch;
    s.values.resize(g.variables.size());
    for (std::size_t v = 0; v < g.variables.size(); ++v) s.init_variable(g, v);
    for (const auto& e : g.delay_edges) {
      const auto* c = g.connection(e.connection);
      s.delays.emplace_back(static_cast<std::size_t>(e.steps), batch * c->n_pre);
    }
    return s;
  }

  /// Restore every non-parameter variable to its initial value and clear delay
  /// lines. Parameters (weights) are kept.
  void reset(const CompiledGraph& g) {
    for (std::size_t v = 0; v < g.variables.size(); ++v)
      if (g.variables[v].kind != VarKind::parameter) init_variable(g, v);
    for (auto& d : delays) d.clear();
    step = 0;
    ++trial;
  }

  std::span<double> value(const CompiledGraph& g, const std::string& id) {
    return values.at(static_cast<std::size_t>(checked(g, id)));
  }
  std::span<const double> value(const CompiledGraph& g, const std::string& id) const {
    return values.at(static_cast<std::size_t>(checked(g, id)));
  }

  /// Set an input variable. `x` is either one row (broadcast) or batch rows.
  void set_input(const CompiledGraph& g, const std::string& id, std::span<const double> x) {
    const int v = checked(g, id);
    auto& dst = values[static_cast<std::size_t>(v)];
    const std::size_t w = g.decl(v).size();
    if (x.size() == w) {
      for (std::size_t b = 0; b * w < dst.size(); ++b) std::copy(x.begin(), x.end(), dst.begin() + static_cast<std::ptrdiff_t>(b * w));
    } else if (x.size() == dst.size()) {
      std::copy(x.begin(), x.end(), dst.begin());
    } else {
      throw Error(ErrorCode::shape_mismatch, id, "input has " + std::to_string(x.size()) + " values");
    }
  }

 private:
  static int checked(const CompiledGraph& g, const std::string& id) {
    const int v = g.var(id);
    if (v < 0) throw Error(ErrorCode::invalid_argument, id, "no such variable");
    return v;
  }

  void init_variable(const CompiledGraph& g, std::size_t v) {
    const auto& d = g.variables[v];
    const std::size_t w = d.size();
    const std::size_t rows = d.batched() ? batch : 1;
    auto& dst = values[v];
    dst.resize(rows * w);
    for (std::size_t b = 0; b < rows; ++b)
      for (std::size_t i = 0; i < w; ++i) dst[b * w + i] = d.init_at(i);
  }
};

}  // namespace snnforge
