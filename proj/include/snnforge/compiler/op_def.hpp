#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "snnforge/compiler/ir.hpp"
#include "snnforge/core/error.hpp"
#include "snnforge/kernels/delay.hpp"

namespace snnforge {

// How spikes are produced. `soft` replaces the hard threshold with
// sigmoid(beta (V - V_th)) so the forward pass is smooth; used by gradient
// checks.
struct SpikeMode {
  bool soft = false;
  double beta = 2.0;
};

/// Element accessor for a (possibly batched, possibly scalar) array.
struct ArrayView {
  std::span<const double> data;
  std::size_t width = 1;  // elements per batch row
  bool batched = false;

  double at(std::size_t b, std::size_t i) const {
    const std::size_t base = batched ? b * width : 0;
    return data[base + (width == 1 ? 0 : i)];
  }
  std::span<const double> row(std::size_t b) const {
    return batched ? data.subspan(b * width, width) : data.first(width);
  }
};

struct OpContext {
  const OpRecord& op;
  std::vector<std::span<const double>> args;
  std::vector<std::span<double>> results;
  std::vector<const VariableDecl*> arg_decls;
  std::vector<const VariableDecl*> result_decls;
  std::size_t batch = 1;
  double dt = 1.0;
  std::int64_t step = 0;
  std::uint64_t trial = 0;
  DelayBuffer* delay = nullptr;
  SpikeMode spikes;

  ArrayView arg(std::size_t k) const {
    return {args[k], arg_decls[k]->size(), arg_decls[k]->batched()};
  }
  double attr(const char* name, double fallback = 0.0) const {
    auto it = op.attrs.find(name);
    return it == op.attrs.end() ? fallback : it->second;
  }
};

struct BackwardContext {
  const OpRecord& op;
  std::vector<std::span<const double>> args;       // values seen by the forward call
  std::vector<std::span<const double>> results;    // values the forward call wrote
  std::vector<std::span<const double>> g_results;  // adjoints of results
  std::vector<std::span<double>> g_args;           // accumulate; empty = not needed
  std::vector<const VariableDecl*> arg_decls;
  std::vector<const VariableDecl*> result_decls;
  std::size_t batch = 1;
  double dt = 1.0;
  SpikeMode spikes;
  SurrogateSpec surrogate;
  DelayBuffer* delay = nullptr;  // reverse-time buffer for `delay` ops

  double attr(const char* name, double fallback = 0.0) const {
    auto it = op.attrs.find(name);
    return it == op.attrs.end() ? fallback : it->second;
  }
};

using ForwardFn = std::function<void(OpContext&)>;
using BackwardFn = std::function<void(BackwardContext&)>;
/// Maps argument shapes to result shapes; throws ShapeMismatch.
using ShapeRule =
    std::function<std::vector<Shape>(const std::vector<Shape>& args, const ParamTable& attrs)>;

class OpDef {
 public:
  std::string name;
  ForwardFn forward;
  BackwardFn backward;  // empty: forward-only
  ShapeRule shape_rule;
  bool builtin = true;
  bool stochastic = false;
  bool uses_delay = false;

  bool differentiable() const { return static_cast<bool>(backward); }
};

// User-facing callable signatures for standalone functions. They are called
// once per batch row with that row of every argument.
using ExternalFn = std::function<std::vector<double>(const std::vector<std::span<const double>>&)>;
using ExternalShapeRule = std::function<Shape(const std::vector<Shape>&)>;
/// Returns one gradient vector per argument given the output gradient.
using ExternalBackwardFn = std::function<std::vector<std::vector<double>>(
    const std::vector<std::span<const double>>& args, std::span<const double> g_out)>;

}  // namespace snnforge
