#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "snnforge/compiler/op_def.hpp"
#include "snnforge/kernels/builtin_ops.hpp"

namespace snnforge {

class OpRegistry {
 public:
  OpRegistry() {
    for (auto& d : kernels::builtin_ops()) {
      auto name = d.name;
      ops_.emplace(std::move(name), std::make_shared<const OpDef>(std::move(d)));
    }
  }

  static OpRegistry& global() {
    static OpRegistry r;
    return r;
  }

  std::shared_ptr<const OpDef> find(const std::string& name) const {
    auto it = ops_.find(name);
    return it == ops_.end() ? nullptr : it->second;
  }
  bool contains(const std::string& name) const { return ops_.count(name) != 0; }
  bool is_builtin(const std::string& name) const {
    auto d = find(name);
    return d && d->builtin;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : ops_) out.push_back(k);
    return out;
  }

  void add(OpDef def) {
    if (contains(def.name)) throw Error(ErrorCode::duplicate_name, def.name);
    auto name = def.name;
    ops_.emplace(std::move(name), std::make_shared<const OpDef>(std::move(def)));
  }

  /// Register a standalone function as an op. Without `backward` it is a
  /// forward-only op and may not sit on a gradient path.
  void register_external_op(const std::string& name, ExternalFn fn, ExternalShapeRule shape_rule,
                            ExternalBackwardFn backward = {}) {
    OpDef d;
    d.name = name;
    d.builtin = false;
    d.forward = [fn](OpContext& c) {
      const auto& rd = *c.result_decls[0];
      const std::size_t w = rd.size();
      const std::size_t rows = rd.batched() ? c.batch : 1;
      std::vector<std::span<const double>> row_args(c.args.size());
      for (std::size_t b = 0; b < rows; ++b) {
        for (std::size_t k = 0; k < c.args.size(); ++k) row_args[k] = c.arg(k).row(b);
        const auto out = fn(row_args);
        if (out.size() != w) throw Error(ErrorCode::shape_mismatch, c.op.results[0], "external op returned wrong size");
        std::copy(out.begin(), out.end(), c.results[0].begin() + static_cast<std::ptrdiff_t>(b * w));
      }
    };
    if (backward) {
      d.backward = [backward](BackwardContext& c) {
        const auto& rd = *c.result_decls[0];
        const std::size_t w = rd.size();
        const std::size_t rows = rd.batched() ? c.batch : 1;
        std::vector<std::span<const double>> row_args(c.args.size());
        for (std::size_t b = 0; b < rows; ++b) {
          for (std::size_t k = 0; k < c.args.size(); ++k) {
            const ArrayView v{c.args[k], c.arg_decls[k]->size(), c.arg_decls[k]->batched()};
            row_args[k] = v.row(b);
          }
          const auto grads = backward(row_args, c.g_results[0].subspan(b * w, w));
          for (std::size_t k = 0; k < c.g_args.size() && k < grads.size(); ++k) {
            if (c.g_args[k].empty()) continue;
            const auto& d = *c.arg_decls[k];
            const std::size_t base = d.batched() ? b * d.size() : 0;
            for (std::size_t i = 0; i < grads[k].size(); ++i) c.g_args[k][base + i] += grads[k][i];
          }
        }
      };
    }
    d.shape_rule = [shape_rule](const std::vector<Shape>& args, const ParamTable&) {
      return std::vector<Shape>{shape_rule(args)};
    };
    add(std::move(d));
  }

 private:
  std::map<std::string, std::shared_ptr<const OpDef>> ops_;
};

inline void register_external_op(const std::string& name, ExternalFn fn, ExternalShapeRule shape_rule,
                                 ExternalBackwardFn backward = {}) {
  OpRegistry::global().register_external_op(name, std::move(fn), std::move(shape_rule),
                                            std::move(backward));
}

}  // namespace snnforge
