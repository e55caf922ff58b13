#pragma once

// Lowering: FlatModel -> CompiledGraph. Every group contributes its model's
// variables and update ops, every connection its weights, aggregation op and
// optional delay/synapse ops, and nodes their encode/decode ops. The result is
// ordered by the requested strategy, pruned of dead temporaries and
// shape-checked once.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "snnforge/compiler/analysis.hpp"
#include "snnforge/compiler/ir.hpp"
#include "snnforge/compiler/op_registry.hpp"
#include "snnforge/compiler/toposort.hpp"
#include "snnforge/core/rng.hpp"
#include "snnforge/frontend/flatten.hpp"
#include "snnforge/kernels/models.hpp"

namespace snnforge {

struct LowerOptions {
  const OpRegistry* ops = &OpRegistry::global();
  const ModelRegistry* models = &ModelRegistry::global();
};

namespace detail {

class Lowering {
 public:
  Lowering(const FlatModel& flat, Strategy strategy, const LowerOptions& opt)
      : flat_(flat), opt_(opt) {
    g_.name = flat.name;
    g_.dt = flat.dt;
    g_.seed = flat.seed;
    g_.strategy = strategy;
    g_.learner = flat.learner;
  }

  CompiledGraph run() {
    connections_ = all_connections(flat_, &g_.diagnostics);
    declare_groups();
    declare_nodes();
    declare_connections();
    declare_group_inputs();
    declare_custom();
    order_schedule();
    bind_monitors();
    eliminate_dead_temps();
    finalize();
    if (g_.learner) {
      auto d = gradient_path_diagnostics(g_);
      g_.diagnostics.insert(g_.diagnostics.end(), d.begin(), d.end());
    }
    return std::move(g_);
  }

 private:
  // Ops are collected per component and stitched together by order_schedule.
  struct ConnOps {
    const ConnectionSpec* spec = nullptr;
    std::vector<OpRecord> ops;
    std::string contribution;  // variable written by the last op
  };

  void declare(VariableDecl v) {
    if (decl_index_.count(v.id)) throw Error(ErrorCode::duplicate_name, v.id);
    decl_index_[v.id] = decls_.size();
    decls_.push_back(std::move(v));
  }

  bool declared(const std::string& id) const { return decl_index_.count(id) != 0; }

  VariableDecl& decl(const std::string& id) { return decls_.at(decl_index_.at(id)); }

  std::size_t endpoint_size(const std::string& id) const {
    if (auto* g = flat_.group(id)) return static_cast<std::size_t>(g->num);
    if (auto* n = flat_.node(id)) return static_cast<std::size_t>(n->num);
    throw Error(ErrorCode::validation_failed, id, "unknown endpoint");
  }

  const NeuronModelDef& model_of(const GroupSpec& g) const {
    auto m = opt_.models->find(g.model);
    if (!m) throw Error(ErrorCode::unknown_model, g.id, g.model);
    return *m;
  }

  void declare_groups() {
    for (const auto& g : flat_.groups) {
      const auto& model = model_of(g);
      const auto params = model.params_for(g.params);
      const auto init = model.init_for(params);
      LoweredGroup lg;
      lg.id = g.id;
      lg.model = g.model;
      lg.num = static_cast<std::size_t>(g.num);
      for (const auto& s : model.state_vars) {
        VariableDecl v;
        v.id = g.id + ":" + s;
        v.kind = VarKind::state;
        v.shape = {lg.num};
        auto it = init.find(s);
        v.init = {it == init.end() ? 0.0 : it->second};
        v.owner = g.id;
        lg.vars[s] = -1;
        declare(std::move(v));
      }
      lg.vars[model.input_var] = -1;
      group_params_[g.id] = params;
      g_.groups.push_back(std::move(lg));
    }
  }

  void declare_nodes() {
    for (const auto& n : flat_.nodes) {
      const auto num = static_cast<std::size_t>(n.num);
      LoweredNode ln;
      ln.spec = n;
      if (is_source(n.kind)) {
        declare({n.id + ":O", VarKind::state, {num}, {0.0}, false, n.id});
        OpRecord op;
        op.results = {n.id + ":O"};
        op.op = n.method == "poisson_encode" || n.method == "latency_encode" ? n.method
                : n.method == "poisson_generate"                             ? "poisson_generate"
                                                                             : "constant_current_generate";
        op.owner = n.id;
        op.stream = stream_key(flat_.seed, n.id);
        op.attrs = n.params;
        op.attrs["num"] = static_cast<double>(num);
        if (n.kind == NodeKind::encoder) {
          declare({n.id + ":x", VarKind::input, {num}, {0.0}, false, n.id});
          op.args = {n.id + ":x"};
          if (n.method == "poisson_encode" && !op.attrs.count("rate_max")) op.attrs["rate_max"] = 100.0;
          if (n.method == "latency_encode" && !op.attrs.count("T_window")) op.attrs["T_window"] = 20.0;
        }
        source_ops_[n.id] = std::move(op);
      } else if (n.kind == NodeKind::decoder || n.kind == NodeKind::action) {
        const auto* tgt = flat_.group(n.target);
        const auto width = static_cast<std::size_t>(tgt->num);
        declare({n.id + ":count", VarKind::state, {width}, {0.0}, false, n.id});
        OpRecord c;
        c.results = {n.id + ":count"};
        c.op = "spike_count";
        c.args = {n.id + ":count", n.target + ":" + model_of(*tgt).spike_var};
        c.owner = n.id;
        readout_ops_.push_back(std::move(c));
        if (n.kind == NodeKind::decoder) {
          declare({n.id + ":first", VarKind::state, {width}, {-1.0}, false, n.id});
          OpRecord f;
          f.results = {n.id + ":first"};
          f.op = "first_spike";
          f.args = {n.id + ":first", n.target + ":" + model_of(*tgt).spike_var};
          f.owner = n.id;
          readout_ops_.push_back(std::move(f));
        }
      }
      g_.nodes.push_back(std::move(ln));
    }
  }

  std::string pre_output(const ConnectionSpec& c) const {
    if (auto* g = flat_.group(c.pre)) {
      const auto& m = model_of(*g);
      return c.pre + ":" + (c.synapse == SynapseKind::gap_junction ? m.voltage_var : m.spike_var);
    }
    return c.pre + ":O";
  }

  static double fan_in_scale(std::size_t fan_in) {
    return 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
  }

  static double draw(const InitRule& r, InitRng& rng) {
    switch (r.kind) {
      case InitRule::Kind::constant: return r.a;
      case InitRule::Kind::uniform: return rng.uniform(r.a, r.b);
      case InitRule::Kind::normal: return rng.normal(r.a, r.b);
      case InitRule::Kind::explicit_matrix: return 0.0;
    }
    return 0.0;
  }

  void declare_connections() {
    for (const auto& c : connections_) {
      ConnOps co;
      co.spec = &c;
      const std::size_t n_pre = endpoint_size(c.pre), n_post = endpoint_size(c.post);
      const auto* post_group = flat_.group(c.post);
      const auto& post_model = model_of(*post_group);
      InitRng rng(stream_key(flat_.seed, "init:" + c.id));

      LoweredConnection lc;
      lc.id = c.id;
      lc.pre = c.pre;
      lc.post = c.post;
      lc.link_type = c.link_type;
      lc.synapse = c.synapse;
      lc.n_pre = n_pre;
      lc.n_post = n_post;
      lc.trainable = c.trainable;

      std::string input = pre_output(c);
      const auto steps = to_steps(c.delay_ms, flat_.dt);
      if (steps > 0) {
        const auto delayed = c.id + ":delayed";
        declare({delayed, VarKind::temp, {n_pre}, {0.0}, false, c.id});
        OpRecord d;
        d.results = {delayed};
        d.op = "delay";
        d.args = {input};
        d.owner = c.id;
        d.delay = static_cast<int>(steps);
        d.aux = static_cast<int>(g_.delay_edges.size());
        g_.delay_edges.push_back({c.id, steps});
        co.ops.push_back(std::move(d));
        input = delayed;
      }

      const auto w_id = c.id + ":W";
      OpRecord agg;
      agg.owner = c.id;
      std::vector<std::string> weight_args;
      switch (c.link_type) {
        case LinkType::full: {
          const InitRule rule = c.weight_init.value_or(InitRule::uniform(0.0, fan_in_scale(n_pre)));
          std::vector<double> w(n_pre * n_post);
          for (std::size_t j = 0; j < n_post; ++j)
            for (std::size_t i = 0; i < n_pre; ++i)
              w[i * n_post + j] =
                  rule.kind == InitRule::Kind::explicit_matrix ? rule.matrix[j][i] : draw(rule, rng);
          declare({w_id, VarKind::parameter, {n_pre, n_post}, std::move(w), c.trainable, c.id});
          weight_args = {w_id};
          agg.op = "weight_sum";
          break;
        }
        case LinkType::sparse_random: {
          const InitRule rule = c.weight_init.value_or(InitRule::uniform(0.0, fan_in_scale(n_pre)));
          // Edge sampling walks post-major; storage is CSR by pre.
          std::vector<std::vector<std::pair<std::size_t, double>>> rows(n_pre);
          for (std::size_t j = 0; j < n_post; ++j)
            for (std::size_t i = 0; i < n_pre; ++i) {
              if (rule.kind == InitRule::Kind::explicit_matrix) {
                if (rule.matrix[j][i] != 0.0) rows[i].emplace_back(j, rule.matrix[j][i]);
                continue;
              }
              if (rng.uniform() < c.sparsity) rows[i].emplace_back(j, draw(rule, rng));
            }
          std::vector<double> row_ptr{0.0}, post_idx, w;
          for (auto& r : rows) {
            std::sort(r.begin(), r.end());
            for (const auto& [j, v] : r) {
              post_idx.push_back(static_cast<double>(j));
              w.push_back(v);
            }
            row_ptr.push_back(static_cast<double>(w.size()));
          }
          const std::size_t nnz = w.size();
          declare({w_id, VarKind::parameter, {nnz}, std::move(w), c.trainable, c.id});
          declare({c.id + ":row_ptr", VarKind::constant, {n_pre + 1}, std::move(row_ptr), false, c.id});
          declare({c.id + ":post_idx", VarKind::constant, {nnz}, std::move(post_idx), false, c.id});
          weight_args = {w_id, c.id + ":row_ptr", c.id + ":post_idx"};
          agg.op = "sparse_weight_sum";
          break;
        }
        case LinkType::one_to_one: {
          const InitRule rule = c.weight_init.value_or(InitRule::uniform(0.0, 1.0));
          std::vector<double> w(n_post);
          for (std::size_t j = 0; j < n_post; ++j)
            w[j] = rule.kind == InitRule::Kind::explicit_matrix ? rule.matrix[0][j] : draw(rule, rng);
          declare({w_id, VarKind::parameter, {n_post}, std::move(w), c.trainable, c.id});
          weight_args = {w_id};
          agg.op = "one_to_one_sum";
          break;
        }
        case LinkType::conv2d: {
          const auto* pre_group = flat_.group(c.pre);
          if (!pre_group || !pre_group->shape || !post_group->shape || !c.conv)
            throw Error(ErrorCode::shape_mismatch, c.id, "conv2d requires both endpoint shapes");
          const auto& ps = *pre_group->shape;
          const auto& qs = *post_group->shape;
          const auto k = static_cast<std::size_t>(c.conv->kernel), s = static_cast<std::size_t>(c.conv->stride),
                     p = static_cast<std::size_t>(c.conv->padding);
          const auto oh = kernels::Conv2dGeometry::out_extent(static_cast<std::size_t>(ps[1]), k, s, p);
          const auto ow = kernels::Conv2dGeometry::out_extent(static_cast<std::size_t>(ps[2]), k, s, p);
          if (oh != static_cast<std::size_t>(qs[1]) || ow != static_cast<std::size_t>(qs[2]))
            throw Error(ErrorCode::shape_mismatch, c.id,
                        "post shape inconsistent with kernel/stride/padding");
          const std::size_t cin = static_cast<std::size_t>(ps[0]), cout = static_cast<std::size_t>(qs[0]);
          const InitRule rule = c.weight_init.value_or(InitRule::uniform(0.0, fan_in_scale(cin * k * k)));
          std::vector<double> w(cout * cin * k * k);
          for (auto& x : w) x = draw(rule, rng);
          declare({w_id, VarKind::parameter, {cout, cin, k, k}, std::move(w), c.trainable, c.id});
          weight_args = {w_id};
          agg.op = "conv2d_weight_sum";
          agg.attrs = {{"in_channels", ps[0]}, {"in_height", ps[1]}, {"in_width", ps[2]},
                       {"out_channels", qs[0]}, {"out_height", qs[1]}, {"out_width", qs[2]},
                       {"kernel", c.conv->kernel}, {"stride", c.conv->stride}, {"padding", c.conv->padding}};
          break;
        }
      }
      lc.weight = -1;
      if (c.link_type == LinkType::sparse_random) lc.row_ptr = lc.post_idx = -1;

      const std::string post_v = post_model.voltage_var.empty() ? "" : c.post + ":" + post_model.voltage_var;
      if (c.synapse == SynapseKind::gap_junction) {
        agg.op = "gap_junction";
        agg.args = weight_args;
        agg.args.push_back(input);
        agg.args.push_back(post_v);
        agg.attrs["link"] = c.link_type == LinkType::full ? 0.0 : c.link_type == LinkType::sparse_random ? 1.0 : 2.0;
        agg.attrs["num"] = static_cast<double>(n_post);
        agg.results = {c.id + ":I"};
        declare({c.id + ":I", VarKind::temp, {n_post}, {0.0}, false, c.id});
        co.ops.push_back(std::move(agg));
      } else {
        agg.args = weight_args;
        agg.args.push_back(input);
        if (c.link_type == LinkType::sparse_random) agg.attrs["num"] = static_cast<double>(n_post);
        if (c.synapse == SynapseKind::none) {
          agg.results = {c.id + ":I"};
          declare({c.id + ":I", VarKind::temp, {n_post}, {0.0}, false, c.id});
          co.ops.push_back(std::move(agg));
        } else {
          agg.results = {c.id + ":x"};
          declare({c.id + ":x", VarKind::temp, {n_post}, {0.0}, false, c.id});
          co.ops.push_back(std::move(agg));
          declare({c.id + ":g", VarKind::state, {n_post}, {0.0}, false, c.id});
          declare({c.id + ":I", VarKind::temp, {n_post}, {0.0}, false, c.id});
          const auto p = kernels::SynapseParams::from(c.synapse, c.synapse_params);
          OpRecord syn;
          syn.results = {c.id + ":g", c.id + ":I"};
          syn.op = "synapse_conductance";
          syn.args = {c.id + ":g", c.id + ":x", post_v};
          syn.attrs = {{"kind", static_cast<double>(static_cast<int>(c.synapse))},
                       {"tau", p.tau}, {"E", p.E}, {"Mg", p.Mg}};
          syn.owner = c.id;
          co.ops.push_back(std::move(syn));
        }
      }
      co.contribution = c.id + ":I";
      lowered_conn_names_.push_back({c.id, w_id, input, c.post + ":" + post_model.spike_var});
      g_.connections.push_back(std::move(lc));
      conn_ops_.push_back(std::move(co));
    }
  }

  // Route every group's incoming contributions into its input variable. A
  // single contribution is written straight into the input variable.
  void declare_group_inputs() {
    for (const auto& g : flat_.groups) {
      const auto& model = model_of(g);
      const auto in_id = g.id + ":" + model.input_var;
      const auto n = static_cast<std::size_t>(g.num);
      std::vector<ConnOps*> incoming;
      for (auto& co : conn_ops_)
        if (co.spec->post == g.id) incoming.push_back(&co);

      std::vector<OpRecord> ops;
      if (incoming.empty()) {
        declare({in_id, VarKind::constant, {n}, {0.0}, false, g.id});
      } else if (incoming.size() == 1) {
        auto& co = *incoming.front();
        const auto old = co.contribution;
        rename_var(old, in_id);
        for (auto& op : co.ops)
          for (auto& r : op.results)
            if (r == old) r = in_id;
        co.contribution = in_id;
      } else {
        declare({in_id, VarKind::temp, {n}, {0.0}, false, g.id});
        OpRecord sum;
        sum.results = {in_id};
        sum.op = "add_n";
        sum.owner = g.id;
        for (auto* co : incoming) sum.args.push_back(co->contribution);
        ops.push_back(std::move(sum));
      }

      const auto& params = group_params_.at(g.id);
      auto resolve = [&](const std::string& local) -> std::string {
        if (std::find(model.state_vars.begin(), model.state_vars.end(), local) != model.state_vars.end() ||
            local == model.input_var)
          return g.id + ":" + local;
        auto pit = params.find(local);
        if (pit != params.end()) {
          const auto id = g.id + ":" + local;
          if (!declared(id)) declare({id, VarKind::constant, {1}, {pit->second}, false, g.id});
          return id;
        }
        if (local.find(':') != std::string::npos) return local;
        throw Error(ErrorCode::invalid_argument, g.id + ":" + local, "model " + model.name + " has no such variable");
      };
      for (const auto& mop : model.update) {
        OpRecord op;
        op.op = mop.op;
        op.owner = g.id;
        op.attrs = params;
        op.stream = stream_key(flat_.seed, g.id);
        for (const auto& r : mop.results) op.results.push_back(resolve(r));
        for (const auto& a : mop.args) op.args.push_back(resolve(a));
        ops.push_back(std::move(op));
      }
      group_ops_[g.id] = std::move(ops);
    }
  }

  void rename_var(const std::string& from, const std::string& to) {
    auto idx = decl_index_.at(from);
    decl_index_.erase(from);
    decls_[idx].id = to;
    decl_index_[to] = idx;
  }

  void declare_custom() {
    for (const auto& v : flat_.variables)
      declare({v.id, v.state ? VarKind::state : VarKind::constant, v.shape, {v.init}, false, "custom"});
    for (const auto& o : flat_.operations) {
      OpRecord op;
      op.results = {o.result};
      op.op = o.op;
      op.args = o.args;
      op.owner = "custom";
      custom_ops_.push_back(std::move(op));
    }
  }

  void order_schedule() {
    auto& sched = g_.schedule;
    std::vector<std::size_t> conn_order(conn_ops_.size());
    for (std::size_t i = 0; i < conn_ops_.size(); ++i) conn_order[i] = i;

    for (const auto& n : flat_.nodes)
      if (source_ops_.count(n.id)) sched.push_back(source_ops_.at(n.id));

    if (g_.strategy == Strategy::parallel) {
      for (auto& co : conn_ops_)
        for (auto& op : co.ops) sched.push_back(op);
      for (const auto& g : flat_.groups)
        for (auto& op : group_ops_.at(g.id)) sched.push_back(op);
    } else {
      Digraph dg;
      for (const auto& g : flat_.groups) dg.nodes.push_back(g.id);
      for (const auto& co : conn_ops_)
        if (flat_.group(co.spec->pre)) dg.edges.push_back({co.spec->pre, co.spec->post, co.spec->id, false});
      const auto first = toposort(dg);
      const auto broken = break_cycles(dg, first.cycles);
      const auto order = toposort(broken).order;
      std::map<std::string, std::size_t> pos;
      for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
      std::set<std::string> delayed;
      for (const auto& e : broken.edges)
        if (e.delayed) {
          delayed.insert(e.id);
          g_.cycle_breaks.push_back(e.id);
        }
      // Connection ops run in the slot of their post group, except delayed
      // edges, which run in the slot of whichever endpoint comes first so they
      // always observe the previous step's presynaptic output.
      std::map<std::string, std::vector<ConnOps*>> slot;
      for (auto& co : conn_ops_) {
        std::string at = co.spec->post;
        if (delayed.count(co.spec->id) && pos.at(co.spec->pre) < pos.at(co.spec->post)) at = co.spec->pre;
        if (delayed.count(co.spec->id)) {
          for (auto& op : co.ops)
            if (op.op != "delay") op.delay = 1;
        }
        slot[at].push_back(&co);
      }
      for (const auto& gid : order) {
        for (auto* co : slot[gid])
          for (auto& op : co->ops) sched.push_back(op);
        for (auto& op : group_ops_.at(gid)) sched.push_back(op);
      }
    }
    for (auto& op : readout_ops_) sched.push_back(op);
    for (auto& op : custom_ops_) sched.push_back(op);
  }

  void bind_monitors() {
    for (const auto& m : flat_.monitors) {
      LoweredMonitor lm;
      lm.spec = m;
      std::string var;
      if (auto* g = flat_.group(m.target)) {
        const auto& model = model_of(*g);
        var = m.target + ":" + (m.kind == MonitorKind::spike ? model.spike_var : m.var_name);
      } else {
        var = m.target + ":" + (m.kind == MonitorKind::spike ? std::string("O") : m.var_name);
      }
      monitored_.insert(var);
      monitor_vars_.push_back(var);
      g_.monitors.push_back(std::move(lm));
    }
  }

  // Drop temporaries nobody reads (and ops that only produce such temps).
  void eliminate_dead_temps() {
    bool changed = true;
    while (changed) {
      changed = false;
      std::set<std::string> read(monitored_.begin(), monitored_.end());
      for (const auto& op : g_.schedule) read.insert(op.args.begin(), op.args.end());
      std::vector<OpRecord> kept;
      for (auto& op : g_.schedule) {
        bool live = false;
        for (const auto& r : op.results) {
          const auto it = decl_index_.find(r);
          if (it == decl_index_.end() || decls_[it->second].kind != VarKind::temp || read.count(r)) live = true;
        }
        if (live) kept.push_back(std::move(op));
        else changed = true;
      }
      g_.schedule = std::move(kept);
    }
    std::set<std::string> used(monitored_.begin(), monitored_.end());
    for (const auto& op : g_.schedule) {
      used.insert(op.args.begin(), op.args.end());
      used.insert(op.results.begin(), op.results.end());
    }
    std::vector<VariableDecl> keep;
    for (auto& d : decls_)
      if (d.kind != VarKind::temp || used.count(d.id)) keep.push_back(std::move(d));
    decls_ = std::move(keep);
  }

  void finalize() {
    g_.variables = std::move(decls_);
    for (std::size_t i = 0; i < g_.variables.size(); ++i) g_.index[g_.variables[i].id] = static_cast<int>(i);

    for (auto& op : g_.schedule) {
      auto def = opt_.ops->find(op.op);
      if (!def) throw Error(ErrorCode::invalid_argument, op.op, "unknown operation");
      std::vector<Shape> arg_shapes;
      op.arg_ids.clear();
      op.result_ids.clear();
      for (const auto& a : op.args) {
        const int id = g_.var(a);
        if (id < 0) throw Error(ErrorCode::invalid_argument, a, "operand of " + op.op + " is not declared");
        op.arg_ids.push_back(id);
        arg_shapes.push_back(g_.decl(id).shape);
      }
      for (const auto& r : op.results) {
        const int id = g_.var(r);
        if (id < 0) throw Error(ErrorCode::invalid_argument, r, "result of " + op.op + " is not declared");
        op.result_ids.push_back(id);
      }
      const auto shapes = def->shape_rule(arg_shapes, op.attrs);
      if (shapes.size() < op.results.size())
        throw Error(ErrorCode::shape_mismatch, op.results.front(), op.op + " yields fewer results");
      for (std::size_t k = 0; k < op.results.size(); ++k)
        if (numel(shapes[k]) != g_.decl(op.result_ids[k]).size())
          throw Error(ErrorCode::shape_mismatch, op.results[k], "does not match " + op.op + " result shape");
      g_.kernels.push_back(def);
    }

    for (auto& lg : g_.groups)
      for (auto& [local, id] : lg.vars) id = g_.var(lg.id + ":" + local);
    for (auto& lg : g_.groups) {
      const auto& model = model_of(*flat_.group(lg.id));
      lg.spikes = g_.var(lg.id + ":" + model.spike_var);
      lg.input = g_.var(lg.id + ":" + model.input_var);
    }
    for (auto& ln : g_.nodes) {
      ln.output = g_.var(ln.spec.id + ":O");
      ln.input = g_.var(ln.spec.id + ":x");
      ln.count = g_.var(ln.spec.id + ":count");
      ln.first = g_.var(ln.spec.id + ":first");
    }
    for (std::size_t i = 0; i < g_.connections.size(); ++i) {
      auto& lc = g_.connections[i];
      const auto& names = lowered_conn_names_[i];
      lc.weight = g_.var(names.weight);
      lc.input = g_.var(names.input);
      lc.post_spikes = g_.var(names.post_spikes);
      lc.row_ptr = g_.var(lc.id + ":row_ptr");
      lc.post_idx = g_.var(lc.id + ":post_idx");
    }
    for (std::size_t i = 0; i < g_.monitors.size(); ++i) {
      auto& lm = g_.monitors[i];
      lm.var = g_.var(monitor_vars_[i]);
      if (lm.var < 0) throw Error(ErrorCode::invalid_argument, monitor_vars_[i], "monitored variable not found");
      lm.width = g_.decl(lm.var).size();
    }
  }

  struct ConnNames {
    std::string id, weight, input, post_spikes;
  };

  const FlatModel& flat_;
  LowerOptions opt_;
  CompiledGraph g_;
  std::vector<ConnectionSpec> connections_;
  std::vector<VariableDecl> decls_;
  std::map<std::string, std::size_t> decl_index_;
  std::map<std::string, ParamTable> group_params_;
  std::map<std::string, OpRecord> source_ops_;
  std::vector<ConnOps> conn_ops_;
  std::map<std::string, std::vector<OpRecord>> group_ops_;
  std::vector<OpRecord> readout_ops_;
  std::vector<OpRecord> custom_ops_;
  std::vector<ConnNames> lowered_conn_names_;
  std::set<std::string> monitored_;
  std::vector<std::string> monitor_vars_;
};

}  // namespace detail

/// Lower a flat model into the per-step IR.
inline CompiledGraph lower(const FlatModel& flat, Strategy strategy = Strategy::parallel,
                           const LowerOptions& options = {}) {
  return detail::Lowering(flat, strategy, options).run();
}

/// validate + flatten + lower in one call.
inline CompiledGraph compile(const NetworkSpec& spec, Strategy strategy = Strategy::parallel,
                             const LowerOptions& options = {}) {
  return lower(flatten(spec, *options.models), strategy, options);
}

}  // namespace snnforge
