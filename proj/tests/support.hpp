#pragma once

// Helpers shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "snnforge/snnforge.hpp"

namespace testsupport {

using namespace snnforge;

// One-neuron LIF relay: V <- I each step, spikes when I >= 1.
inline GroupSpec relay(const std::string& id, int num = 1) {
  GroupSpec g;
  g.id = id;
  g.num = num;
  g.params = {{"tau_m", 1.0}, {"V_th", 1.0}, {"R", 1.0}};
  return g;
}

inline ConnectionSpec hop(const std::string& pre, const std::string& post, double w = 2.0) {
  ConnectionSpec c;
  c.id = pre + "_" + post;
  c.pre = pre;
  c.post = post;
  c.link_type = LinkType::one_to_one;
  c.weight_init = InitRule::constant(w);
  return c;
}

// in -> g1 -> ... -> gL, each hop one_to_one with weight 2, spike monitors on
// every layer. `first_delay_ms` delays the in -> g1 hop.
inline NetworkSpec relay_chain(int layers, double first_delay_ms = 0.0) {
  NetworkSpec s;
  s.name = "chain";
  s.dt = 1.0;
  s.nodes.push_back({"in", NodeKind::encoder, "poisson_encode", 1, "", "O", {{"rate_max", 1000.0}}});
  std::string prev = "in";
  for (int l = 1; l <= layers; ++l) {
    const auto id = "g" + std::to_string(l);
    s.groups.push_back(relay(id));
    s.connections.push_back(hop(prev, id));
    s.monitors.push_back({id + "_spikes", id, MonitorKind::spike, ""});
    prev = id;
  }
  s.connections[0].delay_ms = first_delay_ms;
  return s;
}

// Drive `in` with a single impulse at step 0 and return the first spike step
// of each monitored layer (-1 when silent).
inline std::vector<long long> impulse_response(const CompiledGraph& g, long long steps) {
  auto s = SimState::create(g);
  Recorder rec(g);
  const std::vector<double> one{1.0}, zero{0.0};
  for (long long k = 0; k < steps; ++k) {
    s.set_input(g, "in:x", k == 0 ? one : zero);
    step(g, s, &rec);
  }
  std::vector<long long> first;
  for (const auto& r : rec.spikes()) first.push_back(r.events.empty() ? -1 : r.events.front().step);
  return first;
}

inline Digraph random_digraph(std::mt19937_64& rng, int max_nodes = 50) {
  std::uniform_int_distribution<int> nd(1, max_nodes);
  const int n = nd(rng);
  Digraph g;
  for (int i = 0; i < n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "n%02d", i);
    g.nodes.push_back(buf);
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double density = u(rng) * 3.0 / n;
  int e = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (u(rng) < density) g.edges.push_back({g.nodes[a], g.nodes[b], "e" + std::to_string(e++), false});
  return g;
}

// Nodes lying on some directed cycle of the non-delayed edges, by reachability
// search from every node.
inline std::set<std::string> nodes_on_cycles(const Digraph& g) {
  std::set<std::string> out;
  for (const auto& start : g.nodes) {
    std::set<std::string> seen;
    std::vector<std::string> stack{start};
    bool back = false;
    while (!stack.empty() && !back) {
      const auto x = stack.back();
      stack.pop_back();
      for (const auto& e : g.edges) {
        if (e.delayed || e.from != x) continue;
        if (e.to == start) back = true;
        if (seen.insert(e.to).second) stack.push_back(e.to);
      }
    }
    if (back) out.insert(start);
  }
  return out;
}

// ---- independent scalar oracles

struct LifRef {
  double tau_m = 20.0, V_rest = 0.0, V_reset = 0.0, V_th = 1.0, R = 1.0;
  long refrac_steps = 0;
};

// inputs[t][i] -> spikes[t][i]
inline std::vector<std::vector<int>> lif_reference(const std::vector<std::vector<double>>& inputs, const LifRef& p,
                                                   double dt) {
  const std::size_t n = inputs.empty() ? 0 : inputs[0].size();
  std::vector<double> V(n, p.V_rest);
  std::vector<long> ref(n, 0);
  std::vector<std::vector<int>> out;
  for (const auto& I : inputs) {
    std::vector<int> o(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (ref[i] > 0) {
        V[i] = p.V_reset;
        --ref[i];
        continue;
      }
      const double vc = V[i] + (dt / p.tau_m) * (-(V[i] - p.V_rest) + p.R * I[i]);
      if (vc >= p.V_th) {
        o[i] = 1;
        V[i] = p.V_reset;
        ref[i] = p.refrac_steps;
      } else {
        V[i] = vc;
      }
    }
    out.push_back(o);
  }
  return out;
}

struct IzhRef {
  double a = 0.02, b = 0.2, c = -65.0, d = 8.0;
};

inline std::vector<std::vector<int>> izh_reference(const std::vector<std::vector<double>>& inputs, const IzhRef& p,
                                                   double dt) {
  const std::size_t n = inputs.empty() ? 0 : inputs[0].size();
  std::vector<double> v(n, p.c), u(n, p.b * p.c);
  std::vector<std::vector<int>> out;
  for (const auto& I : inputs) {
    std::vector<int> o(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      double vn = v[i] + dt * (0.04 * v[i] * v[i] + 5.0 * v[i] + 140.0 - u[i] + I[i]);
      double un = u[i] + dt * p.a * (p.b * v[i] - u[i]);
      if (vn >= 30.0) {
        o[i] = 1;
        vn = p.c;
        un += p.d;
      }
      v[i] = vn;
      u[i] = un;
    }
    out.push_back(o);
  }
  return out;
}

// dense[i][j] with i = pre, j = post
inline std::vector<double> dense_oracle(const std::vector<std::vector<double>>& dense, const std::vector<double>& s) {
  const std::size_t n_post = dense.empty() ? 0 : dense[0].size();
  std::vector<double> out(n_post, 0.0);
  for (std::size_t j = 0; j < n_post; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dense.size(); ++i) acc += dense[i][j] * s[i];
    out[j] = acc;
  }
  return out;
}

// in[c][y][x], k[co][ci][ky][kx] flattened row-major
inline std::vector<double> conv_oracle(const std::vector<double>& k, const std::vector<double>& in, int cin, int h,
                                       int w, int cout, int ks, int stride, int pad) {
  const int oh = (h + 2 * pad - ks) / stride + 1, ow = (w + 2 * pad - ks) / stride + 1;
  std::vector<double> out(static_cast<std::size_t>(cout * oh * ow), 0.0);
  for (int co = 0; co < cout; ++co)
    for (int y = 0; y < oh; ++y)
      for (int x = 0; x < ow; ++x) {
        double acc = 0.0;
        for (int ci = 0; ci < cin; ++ci)
          for (int ky = 0; ky < ks; ++ky)
            for (int kx = 0; kx < ks; ++kx) {
              const int iy = y * stride + ky - pad, ix = x * stride + kx - pad;
              if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
              acc += k[static_cast<std::size_t>(((co * cin + ci) * ks + ky) * ks + kx)] *
                     in[static_cast<std::size_t>((ci * h + iy) * w + ix)];
            }
        out[static_cast<std::size_t>((co * oh + y) * ow + x)] = acc;
      }
  return out;
}

struct Csr {
  std::vector<double> row_ptr, post_idx, w;
};

inline Csr random_csr(std::mt19937_64& rng, std::size_t n_pre, std::size_t n_post, double p,
                      std::vector<std::vector<double>>& dense) {
  std::uniform_real_distribution<double> u(0.0, 1.0), wd(-1.0, 1.0);
  Csr c;
  dense.assign(n_pre, std::vector<double>(n_post, 0.0));
  c.row_ptr.push_back(0);
  for (std::size_t i = 0; i < n_pre; ++i) {
    for (std::size_t j = 0; j < n_post; ++j)
      if (u(rng) < p) {
        const double x = wd(rng);
        c.post_idx.push_back(static_cast<double>(j));
        c.w.push_back(x);
        dense[i][j] = x;
      }
    c.row_ptr.push_back(static_cast<double>(c.w.size()));
  }
  return c;
}

// Poisson drive -> one group with random explicit weights; returns the input
// current seen by row 0 at every step and the spike raster.
struct DrivenRun {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<int>> spikes;
};

inline NetworkSpec driven_spec(const std::string& model, ParamTable params, int n, int m, double rate, double w_max,
                        double dt, std::uint64_t seed) {
  NetworkSpec s;
  s.name = "driven";
  s.dt = dt;
  s.seed = seed;
  s.nodes.push_back({"drive", NodeKind::generator, "poisson_generate", m, "", "O", {{"rate", rate}}});
  GroupSpec g;
  g.id = "n";
  g.num = n;
  g.model = model;
  g.params = std::move(params);
  s.groups.push_back(g);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, w_max);
  std::vector<std::vector<double>> w(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(m)));
  for (auto& row : w)
    for (auto& x : row) x = u(rng);
  ConnectionSpec c;
  c.id = "drive_n";
  c.pre = "drive";
  c.post = "n";
  c.weight_init = InitRule::explicit_matrix(w);
  s.connections.push_back(c);
  s.monitors.push_back({"spk", "n", MonitorKind::spike, ""});
  s.monitors.push_back({"cur", "n", MonitorKind::state, "I"});
  return s;
}

inline DrivenRun run_driven(const NetworkSpec& spec, int steps) {
  const auto g = compile(spec);
  auto s = SimState::create(g);
  Recorder rec(g);
  for (int k = 0; k < steps; ++k) step(g, s, &rec);
  DrivenRun r;
  const auto* cur = rec.state("cur");
  const auto* spk = rec.spike("spk");
  const std::size_t n = cur->width;
  r.inputs = cur->rows;
  r.spikes.assign(static_cast<std::size_t>(steps), std::vector<int>(n, 0));
  for (const auto& e : spk->events) r.spikes[static_cast<std::size_t>(e.step)][e.neuron] = 1;
  return r;
}

inline long long count(const std::vector<std::vector<int>>& r) {
  long long c = 0;
  for (const auto& row : r)
    for (int x : row) c += x;
  return c;
}

// One synapse, one pre and one post spike at the given ticks; returns the final weight.
inline double pair_once(long long tp, long long tq, long long ticks, const StdpParams& p, double w0 = 0.5) {
  std::vector<double> W{w0};
  auto t = TraceState::create(SynapseLayout::dense(1, 1));
  for (long long k = 0; k < ticks; ++k) {
    const std::vector<double> pre{k == tp ? 1.0 : 0.0}, post{k == tq ? 1.0 : 0.0};
    stdp_step(W, pre, post, t, p, 1.0);
  }
  return W[0];
}

// Spike CSVs of every monitor after running `ms` from `s`.
inline std::string rasters(const CompiledGraph& g, SimState& s, double ms) {
  Recorder rec(g);
  run(g, s, ms, &rec);
  std::string out;
  for (const auto& r : rec.spikes()) out += r.monitor + "\n" + spike_csv(r, g.dt);
  for (const auto& r : rec.states()) out += r.monitor + "\n" + state_csv(r, g.dt);
  return out;
}

// ------------------------------------------------------------ gradient check

// enc(3) -> hid(2) -> out(2), both projections trainable. `recurrent` adds a
// delayed hid -> hid projection (14 parameters in total).
inline NetworkSpec grad_net(bool recurrent, std::uint64_t seed = 3) {
  NetworkSpec s;
  s.name = "gradnet";
  s.dt = 1.0;
  s.seed = seed;
  s.nodes.push_back({"enc", NodeKind::encoder, "poisson_encode", 3, "", "O", {{"rate_max", 1000.0}}});
  for (const char* id : {"hid", "out"}) {
    GroupSpec g;
    g.id = id;
    g.num = 2;
    g.params = {{"tau_m", 4.0}, {"V_th", 1.0}, {"R", 1.0}};
    s.groups.push_back(g);
  }
  auto conn = [](std::string id, std::string pre, std::string post, double lo, double hi) {
    ConnectionSpec c;
    c.id = std::move(id);
    c.pre = std::move(pre);
    c.post = std::move(post);
    c.weight_init = InitRule::uniform(lo, hi);
    c.trainable = true;
    return c;
  };
  s.connections.push_back(conn("enc_hid", "enc", "hid", 0.5, 2.5));
  s.connections.push_back(conn("hid_out", "hid", "out", 0.5, 2.5));
  if (recurrent) {
    s.connections.push_back(conn("hid_hid", "hid", "hid", -1.0, 1.0));
    s.connections.back().delay_ms = 2.0;
  }
  LearnerConfig l;
  l.algorithm = "surrogate_bptt";
  l.trainable = {"enc_hid", "hid_out"};
  if (recurrent) l.trainable.push_back("hid_hid");
  l.output = "out";
  s.learner = l;
  return s;
}

struct GradCheck {
  std::vector<double> analytic, numeric;
  // |a - n| / max(|a|, |n|, floor); the floor keeps coordinates whose true
  // gradient is ~0 from reporting noise as relative error.
  std::vector<double> rel_errors(double floor = 1e-6) const {
    std::vector<double> e;
    for (std::size_t i = 0; i < analytic.size(); ++i)
      e.push_back(std::abs(analytic[i] - numeric[i]) /
                  std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor}));
    return e;
  }
  double max_rel() const {
    double m = 0.0;
    for (double x : rel_errors()) m = std::max(m, x);
    return m;
  }
};

// Soft-mode BPTT gradient against central differences of the soft forward.
inline GradCheck gradient_check(const CompiledGraph& g, const BpttBatch& batch, double h = 1e-4) {
  const auto [surrogate, loss] = resolve_gradient_setup(*g.learner);
  const auto fresh = [&] {
    auto s = SimState::create(g, batch.labels.size());
    s.spikes.soft = true;
    return s;
  };
  auto s = fresh();
  const auto base = s;
  const auto r = bptt_train_step(g, s, batch, loss, surrogate);
  GradCheck out;
  for (const auto* c : trainable_connections(g)) {
    const auto& an = r.grads.at(c->id);
    const auto w = static_cast<std::size_t>(c->weight);
    for (std::size_t i = 0; i < an.size(); ++i) {
      auto eval = [&](double delta) {
        auto t = fresh();
        copy_parameters(g, base, t);
        t.values[w][i] += delta;
        return evaluate_batch(g, t, batch, loss).loss;
      };
      out.analytic.push_back(an[i]);
      out.numeric.push_back((eval(h) - eval(-h)) / (2.0 * h));
    }
  }
  return out;
}

inline BpttBatch grad_batch(long long steps = 8) {
  BpttBatch b;
  b.inputs = {{"enc:x", {0.9, 0.5, 0.3, 0.2, 0.7, 0.95}}};
  b.labels = {0, 1};
  b.steps = steps;
  return b;
}

// ---------------------------------------------------------- example networks

struct PopulationActivity {
  std::string monitor;
  double rate_hz = 0.0;
  double cv = 0.0;  // mean ISI CV over neurons with at least three spikes
  std::size_t cv_neurons = 0;
};

inline std::vector<PopulationActivity> population_activity(const Recorder& rec, double dt, double duration_ms) {
  std::vector<PopulationActivity> out;
  for (const auto& r : rec.spikes()) {
    std::vector<std::vector<double>> times(r.width);
    for (const auto& e : r.events) times[e.neuron].push_back(static_cast<double>(e.step) * dt);
    PopulationActivity a;
    a.monitor = r.monitor;
    a.rate_hz = static_cast<double>(r.events.size()) / static_cast<double>(r.width) / (duration_ms / 1000.0);
    double cv_sum = 0.0;
    for (const auto& t : times) {
      if (t.size() < 3) continue;
      double mean = 0.0, var = 0.0;
      for (std::size_t k = 1; k < t.size(); ++k) mean += t[k] - t[k - 1];
      mean /= static_cast<double>(t.size() - 1);
      for (std::size_t k = 1; k < t.size(); ++k) var += (t[k] - t[k - 1] - mean) * (t[k] - t[k - 1] - mean);
      var /= static_cast<double>(t.size() - 1);
      cv_sum += std::sqrt(var) / mean;
      ++a.cv_neurons;
    }
    a.cv = a.cv_neurons ? cv_sum / static_cast<double>(a.cv_neurons) : 0.0;
    out.push_back(a);
  }
  return out;
}

struct Thermotaxis {
  long long overlap_steps = 0;  // steps where both motor neurons are bursting
  std::string sequence;         // bursting motor neuron over time, repeats collapsed
  long long cw_spikes = 0, acw_spikes = 0;
};

// Temperature ramps 0.2 -> 0.8 -> 0.2 (setpoint 0.5) over `ms`. A motor
// neuron is bursting while it has fired within the last `window_ms`.
inline Thermotaxis thermotaxis(const CompiledGraph& g, double ms = 3000.0, double window_ms = 20.0) {
  auto s = SimState::create(g);
  Recorder rec(g);
  const long long steps = to_steps(ms, g.dt), window = to_steps(window_ms, g.dt);
  const std::size_t width = g.decl(g.var("temp:x")).size();
  for (long long k = 0; k < steps; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(steps);
    const double x = u < 0.5 ? 0.2 + 1.2 * u : 0.8 - 1.2 * (u - 0.5);
    s.set_input(g, "temp:x", std::vector<double>(width, x));
    step(g, s, &rec);
  }
  std::vector<char> cw(static_cast<std::size_t>(steps)), acw(static_cast<std::size_t>(steps));
  for (const auto& e : rec.spike("CW_spikes")->events) cw[static_cast<std::size_t>(e.step)] = 1;
  for (const auto& e : rec.spike("ACW_spikes")->events) acw[static_cast<std::size_t>(e.step)] = 1;
  Thermotaxis t;
  t.cw_spikes = static_cast<long long>(rec.spike("CW_spikes")->events.size());
  t.acw_spikes = static_cast<long long>(rec.spike("ACW_spikes")->events.size());
  long long last_cw = -window, last_acw = -window;
  for (long long k = 0; k < steps; ++k) {
    if (cw[static_cast<std::size_t>(k)]) last_cw = k;
    if (acw[static_cast<std::size_t>(k)]) last_acw = k;
    const bool b_cw = k - last_cw < window, b_acw = k - last_acw < window;
    t.overlap_steps += b_cw && b_acw;
    const char c = b_cw ? 'C' : b_acw ? 'A' : 0;
    if (c && (t.sequence.empty() || t.sequence.back() != c)) t.sequence += c;
  }
  return t;
}

}  // namespace testsupport
