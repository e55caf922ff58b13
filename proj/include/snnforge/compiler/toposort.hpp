#pragma once

// Component dependency graph: topological ordering with deterministic
// tie-breaking, strongly connected component detection and cycle breaking by
// delaying one edge per cycle.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace snnforge {

struct DigraphEdge {
  std::string from;
  std::string to;
  std::string id;
  bool delayed = false;  // reads the previous step; not a same-step dependency

  bool operator==(const DigraphEdge&) const = default;
};

struct Digraph {
  std::vector<std::string> nodes;
  std::vector<DigraphEdge> edges;

  bool operator==(const Digraph&) const = default;
};

struct TopoResult {
  std::vector<std::string> order;
  std::vector<std::vector<std::string>> cycles;
};

namespace detail {

struct Tarjan {
  const std::vector<std::vector<int>>& adj;
  std::vector<int> index, low, stack;
  std::vector<bool> on_stack;
  std::vector<int> comp;
  int counter = 0, ncomp = 0;

  explicit Tarjan(const std::vector<std::vector<int>>& a)
      : adj(a), index(a.size(), -1), low(a.size(), 0), on_stack(a.size(), false), comp(a.size(), -1) {
    for (int v = 0; v < static_cast<int>(a.size()); ++v)
      if (index[v] < 0) visit(v);
  }

  void visit(int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w : adj[v]) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = ncomp;
      } while (w != v);
      ++ncomp;
    }
  }
};

}  // namespace detail

/// Kahn's algorithm over the condensation, smallest-name-first among ready
/// components; members of a strongly connected component are emitted together
/// in name order. Delayed edges are ignored.
inline TopoResult toposort(const Digraph& g) {
  std::vector<std::string> names = g.nodes;
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  std::map<std::string, int> idx;
  for (int i = 0; i < static_cast<int>(names.size()); ++i) idx[names[i]] = i;
  for (const auto& e : g.edges)
    for (const auto* n : {&e.from, &e.to})
      if (!idx.count(*n)) {
        idx[*n] = static_cast<int>(names.size());
        names.push_back(*n);
      }

  const int n = static_cast<int>(names.size());
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  std::vector<bool> self_loop(static_cast<std::size_t>(n), false);
  for (const auto& e : g.edges) {
    if (e.delayed) continue;
    const int a = idx[e.from], b = idx[e.to];
    adj[a].push_back(b);
    if (a == b) self_loop[a] = true;
  }
  for (auto& v : adj) std::sort(v.begin(), v.end());

  detail::Tarjan t(adj);
  const int nc = t.ncomp;
  std::vector<std::vector<std::string>> members(static_cast<std::size_t>(nc));
  for (int v = 0; v < n; ++v) members[t.comp[v]].push_back(names[v]);
  for (auto& m : members) std::sort(m.begin(), m.end());

  std::vector<std::set<int>> cadj(static_cast<std::size_t>(nc));
  std::vector<int> indeg(static_cast<std::size_t>(nc), 0);
  for (int v = 0; v < n; ++v)
    for (int w : adj[v]) {
      const int a = t.comp[v], b = t.comp[w];
      if (a != b && cadj[a].insert(b).second) ++indeg[b];
    }

  using Ready = std::pair<std::string, int>;
  std::set<Ready> ready;
  for (int c = 0; c < nc; ++c)
    if (indeg[c] == 0) ready.emplace(members[c].front(), c);

  TopoResult out;
  while (!ready.empty()) {
    const int c = ready.begin()->second;
    ready.erase(ready.begin());
    out.order.insert(out.order.end(), members[c].begin(), members[c].end());
    const bool cyclic = members[c].size() >= 2 || self_loop[idx[members[c].front()]];
    if (cyclic) out.cycles.push_back(members[c]);
    for (int d : cadj[c])
      if (--indeg[d] == 0) ready.emplace(members[d].front(), d);
  }
  return out;
}

/// Convert edges to one-step-delay edges until the same-step graph is
/// acyclic. In every round, each remaining cycle (strongly connected
/// component) gets exactly one edge delayed: the one whose (source, target,
/// id) triple is lexicographically greatest.
inline Digraph break_cycles(Digraph g, std::vector<std::vector<std::string>> cycles) {
  while (!cycles.empty()) {
    for (const auto& cyc : cycles) {
      const std::set<std::string> members(cyc.begin(), cyc.end());
      DigraphEdge* pick = nullptr;
      for (auto& e : g.edges) {
        if (e.delayed || !members.count(e.from) || !members.count(e.to)) continue;
        if (!pick || std::tie(e.from, e.to, e.id) > std::tie(pick->from, pick->to, pick->id)) pick = &e;
      }
      if (pick) pick->delayed = true;
    }
    cycles = toposort(g).cycles;
  }
  return g;
}

}  // namespace snnforge
