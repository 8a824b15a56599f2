#pragma once

// Independent reference computations shared by the unit and acceptance
// suites. Everything here is deliberately naive: explicit enumeration over
// joint actions, comparators and deviation functions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "ctxgames/core.hpp"
#include "ctxgames/metrics.hpp"
#include "ctxgames/network.hpp"
#include "ctxgames/trace.hpp"

namespace ctxgames::testing {

inline Strategy random_strategy(std::size_t k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(k);
  for (double& v : w) v = u(rng);
  return Strategy(std::move(w));
}

/// Calls fn(joint) for every joint pure action of `agents` players over K actions.
inline void for_each_joint(std::size_t agents, std::size_t k,
                           const std::function<void(const std::vector<ActionIndex>&)>& fn) {
  std::vector<ActionIndex> a(agents, 0);
  while (true) {
    fn(a);
    std::size_t i = agents;
    while (i > 0) {
      --i;
      if (++a[i] < k) break;
      a[i] = 0;
      if (i == 0) return;
    }
    if (agents == 0) return;
  }
}

/// E_{a^{-j} ~ w^{-j}}[phi^j(k, a^{-j})] for every k, as a d x K matrix.
inline CostMatrix brute_force_cost_matrix(const Game& game, AgentIndex j, const JointProfile& profile) {
  const std::size_t d = game.dim();
  const std::size_t k = game.actions();
  CostMatrix phi(d, k);
  for_each_joint(game.agents(), k, [&](const std::vector<ActionIndex>& a) {
    double p = 1.0;
    for (AgentIndex i = 0; i < game.agents(); ++i)
      if (i != j) p *= profile[i][a[i]];
    if (p == 0.0) return;
    const auto v = game.payoff(j, a);
    for (std::size_t l = 0; l < d; ++l) phi(l, a[j]) += p * v[l];
  });
  return phi;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Contextual external regret straight from the definition: incurred cost
/// minus, for each context separately, the best fixed action in hindsight.
inline double naive_external_regret(const Trace& trace, AgentIndex j) {
  const std::size_t m = trace.contexts().size();
  const std::size_t k = trace.actions();
  double incurred = 0.0;
  double best_total = 0.0;
  for (ContextIndex z = 0; z < m; ++z) {
    double best = std::numeric_limits<double>::infinity();
    for (ActionIndex a = 0; a < k; ++a) {
      double s = 0.0;
      for (std::size_t t = 0; t < trace.rounds(); ++t)
        if (trace.realized(t) == z) s += trace.loss(t, j)[a];
      best = std::min(best, s);
    }
    best_total += best;
  }
  for (std::size_t t = 0; t < trace.rounds(); ++t) incurred += trace.cost(t, j);
  return incurred - best_total;
}

/// Contextual swap regret by enumerating every deviation rho: A x Z -> A.
inline double naive_swap_regret(const Trace& trace, AgentIndex j) {
  const std::size_t m = trace.contexts().size();
  const std::size_t k = trace.actions();
  double best = -std::numeric_limits<double>::infinity();
  for_each_joint(k * m, k, [&](const std::vector<ActionIndex>& rho) {
    double gain = 0.0;
    for (std::size_t t = 0; t < trace.rounds(); ++t) {
      const auto w = trace.strategy(t, j);
      const auto l = trace.loss(t, j);
      const ContextIndex z = trace.realized(t);
      for (ActionIndex a = 0; a < k; ++a) gain += w[a] * (l[a] - l[rho[z * k + a]]);
    }
    best = std::max(best, gain);
  });
  return best;
}

/// Every loopless source-target path by depth-first search, using the
/// cheapest of any parallel edges; sorted by (cost, node sequence).
inline std::vector<Path> all_simple_paths(const Graph& g, std::size_t s, std::size_t t) {
  std::vector<Path> out;
  std::vector<char> on(g.nodes(), 0);
  Path cur;
  cur.nodes.push_back(s);
  on[s] = 1;
  std::function<void(std::size_t)> dfs = [&](std::size_t u) {
    if (u == t) {
      Path p = cur;
      p.cost = path_cost(g, p.edges);
      out.push_back(std::move(p));
      return;
    }
    std::vector<std::size_t> best_edge(g.nodes(), g.edge_count());
    for (std::size_t e : g.out_edges(u)) {
      const std::size_t v = g.edge(e).to;
      if (best_edge[v] == g.edge_count() || g.edge(e).cost < g.edge(best_edge[v]).cost)
        best_edge[v] = e;
    }
    for (std::size_t v = 0; v < g.nodes(); ++v) {
      if (best_edge[v] == g.edge_count() || on[v]) continue;
      on[v] = 1;
      cur.nodes.push_back(v);
      cur.edges.push_back(best_edge[v]);
      dfs(v);
      cur.nodes.pop_back();
      cur.edges.pop_back();
      on[v] = 0;
    }
  };
  dfs(s);
  std::sort(out.begin(), out.end(), [](const Path& a, const Path& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.nodes < b.nodes;
  });
  return out;
}

}  // namespace ctxgames::testing
