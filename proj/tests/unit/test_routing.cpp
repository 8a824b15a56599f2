#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ctxgames/routing.hpp"
#include "ctxgames_app/commands.hpp"
#include "oracles.hpp"

using namespace ctxgames;
namespace oracle = ctxgames::testing;

namespace {

bool uses(const Path& p, std::size_t e) {
  return std::find(p.edges.begin(), p.edges.end(), e) != p.edges.end();
}

// phi^j_e(a) from the congestion rule, written out directly.
std::vector<double> rule_payoff(const Graph& g, const std::vector<RoutingAgent>& agents,
                                std::size_t j, const std::vector<ActionIndex>& a, double power) {
  std::vector<double> phi(g.edge_count(), 0.0);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (!uses(agents[j].paths[a[j]], e)) continue;
    for (std::size_t i = 0; i < agents.size(); ++i)
      if (uses(agents[i].paths[a[i]], e)) phi[e] += std::pow(agents[i].quantity, power);
  }
  return phi;
}

CostMatrix rule_cost_matrix(const Graph& g, const std::vector<RoutingAgent>& agents, std::size_t j,
                            const JointProfile& profile, std::size_t k, double power) {
  CostMatrix phi(g.edge_count(), k);
  oracle::for_each_joint(agents.size(), k, [&](const std::vector<ActionIndex>& a) {
    double p = 1.0;
    for (std::size_t i = 0; i < agents.size(); ++i)
      if (i != j) p *= profile[i][a[i]];
    const auto v = rule_payoff(g, agents, j, a, power);
    for (std::size_t e = 0; e < v.size(); ++e) phi(e, a[j]) += p * v[e];
  });
  return phi;
}

// A 4-node diamond with a chord; every pair below has at least 2 paths.
std::shared_ptr<const Graph> diamond() {
  return std::make_shared<const Graph>(
      4, std::vector<Edge>{{0, 1, 1.0}, {0, 2, 2.0}, {1, 3, 2.0}, {2, 3, 1.0}, {1, 2, 0.5}, {2, 1, 0.5}});
}

std::vector<RoutingAgent> diamond_agents(const Graph& g, std::size_t count, std::size_t k,
                                         std::mt19937_64& rng) {
  const std::vector<std::pair<std::size_t, std::size_t>> od{{0, 3}, {0, 3}, {1, 3}, {0, 2}};
  std::uniform_real_distribution<double> q(0.5, 1.5);
  std::vector<RoutingAgent> out;
  for (std::size_t j = 0; j < count; ++j) {
    auto paths = yen_k_shortest(g, od[j].first, od[j].second, k);
    out.push_back({od[j].first, od[j].second, q(rng), paths});
  }
  return out;
}

}  // namespace

TEST(RoutingGame, CostMatrixMatchesEnumeration) {
  std::mt19937_64 rng(12);
  auto g = diamond();
  for (std::size_t count = 1; count <= 4; ++count)
    for (std::size_t k = 1; k <= 2; ++k)
      for (double power : {1.0, 4.0}) {
        auto agents = diamond_agents(*g, count, k, rng);
        RoutingGame game(g, agents, k, 1.0, power);
        std::vector<Strategy> ws;
        for (std::size_t j = 0; j < count; ++j) ws.push_back(oracle::random_strategy(k, rng));
        JointProfile profile(ws);
        const auto all = game.cost_matrices(profile);
        for (std::size_t j = 0; j < count; ++j) {
          const auto expect = rule_cost_matrix(*g, agents, j, profile, k, power);
          EXPECT_LE(oracle::max_abs_diff(cost_matrix(game, j, profile).data(), expect.data()), 1e-12);
          EXPECT_LE(oracle::max_abs_diff(all[j].data(), expect.data()), 1e-12);
          EXPECT_LE(oracle::max_abs_diff(oracle::brute_force_cost_matrix(game, j, profile).data(),
                                         expect.data()),
                    1e-12);
        }
      }
}

TEST(RoutingGame, DisjointPathsHaveNoInteraction) {
  auto g = std::make_shared<const Graph>(
      4, std::vector<Edge>{{0, 1, 1.0}, {2, 3, 1.0}});
  std::vector<RoutingAgent> agents{{0, 1, 2.0, yen_k_shortest(*g, 0, 1, 1)},
                                   {2, 3, 3.0, yen_k_shortest(*g, 2, 3, 1)}};
  RoutingGame game(g, agents, 1, 1.0, 4.0);
  JointProfile p({Strategy::uniform(1), Strategy::uniform(1)});
  const auto phi = cost_matrix(game, 0, p);
  EXPECT_DOUBLE_EQ(phi(0, 0), 16.0);
  EXPECT_DOUBLE_EQ(phi(1, 0), 0.0);
}

TEST(RoutingGame, SharedEdgeAddsOpponentWeight) {
  auto g = std::make_shared<const Graph>(3, std::vector<Edge>{{0, 1, 1.0}, {1, 2, 1.0}});
  std::vector<RoutingAgent> agents{{0, 2, 1.0, yen_k_shortest(*g, 0, 2, 1)},
                                   {1, 2, 2.0, yen_k_shortest(*g, 1, 2, 1)}};
  RoutingGame game(g, agents, 1, 1.0, 2.0);
  JointProfile p({Strategy::uniform(1), Strategy::uniform(1)});
  const auto phi = cost_matrix(game, 0, p);
  EXPECT_DOUBLE_EQ(phi(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(phi(1, 0), 5.0);
  const auto loads = game.expected_loads(p);
  EXPECT_DOUBLE_EQ(loads[1], 5.0);
}

TEST(RoutingGame, PayoffBoundIsExactMaximum) {
  std::mt19937_64 rng(3);
  auto g = diamond();
  for (std::size_t count = 2; count <= 4; ++count) {
    auto agents = diamond_agents(*g, count, 2, rng);
    RoutingGame game(g, agents, 2, 1.0, 4.0);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    std::vector<std::vector<double>> zs(3, std::vector<double>(g->edge_count()));
    for (auto& z : zs)
      for (double& v : z) v = u(rng);
    ContextSpace cs(zs);
    double best = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      double agent_best = 0.0;
      oracle::for_each_joint(count, 2, [&](const std::vector<ActionIndex>& a) {
        const auto v = rule_payoff(*g, agents, j, a, 4.0);
        for (std::size_t z = 0; z < cs.size(); ++z) agent_best = std::max(agent_best, std::abs(dot(v, cs[z])));
      });
      EXPECT_LE(agent_best, game.agent_payoff_bound(j, cs) + 1e-12);
      best = std::max(best, agent_best);
    }
    // with nonnegative contexts the separable bound is attained
    std::vector<std::vector<double>> pos(2, std::vector<double>(g->edge_count()));
    for (auto& z : pos)
      for (double& v : z) v = std::abs(u(rng)) + 0.1;
    ContextSpace cpos(pos);
    double exact = 0.0;
    for (std::size_t j = 0; j < count; ++j)
      oracle::for_each_joint(count, 2, [&](const std::vector<ActionIndex>& a) {
        const auto v = rule_payoff(*g, agents, j, a, 4.0);
        for (std::size_t z = 0; z < cpos.size(); ++z) exact = std::max(exact, dot(v, cpos[z]));
      });
    EXPECT_NEAR(game.payoff_bound(cpos), exact, 1e-12 * exact);
  }
}

TEST(RoutingBuild, ZeroNoiseAndNormalization) {
  auto g = diamond();
  RoutingConfig cfg;
  cfg.paths = 2;
  cfg.contexts = 3;
  cfg.noise_scale = 0.0;
  cfg.filter_threshold = std::numeric_limits<double>::infinity();
  Rng rng(1);
  const auto build = build_routing_game(g, {{0, 3, 2.0}, {1, 3, 1.0}, {3, 0, 1.0}}, cfg, rng);
  EXPECT_EQ(build.candidates, 3u);
  EXPECT_EQ(build.unreachable, 1u);
  EXPECT_EQ(build.game->agents(), 2u);
  EXPECT_EQ(build.contexts->size(), 3u);
  for (std::size_t e = 0; e < g->edge_count(); ++e) EXPECT_EQ((*build.contexts)[2][e], g->edge(e).cost);
  EXPECT_NEAR(build.game->payoff_bound(*build.contexts), 1.0, 1e-12);
  EXPECT_LT(build.game->normalization_factor(), 1.0);
}

TEST(RoutingBuild, FilterBySpread) {
  auto g = diamond();
  RoutingConfig cfg;
  cfg.paths = 2;
  cfg.contexts = 1;
  cfg.filter_threshold = 0.0;
  Rng rng(1);
  // 0->3 has paths of cost 2.5 and 3 (spread 0.5); 1->3 has 1.5 and 2 (spread 0.5)
  EXPECT_THROW(build_routing_game(g, {{0, 3, 1.0}, {1, 3, 1.0}}, cfg, rng), Error);
  cfg.filter_threshold = 0.5;
  const auto build = build_routing_game(g, {{0, 3, 1.0}, {1, 3, 1.0}}, cfg, rng);
  EXPECT_EQ(build.filtered, 0u);
  cfg.filter_measure = FilterMeasure::Hops;
  cfg.filter_threshold = 1.0;
  const auto hops = build_routing_game(g, {{0, 3, 1.0}, {1, 3, 1.0}}, cfg, rng);
  EXPECT_EQ(hops.game->agents(), 2u);
}

TEST(RoutingBuild, SiouxFallsAllPairs) {
  const std::string dir = std::string(CTXGAMES_SOURCE_DIR) + "/data/sioux_falls/";
  const auto net = parse_tntp(app::read_file(dir + "SiouxFalls_net.tntp"));
  auto graph = std::make_shared<const Graph>(net.graph());
  const auto q = parse_quantities(app::read_file(dir + "quantities_all_pairs.txt"), net.nodes);
  RoutingConfig cfg;
  cfg.filter_threshold = std::numeric_limits<double>::infinity();
  Rng rng(0);
  const auto build = build_routing_game(graph, q, cfg, rng);
  EXPECT_EQ(build.game->agents(), 552u);
  EXPECT_EQ(build.game->actions(), 5u);
  EXPECT_EQ(build.contexts->dim(), 76u);
}

TEST(RoutingBuild, BprCoefficients) {
  const auto net = parse_tntp(
      "<NUMBER OF NODES> 2\n<NUMBER OF LINKS> 1\n<END OF METADATA>\n"
      "1 2 10 1 3 0.15 4 0 0 1 ;\n");
  const auto c = bpr_coefficients(net);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_DOUBLE_EQ(c[0], 0.15 * 3.0 / 1e4);
}
