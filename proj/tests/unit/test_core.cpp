#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "ctxgames/core.hpp"
#include "ctxgames/format.hpp"
#include "ctxgames/games.hpp"
#include "ctxgames/rng.hpp"
#include "oracles.hpp"

using namespace ctxgames;
using ctxgames::testing::brute_force_cost_matrix;
using ctxgames::testing::for_each_joint;
using ctxgames::testing::random_strategy;

TEST(Strategy, RenormalizesAndRejectsBadWeights) {
  Strategy s({1.0, 3.0});
  EXPECT_DOUBLE_EQ(s[0], 0.25);
  EXPECT_DOUBLE_EQ(s[1], 0.75);
  EXPECT_THROW(Strategy(std::vector<double>{}), DimensionError);
  EXPECT_THROW(Strategy({0.0, 0.0}), Error);
  EXPECT_THROW(Strategy({-0.1, 1.0}), Error);
  EXPECT_THROW(Strategy({NAN, 1.0}), Error);
  EXPECT_THROW(Strategy::pure(2, 2), DimensionError);
  const auto p = Strategy::pure(3, 1);
  EXPECT_EQ(p[1], 1.0);
  EXPECT_EQ(p[0] + p[2], 0.0);
}

TEST(ContextSpace, ValidatesShapeAndDuplicates) {
  EXPECT_THROW(ContextSpace(std::vector<std::vector<double>>{}), DimensionError);
  EXPECT_THROW(ContextSpace({{1.0, 2.0}, {1.0}}), DimensionError);
  EXPECT_THROW(ContextSpace(std::vector<std::vector<double>>{{1.0}, {1.0}}), Error);
  EXPECT_NO_THROW(ContextSpace({{1.0}, {1.0}}, {}, ContextSpace::AllowDuplicates{}));
  ContextSpace cs({{1.0, 0.0}, {0.0, 1.0}});
  EXPECT_EQ(cs.size(), 2u);
  EXPECT_EQ(cs.dim(), 2u);
  EXPECT_THROW(cs.check_index(2), DimensionError);
}

TEST(TabularGame, JointIndexRoundTrip) {
  TabularGame g(3, 3, 1, std::vector<double>(3 * 27, 0.0));
  std::vector<ActionIndex> back(3);
  std::size_t expected = 0;
  for_each_joint(3, 3, [&](const std::vector<ActionIndex>& a) {
    // agent 0 most significant, so enumeration order equals index order
    EXPECT_EQ(g.joint_index(a), expected);
    g.decode(expected, back);
    EXPECT_EQ(back, a);
    ++expected;
  });
  EXPECT_EQ(expected, 27u);
}

TEST(TabularGame, CostMatrixMatchesEnumeration) {
  std::mt19937_64 rng(11);
  for (std::size_t agents = 1; agents <= 4; ++agents) {
    for (std::size_t k = 1; k <= 3; ++k) {
      for (std::size_t d = 1; d <= 3; ++d) {
        Rng grng(rng());
        auto rg = random_tabular_game(agents, k, d, 2, grng);
        std::vector<Strategy> ws;
        for (std::size_t j = 0; j < agents; ++j) ws.push_back(random_strategy(k, rng));
        JointProfile profile(ws);
        for (AgentIndex j = 0; j < agents; ++j) {
          const auto fast = cost_matrix(rg.game, j, profile);
          const auto slow = brute_force_cost_matrix(rg.game, j, profile);
          EXPECT_LE(ctxgames::testing::max_abs_diff(fast.data(), slow.data()), 1e-12)
              << "J=" << agents << " K=" << k << " d=" << d << " j=" << j;
        }
      }
    }
  }
}

TEST(TabularGame, CostMatrixIgnoresOwnStrategy) {
  Rng grng(3);
  auto rg = random_tabular_game(3, 2, 2, 2, grng);
  JointProfile a({Strategy({1.0, 0.0}), Strategy({0.3, 0.7}), Strategy({0.5, 0.5})});
  JointProfile b({Strategy({0.0, 1.0}), Strategy({0.3, 0.7}), Strategy({0.5, 0.5})});
  EXPECT_EQ(cost_matrix(rg.game, 0, a), cost_matrix(rg.game, 0, b));
}

TEST(TabularGame, CheckedCostMatrixRejectsBadShapes) {
  TabularGame g(2, 2, 1, std::vector<double>(8, 1.0));
  JointProfile wrong_agents({Strategy::uniform(2)});
  JointProfile wrong_actions({Strategy::uniform(3), Strategy::uniform(3)});
  EXPECT_THROW(cost_matrix(g, 0, wrong_agents), DimensionError);
  EXPECT_THROW(cost_matrix(g, 0, wrong_actions), DimensionError);
  EXPECT_THROW(cost_matrix(g, 2, JointProfile({Strategy::uniform(2), Strategy::uniform(2)})),
               DimensionError);
  EXPECT_THROW(TabularGame(2, 2, 1, std::vector<double>(7, 1.0)), DimensionError);
  EXPECT_THROW(checked_joint_actions(30, 10, TabularGame::kMaxJointActions), GuardError);
}

TEST(TabularGame, ExpectedCostIsBilinear) {
  Rng grng(5);
  auto rg = random_tabular_game(2, 3, 2, 2, grng);
  std::mt19937_64 rng(2);
  JointProfile profile({random_strategy(3, rng), random_strategy(3, rng)});
  const auto phi = cost_matrix(rg.game, 0, profile);
  const auto z = (*rg.contexts)[1];
  double direct = 0.0;
  for_each_joint(2, 3, [&](const std::vector<ActionIndex>& a) {
    direct += profile[0][a[0]] * profile[1][a[1]] * dot(rg.game.payoff(0, a), z);
  });
  EXPECT_NEAR(expected_cost(phi, profile[0], z), direct, 1e-14);
}

TEST(Normalization, BoundsEveryBilinearPayoff) {
  TabularGame g(2, 2, 2, {4, 0, 1, 1, 2, 2, 0, 3, 1, 1, 1, 1, 1, 1, 1, 1});
  ContextSpace cs({{1.0, 1.0}, {0.5, -2.0}});
  const double before = max_bilinear_payoff(g, cs);
  EXPECT_DOUBLE_EQ(before, 6.0);  // agent 0, joint action 3, second context
  auto n = validate_and_normalize(g, cs);
  EXPECT_DOUBLE_EQ(n.factor, 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(n.game.normalization_factor(), 1.0 / 6.0);
  EXPECT_NEAR(max_bilinear_payoff(n.game, cs), 1.0, 1e-15);

  TabularGame small(1, 2, 1, {0.5, -0.25});
  ContextSpace one(std::vector<std::vector<double>>{{1.0}});
  EXPECT_EQ(validate_and_normalize(small, one).factor, 1.0);
  TabularGame zero(1, 2, 1, {0.0, 0.0});
  EXPECT_EQ(validate_and_normalize(zero, one).factor, 1.0);
}

TEST(Example1, MatchesAlternatingRule) {
  auto ex = example1_game(6);
  ASSERT_EQ(ex.sequence.size(), 6u);
  for (std::size_t t = 1; t <= 6; ++t) EXPECT_EQ(ex.sequence[t - 1], t % 2 == 0 ? 0u : 1u);
  for (long t : {1L, 2L}) {
    const Matrix a = Example1::matrix_at(t);
    const ContextIndex z = Example1::context_of_round(static_cast<std::size_t>(t));
    for (ActionIndex i = 0; i < 2; ++i)
      for (ActionIndex j = 0; j < 2; ++j) {
        const std::vector<ActionIndex> joint{i, j};
        EXPECT_DOUBLE_EQ(dot(ex.game.payoff(0, joint), (*ex.contexts)[z]), a(i, j));
        EXPECT_DOUBLE_EQ(dot(ex.game.payoff(1, joint), (*ex.contexts)[z]), -a(i, j));
      }
  }
  // B + C on even rounds, B - C on odd rounds
  EXPECT_EQ(Example1::matrix_at(2), Matrix(2, 2, {1, 1, 0, 0}));
  EXPECT_EQ(Example1::matrix_at(1), Matrix(2, 2, {0, 0, 1, 1}));
}

TEST(RandomGame, PayoffsAreNormalized) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng(s);
    auto rg = random_tabular_game(3, 2, 3, 4, rng);
    EXPECT_LE(max_bilinear_payoff(rg.game, *rg.contexts), 1.0 + 1e-15);
  }
}

TEST(Seeds, DeriveSeedHasNoCollisions) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t master = 0; master < 100; ++master)
    for (std::uint64_t j = 0; j < 50; ++j) {
      seen.insert(derive_seed(master, "predictor", j));
      seen.insert(derive_seed(master, "covariates", j));
    }
  EXPECT_EQ(seen.size(), 10000u);
  EXPECT_EQ(derive_seed(7, "process", 0), derive_seed(7, "process", 0));
  EXPECT_NE(derive_seed(7, "process", 0), derive_seed(7, "predictor", 0));
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(1e-300), "1e-300");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    EXPECT_EQ(parse_double(format_double(x)), x);
  }
  EXPECT_THROW(parse_double("1.0x"), Error);
  EXPECT_THROW(parse_integer(""), Error);
  EXPECT_EQ(parse_integer("+42"), 42);
}
