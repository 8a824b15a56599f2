#include <gtest/gtest.h>

#include <memory>

#include "ctxgames/engine.hpp"
#include "ctxgames/games.hpp"

using namespace ctxgames;

namespace {

SimulationSpec make_spec(std::size_t agents, std::size_t rounds, std::uint64_t seed,
                         double epsilon = 0.2) {
  Rng rng(seed + 1000);
  auto rg = random_tabular_game(agents, 3, 2, 3, rng);
  SimulationSpec spec;
  spec.game = std::make_shared<const TabularGame>(rg.game);
  spec.contexts = rg.contexts;
  spec.process = IidCategorical{{0.5, 0.3, 0.2}};
  spec.horizon = rounds;
  spec.seed = seed;
  for (std::size_t j = 0; j < agents; ++j) {
    AgentSetup a;
    a.learner = j % 2 ? LearnerKind::BlumMansour : LearnerKind::Pomwu;
    a.eta = 0.1;
    a.predictor.kind = PredictorKind::Noisy;
    a.predictor.epsilon = epsilon;
    spec.agents.push_back(a);
  }
  return spec;
}

void expect_same_prefix(const Trace& a, const Trace& b, std::size_t rounds) {
  ASSERT_GE(a.rounds(), rounds);
  ASSERT_GE(b.rounds(), rounds);
  for (std::size_t t = 0; t < rounds; ++t) {
    ASSERT_EQ(a.realized(t), b.realized(t)) << "round " << t;
    for (AgentIndex j = 0; j < a.agents(); ++j) {
      ASSERT_EQ(a.predicted(t, j), b.predicted(t, j));
      for (std::size_t k = 0; k < a.actions(); ++k) {
        ASSERT_EQ(a.strategy(t, j)[k], b.strategy(t, j)[k]);
        ASSERT_EQ(a.loss(t, j)[k], b.loss(t, j)[k]);
      }
      ASSERT_EQ(a.cost(t, j), b.cost(t, j));
    }
  }
}

}  // namespace

TEST(Engine, SameSeedSameTrace) {
  auto spec = make_spec(3, 200, 5);
  expect_same_prefix(run_simulation(spec), run_simulation(spec), 200);
}

TEST(Engine, ParallelMatchesSerial) {
  auto spec = make_spec(5, 150, 8);
  const auto serial = run_simulation(spec);
  spec.threads = 4;
  expect_same_prefix(serial, run_simulation(spec), 150);
}

TEST(Engine, PrefixDoesNotDependOnHorizon) {
  auto spec = make_spec(3, 300, 2);
  const auto full = run_simulation(spec);
  spec.horizon = 120;
  expect_same_prefix(full, run_simulation(spec), 120);
}

TEST(Engine, SeedsChangeTheRun) {
  const auto a = run_simulation(make_spec(2, 50, 1));
  const auto b = run_simulation(make_spec(2, 50, 2));
  bool differ = false;
  for (std::size_t t = 0; t < 50; ++t) differ = differ || a.realized(t) != b.realized(t);
  EXPECT_TRUE(differ);
}

TEST(Engine, SharedPredictionsAreBroadcast) {
  auto spec = make_spec(4, 200, 3, 0.5);
  spec.shared_predictions = true;
  const auto trace = run_simulation(spec);
  EXPECT_TRUE(trace.metadata().shared_predictions);
  std::size_t wrong = 0;
  for (std::size_t t = 0; t < trace.rounds(); ++t) {
    for (AgentIndex j = 1; j < 4; ++j) EXPECT_EQ(trace.predicted(t, j), trace.predicted(t, 0));
    wrong += trace.predicted(t, 0) != trace.realized(t);
  }
  EXPECT_GT(wrong, 50u);
}

TEST(Engine, RemovingAnAgentKeepsOtherStreams) {
  const auto three = run_simulation(make_spec(3, 300, 9, 0.4));
  const auto two = run_simulation(make_spec(2, 300, 9, 0.4));
  for (std::size_t t = 0; t < 300; ++t) {
    ASSERT_EQ(three.realized(t), two.realized(t));
    for (AgentIndex j = 0; j < 2; ++j) ASSERT_EQ(three.predicted(t, j), two.predicted(t, j));
  }
}

TEST(Engine, RecordsRecommendationsForSwapLearners) {
  const auto trace = run_simulation(make_spec(2, 20, 4));
  ASSERT_TRUE(trace.has_recommendations());
  EXPECT_EQ(trace.metadata().learners[1], "bm");
  for (std::size_t t = 0; t < 20; ++t) EXPECT_LE(trace.residual(t, 1), 1e-10);
}

TEST(Engine, RejectsMismatchedSetup) {
  auto spec = make_spec(2, 10, 1);
  spec.agents.pop_back();
  EXPECT_THROW(run_simulation(spec), ConfigError);
  spec = make_spec(2, 10, 1);
  spec.horizon = 0;
  EXPECT_THROW(run_simulation(spec), ConfigError);
  spec = make_spec(2, 10, 1);
  spec.agents[0].predictor.kind = PredictorKind::Logistic;
  EXPECT_THROW(run_simulation(spec), ConfigError);
}

TEST(Process, DeterministicSequenceCycles) {
  ContextSampler s(DeterministicSequence{{2, 0, 1}}, 3, Rng(0));
  const std::vector<ContextIndex> expect{2, 0, 1, 2, 0, 1, 2};
  for (ContextIndex z : expect) EXPECT_EQ(s.next().context, z);
}

TEST(Process, IidFrequencies) {
  ContextSampler s(IidCategorical{{0.7, 0.2, 0.1}}, 3, Rng(1));
  std::vector<double> n(3, 0.0);
  for (int i = 0; i < 100000; ++i) n[s.next().context] += 1.0;
  EXPECT_NEAR(n[0] / 1e5, 0.7, 0.01);
  EXPECT_NEAR(n[2] / 1e5, 0.1, 0.01);
}

TEST(Process, LogisticCovariatesDriveContexts) {
  LogisticCovariate p;
  p.beta_star = Matrix(2, 1, {5.0, -5.0});
  p.mean = {0.0};
  p.variance = 1.0;
  ContextSampler s(p, 2, Rng(2));
  std::size_t agree = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto d = s.next();
    ASSERT_EQ(d.covariates.size(), 1u);
    agree += (d.covariates[0] > 0.0) == (d.context == 0);
  }
  EXPECT_GT(agree, 1800u);
  EXPECT_EQ(covariate_dim(ContextProcess(p)), 1u);
}

TEST(ParallelFor, CoversEveryIndexAndRethrows) {
  std::vector<int> hit(100, 0);
  parallel_for(100, 7, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 5) throw Error("boom");
               }),
               Error);
}
