#include <benchmark/benchmark.h>

#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include "ctxgames/engine.hpp"
#include "ctxgames/games.hpp"
#include "ctxgames/learners.hpp"
#include "ctxgames/metrics.hpp"
#include "ctxgames/network.hpp"
#include "ctxgames/routing.hpp"

using namespace ctxgames;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct SiouxFalls {
  TntpNetwork net;
  std::shared_ptr<const Graph> graph;
  std::vector<OdQuantity> quantities;
};

const SiouxFalls& sioux_falls() {
  static const SiouxFalls sf = [] {
    const std::string dir = std::string(CTXGAMES_SOURCE_DIR) + "/data/sioux_falls/";
    SiouxFalls s;
    s.net = parse_tntp(slurp(dir + "SiouxFalls_net.tntp"));
    s.graph = std::make_shared<const Graph>(s.net.graph());
    s.quantities = parse_quantities(slurp(dir + "SiouxFalls_quantities.txt"), s.net.nodes);
    return s;
  }();
  return sf;
}

void BM_PomwuRound(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 8;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> zs(4, std::vector<double>(d));
  for (auto& z : zs)
    for (double& v : z) v = u(rng);
  auto contexts = std::make_shared<const ContextSpace>(zs);
  std::vector<double> entries(d * k);
  for (double& v : entries) v = u(rng);
  const CostMatrix phi(d, k, entries);
  Pomwu learner(contexts, k, 0.1);
  ContextIndex z = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(learner.act(z));
    learner.update(z, phi);
    z = (z + 1) % 4;
  }
}
BENCHMARK(BM_PomwuRound)->Arg(2)->Arg(8)->Arg(32);

void BM_BlumMansourRound(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  auto contexts = std::make_shared<const ContextSpace>(std::vector<std::vector<double>>{{1.0}, {0.5}});
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> entries(k);
  for (double& v : entries) v = u(rng);
  const CostMatrix phi(1, k, entries);
  BlumMansour learner(contexts, k, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(learner.act(0));
    learner.update(0, phi);
  }
}
BENCHMARK(BM_BlumMansourRound)->Arg(2)->Arg(5)->Arg(10);

void BM_TabularCostMatrix(benchmark::State& state) {
  const auto agents = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  auto rg = random_tabular_game(agents, 3, 4, 2, rng);
  const JointProfile profile(std::vector<Strategy>(agents, Strategy::uniform(3)));
  for (auto _ : state) benchmark::DoNotOptimize(rg.game.cost_matrices(profile));
}
BENCHMARK(BM_TabularCostMatrix)->DenseRange(2, 6, 2);

void BM_RoutingCostMatrices(benchmark::State& state) {
  const auto& sf = sioux_falls();
  RoutingConfig cfg;
  cfg.filter_threshold = static_cast<double>(state.range(0));
  Rng rng(4);
  const auto build = build_routing_game(sf.graph, sf.quantities, cfg, rng);
  const JointProfile profile(std::vector<Strategy>(build.game->agents(), Strategy::uniform(cfg.paths)));
  for (auto _ : state) benchmark::DoNotOptimize(build.game->cost_matrices(profile));
  state.counters["agents"] = static_cast<double>(build.game->agents());
}
BENCHMARK(BM_RoutingCostMatrices)->Arg(2)->Arg(4)->Arg(1000);

void BM_YenSiouxFalls(benchmark::State& state) {
  const auto& sf = sioux_falls();
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(yen_k_shortest(*sf.graph, 0, 19, k));
}
BENCHMARK(BM_YenSiouxFalls)->Arg(1)->Arg(5)->Arg(20);

void BM_ParseTntp(benchmark::State& state) {
  const std::string text = slurp(std::string(CTXGAMES_SOURCE_DIR) + "/data/sioux_falls/SiouxFalls_net.tntp");
  for (auto _ : state) benchmark::DoNotOptimize(parse_tntp(text));
}
BENCHMARK(BM_ParseTntp);

void BM_SelfPlayRun(benchmark::State& state) {
  Rng rng(5);
  auto rg = random_tabular_game(3, 3, 2, 3, rng);
  SimulationSpec spec;
  spec.game = std::make_shared<const TabularGame>(rg.game);
  spec.contexts = rg.contexts;
  spec.process = IidCategorical{{0.4, 0.3, 0.3}};
  spec.horizon = static_cast<std::size_t>(state.range(0));
  spec.agents.assign(3, AgentSetup{});
  for (auto _ : state) benchmark::DoNotOptimize(run_simulation(spec));
}
BENCHMARK(BM_SelfPlayRun)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_RegretSummary(benchmark::State& state) {
  Rng rng(6);
  auto rg = random_tabular_game(2, 4, 2, 4, rng);
  SimulationSpec spec;
  spec.game = std::make_shared<const TabularGame>(rg.game);
  spec.contexts = rg.contexts;
  spec.process = IidCategorical{{0.25, 0.25, 0.25, 0.25}};
  spec.horizon = 5000;
  spec.agents.assign(2, AgentSetup{});
  const Trace trace = run_simulation(spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(contextual_external_regret(trace, 0));
    benchmark::DoNotOptimize(contextual_swap_regret(trace, 0));
  }
}
BENCHMARK(BM_RegretSummary);

}  // namespace

BENCHMARK_MAIN();
