#include "ctxgames/games.hpp"

namespace ctxgames {

Matrix Example1::b() { return Matrix(2, 2, {0.5, 0.5, 0.5, 0.5}); }
Matrix Example1::c() { return Matrix(2, 2, {0.5, 0.5, -0.5, -0.5}); }

Matrix Example1::matrix_at(long t) {
  const double sign = t % 2 == 0 ? 1.0 : -1.0;
  Matrix a = b();
  const Matrix cm = c();
  for (std::size_t i = 0; i < 4; ++i) a.data()[i] += sign * cm.data()[i];
  return a;
}

Example1 example1_game(std::size_t horizon, bool negate_player2) {
  if (horizon == 0) throw Error("example1 game needs T >= 1");
  const Matrix even = Example1::matrix_at(0);
  const Matrix odd = Example1::matrix_at(1);
  const double s2 = negate_player2 ? -1.0 : 1.0;
  // Layout [agent][joint = a * 2 + b][l].
  std::vector<double> payoffs;
  payoffs.reserve(2 * 4 * 2);
  for (std::size_t agent = 0; agent < 2; ++agent) {
    const double s = agent == 0 ? 1.0 : s2;
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t bb = 0; bb < 2; ++bb) {
        payoffs.push_back(s * even(a, bb));
        payoffs.push_back(s * odd(a, bb));
      }
  }
  auto contexts = std::make_shared<const ContextSpace>(
      std::vector<std::vector<double>>{{1.0, 0.0}, {0.0, 1.0}},
      std::vector<std::string>{"even", "odd"});
  std::vector<ContextIndex> seq(horizon);
  for (std::size_t t = 1; t <= horizon; ++t) seq[t - 1] = Example1::context_of_round(t);
  return {TabularGame(2, 2, 2, std::move(payoffs)), std::move(contexts), std::move(seq)};
}

RandomGame random_tabular_game(std::size_t agents, std::size_t actions, std::size_t dim,
                               std::size_t contexts, Rng& rng) {
  if (contexts == 0) throw DimensionError("need at least one context");
  const std::size_t joint = checked_joint_actions(agents, actions, TabularGame::kMaxJointActions);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> payoffs(agents * joint * dim);
  for (double& x : payoffs) x = u(rng);
  std::vector<std::vector<double>> zs(contexts, std::vector<double>(dim));
  for (auto& z : zs)
    for (double& x : z) x = u(rng);
  auto space = std::make_shared<const ContextSpace>(std::move(zs));
  auto norm = validate_and_normalize(TabularGame(agents, actions, dim, std::move(payoffs)), *space);
  return {std::move(norm.game), std::move(space), norm.factor};
}

}  // namespace ctxgames
