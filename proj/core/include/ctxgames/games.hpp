#pragma once

#include <memory>
#include <vector>

#include "ctxgames/core.hpp"
#include "ctxgames/rng.hpp"

namespace ctxgames {

/// Two-player alternating matrix game A_t = B + (-1)^t C with
/// B = 1/2 [[1,1],[1,1]] and C = 1/2 [[1,1],[-1,-1]], encoded in the bilinear
/// cost form with d = 2: context 0 (t even) is e_1, context 1 (t odd) is e_2,
/// and phi^1(a, b) = (A_even[a][b], A_odd[a][b]). Player 2's cost is the
/// negated payoff unless `negate_player2` is false.
struct Example1 {
  TabularGame game;
  std::shared_ptr<const ContextSpace> contexts;
  /// Context index of rounds t = 1..T (entry t-1).
  std::vector<ContextIndex> sequence;

  static Matrix b();
  static Matrix c();
  /// A_t for any integer t (t = 0 gives the rule's value B + C).
  static Matrix matrix_at(long t);
  static ContextIndex context_of_round(std::size_t t) { return t % 2 == 0 ? 0 : 1; }
};

Example1 example1_game(std::size_t horizon, bool negate_player2 = true);

struct RandomGame {
  TabularGame game;
  std::shared_ptr<const ContextSpace> contexts;
  double factor;
};

/// Payoff entries and context coordinates drawn uniformly from [-1, 1], then
/// normalized so every bilinear payoff is within [-1, 1].
RandomGame random_tabular_game(std::size_t agents, std::size_t actions, std::size_t dim,
                               std::size_t contexts, Rng& rng);

}  // namespace ctxgames
