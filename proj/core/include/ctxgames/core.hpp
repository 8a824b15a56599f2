#pragma once

// Domain types shared by every module: mixed strategies, the finite context
// space, per-agent cost matrices and the game abstraction that produces them.
//
// Costs follow the bilinear form c^j(w, z) = E_{a~w}[<phi^j(a), z>], which for
// a product profile collapses to <z, Phi^j(w^{-j}) w^j> where column k of
// Phi^j is the expected payoff vector of pure action k against the opponents.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ctxgames/error.hpp"

namespace ctxgames {

using ContextIndex = std::size_t;
using AgentIndex = std::size_t;
using ActionIndex = std::size_t;

inline constexpr double kSimplexTolerance = 1e-12;

/// Probability vector over K actions.
///
/// Construction renormalizes by the entry sum, so accumulated rounding from
/// exponential-weight updates never leaks out of the simplex.
class Strategy {
 public:
  Strategy() = default;
  explicit Strategy(std::vector<double> weights);

  static Strategy uniform(std::size_t actions);
  static Strategy pure(std::size_t actions, ActionIndex action);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t k) const { return weights_[k]; }
  std::span<const double> weights() const noexcept { return weights_; }

  bool operator==(const Strategy&) const = default;

 private:
  std::vector<double> weights_;
};

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// d x K matrix Phi^j(w^{-j}); column k is the expected payoff vector of
/// pure action k against the opponents' product distribution.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t dim, std::size_t actions);
  CostMatrix(std::size_t dim, std::size_t actions, std::vector<double> row_major);

  std::size_t dim() const noexcept { return m_.rows(); }
  std::size_t actions() const noexcept { return m_.cols(); }
  double& operator()(std::size_t l, std::size_t k) { return m_(l, k); }
  double operator()(std::size_t l, std::size_t k) const { return m_(l, k); }
  std::span<const double> data() const noexcept { return m_.data(); }

  /// Phi^T z: the per-action cost vector under context z.
  std::vector<double> transpose_times(std::span<const double> z) const;
  /// <z, column k>.
  double column_dot(ActionIndex k, std::span<const double> z) const;
  CostMatrix scaled(double factor) const;

  bool operator==(const CostMatrix&) const = default;

 private:
  Matrix m_;
};

/// The finite set of states of nature z_1..z_m in R^d.
class ContextSpace {
 public:
  /// Opt-in marker for degenerate spaces whose vectors coincide (e.g. a
  /// routing build with zero context noise).
  struct AllowDuplicates {};

  explicit ContextSpace(std::vector<std::vector<double>> contexts,
                        std::vector<std::string> labels = {});
  ContextSpace(std::vector<std::vector<double>> contexts, std::vector<std::string> labels,
               AllowDuplicates);

  std::size_t size() const noexcept { return contexts_.size(); }
  std::size_t dim() const noexcept { return contexts_.front().size(); }
  std::span<const double> operator[](ContextIndex i) const { return contexts_.at(i); }
  const std::string& label(ContextIndex i) const { return labels_.at(i); }
  const std::vector<std::vector<double>>& vectors() const noexcept { return contexts_; }

  void check_index(ContextIndex i) const;

 private:
  void validate(bool allow_duplicates);

  std::vector<std::vector<double>> contexts_;
  std::vector<std::string> labels_;
};

/// One mixed strategy per agent, all over the same K actions.
class JointProfile {
 public:
  JointProfile() = default;
  explicit JointProfile(std::vector<Strategy> strategies);

  std::size_t agents() const noexcept { return strategies_.size(); }
  std::size_t actions() const noexcept { return strategies_.empty() ? 0 : strategies_[0].size(); }
  const Strategy& operator[](AgentIndex j) const { return strategies_[j]; }
  std::span<const Strategy> strategies() const noexcept { return strategies_; }

 private:
  std::vector<Strategy> strategies_;
};

/// J-agent, K-action game in the cost form c^j(a, z) = <phi^j(a), z>.
///
/// Implementations must be deterministic: identical inputs give bitwise
/// identical cost matrices.
class Game {
 public:
  virtual ~Game() = default;

  virtual std::size_t agents() const = 0;
  virtual std::size_t actions() const = 0;
  virtual std::size_t dim() const = 0;

  /// phi^j(a) for a joint pure action (one action index per agent).
  virtual std::vector<double> payoff(AgentIndex agent,
                                     std::span<const ActionIndex> joint_action) const = 0;

  /// Phi^j(w^{-j}). The agent's own entry of `profile` is ignored. Inputs are
  /// assumed valid; use ctxgames::cost_matrix for the checked entry point.
  virtual CostMatrix cost_matrix_unchecked(AgentIndex agent, const JointProfile& profile) const = 0;

  /// Phi^j for every agent from one profile snapshot. Structured games
  /// override this to share per-round precomputation across agents.
  virtual std::vector<CostMatrix> cost_matrices(const JointProfile& profile) const;

  /// Product of every rescaling applied to reach unit-bounded costs; multiply
  /// raw-unit costs by this to get the reported costs.
  virtual double normalization_factor() const = 0;
};

/// Dense payoff tensor phi^j(a) for every agent and joint pure action.
class TabularGame final : public Game {
 public:
  static constexpr std::size_t kMaxJointActions = 10'000'000;

  /// `payoffs` is laid out [agent][joint action][l], joint actions in
  /// mixed radix K with agent 0 most significant.
  TabularGame(std::size_t agents, std::size_t actions, std::size_t dim,
              std::vector<double> payoffs, double normalization_factor = 1.0);

  std::size_t agents() const override { return agents_; }
  std::size_t actions() const override { return actions_; }
  std::size_t dim() const override { return dim_; }
  double normalization_factor() const override { return factor_; }

  std::size_t joint_actions() const noexcept { return joint_; }
  std::size_t joint_index(std::span<const ActionIndex> joint_action) const;
  void decode(std::size_t index, std::span<ActionIndex> joint_action) const;
  std::span<const double> payoff_at(AgentIndex agent, std::size_t joint_index) const;
  const std::vector<double>& tensor() const noexcept { return payoffs_; }

  std::vector<double> payoff(AgentIndex agent,
                             std::span<const ActionIndex> joint_action) const override;
  CostMatrix cost_matrix_unchecked(AgentIndex agent, const JointProfile& profile) const override;

  /// Copy with every payoff vector multiplied by `factor` (recorded factor too).
  TabularGame scaled(double factor) const;

 private:
  std::size_t agents_;
  std::size_t actions_;
  std::size_t dim_;
  std::size_t joint_;
  std::vector<double> payoffs_;
  double factor_;
};

/// Number of joint pure actions K^J, or GuardError when it exceeds `limit`.
std::size_t checked_joint_actions(std::size_t agents, std::size_t actions, std::size_t limit);

/// Checked cost matrix: validates agent index and profile shape, then
/// delegates to the game. Dimension errors name the offending agent.
CostMatrix cost_matrix(const Game& game, AgentIndex agent, const JointProfile& profile);

/// <z, Phi w>.
double expected_cost(const CostMatrix& phi, const Strategy& w, std::span<const double> z);

struct NormalizedGame {
  TabularGame game;
  double factor;
};

/// Rescales the game so that |<z, phi^j(a)>| <= 1 over every agent, joint
/// action and context. Returns the game unchanged with factor 1 when the
/// bound already holds (including the all-zero game).
NormalizedGame validate_and_normalize(const TabularGame& game, const ContextSpace& contexts);

/// max over (j, a, z) of |<z, phi^j(a)>|.
double max_bilinear_payoff(const TabularGame& game, const ContextSpace& contexts);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace ctxgames
