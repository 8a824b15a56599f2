#include "ctxgames/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ctxgames {

Strategy::Strategy(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw DimensionError("strategy must have at least one action");
  double sum = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0)
      throw Error("strategy weights must be finite and nonnegative");
    sum += w;
  }
  if (!(sum > 0.0)) throw Error("strategy weights sum to zero");
  for (double& w : weights_) w /= sum;
}

Strategy Strategy::uniform(std::size_t actions) {
  if (actions == 0) throw DimensionError("strategy must have at least one action");
  return Strategy(std::vector<double>(actions, 1.0));
}

Strategy Strategy::pure(std::size_t actions, ActionIndex action) {
  if (action >= actions)
    throw DimensionError("pure action " + std::to_string(action) + " out of range for K=" +
                         std::to_string(actions));
  std::vector<double> w(actions, 0.0);
  w[action] = 1.0;
  return Strategy(std::move(w));
}

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows * cols)
    throw DimensionError("matrix data has " + std::to_string(data_.size()) +
                         " entries, expected " + std::to_string(rows * cols));
}

CostMatrix::CostMatrix(std::size_t dim, std::size_t actions) : m_(dim, actions) {}

CostMatrix::CostMatrix(std::size_t dim, std::size_t actions, std::vector<double> row_major)
    : m_(dim, actions, std::move(row_major)) {}

std::vector<double> CostMatrix::transpose_times(std::span<const double> z) const {
  if (z.size() != dim())
    throw DimensionError("context has dimension " + std::to_string(z.size()) +
                         ", cost matrix expects " + std::to_string(dim()));
  std::vector<double> out(actions(), 0.0);
  for (std::size_t l = 0; l < dim(); ++l) {
    const double zl = z[l];
    if (zl == 0.0) continue;
    for (std::size_t k = 0; k < actions(); ++k) out[k] += zl * m_(l, k);
  }
  return out;
}

double CostMatrix::column_dot(ActionIndex k, std::span<const double> z) const {
  if (z.size() != dim()) throw DimensionError("context dimension mismatch");
  if (k >= actions()) throw DimensionError("column index out of range");
  double s = 0.0;
  for (std::size_t l = 0; l < dim(); ++l) s += z[l] * m_(l, k);
  return s;
}

CostMatrix CostMatrix::scaled(double factor) const {
  std::vector<double> d(m_.data().begin(), m_.data().end());
  for (double& x : d) x *= factor;
  return CostMatrix(dim(), actions(), std::move(d));
}

ContextSpace::ContextSpace(std::vector<std::vector<double>> contexts,
                           std::vector<std::string> labels)
    : contexts_(std::move(contexts)), labels_(std::move(labels)) {
  validate(false);
}

ContextSpace::ContextSpace(std::vector<std::vector<double>> contexts,
                           std::vector<std::string> labels, AllowDuplicates)
    : contexts_(std::move(contexts)), labels_(std::move(labels)) {
  validate(true);
}

void ContextSpace::validate(bool allow_duplicates) {
  if (contexts_.empty()) throw DimensionError("context space must hold at least one context");
  const std::size_t d = contexts_.front().size();
  if (d == 0) throw DimensionError("contexts must have positive dimension");
  for (std::size_t i = 0; i < contexts_.size(); ++i) {
    if (contexts_[i].size() != d)
      throw DimensionError("context " + std::to_string(i) + " has dimension " +
                           std::to_string(contexts_[i].size()) + ", expected " +
                           std::to_string(d));
    for (double x : contexts_[i])
      if (!std::isfinite(x)) throw Error("context " + std::to_string(i) + " is not finite");
  }
  if (!allow_duplicates) {
    for (std::size_t i = 0; i < contexts_.size(); ++i)
      for (std::size_t j = i + 1; j < contexts_.size(); ++j)
        if (contexts_[i] == contexts_[j])
          throw Error("contexts " + std::to_string(i) + " and " + std::to_string(j) +
                      " coincide");
  }
  if (labels_.empty()) {
    for (std::size_t i = 0; i < contexts_.size(); ++i) labels_.push_back("z" + std::to_string(i));
  } else if (labels_.size() != contexts_.size()) {
    throw DimensionError("label count does not match context count");
  }
}

void ContextSpace::check_index(ContextIndex i) const {
  if (i >= contexts_.size())
    throw DimensionError("context index " + std::to_string(i) + " out of range for m=" +
                         std::to_string(contexts_.size()));
}

JointProfile::JointProfile(std::vector<Strategy> strategies) : strategies_(std::move(strategies)) {
  for (std::size_t j = 1; j < strategies_.size(); ++j)
    if (strategies_[j].size() != strategies_[0].size())
      throw DimensionError("agent " + std::to_string(j) + " has " +
                           std::to_string(strategies_[j].size()) + " actions, expected " +
                           std::to_string(strategies_[0].size()));
}

std::vector<CostMatrix> Game::cost_matrices(const JointProfile& profile) const {
  std::vector<CostMatrix> out;
  out.reserve(agents());
  for (AgentIndex j = 0; j < agents(); ++j) out.push_back(cost_matrix_unchecked(j, profile));
  return out;
}

std::size_t checked_joint_actions(std::size_t agents, std::size_t actions, std::size_t limit) {
  std::size_t n = 1;
  for (std::size_t j = 0; j < agents; ++j) {
    if (actions != 0 && n > limit / actions)
      throw GuardError("joint action space " + std::to_string(actions) + "^" +
                       std::to_string(agents) + " exceeds limit " + std::to_string(limit));
    n *= actions;
  }
  if (n > limit)
    throw GuardError("joint action space exceeds limit " + std::to_string(limit));
  return n;
}

TabularGame::TabularGame(std::size_t agents, std::size_t actions, std::size_t dim,
                         std::vector<double> payoffs, double normalization_factor)
    : agents_(agents), actions_(actions), dim_(dim), payoffs_(std::move(payoffs)),
      factor_(normalization_factor) {
  if (agents_ == 0 || actions_ == 0 || dim_ == 0)
    throw DimensionError("tabular game needs J, K, d >= 1");
  joint_ = checked_joint_actions(agents_, actions_, kMaxJointActions);
  if (payoffs_.size() != agents_ * joint_ * dim_)
    throw DimensionError("payoff tensor has " + std::to_string(payoffs_.size()) +
                         " entries, expected J*K^J*d = " +
                         std::to_string(agents_ * joint_ * dim_));
  for (double x : payoffs_)
    if (!std::isfinite(x)) throw Error("payoff tensor contains a non-finite entry");
  if (!(factor_ > 0.0) || !std::isfinite(factor_))
    throw Error("normalization factor must be positive and finite");
}

std::size_t TabularGame::joint_index(std::span<const ActionIndex> joint_action) const {
  if (joint_action.size() != agents_)
    throw DimensionError("joint action has " + std::to_string(joint_action.size()) +
                         " entries, expected " + std::to_string(agents_));
  std::size_t idx = 0;
  for (std::size_t j = 0; j < agents_; ++j) {
    if (joint_action[j] >= actions_)
      throw DimensionError("agent " + std::to_string(j) + " action out of range");
    idx = idx * actions_ + joint_action[j];
  }
  return idx;
}

void TabularGame::decode(std::size_t index, std::span<ActionIndex> joint_action) const {
  for (std::size_t j = agents_; j-- > 0;) {
    joint_action[j] = index % actions_;
    index /= actions_;
  }
}

std::span<const double> TabularGame::payoff_at(AgentIndex agent, std::size_t joint_index) const {
  return std::span<const double>(payoffs_).subspan((agent * joint_ + joint_index) * dim_, dim_);
}

std::vector<double> TabularGame::payoff(AgentIndex agent,
                                        std::span<const ActionIndex> joint_action) const {
  if (agent >= agents_) throw DimensionError("agent index out of range");
  auto p = payoff_at(agent, joint_index(joint_action));
  return {p.begin(), p.end()};
}

CostMatrix TabularGame::cost_matrix_unchecked(AgentIndex agent, const JointProfile& profile) const {
  CostMatrix phi(dim_, actions_);
  // Stride of agent j's digit in the mixed-radix joint index.
  std::size_t own_stride = 1;
  for (std::size_t j = agents_ - 1; j > agent; --j) own_stride *= actions_;

  // Enumerate opponent joint actions with agent's own digit fixed at zero.
  std::vector<ActionIndex> a(agents_, 0);
  const std::size_t opp = joint_ / actions_;
  for (std::size_t n = 0; n < opp; ++n) {
    double prob = 1.0;
    std::size_t base = 0;
    for (std::size_t j = 0; j < agents_; ++j) {
      base = base * actions_ + (j == agent ? 0 : a[j]);
      if (j != agent) prob *= profile[j][a[j]];
    }
    if (prob != 0.0) {
      for (ActionIndex k = 0; k < actions_; ++k) {
        auto p = payoff_at(agent, base + k * own_stride);
        for (std::size_t l = 0; l < dim_; ++l) phi(l, k) += prob * p[l];
      }
    }
    // Advance the odometer over opponents, least significant agent last.
    for (std::size_t j = agents_; j-- > 0;) {
      if (j == agent) continue;
      if (++a[j] < actions_) break;
      a[j] = 0;
    }
  }
  return phi;
}

TabularGame TabularGame::scaled(double factor) const {
  std::vector<double> p = payoffs_;
  for (double& x : p) x *= factor;
  return TabularGame(agents_, actions_, dim_, std::move(p), factor_ * factor);
}

CostMatrix cost_matrix(const Game& game, AgentIndex agent, const JointProfile& profile) {
  if (agent >= game.agents())
    throw DimensionError("agent index " + std::to_string(agent) + " out of range for J=" +
                         std::to_string(game.agents()));
  if (profile.agents() != game.agents())
    throw DimensionError("profile has " + std::to_string(profile.agents()) +
                         " strategies, game has J=" + std::to_string(game.agents()));
  for (AgentIndex j = 0; j < profile.agents(); ++j)
    if (profile[j].size() != game.actions())
      throw DimensionError("agent " + std::to_string(j) + " strategy has " +
                           std::to_string(profile[j].size()) + " actions, game has K=" +
                           std::to_string(game.actions()));
  return game.cost_matrix_unchecked(agent, profile);
}

double expected_cost(const CostMatrix& phi, const Strategy& w, std::span<const double> z) {
  if (w.size() != phi.actions())
    throw DimensionError("strategy has " + std::to_string(w.size()) +
                         " actions, cost matrix has K=" + std::to_string(phi.actions()));
  const auto c = phi.transpose_times(z);
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * w[k];
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot product of unequal lengths");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_bilinear_payoff(const TabularGame& game, const ContextSpace& contexts) {
  if (contexts.dim() != game.dim())
    throw DimensionError("context dimension " + std::to_string(contexts.dim()) +
                         " does not match game dimension " + std::to_string(game.dim()));
  double m = 0.0;
  for (AgentIndex j = 0; j < game.agents(); ++j)
    for (std::size_t a = 0; a < game.joint_actions(); ++a) {
      auto p = game.payoff_at(j, a);
      for (ContextIndex i = 0; i < contexts.size(); ++i)
        m = std::max(m, std::abs(dot(contexts[i], p)));
    }
  return m;
}

NormalizedGame validate_and_normalize(const TabularGame& game, const ContextSpace& contexts) {
  const double m = max_bilinear_payoff(game, contexts);
  if (!std::isfinite(m)) throw Error("bilinear payoff is not finite");
  if (m <= 1.0) return {game, 1.0};
  const double factor = 1.0 / m;
  return {game.scaled(factor), factor};
}

}  // namespace ctxgames
