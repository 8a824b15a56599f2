#include "ctxgames/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ctxgames {

namespace {

void check_eta(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw Error("learning rate must be positive and finite, got " + std::to_string(eta));
}

void check_phi(const CostMatrix& phi, const ContextSpace& contexts, std::size_t actions) {
  if (phi.dim() != contexts.dim() || phi.actions() != actions)
    throw DimensionError("cost matrix is " + std::to_string(phi.dim()) + "x" +
                         std::to_string(phi.actions()) + ", learner expects " +
                         std::to_string(contexts.dim()) + "x" + std::to_string(actions));
}

std::shared_ptr<const ContextSpace> require(std::shared_ptr<const ContextSpace> contexts) {
  if (!contexts) throw Error("learner needs a context space");
  return contexts;
}

}  // namespace

Strategy exp_weights(std::span<const double> base, std::span<const double> costs, double eta) {
  if (base.size() != costs.size()) throw DimensionError("weights and costs differ in length");
  std::vector<double> a(base.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] = base[k] > 0.0 ? std::log(base[k]) - eta * costs[k]
                         : -std::numeric_limits<double>::infinity();
    top = std::max(top, a[k]);
  }
  if (!std::isfinite(top)) throw Error("exponential weights degenerate (non-finite exponent)");
  for (double& x : a) x = std::exp(x - top);
  return Strategy(std::move(a));
}

Pomwu::Pomwu(std::shared_ptr<const ContextSpace> contexts, std::size_t actions, double eta)
    : contexts_(require(std::move(contexts))), actions_(actions), eta_(eta) {
  check_eta(eta_);
  rho_.assign(contexts_->size(), Strategy::uniform(actions_));
  psi_.assign(contexts_->size(), CostMatrix(contexts_->dim(), actions_));
}

Strategy Pomwu::act(ContextIndex predicted) {
  contexts_->check_index(predicted);
  const auto hint = psi_[predicted].transpose_times((*contexts_)[predicted]);
  return exp_weights(rho_[predicted].weights(), hint, eta_);
}

void Pomwu::update(ContextIndex realized, const CostMatrix& phi) {
  contexts_->check_index(realized);
  check_phi(phi, *contexts_, actions_);
  const auto loss = phi.transpose_times((*contexts_)[realized]);
  psi_[realized] = phi;
  rho_[realized] = exp_weights(rho_[realized].weights(), loss, eta_);
}

Omwu::Omwu(std::shared_ptr<const ContextSpace> contexts, std::size_t actions, double eta)
    : contexts_(require(std::move(contexts))), eta_(eta), rho_(Strategy::uniform(actions)),
      last_loss_(actions, 0.0) {
  check_eta(eta_);
}

Strategy Omwu::act(ContextIndex predicted) {
  contexts_->check_index(predicted);
  return exp_weights(rho_.weights(), last_loss_, eta_);
}

void Omwu::update(ContextIndex realized, const CostMatrix& phi) {
  contexts_->check_index(realized);
  check_phi(phi, *contexts_, rho_.size());
  last_loss_ = phi.transpose_times((*contexts_)[realized]);
  rho_ = exp_weights(rho_.weights(), last_loss_, eta_);
}

Omd::Omd(std::shared_ptr<const ContextSpace> contexts, std::size_t actions, double eta)
    : contexts_(require(std::move(contexts))), eta_(eta) {
  check_eta(eta_);
  if (actions == 0) throw DimensionError("learner needs at least one action");
  center_.assign(contexts_->size(), std::vector<double>(actions, 1.0 / static_cast<double>(actions)));
  hint_.assign(contexts_->size(), CostMatrix(contexts_->dim(), actions));
}

std::vector<double> Omd::mirror_step(const std::vector<double>& center,
                                     std::span<const double> gradient) const {
  // Dual point grad R(center) - eta * gradient, mapped back with grad R* and
  // Bregman-projected onto the simplex via log-sum-exp.
  std::vector<double> y(center.size());
  for (std::size_t k = 0; k < y.size(); ++k)
    y[k] = (center[k] > 0.0 ? std::log(center[k]) + 1.0 : -std::numeric_limits<double>::infinity()) -
           eta_ * gradient[k];
  const double top = *std::max_element(y.begin(), y.end());
  double acc = 0.0;
  for (double v : y) acc += std::exp(v - top);
  const double lse = top + std::log(acc);
  for (double& v : y) v = std::exp(v - lse);
  return y;
}

Strategy Omd::act(ContextIndex predicted) {
  contexts_->check_index(predicted);
  const auto g = hint_[predicted].transpose_times((*contexts_)[predicted]);
  return Strategy(mirror_step(center_[predicted], g));
}

void Omd::update(ContextIndex realized, const CostMatrix& phi) {
  contexts_->check_index(realized);
  check_phi(phi, *contexts_, center_[realized].size());
  const auto g = phi.transpose_times((*contexts_)[realized]);
  center_[realized] = mirror_step(center_[realized], g);
  hint_[realized] = phi;
}

Oftrl::Oftrl(std::shared_ptr<const ContextSpace> contexts, std::size_t actions, double eta)
    : contexts_(require(std::move(contexts))), eta_(eta) {
  check_eta(eta_);
  if (actions == 0) throw DimensionError("learner needs at least one action");
  cumulative_.assign(contexts_->size(), std::vector<double>(actions, 0.0));
  hint_.assign(contexts_->size(), CostMatrix(contexts_->dim(), actions));
}

Strategy Oftrl::act(ContextIndex predicted) {
  contexts_->check_index(predicted);
  const auto h = hint_[predicted].transpose_times((*contexts_)[predicted]);
  std::vector<double> s = cumulative_[predicted];
  for (std::size_t k = 0; k < s.size(); ++k) s[k] += h[k];
  const std::vector<double> ones(s.size(), 1.0);
  return exp_weights(ones, s, eta_);
}

void Oftrl::update(ContextIndex realized, const CostMatrix& phi) {
  contexts_->check_index(realized);
  check_phi(phi, *contexts_, cumulative_[realized].size());
  const auto g = phi.transpose_times((*contexts_)[realized]);
  for (std::size_t k = 0; k < g.size(); ++k) cumulative_[realized][k] += g[k];
  hint_[realized] = phi;
}

StationaryResult stationary_distribution(const Matrix& p, double tolerance,
                                         std::size_t max_iterations) {
  const std::size_t n = p.rows();
  if (n == 0 || p.cols() != n) throw DimensionError("recommendation matrix must be square");
  for (std::size_t c = 0; c < n; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      if (!(p(r, c) >= 0.0)) throw Error("recommendation matrix has a negative entry");
      s += p(r, c);
    }
    if (std::abs(s - 1.0) > 1e-9)
      throw Error("column " + std::to_string(c) + " of recommendation matrix is not a distribution");
  }

  constexpr double kPolishFloor = 1e-15;
  constexpr std::size_t kStallLimit = 20;
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  std::vector<double> y(n);
  std::vector<double> best = x;
  double best_res = std::numeric_limits<double>::infinity();
  bool met = false;
  std::size_t stall = 0;
  std::size_t it = 0;
  for (; it < max_iterations; ++it) {
    double res = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < n; ++c) s += p(r, c) * x[c];
      y[r] = s;
      res = std::max(res, std::abs(s - x[r]));
    }
    if (res < best_res) {
      best_res = res;
      best = x;
      stall = 0;
    } else {
      ++stall;
    }
    if (res <= tolerance) met = true;
    if (met && (res <= kPolishFloor || stall >= kStallLimit)) break;
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      x[r] = 0.5 * (y[r] + x[r]);
      sum += x[r];
    }
    for (double& v : x) v /= sum;
  }
  if (!met)
    throw ConvergenceError("stationary distribution did not reach tolerance within " +
                               std::to_string(max_iterations) + " iterations",
                           best_res);
  return {Strategy(std::move(best)), best_res, it};
}

BlumMansour::BlumMansour(std::shared_ptr<const ContextSpace> contexts, std::size_t actions,
                         double eta)
    : eta_(eta), p_(actions, actions) {
  check_eta(eta_);
  contexts = require(std::move(contexts));
  inner_.reserve(actions);
  for (std::size_t k = 0; k < actions; ++k) inner_.emplace_back(contexts, actions, eta);
}

Strategy BlumMansour::act(ContextIndex predicted) {
  const std::size_t n = inner_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Strategy col = inner_[k].act(predicted);
    for (std::size_t r = 0; r < n; ++r) p_(r, k) = col[r];
  }
  auto fixed = stationary_distribution(p_);
  residual_ = fixed.residual;
  pending_ = fixed.w;
  return fixed.w;
}

void BlumMansour::update(ContextIndex realized, const CostMatrix& phi) {
  if (!pending_) throw Error("Blum-Mansour update called before act in this round");
  const Strategy w = *pending_;
  pending_.reset();
  for (std::size_t k = 0; k < inner_.size(); ++k) inner_[k].update(realized, phi.scaled(w[k]));
}

LearnerKind parse_learner_kind(const std::string& name) {
  if (name == "pomwu") return LearnerKind::Pomwu;
  if (name == "omwu") return LearnerKind::Omwu;
  if (name == "omd") return LearnerKind::Omd;
  if (name == "oftrl") return LearnerKind::Oftrl;
  if (name == "bm") return LearnerKind::BlumMansour;
  throw ConfigError("learner.kind", "unknown learner '" + name + "'");
}

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::Pomwu: return "pomwu";
    case LearnerKind::Omwu: return "omwu";
    case LearnerKind::Omd: return "omd";
    case LearnerKind::Oftrl: return "oftrl";
    case LearnerKind::BlumMansour: return "bm";
  }
  return "unknown";
}

std::unique_ptr<Learner> make_learner(LearnerKind kind, std::shared_ptr<const ContextSpace> contexts,
                                      std::size_t actions, double eta) {
  switch (kind) {
    case LearnerKind::Pomwu: return std::make_unique<Pomwu>(std::move(contexts), actions, eta);
    case LearnerKind::Omwu: return std::make_unique<Omwu>(std::move(contexts), actions, eta);
    case LearnerKind::Omd: return std::make_unique<Omd>(std::move(contexts), actions, eta);
    case LearnerKind::Oftrl: return std::make_unique<Oftrl>(std::move(contexts), actions, eta);
    case LearnerKind::BlumMansour:
      return std::make_unique<BlumMansour>(std::move(contexts), actions, eta);
  }
  throw Error("unknown learner kind");
}

double eta_individual(double multiplier, std::size_t agents, std::size_t horizon,
                      std::size_t actions, double l_bar, std::size_t contexts) {
  const double eta = multiplier / std::sqrt(static_cast<double>(agents)) /
                     std::pow(static_cast<double>(horizon), 0.25) *
                     std::pow(std::log(static_cast<double>(actions)) *
                                  (l_bar + static_cast<double>(contexts)),
                              0.25);
  check_eta(eta);
  return eta;
}

double eta_sum_regret(std::size_t agents) {
  if (agents < 2) throw ConfigError("learner.eta_preset", "sum_regret preset requires J >= 2");
  return 1.0 / (4.0 * static_cast<double>(agents - 1));
}

double eta_robust(double multiplier, std::size_t actions, double l_bar, std::size_t contexts,
                  std::size_t horizon) {
  const double eta = multiplier * std::sqrt(std::log(static_cast<double>(actions)) *
                                            (l_bar + static_cast<double>(contexts)) /
                                            (l_bar + static_cast<double>(horizon)));
  check_eta(eta);
  return eta;
}

}  // namespace ctxgames
