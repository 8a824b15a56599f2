#pragma once

// Play algorithms. Every learner follows the same two-call round protocol:
// act(predicted) returns this round's strategy without touching state, then
// update(realized, phi) ingests the full-information feedback.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ctxgames/core.hpp"

namespace ctxgames {

class Learner {
 public:
  virtual ~Learner() = default;

  virtual Strategy act(ContextIndex predicted) = 0;
  virtual void update(ContextIndex realized, const CostMatrix& phi) = 0;

  virtual std::string kind() const = 0;
  virtual double eta() const = 0;
  virtual std::unique_ptr<Learner> clone() const = 0;
};

/// Numerically stable softmax of log_base - eta * costs, the closed form of
/// every entropy-regularized step in this module.
Strategy exp_weights(std::span<const double> base, std::span<const double> costs, double eta);

/// Predictive optimistic multiplicative weights: one (rho, Psi) table per context.
class Pomwu final : public Learner {
 public:
  Pomwu(std::shared_ptr<const ContextSpace> contexts, std::size_t actions, double eta);

  Strategy act(ContextIndex predicted) override;
  void update(ContextIndex realized, const CostMatrix& phi) override;
  std::string kind() const override { return "pomwu"; }
  double eta() const override { return eta_; }
  std::unique_ptr<Learner> clone() const override { return std::make_unique<Pomwu>(*this); }

  const Strategy& rho(ContextIndex z) const { return rho_.at(z); }
  const CostMatrix& psi(ContextIndex z) const { return psi_.at(z); }
  const ContextSpace& contexts() const { return *contexts_; }

 private:
  std::shared_ptr<const ContextSpace> contexts_;
  std::size_t actions_;
  double eta_;
  std::vector<Strategy> rho_;
  std::vector<CostMatrix> psi_;
};

/// Context-blind optimistic multiplicative weights. The optimism term is the
/// last realized per-action loss vector; predictions are ignored.
class Omwu final : public Learner {
 public:
  Omwu(std::shared_ptr<const ContextSpace> contexts, std::size_t actions, double eta);

  Strategy act(ContextIndex predicted) override;
  void update(ContextIndex realized, const CostMatrix& phi) override;
  std::string kind() const override { return "omwu"; }
  double eta() const override { return eta_; }
  std::unique_ptr<Learner> clone() const override { return std::make_unique<Omwu>(*this); }

  const Strategy& rho() const { return rho_; }

 private:
  std::shared_ptr<const ContextSpace> contexts_;
  double eta_;
  Strategy rho_;
  std::vector<double> last_loss_;
};

/// Optimistic mirror descent with the entropy regularizer, written through the
/// mirror map (grad R = log + 1) and a KL projection onto the simplex.
/// Equivalence oracle for Pomwu.
class Omd final : public Learner {
 public:
  Omd(std::shared_ptr<const ContextSpace> contexts, std::size_t actions, double eta);

  Strategy act(ContextIndex predicted) override;
  void update(ContextIndex realized, const CostMatrix& phi) override;
  std::string kind() const override { return "omd"; }
  double eta() const override { return eta_; }
  std::unique_ptr<Learner> clone() const override { return std::make_unique<Omd>(*this); }

 private:
  std::vector<double> mirror_step(const std::vector<double>& center,
                                  std::span<const double> gradient) const;

  std::shared_ptr<const ContextSpace> contexts_;
  double eta_;
  std::vector<std::vector<double>> center_;
  std::vector<CostMatrix> hint_;
};

/// Optimistic follow-the-regularized-leader over the context-filtered
/// cumulative loss. Equivalence oracle for Pomwu.
class Oftrl final : public Learner {
 public:
  Oftrl(std::shared_ptr<const ContextSpace> contexts, std::size_t actions, double eta);

  Strategy act(ContextIndex predicted) override;
  void update(ContextIndex realized, const CostMatrix& phi) override;
  std::string kind() const override { return "oftrl"; }
  double eta() const override { return eta_; }
  std::unique_ptr<Learner> clone() const override { return std::make_unique<Oftrl>(*this); }

 private:
  std::shared_ptr<const ContextSpace> contexts_;
  double eta_;
  std::vector<std::vector<double>> cumulative_;
  std::vector<CostMatrix> hint_;
};

struct StationaryResult {
  Strategy w;
  double residual;
  std::size_t iterations;
};

/// Fixed point of a column-stochastic matrix by damped power iteration on
/// (P + I) / 2 started from uniform. Once `tolerance` is met the iteration
/// keeps going while the residual still shrinks, so callers get the most
/// accurate fixed point the chain reaches within `max_iterations`.
StationaryResult stationary_distribution(const Matrix& p, double tolerance = 1e-10,
                                         std::size_t max_iterations = 100'000);

/// Blum-Mansour swap-regret wrapper around K inner Pomwu copies.
class BlumMansour final : public Learner {
 public:
  BlumMansour(std::shared_ptr<const ContextSpace> contexts, std::size_t actions, double eta);

  Strategy act(ContextIndex predicted) override;
  void update(ContextIndex realized, const CostMatrix& phi) override;
  std::string kind() const override { return "bm"; }
  double eta() const override { return eta_; }
  std::unique_ptr<Learner> clone() const override {
    return std::make_unique<BlumMansour>(*this);
  }

  std::size_t actions() const noexcept { return inner_.size(); }
  const Pomwu& inner(ActionIndex k) const { return inner_.at(k); }
  /// Recommendation matrix of the last act (column k = inner learner k's strategy).
  const Matrix& last_recommendations() const { return p_; }
  double last_residual() const noexcept { return residual_; }

 private:
  double eta_;
  std::vector<Pomwu> inner_;
  Matrix p_;
  std::optional<Strategy> pending_;
  double residual_ = 0.0;
};

enum class LearnerKind { Pomwu, Omwu, Omd, Oftrl, BlumMansour };

LearnerKind parse_learner_kind(const std::string& name);
std::string to_string(LearnerKind kind);
std::unique_ptr<Learner> make_learner(LearnerKind kind, std::shared_ptr<const ContextSpace> contexts,
                                      std::size_t actions, double eta);

/// Named learning-rate presets. `multiplier` is the unknown constant inside
/// the asymptotic rate.
double eta_individual(double multiplier, std::size_t agents, std::size_t horizon,
                      std::size_t actions, double l_bar, std::size_t contexts);
double eta_sum_regret(std::size_t agents);
double eta_robust(double multiplier, std::size_t actions, double l_bar, std::size_t contexts,
                  std::size_t horizon);

}  // namespace ctxgames
