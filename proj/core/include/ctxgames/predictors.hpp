#pragma once

// Online predictors of the state of nature.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctxgames/core.hpp"
#include "ctxgames/rng.hpp"

namespace ctxgames {

ContextIndex oracle_predict(ContextIndex truth);

/// Returns `truth` with probability 1 - epsilon, otherwise a uniformly chosen
/// other context.
ContextIndex noisy_predict(ContextIndex truth, double epsilon, std::size_t contexts, Rng& rng);

/// Online multinomial logistic regression, one coefficient vector per context.
class LogisticModel {
 public:
  /// Step size at update t (1-based) is alpha0 / sqrt(t).
  LogisticModel(std::size_t contexts, std::size_t features, double alpha0 = 0.1);

  std::size_t contexts() const noexcept { return beta_.rows(); }
  std::size_t features() const noexcept { return beta_.cols(); }
  std::size_t updates() const noexcept { return updates_; }
  double alpha0() const noexcept { return alpha0_; }
  const Matrix& beta() const noexcept { return beta_; }
  void set_beta(Matrix beta);

  std::vector<double> probabilities(std::span<const double> x) const;
  /// argmax of the softmax score, ties to the lowest index.
  ContextIndex predict(std::span<const double> x) const;
  /// Cross-entropy -log p_z(x).
  double loss(std::span<const double> x, ContextIndex truth) const;
  /// d loss / d beta, same shape as beta.
  Matrix gradient(std::span<const double> x, ContextIndex truth) const;
  /// One SGD step with the scheduled step size.
  void update(std::span<const double> x, ContextIndex truth);
  /// One SGD step with an explicit step size (does not advance the schedule).
  void step(std::span<const double> x, ContextIndex truth, double alpha);

 private:
  void check_input(std::span<const double> x) const;

  Matrix beta_;
  double alpha0_;
  std::size_t updates_ = 0;
};

/// Finite class of hypotheses over a finite domain {0..n-1}. Hypothesis h maps
/// domain point x to context index labels[h][x].
class FiniteHypothesisClass {
 public:
  FiniteHypothesisClass(std::size_t domain, std::size_t contexts,
                        std::vector<std::vector<ContextIndex>> labels);

  std::size_t domain() const noexcept { return domain_; }
  std::size_t contexts() const noexcept { return contexts_; }
  std::size_t size() const noexcept { return labels_.size(); }
  ContextIndex label(std::size_t hypothesis, std::size_t x) const { return labels_[hypothesis][x]; }

 private:
  std::size_t domain_;
  std::size_t contexts_;
  std::vector<std::vector<ContextIndex>> labels_;
};

/// Exact multiclass Littlestone dimension over version spaces encoded as
/// bitmasks of hypothesis indices. Guarded to |class| <= 20, |domain| <= 12.
class LittlestoneOracle {
 public:
  static constexpr std::size_t kMaxHypotheses = 20;
  static constexpr std::size_t kMaxDomain = 12;

  explicit LittlestoneOracle(const FiniteHypothesisClass& cls);

  /// Dimension of a version space; -1 for the empty set.
  int dimension(std::uint32_t version_space);
  std::uint32_t full() const noexcept { return full_; }
  std::uint32_t restrict(std::uint32_t version_space, std::size_t x, ContextIndex label) const;

 private:
  const FiniteHypothesisClass* cls_;
  std::uint32_t full_;
  std::unordered_map<std::uint32_t, int> memo_;
};

int littlestone_dim(const FiniteHypothesisClass& cls);

/// Standard optimal algorithm for realizable online multiclass prediction.
class Soa {
 public:
  explicit Soa(const FiniteHypothesisClass& cls);

  ContextIndex predict(std::size_t x);
  void update(std::size_t x, ContextIndex truth);
  std::size_t version_space_size() const;

 private:
  const FiniteHypothesisClass* cls_;
  LittlestoneOracle oracle_;
  std::uint32_t version_;
};

/// Exponential-weights aggregation over a fixed list of experts' advice.
class ExpertHedge {
 public:
  ExpertHedge(std::size_t experts, double eta);

  /// Rate sqrt(8 ln N / T).
  static double default_eta(std::size_t experts, std::size_t horizon);

  std::size_t experts() const noexcept { return losses_.size(); }
  double eta() const noexcept { return eta_; }
  const Strategy& weights() const noexcept { return weights_; }
  std::span<const double> losses() const noexcept { return losses_; }

  ContextIndex predict(std::span<const ContextIndex> advice, Rng& rng);
  void update(ContextIndex truth);

 private:
  double eta_;
  std::vector<double> losses_;
  Strategy weights_;
  std::vector<ContextIndex> last_advice_;
};

/// What a predictor may look at when forecasting round t. The true context is
/// present only so that the oracle and noisy simulation devices can work.
struct PredictionInput {
  std::span<const double> covariates;
  ContextIndex truth;
};

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual ContextIndex predict(const PredictionInput& in, Rng& rng) = 0;
  virtual void update(std::span<const double> covariates, ContextIndex truth) = 0;
  virtual std::string kind() const = 0;
  virtual std::unique_ptr<Predictor> clone() const = 0;
};

class OraclePredictor final : public Predictor {
 public:
  ContextIndex predict(const PredictionInput& in, Rng&) override { return oracle_predict(in.truth); }
  void update(std::span<const double>, ContextIndex) override {}
  std::string kind() const override { return "oracle"; }
  std::unique_ptr<Predictor> clone() const override { return std::make_unique<OraclePredictor>(*this); }
};

class NoisyPredictor final : public Predictor {
 public:
  NoisyPredictor(double epsilon, std::size_t contexts);
  ContextIndex predict(const PredictionInput& in, Rng& rng) override;
  void update(std::span<const double>, ContextIndex) override {}
  std::string kind() const override { return "noisy"; }
  std::unique_ptr<Predictor> clone() const override { return std::make_unique<NoisyPredictor>(*this); }

 private:
  double epsilon_;
  std::size_t contexts_;
};

class LogisticPredictor final : public Predictor {
 public:
  LogisticPredictor(std::size_t contexts, std::size_t features, double alpha0);
  ContextIndex predict(const PredictionInput& in, Rng& rng) override;
  void update(std::span<const double> covariates, ContextIndex truth) override;
  std::string kind() const override { return "logistic"; }
  std::unique_ptr<Predictor> clone() const override {
    return std::make_unique<LogisticPredictor>(*this);
  }
  const LogisticModel& model() const noexcept { return model_; }

 private:
  LogisticModel model_;
};

class HedgePredictor final : public Predictor {
 public:
  HedgePredictor(std::vector<std::unique_ptr<Predictor>> experts, double eta);
  HedgePredictor(const HedgePredictor& other);

  ContextIndex predict(const PredictionInput& in, Rng& rng) override;
  void update(std::span<const double> covariates, ContextIndex truth) override;
  std::string kind() const override { return "expert_hedge"; }
  std::unique_ptr<Predictor> clone() const override {
    return std::make_unique<HedgePredictor>(*this);
  }
  const ExpertHedge& hedge() const noexcept { return hedge_; }

 private:
  std::vector<std::unique_ptr<Predictor>> experts_;
  ExpertHedge hedge_;
};

}  // namespace ctxgames
