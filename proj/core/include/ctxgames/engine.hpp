#pragma once

// Round-by-round driver: context draw, predictions, play, full-information
// feedback and updates, recorded into a Trace.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ctxgames/core.hpp"
#include "ctxgames/learners.hpp"
#include "ctxgames/predictors.hpp"
#include "ctxgames/rng.hpp"
#include "ctxgames/trace.hpp"

namespace ctxgames {

/// Explicit context indices, cycled when shorter than the horizon.
struct DeterministicSequence {
  std::vector<ContextIndex> sequence;
};

struct IidCategorical {
  std::vector<double> probabilities;
};

/// X_t ~ N(mean, variance * I_b) and P(Z_t = z | X_t) = softmax_z(beta*_z . X_t).
struct LogisticCovariate {
  Matrix beta_star;  // m x b
  std::vector<double> mean;
  double variance = 5.0;
};

using ContextProcess = std::variant<DeterministicSequence, IidCategorical, LogisticCovariate>;

/// Random logistic process: mean ~ U[1, 4]^b, beta* entries ~ N(0, 5).
LogisticCovariate random_logistic_process(std::size_t contexts, std::size_t features, Rng& rng);

/// Number of covariates a process emits (0 for the covariate-free ones).
std::size_t covariate_dim(const ContextProcess& process);

struct ContextDraw {
  std::vector<double> covariates;
  ContextIndex context;
};

class ContextSampler {
 public:
  ContextSampler(ContextProcess process, std::size_t contexts, Rng rng);
  ContextDraw next();

 private:
  ContextProcess process_;
  std::size_t contexts_;
  Rng rng_;
  std::size_t round_ = 0;
};

enum class PredictorKind { Oracle, Noisy, Logistic, ExpertHedge };

PredictorKind parse_predictor_kind(const std::string& name);
std::string to_string(PredictorKind kind);

struct PredictorSpec {
  PredictorKind kind = PredictorKind::Oracle;
  double epsilon = 0.0;                // noisy
  double alpha0 = 0.1;                 // logistic
  std::vector<PredictorSpec> experts;  // expert_hedge
  std::optional<double> expert_eta;    // expert_hedge; default sqrt(8 ln N / T)
};

std::unique_ptr<Predictor> make_predictor(const PredictorSpec& spec, std::size_t contexts,
                                          std::size_t features, std::size_t horizon);

struct AgentSetup {
  LearnerKind learner = LearnerKind::Pomwu;
  double eta = 0.1;
  PredictorSpec predictor;
};

struct SimulationSpec {
  std::shared_ptr<const Game> game;
  std::shared_ptr<const ContextSpace> contexts;
  ContextProcess process = DeterministicSequence{{0}};
  std::vector<AgentSetup> agents;
  std::size_t horizon = 1;
  std::uint64_t seed = 0;
  /// One predictor (agent 0's spec) queried once per round and broadcast.
  bool shared_predictions = false;
  /// When false each agent sees X_t plus its own N(0, covariate_noise^2 I) perturbation.
  bool shared_covariates = true;
  double covariate_noise = 1.0;
  bool keep_cost_matrices = true;
  std::size_t threads = 1;
  std::string eta_preset;
};

Trace run_simulation(const SimulationSpec& spec);

/// Runs fn(i) for i in [0, n) on up to `threads` threads with a static
/// partition. fn must only touch state owned by index i.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace ctxgames
