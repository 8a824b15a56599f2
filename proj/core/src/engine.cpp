#include "ctxgames/engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace ctxgames {

LogisticCovariate random_logistic_process(std::size_t contexts, std::size_t features, Rng& rng) {
  if (contexts == 0 || features == 0) throw DimensionError("logistic process needs m, b >= 1");
  LogisticCovariate p;
  std::uniform_real_distribution<double> u(1.0, 4.0);
  p.mean.resize(features);
  for (double& v : p.mean) v = u(rng);
  std::normal_distribution<double> n(0.0, std::sqrt(5.0));
  p.beta_star = Matrix(contexts, features);
  for (double& v : p.beta_star.data()) v = n(rng);
  p.variance = 5.0;
  return p;
}

std::size_t covariate_dim(const ContextProcess& process) {
  if (const auto* l = std::get_if<LogisticCovariate>(&process)) return l->mean.size();
  return 0;
}

ContextSampler::ContextSampler(ContextProcess process, std::size_t contexts, Rng rng)
    : process_(std::move(process)), contexts_(contexts), rng_(rng) {
  if (const auto* d = std::get_if<DeterministicSequence>(&process_)) {
    if (d->sequence.empty()) throw ConfigError("process.sequence", "must not be empty");
    for (ContextIndex z : d->sequence)
      if (z >= contexts_) throw ConfigError("process.sequence", "context index out of range");
  } else if (const auto* c = std::get_if<IidCategorical>(&process_)) {
    if (c->probabilities.size() != contexts_)
      throw ConfigError("process.probabilities", "needs one probability per context");
    double s = 0.0;
    for (double p : c->probabilities) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw ConfigError("process.probabilities", "entries must be finite and nonnegative");
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-9) throw ConfigError("process.probabilities", "must sum to 1");
  } else {
    const auto& l = std::get<LogisticCovariate>(process_);
    if (l.beta_star.rows() != contexts_ || l.beta_star.cols() != l.mean.size() || l.mean.empty())
      throw ConfigError("process.beta_star", "must be m x b with b = covariate dimension");
    if (!(l.variance > 0.0)) throw ConfigError("process.variance", "must be positive");
  }
}

ContextDraw ContextSampler::next() {
  ContextDraw d;
  const std::size_t t = round_++;
  if (const auto* s = std::get_if<DeterministicSequence>(&process_)) {
    d.context = s->sequence[t % s->sequence.size()];
  } else if (const auto* c = std::get_if<IidCategorical>(&process_)) {
    std::discrete_distribution<std::size_t> pick(c->probabilities.begin(), c->probabilities.end());
    d.context = pick(rng_);
  } else {
    const auto& l = std::get<LogisticCovariate>(process_);
    const std::size_t b = l.mean.size();
    std::normal_distribution<double> n(0.0, std::sqrt(l.variance));
    d.covariates.resize(b);
    for (std::size_t i = 0; i < b; ++i) d.covariates[i] = l.mean[i] + n(rng_);
    std::vector<double> score(contexts_);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t z = 0; z < contexts_; ++z) {
      double v = 0.0;
      for (std::size_t i = 0; i < b; ++i) v += l.beta_star(z, i) * d.covariates[i];
      score[z] = v;
      top = std::max(top, v);
    }
    for (double& v : score) v = std::exp(v - top);
    std::discrete_distribution<std::size_t> pick(score.begin(), score.end());
    d.context = pick(rng_);
  }
  return d;
}

PredictorKind parse_predictor_kind(const std::string& name) {
  if (name == "oracle") return PredictorKind::Oracle;
  if (name == "noisy") return PredictorKind::Noisy;
  if (name == "logistic") return PredictorKind::Logistic;
  if (name == "expert_hedge") return PredictorKind::ExpertHedge;
  throw ConfigError("predictor.kind", "unknown predictor '" + name + "'");
}

std::string to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::Oracle: return "oracle";
    case PredictorKind::Noisy: return "noisy";
    case PredictorKind::Logistic: return "logistic";
    case PredictorKind::ExpertHedge: return "expert_hedge";
  }
  return "unknown";
}

std::unique_ptr<Predictor> make_predictor(const PredictorSpec& spec, std::size_t contexts,
                                          std::size_t features, std::size_t horizon) {
  switch (spec.kind) {
    case PredictorKind::Oracle: return std::make_unique<OraclePredictor>();
    case PredictorKind::Noisy: return std::make_unique<NoisyPredictor>(spec.epsilon, contexts);
    case PredictorKind::Logistic:
      if (features == 0)
        throw ConfigError("predictor.kind", "logistic predictor needs a logistic covariate process");
      return std::make_unique<LogisticPredictor>(contexts, features, spec.alpha0);
    case PredictorKind::ExpertHedge: {
      if (spec.experts.empty()) throw ConfigError("predictor.experts", "must not be empty");
      std::vector<std::unique_ptr<Predictor>> experts;
      for (const auto& e : spec.experts) experts.push_back(make_predictor(e, contexts, features, horizon));
      const double eta = spec.expert_eta ? *spec.expert_eta
                                         : ExpertHedge::default_eta(experts.size(), horizon);
      return std::make_unique<HedgePredictor>(std::move(experts), eta);
    }
  }
  throw Error("unknown predictor kind");
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min(threads, n);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = n * w / workers;
      const std::size_t hi = n * (w + 1) / workers;
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Trace run_simulation(const SimulationSpec& spec) {
  if (!spec.game || !spec.contexts) throw ConfigError("game", "simulation needs a game and contexts");
  const Game& game = *spec.game;
  const std::size_t jn = game.agents();
  const std::size_t k = game.actions();
  const std::size_t m = spec.contexts->size();
  if (spec.contexts->dim() != game.dim())
    throw DimensionError("context dimension " + std::to_string(spec.contexts->dim()) +
                         " does not match game dimension " + std::to_string(game.dim()));
  if (spec.agents.size() != jn)
    throw ConfigError("agents", "need exactly one learner/predictor setup per agent (J=" +
                                    std::to_string(jn) + ")");
  if (spec.horizon == 0) throw ConfigError("run.T", "must be >= 1");

  const std::size_t features = covariate_dim(spec.process);
  ContextSampler sampler(spec.process, m, make_rng(spec.seed, "process", 0));

  std::vector<std::unique_ptr<Learner>> learners;
  std::vector<std::unique_ptr<Predictor>> predictors;
  std::vector<Rng> predictor_rngs;
  std::vector<Rng> covariate_rngs;
  bool any_bm = false;
  for (AgentIndex j = 0; j < jn; ++j) {
    const AgentSetup& a = spec.agents[j];
    learners.push_back(make_learner(a.learner, spec.contexts, k, a.eta));
    any_bm = any_bm || a.learner == LearnerKind::BlumMansour;
    if (!spec.shared_predictions) {
      predictors.push_back(make_predictor(a.predictor, m, features, spec.horizon));
      predictor_rngs.push_back(make_rng(spec.seed, "predictor", j));
    }
    covariate_rngs.push_back(make_rng(spec.seed, "covariates", j));
  }
  if (spec.shared_predictions) {
    predictors.push_back(make_predictor(spec.agents.front().predictor, m, features, spec.horizon));
    predictor_rngs.push_back(make_rng(spec.seed, "shared_predictor", 0));
  }

  Trace trace(spec.contexts, jn, k, spec.keep_cost_matrices, any_bm);
  trace.reserve(spec.horizon);
  RunMetadata& meta = trace.metadata();
  meta.seed = spec.seed;
  meta.eta_preset = spec.eta_preset;
  meta.normalization_factor = game.normalization_factor();
  meta.shared_predictions = spec.shared_predictions;
  for (AgentIndex j = 0; j < jn; ++j) {
    meta.learners.push_back(learners[j]->kind());
    meta.etas.push_back(learners[j]->eta());
  }

  std::vector<ContextIndex> predicted(jn);
  std::vector<Strategy> strategies(jn);
  std::vector<Matrix> recs(any_bm ? jn : 0, Matrix(k, k));
  std::vector<double> residuals(any_bm ? jn : 0, 0.0);
  std::vector<std::vector<double>> private_x(jn);

  for (std::size_t t = 0; t < spec.horizon; ++t) {
    try {
      const ContextDraw draw = sampler.next();
      const auto covariates_of = [&](AgentIndex j) -> std::span<const double> {
        return spec.shared_covariates ? std::span<const double>(draw.covariates)
                                      : std::span<const double>(private_x[j]);
      };
      if (!spec.shared_covariates && features > 0) {
        std::normal_distribution<double> n(0.0, spec.covariate_noise);
        for (AgentIndex j = 0; j < jn; ++j) {
          private_x[j] = draw.covariates;
          for (double& v : private_x[j]) v += n(covariate_rngs[j]);
        }
      }

      // Predict and act. Learners only see round-t information through their
      // own prediction; feedback arrives after every agent has acted.
      if (spec.shared_predictions) {
        const ContextIndex p = predictors[0]->predict({covariates_of(0), draw.context}, predictor_rngs[0]);
        std::fill(predicted.begin(), predicted.end(), p);
      }
      parallel_for(jn, spec.threads, [&](std::size_t j) {
        if (!spec.shared_predictions)
          predicted[j] = predictors[j]->predict({covariates_of(j), draw.context}, predictor_rngs[j]);
        strategies[j] = learners[j]->act(predicted[j]);
        if (any_bm) {
          if (auto* bm = dynamic_cast<BlumMansour*>(learners[j].get())) {
            recs[j] = bm->last_recommendations();
            residuals[j] = bm->last_residual();
          }
        }
      });

      const JointProfile profile(strategies);
      const auto phis = game.cost_matrices(profile);

      parallel_for(jn, spec.threads, [&](std::size_t j) {
        learners[j]->update(draw.context, phis[j]);
        if (!spec.shared_predictions) predictors[j]->update(covariates_of(j), draw.context);
      });
      if (spec.shared_predictions) predictors[0]->update(covariates_of(0), draw.context);

      trace.append(draw.context, predicted, strategies, phis, recs, residuals);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw Error("round " + std::to_string(t + 1) + ": " + e.what());
    }
  }
  return trace;
}

}  // namespace ctxgames
