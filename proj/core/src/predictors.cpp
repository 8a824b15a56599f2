#include "ctxgames/predictors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "ctxgames/learners.hpp"

namespace ctxgames {

ContextIndex oracle_predict(ContextIndex truth) { return truth; }

ContextIndex noisy_predict(ContextIndex truth, double epsilon, std::size_t contexts, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw Error("noisy predictor error rate must lie in [0, 1]");
  if (truth >= contexts) throw DimensionError("true context index out of range");
  if (epsilon == 0.0) return truth;
  if (contexts < 2) throw Error("noisy predictor with positive error rate needs m >= 2");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) >= epsilon) return truth;
  std::uniform_int_distribution<std::size_t> pick(0, contexts - 2);
  const std::size_t r = pick(rng);
  return r >= truth ? r + 1 : r;
}

LogisticModel::LogisticModel(std::size_t contexts, std::size_t features, double alpha0)
    : beta_(contexts, features), alpha0_(alpha0) {
  if (contexts == 0 || features == 0)
    throw DimensionError("logistic model needs m >= 1 and b >= 1");
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) throw Error("logistic step size must be positive");
}

void LogisticModel::set_beta(Matrix beta) {
  if (beta.rows() != beta_.rows() || beta.cols() != beta_.cols())
    throw DimensionError("coefficient matrix shape mismatch");
  for (double v : beta.data())
    if (!std::isfinite(v)) throw Error("coefficients must be finite");
  beta_ = std::move(beta);
}

void LogisticModel::check_input(std::span<const double> x) const {
  if (x.size() != features())
    throw DimensionError("covariate vector has length " + std::to_string(x.size()) +
                         ", model expects " + std::to_string(features()));
  for (double v : x)
    if (!std::isfinite(v)) throw Error("covariates must be finite");
}

std::vector<double> LogisticModel::probabilities(std::span<const double> x) const {
  check_input(x);
  std::vector<double> s(contexts());
  for (std::size_t c = 0; c < contexts(); ++c) {
    double v = 0.0;
    for (std::size_t i = 0; i < features(); ++i) v += beta_(c, i) * x[i];
    s[c] = v;
  }
  const double top = *std::max_element(s.begin(), s.end());
  double sum = 0.0;
  for (double& v : s) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : s) v /= sum;
  return s;
}

ContextIndex LogisticModel::predict(std::span<const double> x) const {
  check_input(x);
  ContextIndex best = 0;
  double best_score = 0.0;
  for (std::size_t c = 0; c < contexts(); ++c) {
    double v = 0.0;
    for (std::size_t i = 0; i < features(); ++i) v += beta_(c, i) * x[i];
    if (c == 0 || v > best_score) {
      best = c;
      best_score = v;
    }
  }
  return best;
}

double LogisticModel::loss(std::span<const double> x, ContextIndex truth) const {
  if (truth >= contexts()) throw DimensionError("label out of range");
  check_input(x);
  std::vector<double> s(contexts());
  for (std::size_t c = 0; c < contexts(); ++c) {
    double v = 0.0;
    for (std::size_t i = 0; i < features(); ++i) v += beta_(c, i) * x[i];
    s[c] = v;
  }
  const double top = *std::max_element(s.begin(), s.end());
  double acc = 0.0;
  for (double v : s) acc += std::exp(v - top);
  return top + std::log(acc) - s[truth];
}

Matrix LogisticModel::gradient(std::span<const double> x, ContextIndex truth) const {
  if (truth >= contexts()) throw DimensionError("label out of range");
  const auto p = probabilities(x);
  Matrix g(contexts(), features());
  for (std::size_t c = 0; c < contexts(); ++c) {
    const double r = p[c] - (c == truth ? 1.0 : 0.0);
    for (std::size_t i = 0; i < features(); ++i) g(c, i) = r * x[i];
  }
  return g;
}

void LogisticModel::step(std::span<const double> x, ContextIndex truth, double alpha) {
  const Matrix g = gradient(x, truth);
  for (std::size_t c = 0; c < contexts(); ++c)
    for (std::size_t i = 0; i < features(); ++i) beta_(c, i) -= alpha * g(c, i);
}

void LogisticModel::update(std::span<const double> x, ContextIndex truth) {
  ++updates_;
  step(x, truth, alpha0_ / std::sqrt(static_cast<double>(updates_)));
}

FiniteHypothesisClass::FiniteHypothesisClass(std::size_t domain, std::size_t contexts,
                                             std::vector<std::vector<ContextIndex>> labels)
    : domain_(domain), contexts_(contexts), labels_(std::move(labels)) {
  if (labels_.empty()) throw Error("hypothesis class must be nonempty");
  if (domain_ == 0 || contexts_ == 0) throw DimensionError("domain and label set must be nonempty");
  for (std::size_t h = 0; h < labels_.size(); ++h) {
    if (labels_[h].size() != domain_)
      throw DimensionError("hypothesis " + std::to_string(h) + " is not total on the domain");
    for (ContextIndex z : labels_[h])
      if (z >= contexts_)
        throw DimensionError("hypothesis " + std::to_string(h) + " has an out-of-range label");
  }
}

LittlestoneOracle::LittlestoneOracle(const FiniteHypothesisClass& cls) : cls_(&cls) {
  if (cls.size() > kMaxHypotheses || cls.domain() > kMaxDomain)
    throw GuardError("Littlestone dimension limited to " + std::to_string(kMaxHypotheses) +
                     " hypotheses over " + std::to_string(kMaxDomain) + " points");
  full_ = cls.size() == 32 ? ~0u : ((1u << cls.size()) - 1u);
}

std::uint32_t LittlestoneOracle::restrict(std::uint32_t version_space, std::size_t x,
                                          ContextIndex label) const {
  std::uint32_t out = 0;
  for (std::size_t h = 0; h < cls_->size(); ++h)
    if ((version_space >> h & 1u) && cls_->label(h, x) == label) out |= 1u << h;
  return out;
}

int LittlestoneOracle::dimension(std::uint32_t version_space) {
  if (version_space == 0) return -1;
  if (std::popcount(version_space) == 1) return 0;
  if (auto it = memo_.find(version_space); it != memo_.end()) return it->second;
  int best = 0;
  std::vector<int> dims;
  for (std::size_t x = 0; x < cls_->domain(); ++x) {
    dims.clear();
    for (ContextIndex z = 0; z < cls_->contexts(); ++z) {
      const std::uint32_t part = restrict(version_space, x, z);
      if (part != 0 && part != version_space) dims.push_back(dimension(part));
    }
    if (dims.size() < 2) continue;
    std::partial_sort(dims.begin(), dims.begin() + 2, dims.end(), std::greater<>());
    best = std::max(best, 1 + dims[1]);
  }
  memo_.emplace(version_space, best);
  return best;
}

int littlestone_dim(const FiniteHypothesisClass& cls) {
  LittlestoneOracle oracle(cls);
  return oracle.dimension(oracle.full());
}

Soa::Soa(const FiniteHypothesisClass& cls) : cls_(&cls), oracle_(cls), version_(oracle_.full()) {}

ContextIndex Soa::predict(std::size_t x) {
  if (x >= cls_->domain()) throw DimensionError("domain point out of range");
  ContextIndex best = 0;
  int best_dim = -2;
  for (ContextIndex z = 0; z < cls_->contexts(); ++z) {
    const int d = oracle_.dimension(oracle_.restrict(version_, x, z));
    if (d > best_dim) {
      best = z;
      best_dim = d;
    }
  }
  return best;
}

void Soa::update(std::size_t x, ContextIndex truth) {
  if (x >= cls_->domain()) throw DimensionError("domain point out of range");
  const std::uint32_t next = oracle_.restrict(version_, x, truth);
  if (next == 0) throw Error("non-realizable stream: version space is empty");
  version_ = next;
}

std::size_t Soa::version_space_size() const { return static_cast<std::size_t>(std::popcount(version_)); }

ExpertHedge::ExpertHedge(std::size_t experts, double eta)
    : eta_(eta), losses_(experts, 0.0) {
  if (experts == 0) throw Error("expert aggregation needs at least one expert");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw Error("expert learning rate must be nonnegative");
  weights_ = Strategy::uniform(experts);
}

double ExpertHedge::default_eta(std::size_t experts, std::size_t horizon) {
  if (horizon == 0) throw Error("horizon must be positive");
  return std::sqrt(8.0 * std::log(static_cast<double>(experts)) / static_cast<double>(horizon));
}

ContextIndex ExpertHedge::predict(std::span<const ContextIndex> advice, Rng& rng) {
  if (advice.size() != losses_.size())
    throw DimensionError("got " + std::to_string(advice.size()) + " advices for " +
                         std::to_string(losses_.size()) + " experts");
  last_advice_.assign(advice.begin(), advice.end());
  std::discrete_distribution<std::size_t> pick(weights_.weights().begin(), weights_.weights().end());
  return advice[pick(rng)];
}

void ExpertHedge::update(ContextIndex truth) {
  if (last_advice_.size() != losses_.size()) throw Error("expert update called before predict");
  for (std::size_t i = 0; i < losses_.size(); ++i)
    if (last_advice_[i] != truth) losses_[i] += 1.0;
  const std::vector<double> ones(losses_.size(), 1.0);
  weights_ = exp_weights(ones, losses_, eta_);
  last_advice_.clear();
}

NoisyPredictor::NoisyPredictor(double epsilon, std::size_t contexts)
    : epsilon_(epsilon), contexts_(contexts) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw ConfigError("predictor.epsilon", "must lie in [0, 1]");
  if (epsilon > 0.0 && contexts < 2)
    throw ConfigError("predictor.epsilon", "positive error rate needs m >= 2");
}

ContextIndex NoisyPredictor::predict(const PredictionInput& in, Rng& rng) {
  return noisy_predict(in.truth, epsilon_, contexts_, rng);
}

LogisticPredictor::LogisticPredictor(std::size_t contexts, std::size_t features, double alpha0)
    : model_(contexts, features, alpha0) {}

ContextIndex LogisticPredictor::predict(const PredictionInput& in, Rng&) {
  return model_.predict(in.covariates);
}

void LogisticPredictor::update(std::span<const double> covariates, ContextIndex truth) {
  model_.update(covariates, truth);
}

HedgePredictor::HedgePredictor(std::vector<std::unique_ptr<Predictor>> experts, double eta)
    : experts_(std::move(experts)), hedge_(experts_.size(), eta) {}

HedgePredictor::HedgePredictor(const HedgePredictor& other) : hedge_(other.hedge_) {
  experts_.reserve(other.experts_.size());
  for (const auto& e : other.experts_) experts_.push_back(e->clone());
}

ContextIndex HedgePredictor::predict(const PredictionInput& in, Rng& rng) {
  std::vector<ContextIndex> advice;
  advice.reserve(experts_.size());
  for (auto& e : experts_) advice.push_back(e->predict(in, rng));
  return hedge_.predict(advice, rng);
}

void HedgePredictor::update(std::span<const double> covariates, ContextIndex truth) {
  hedge_.update(truth);
  for (auto& e : experts_) e->update(covariates, truth);
}

}  // namespace ctxgames
