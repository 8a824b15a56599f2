#include "ctxgames/trace.hpp"

namespace ctxgames {

Trace::Trace(std::shared_ptr<const ContextSpace> contexts, std::size_t agents,
             std::size_t actions, bool keep_cost_matrices, bool keep_recommendations)
    : contexts_(std::move(contexts)), agents_(agents), actions_(actions),
      keep_phi_(keep_cost_matrices), keep_rec_(keep_recommendations) {
  if (!contexts_) throw Error("trace needs a context space");
  if (agents_ == 0 || actions_ == 0) throw DimensionError("trace needs J >= 1 and K >= 1");
}

void Trace::reserve(std::size_t rounds) {
  realized_.reserve(rounds);
  predicted_.reserve(rounds * agents_);
  strategies_.reserve(rounds * agents_ * actions_);
  losses_.reserve(rounds * agents_ * actions_);
  costs_.reserve(rounds * agents_);
  if (keep_phi_) phis_.reserve(rounds * agents_);
}

void Trace::append(ContextIndex realized, std::span<const ContextIndex> predicted,
                   std::span<const Strategy> strategies, std::span<const CostMatrix> phis,
                   std::span<const Matrix> recommendations, std::span<const double> residuals) {
  contexts_->check_index(realized);
  if (predicted.size() != agents_ || strategies.size() != agents_ || phis.size() != agents_)
    throw DimensionError("round record must hold one entry per agent");
  const auto z = (*contexts_)[realized];
  for (AgentIndex j = 0; j < agents_; ++j) {
    contexts_->check_index(predicted[j]);
    if (strategies[j].size() != actions_ || phis[j].actions() != actions_)
      throw DimensionError("agent " + std::to_string(j) + " record has the wrong action count");
  }
  realized_.push_back(realized);
  for (AgentIndex j = 0; j < agents_; ++j) {
    predicted_.push_back(predicted[j]);
    const auto w = strategies[j].weights();
    strategies_.insert(strategies_.end(), w.begin(), w.end());
    const auto l = phis[j].transpose_times(z);
    double c = 0.0;
    for (std::size_t k = 0; k < actions_; ++k) c += l[k] * w[k];
    losses_.insert(losses_.end(), l.begin(), l.end());
    costs_.push_back(c);
    if (keep_phi_) phis_.push_back(phis[j]);
  }
  if (keep_rec_) {
    if (recommendations.size() != agents_ || residuals.size() != agents_)
      throw DimensionError("trace expects recommendation matrices for every agent");
    recs_.insert(recs_.end(), recommendations.begin(), recommendations.end());
    residuals_.insert(residuals_.end(), residuals.begin(), residuals.end());
  }
}

void Trace::append_losses(ContextIndex realized, std::span<const ContextIndex> predicted,
                          std::span<const double> strategies, std::span<const double> losses,
                          std::span<const double> costs) {
  if (keep_phi_ || keep_rec_)
    throw Error("loss-only rounds need a trace without cost matrices or recommendations");
  contexts_->check_index(realized);
  if (predicted.size() != agents_ || costs.size() != agents_ ||
      strategies.size() != agents_ * actions_ || losses.size() != agents_ * actions_)
    throw DimensionError("round record must hold one entry per agent");
  for (ContextIndex p : predicted) contexts_->check_index(p);
  realized_.push_back(realized);
  predicted_.insert(predicted_.end(), predicted.begin(), predicted.end());
  strategies_.insert(strategies_.end(), strategies.begin(), strategies.end());
  losses_.insert(losses_.end(), losses.begin(), losses.end());
  costs_.insert(costs_.end(), costs.begin(), costs.end());
}

const CostMatrix& Trace::cost_matrix(std::size_t t, AgentIndex j) const {
  if (!keep_phi_) throw Error("trace was recorded without cost matrices");
  return phis_.at(t * agents_ + j);
}

const Matrix& Trace::recommendations(std::size_t t, AgentIndex j) const {
  if (!keep_rec_) throw Error("trace was recorded without recommendation matrices");
  return recs_.at(t * agents_ + j);
}

double Trace::residual(std::size_t t, AgentIndex j) const {
  if (!keep_rec_) throw Error("trace was recorded without recommendation matrices");
  return residuals_.at(t * agents_ + j);
}

}  // namespace ctxgames
