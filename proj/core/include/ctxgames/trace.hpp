#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctxgames/core.hpp"

namespace ctxgames {

struct RunMetadata {
  std::uint64_t seed = 0;
  std::vector<std::string> learners;  // per agent
  std::vector<double> etas;           // per agent
  std::string eta_preset;             // empty when eta was given explicitly
  double normalization_factor = 1.0;
  bool shared_predictions = false;
};

/// Full per-round record of a run. Per-agent loss vectors Phi^T Z_t are always
/// kept; full d x K cost matrices only on request since they dominate memory
/// for large d.
class Trace {
 public:
  Trace(std::shared_ptr<const ContextSpace> contexts, std::size_t agents, std::size_t actions,
        bool keep_cost_matrices = true, bool keep_recommendations = false);

  void reserve(std::size_t rounds);

  /// Appends the next round. `recommendations` (K x K per agent, column k is
  /// inner copy k's strategy) and `residuals` are recorded only when the
  /// trace was created to keep them.
  void append(ContextIndex realized, std::span<const ContextIndex> predicted,
              std::span<const Strategy> strategies, std::span<const CostMatrix> phis,
              std::span<const Matrix> recommendations = {}, std::span<const double> residuals = {});

  std::size_t rounds() const noexcept { return realized_.size(); }
  std::size_t agents() const noexcept { return agents_; }
  std::size_t actions() const noexcept { return actions_; }
  std::size_t dim() const noexcept { return contexts_->dim(); }
  const ContextSpace& contexts() const noexcept { return *contexts_; }
  std::shared_ptr<const ContextSpace> context_space() const noexcept { return contexts_; }

  // Round index t is 0-based here.
  ContextIndex realized(std::size_t t) const { return realized_[t]; }
  ContextIndex predicted(std::size_t t, AgentIndex j) const { return predicted_[t * agents_ + j]; }
  std::span<const double> strategy(std::size_t t, AgentIndex j) const {
    return std::span<const double>(strategies_).subspan((t * agents_ + j) * actions_, actions_);
  }
  std::span<const double> loss(std::size_t t, AgentIndex j) const {
    return std::span<const double>(losses_).subspan((t * agents_ + j) * actions_, actions_);
  }
  double cost(std::size_t t, AgentIndex j) const { return costs_[t * agents_ + j]; }

  bool has_cost_matrices() const noexcept { return keep_phi_; }
  const CostMatrix& cost_matrix(std::size_t t, AgentIndex j) const;
  bool has_recommendations() const noexcept { return keep_rec_; }
  const Matrix& recommendations(std::size_t t, AgentIndex j) const;
  double residual(std::size_t t, AgentIndex j) const;

  RunMetadata& metadata() noexcept { return meta_; }
  const RunMetadata& metadata() const noexcept { return meta_; }

  /// Builds a trace from stored loss vectors (as read back from trace files).
  void append_losses(ContextIndex realized, std::span<const ContextIndex> predicted,
                     std::span<const double> strategies, std::span<const double> losses,
                     std::span<const double> costs);

 private:
  std::shared_ptr<const ContextSpace> contexts_;
  std::size_t agents_;
  std::size_t actions_;
  bool keep_phi_;
  bool keep_rec_;
  std::vector<ContextIndex> realized_;
  std::vector<ContextIndex> predicted_;
  std::vector<double> strategies_;
  std::vector<double> losses_;
  std::vector<double> costs_;
  std::vector<CostMatrix> phis_;
  std::vector<Matrix> recs_;
  std::vector<double> residuals_;
  RunMetadata meta_;
};

}  // namespace ctxgames
