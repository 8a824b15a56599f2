#pragma once

// Quantities computed from a finished Trace: contextual regrets, equilibrium
// gaps, welfare, bound right-hand sides and diagnostics. All functions are
// pure and bitwise reproducible.

#include <optional>
#include <span>
#include <vector>

#include "ctxgames/core.hpp"
#include "ctxgames/trace.hpp"

namespace ctxgames {

inline constexpr double kBoundSlackTolerance = 1e-9;

/// One agent's view of a trace: what it played and what each action would
/// have cost. Also used for the scaled streams fed to swap-regret inner copies.
struct AgentStream {
  const ContextSpace* contexts = nullptr;
  std::size_t actions = 0;
  std::vector<ContextIndex> realized;
  std::vector<ContextIndex> predicted;
  std::vector<double> strategies;  // rounds x K
  std::vector<double> losses;      // rounds x K
  std::vector<double> costs;       // rounds

  std::size_t rounds() const noexcept { return realized.size(); }
  std::span<const double> strategy(std::size_t t) const {
    return std::span<const double>(strategies).subspan(t * actions, actions);
  }
  std::span<const double> loss(std::size_t t) const {
    return std::span<const double>(losses).subspan(t * actions, actions);
  }
};

AgentStream agent_stream(const Trace& trace, AgentIndex agent);

/// Streams of the K inner copies of a swap-regret wrapper: copy k plays
/// column k of the recorded recommendation matrix and is charged w_t[k] times
/// the agent's loss vector. Requires a trace recorded with recommendations.
std::vector<AgentStream> inner_streams(const Trace& trace, AgentIndex agent);

/// Running totals behind every regret figure. Feeding rounds one at a time and
/// reading values gives the curves; reading at the end gives the summaries,
/// so both agree exactly.
class RegretAccumulator {
 public:
  RegretAccumulator(std::size_t contexts, std::size_t actions);

  void add(ContextIndex realized, ContextIndex predicted, std::span<const double> w,
           std::span<const double> loss, double cost);

  std::size_t rounds() const noexcept { return rounds_; }
  std::size_t mispredictions() const noexcept { return mispredictions_; }
  double incurred() const noexcept { return incurred_; }
  double external_regret() const;
  double swap_regret() const;
  double mispredicted_share() const;

 private:
  std::size_t m_;
  std::size_t k_;
  std::size_t rounds_ = 0;
  std::size_t mispredictions_ = 0;
  double incurred_ = 0.0;
  std::vector<double> per_action_;  // m x K: sum of loss_t[k] over T^z
  std::vector<double> swap_;        // m x K x K: sum of w_t[k] loss_t[k']
  std::vector<double> positive_;    // m x K: sum of max(0, c_t - loss_t[k])
  std::vector<double> positive_mis_;
};

RegretAccumulator accumulate(const AgentStream& stream);

std::size_t misprediction_count(const Trace& trace, AgentIndex agent);
double contextual_external_regret(const Trace& trace, AgentIndex agent);
double contextual_swap_regret(const Trace& trace, AgentIndex agent);
double misprediction_regret_share(const Trace& trace, AgentIndex agent);

double contextual_external_regret(const AgentStream& stream);
double contextual_swap_regret(const AgentStream& stream);

/// Regret against the best single action over the whole run, ignoring
/// contexts. Independent single-context reference implementation.
double classic_external_regret(const AgentStream& stream);

/// Per-round curve values for one agent.
struct CurvePoint {
  double cum_regret;
  double pred_err_rate;
  double mispred_share;
};
std::vector<CurvePoint> regret_curve(const AgentStream& stream);

/// Per-context mixture of product profiles, kept factored: component list of
/// context z is the set of rounds in which z occurred, each weighted 1/n_z.
class EmpiricalPolicy {
 public:
  explicit EmpiricalPolicy(const Trace& trace);

  std::size_t occurrences(ContextIndex z) const { return rounds_.at(z).size(); }
  std::span<const std::size_t> rounds(ContextIndex z) const { return rounds_.at(z); }
  /// Component profiles of context z; the uniform profile when z never occurred.
  std::vector<JointProfile> components(ContextIndex z) const;
  double weight(ContextIndex z) const;

 private:
  const Trace* trace_;
  std::vector<std::vector<std::size_t>> rounds_;
};

/// Direct evaluation of the coarse-correlated gap of the empirical policy.
/// With a game, opponents' cost matrices are re-derived from the stored
/// strategies; without one the trace's loss vectors are used.
double cce_epsilon(const Trace& trace, const Game* game = nullptr);
/// Direct evaluation of the correlated (per-action swap) gap.
double ce_epsilon(const Trace& trace, const Game* game = nullptr);

struct BoundCheck {
  double regret = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool satisfied = false;
};
BoundCheck make_check(double regret, double rhs);

/// Contextual RVU right-hand side for one agent at learning rate eta.
/// Boundary terms: previous loss vector zero and previous strategy uniform.
double rvu_bound_rhs(const AgentStream& stream, double eta);
double rvu_bound_rhs(const Trace& trace, AgentIndex agent, double eta);

/// Individual self-play bound with L_bar >= max_j L^j_T.
double individual_bound_rhs(const Trace& trace, AgentIndex agent, double eta, double l_bar);
/// Same shape under shared predictions, with L the shared misprediction count
/// and the path term 12 L. Errors if predictions were not shared.
double shared_prediction_bound_rhs(const Trace& trace, AgentIndex agent, double eta);
/// Sum-of-regrets bound; requires every agent on pomwu at eta = 1/(4(J-1)).
double sum_regret_bound_rhs(const Trace& trace);

struct SmoothnessResult {
  bool smooth = true;
  /// max over (a, a*, z) of LHS - RHS; <= 0 when smooth.
  double worst_gap = 0.0;
  std::vector<ActionIndex> a;
  std::vector<ActionIndex> a_star;
  ContextIndex z = 0;
};

/// Brute-force (delta, mu)-smoothness check over all (a, a*, z).
SmoothnessResult check_smoothness(const TabularGame& game, const ContextSpace& contexts,
                                  double delta, double mu, double tolerance = 1e-12);

/// Minimum total social cost per context over joint pure actions.
std::vector<double> optimal_social_cost_per_context(const TabularGame& game,
                                                    const ContextSpace& contexts);
/// C*: per-context optimum averaged with the trace's context frequencies.
double optimal_social_cost(const TabularGame& game, const Trace& trace);
/// (1/T) sum_t C_t.
double average_social_cost(const Trace& trace);
/// gamma C* + sum_j R^j / ((1 - mu) T) with gamma = delta / (1 - mu).
double welfare_bound_rhs(double c_star, double regret_sum, double delta, double mu,
                         std::size_t rounds);

double max_entry_norm(const Matrix& m);
double max_abs(std::span<const double> v);

struct VariationMeasures {
  double v;
  double w;
};
/// V_T and W_T with the max-entry norm. `initial` is A_0; defaults to A_1.
VariationMeasures variation_measures(std::span<const Matrix> sequence,
                                     const std::optional<Matrix>& initial = std::nullopt);

}  // namespace ctxgames
