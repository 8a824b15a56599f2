#pragma once

// Contextual congestion routing: each agent routes its quantity q_j over one
// of K paths, and the payoff coordinate of edge e is
//   phi^j_e(a) = 1{e in a^j} * sum_i 1{e in a^i} q_i^p      (p = 4 by default)
// so that <z, phi^j(a)> is the agent's travel cost under edge coefficients z.

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ctxgames/core.hpp"
#include "ctxgames/network.hpp"
#include "ctxgames/rng.hpp"

namespace ctxgames {

struct RoutingAgent {
  std::size_t origin;
  std::size_t destination;
  double quantity;
  std::vector<Path> paths;
};

class RoutingGame final : public Game {
 public:
  /// `factor` multiplies every payoff (already-applied normalization).
  RoutingGame(std::shared_ptr<const Graph> graph, std::vector<RoutingAgent> agents,
              std::size_t actions, double factor = 1.0, double power = 4.0);

  std::size_t agents() const override { return agents_.size(); }
  std::size_t actions() const override { return actions_; }
  std::size_t dim() const override { return graph_->edge_count(); }
  double normalization_factor() const override { return factor_; }

  const Graph& graph() const noexcept { return *graph_; }
  std::shared_ptr<const Graph> graph_ptr() const noexcept { return graph_; }
  const RoutingAgent& agent(AgentIndex j) const { return agents_.at(j); }
  double weight(AgentIndex j) const { return weights_.at(j); }
  double power() const noexcept { return power_; }

  std::vector<double> payoff(AgentIndex agent,
                             std::span<const ActionIndex> joint_action) const override;
  CostMatrix cost_matrix_unchecked(AgentIndex agent, const JointProfile& profile) const override;
  std::vector<CostMatrix> cost_matrices(const JointProfile& profile) const override;

  /// Expected total weighted load sum_i q_i^p P_i[e] per edge (raw units).
  std::vector<double> expected_loads(const JointProfile& profile) const;
  /// Probability that agent j's sampled path uses each edge.
  std::vector<double> edge_usage(AgentIndex agent, const Strategy& w) const;

  /// max |<z, phi^j(a)>| over joint pure actions and contexts for one agent.
  double agent_payoff_bound(AgentIndex agent, const ContextSpace& contexts) const;
  /// The same maximum over all agents.
  double payoff_bound(const ContextSpace& contexts) const;
  RoutingGame rescaled(double factor) const;

 private:
  CostMatrix matrix_from_loads(AgentIndex agent, const std::vector<double>& loads,
                               const Strategy& own) const;

  std::shared_ptr<const Graph> graph_;
  std::vector<RoutingAgent> agents_;
  std::size_t actions_;
  double factor_;
  double power_;
  std::vector<double> weights_;
};

enum class FilterMeasure { Cost, Hops };

struct RoutingConfig {
  std::size_t paths = 5;     // K
  std::size_t contexts = 5;  // m
  double noise_scale = 1e-2;
  double filter_threshold = 2.0;
  FilterMeasure filter_measure = FilterMeasure::Cost;
  double coef_scale = 1.0;
  double power = 4.0;
};

struct RoutingBuild {
  std::shared_ptr<const RoutingGame> game;
  std::shared_ptr<const ContextSpace> contexts;
  std::size_t candidates = 0;    // OD rows with positive quantity
  std::size_t unreachable = 0;   // no path at all
  std::size_t too_few_paths = 0; // fewer than K loopless paths
  std::size_t filtered = 0;      // removed by the spread filter
};

/// Agents, K-shortest path sets, noisy contexts and normalization.
/// Contexts: z_e = coef_scale * (base_e + eps_e), eps_e ~ Exponential(scale).
/// base_e defaults to the edge cost; `base_coefficients` overrides it (one
/// entry per edge). Path generation and filtering always use edge costs.
RoutingBuild build_routing_game(std::shared_ptr<const Graph> graph,
                                const std::vector<OdQuantity>& quantities,
                                const RoutingConfig& config, Rng& rng,
                                std::span<const double> base_coefficients = {});

/// Coefficient of the q^p term of the BPR travel-time function,
/// b * free_flow_time / capacity^power, per link.
std::vector<double> bpr_coefficients(const TntpNetwork& network);

FilterMeasure parse_filter_measure(const std::string& name);
std::string to_string(FilterMeasure m);

}  // namespace ctxgames
