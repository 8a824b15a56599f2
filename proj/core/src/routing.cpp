#include "ctxgames/routing.hpp"

#include <algorithm>
#include <cmath>

namespace ctxgames {

RoutingGame::RoutingGame(std::shared_ptr<const Graph> graph, std::vector<RoutingAgent> agents,
                         std::size_t actions, double factor, double power)
    : graph_(std::move(graph)), agents_(std::move(agents)), actions_(actions), factor_(factor),
      power_(power) {
  if (!graph_) throw Error("routing game needs a graph");
  if (agents_.empty()) throw Error("routing game needs at least one agent");
  if (actions_ == 0) throw DimensionError("routing game needs K >= 1");
  if (!(factor_ > 0.0) || !std::isfinite(factor_))
    throw Error("normalization factor must be positive and finite");
  weights_.reserve(agents_.size());
  for (std::size_t j = 0; j < agents_.size(); ++j) {
    const RoutingAgent& a = agents_[j];
    if (!(a.quantity > 0.0) || !std::isfinite(a.quantity))
      throw Error("agent " + std::to_string(j) + " quantity must be positive");
    if (a.paths.size() != actions_)
      throw DimensionError("agent " + std::to_string(j) + " has " + std::to_string(a.paths.size()) +
                           " paths, expected K=" + std::to_string(actions_));
    for (const Path& p : a.paths) validate_path(*graph_, p, a.origin, a.destination);
    weights_.push_back(std::pow(a.quantity, power_));
  }
}

std::vector<double> RoutingGame::edge_usage(AgentIndex agent, const Strategy& w) const {
  std::vector<double> u(dim(), 0.0);
  const auto& paths = agents_[agent].paths;
  for (std::size_t k = 0; k < actions_; ++k) {
    if (w[k] == 0.0) continue;
    for (std::size_t e : paths[k].edges) u[e] += w[k];
  }
  return u;
}

std::vector<double> RoutingGame::expected_loads(const JointProfile& profile) const {
  std::vector<double> loads(dim(), 0.0);
  for (AgentIndex i = 0; i < agents_.size(); ++i) {
    const auto& paths = agents_[i].paths;
    for (std::size_t k = 0; k < actions_; ++k) {
      const double mass = weights_[i] * profile[i][k];
      if (mass == 0.0) continue;
      for (std::size_t e : paths[k].edges) loads[e] += mass;
    }
  }
  return loads;
}

CostMatrix RoutingGame::matrix_from_loads(AgentIndex agent, const std::vector<double>& loads,
                                          const Strategy& own) const {
  const auto usage = edge_usage(agent, own);
  const double wj = weights_[agent];
  CostMatrix phi(dim(), actions_);
  const auto& paths = agents_[agent].paths;
  for (std::size_t k = 0; k < actions_; ++k)
    for (std::size_t e : paths[k].edges) {
      const double others = std::max(0.0, loads[e] - wj * usage[e]);
      phi(e, k) = factor_ * (wj + others);
    }
  return phi;
}

CostMatrix RoutingGame::cost_matrix_unchecked(AgentIndex agent, const JointProfile& profile) const {
  return matrix_from_loads(agent, expected_loads(profile), profile[agent]);
}

std::vector<CostMatrix> RoutingGame::cost_matrices(const JointProfile& profile) const {
  const auto loads = expected_loads(profile);
  std::vector<CostMatrix> out;
  out.reserve(agents_.size());
  for (AgentIndex j = 0; j < agents_.size(); ++j)
    out.push_back(matrix_from_loads(j, loads, profile[j]));
  return out;
}

std::vector<double> RoutingGame::payoff(AgentIndex agent,
                                        std::span<const ActionIndex> joint_action) const {
  if (agent >= agents_.size()) throw DimensionError("agent index out of range");
  if (joint_action.size() != agents_.size())
    throw DimensionError("joint action must hold one path index per agent");
  std::vector<double> load(dim(), 0.0);
  for (AgentIndex i = 0; i < agents_.size(); ++i) {
    if (joint_action[i] >= actions_) throw DimensionError("path index out of range");
    for (std::size_t e : agents_[i].paths[joint_action[i]].edges) load[e] += weights_[i];
  }
  std::vector<double> phi(dim(), 0.0);
  for (std::size_t e : agents_[agent].paths[joint_action[agent]].edges) phi[e] = factor_ * load[e];
  return phi;
}

double RoutingGame::agent_payoff_bound(AgentIndex j, const ContextSpace& contexts) const {
  if (contexts.dim() != dim()) throw DimensionError("context dimension does not match edge count");
  if (j >= agents_.size()) throw DimensionError("agent index out of range");
  // The payoff of agent j on path k is separable across opponents: each
  // opponent independently adds q_i^p times its overlap with path k.
  std::vector<char> on_path(dim());
  double bound = 0.0;
  for (ContextIndex z = 0; z < contexts.size(); ++z) {
    const auto zv = contexts[z];
    for (const Path& p : agents_[j].paths) {
      std::fill(on_path.begin(), on_path.end(), 0);
      double own = 0.0;
      for (std::size_t e : p.edges) {
        on_path[e] = 1;
        own += std::abs(zv[e]);
      }
      double total = weights_[j] * own;
      for (AgentIndex i = 0; i < agents_.size(); ++i) {
        if (i == j) continue;
        double best = 0.0;
        for (const Path& q : agents_[i].paths) {
          double overlap = 0.0;
          for (std::size_t e : q.edges)
            if (on_path[e]) overlap += std::abs(zv[e]);
          best = std::max(best, overlap);
        }
        total += weights_[i] * best;
      }
      bound = std::max(bound, total);
    }
  }
  return bound * factor_;
}

double RoutingGame::payoff_bound(const ContextSpace& contexts) const {
  double bound = 0.0;
  for (AgentIndex j = 0; j < agents_.size(); ++j) bound = std::max(bound, agent_payoff_bound(j, contexts));
  return bound;
}

RoutingGame RoutingGame::rescaled(double factor) const {
  return RoutingGame(graph_, agents_, actions_, factor_ * factor, power_);
}

std::vector<double> bpr_coefficients(const TntpNetwork& network) {
  std::vector<double> out;
  out.reserve(network.links.size());
  for (const TntpLink& l : network.links) {
    if (!(l.capacity > 0.0)) throw Error("BPR coefficients need positive link capacities");
    out.push_back(l.b * l.free_flow_time / std::pow(l.capacity, l.power));
  }
  return out;
}

FilterMeasure parse_filter_measure(const std::string& name) {
  if (name == "cost") return FilterMeasure::Cost;
  if (name == "hops") return FilterMeasure::Hops;
  throw ConfigError("game.filter_measure", "expected 'cost' or 'hops', got '" + name + "'");
}

std::string to_string(FilterMeasure m) { return m == FilterMeasure::Cost ? "cost" : "hops"; }

RoutingBuild build_routing_game(std::shared_ptr<const Graph> graph,
                                const std::vector<OdQuantity>& quantities,
                                const RoutingConfig& config, Rng& rng,
                                std::span<const double> base_coefficients) {
  if (!graph) throw Error("routing build needs a graph");
  if (!base_coefficients.empty() && base_coefficients.size() != graph->edge_count())
    throw DimensionError("need one base coefficient per edge");
  if (config.paths == 0) throw ConfigError("game.K", "must be >= 1");
  if (config.contexts == 0) throw ConfigError("game.m", "must be >= 1");
  if (!(config.noise_scale >= 0.0)) throw ConfigError("game.noise_scale", "must be >= 0");
  if (!(config.coef_scale > 0.0)) throw ConfigError("game.coef_scale", "must be > 0");
  if (std::isnan(config.filter_threshold)) throw ConfigError("game.filter_threshold", "is NaN");

  RoutingBuild out;
  std::vector<RoutingAgent> agents;
  for (const OdQuantity& od : quantities) {
    if (od.quantity <= 0.0 || od.origin == od.destination) continue;
    ++out.candidates;
    auto paths = yen_k_shortest(*graph, od.origin, od.destination, config.paths);
    if (paths.empty()) {
      ++out.unreachable;
      continue;
    }
    if (paths.size() < config.paths) {
      ++out.too_few_paths;
      continue;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Path& p : paths) {
      const double v = config.filter_measure == FilterMeasure::Cost
                           ? p.cost
                           : static_cast<double>(p.edges.size());
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > config.filter_threshold) {
      ++out.filtered;
      continue;
    }
    agents.push_back({od.origin, od.destination, od.quantity, std::move(paths)});
  }
  if (agents.empty()) throw Error("no routing agent survives path generation and filtering");

  std::vector<std::vector<double>> zs(config.contexts, std::vector<double>(graph->edge_count()));
  const bool noisy = config.noise_scale > 0.0;
  std::exponential_distribution<double> noise(noisy ? 1.0 / config.noise_scale : 1.0);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < config.contexts; ++i) {
    for (std::size_t e = 0; e < graph->edge_count(); ++e)
      zs[i][e] = config.coef_scale * ((base_coefficients.empty() ? graph->edge(e).cost
                                                                 : base_coefficients[e]) +
                                      (noisy ? noise(rng) : 0.0));
    labels.push_back("z" + std::to_string(i));
  }
  auto contexts = noisy ? std::make_shared<const ContextSpace>(std::move(zs), std::move(labels))
                        : std::make_shared<const ContextSpace>(std::move(zs), std::move(labels),
                                                               ContextSpace::AllowDuplicates{});
  RoutingGame raw(graph, std::move(agents), config.paths, 1.0, config.power);
  const double bound = raw.payoff_bound(*contexts);
  const double factor = bound > 1.0 ? 1.0 / bound : 1.0;
  out.game = std::make_shared<const RoutingGame>(raw.rescaled(factor));
  out.contexts = std::move(contexts);
  return out;
}

}  // namespace ctxgames
