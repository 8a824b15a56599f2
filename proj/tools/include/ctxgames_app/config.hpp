#pragma once

// JSON run configuration: parsing with field-level errors, canonical
// re-serialization, and assembly of a ready-to-run simulation.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctxgames/engine.hpp"
#include "ctxgames/routing.hpp"

namespace ctxgames::app {

using nlohmann::json;

struct LearnerConfig {
  std::string kind = "pomwu";
  std::optional<double> eta;
  /// "individual", "sum_regret" or "robust"; empty when eta is explicit.
  std::string eta_preset;
  double eta_multiplier = 1.0;
  double l_bar = 0.0;
};

struct SmoothnessConfig {
  double delta = 1.0;
  double mu = 0.0;
};

struct GameConfig {
  std::string kind = "example1";
  bool negate_player2 = true;
  std::size_t agents = 2;
  std::size_t actions = 2;
  std::size_t dim = 1;
  std::size_t contexts = 1;
  std::vector<double> payoffs;
  std::vector<std::vector<double>> context_vectors;
  std::optional<SmoothnessConfig> smoothness;
  std::string network;
  std::string quantities;
  /// Base edge coefficient: "free_flow_time" or "bpr" (b * fft / capacity^power).
  std::string coefficient = "free_flow_time";
  RoutingConfig routing;
};

struct ProcessConfig {
  std::string kind = "auto";
  std::vector<ContextIndex> sequence;
  std::vector<double> probabilities;
  std::size_t features = 10;
  double variance = 5.0;
};

struct AgentOverride {
  std::size_t agent = 0;
  std::optional<LearnerConfig> learner;
  std::optional<PredictorSpec> predictor;
};

struct RunSection {
  std::size_t horizon = 1000;
  std::uint64_t seed = 0;
  bool shared_predictions = false;
  bool shared_covariates = true;
  double covariate_noise = 1.0;
};

struct RunConfig {
  GameConfig game;
  LearnerConfig learner;
  PredictorSpec predictor;
  std::vector<AgentOverride> overrides;
  ProcessConfig process;
  RunSection run;
  /// Directory that relative file paths in the config resolve against.
  std::filesystem::path base_dir;
};

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
/// Canonical form: every field present with its effective value.
json to_json(const RunConfig& config);

/// Everything needed to run and then analyse one configured experiment.
struct BuiltRun {
  SimulationSpec spec;
  std::shared_ptr<const TabularGame> tabular;  // null for routing
  std::shared_ptr<const RoutingGame> routing;  // null for tabular games
  std::optional<RoutingBuild> routing_build;
  std::optional<SmoothnessConfig> smoothness;
  double l_bar = 0.0;
};

BuiltRun build_run(const RunConfig& config);

}  // namespace ctxgames::app
