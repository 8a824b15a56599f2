#pragma once

// The run / audit / net subcommands and the file formats they share.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ctxgames/metrics.hpp"
#include "ctxgames/trace.hpp"
#include "ctxgames_app/config.hpp"

namespace ctxgames::app {

inline constexpr int kSchemaVersion = 1;
/// Agent count the reference Sioux Falls experiment ends up with after filtering.
inline constexpr std::size_t kReferenceRoutingAgents = 91;
inline constexpr double kIdentityTolerance = 1e-9;
inline constexpr double kResidualTolerance = 1e-10;

void write_trace_csv(const Trace& trace, std::ostream& out);
void write_curves_csv(const Trace& trace, std::ostream& out);

/// Raw contents of a trace.csv file.
struct TraceRows {
  std::size_t agents = 0;
  std::size_t actions = 0;
  std::vector<ContextIndex> realized;   // per round
  std::vector<ContextIndex> predicted;  // rounds x J
  std::vector<double> costs;            // rounds x J
  std::vector<double> strategies;       // rounds x J x K
  std::size_t rounds() const noexcept { return realized.size(); }
};

TraceRows read_trace_csv(std::string_view text);

/// Re-derives a full Trace from file rows: each learner is rebuilt from the
/// config and replayed on the recorded predictions and realized contexts, and
/// every cost matrix is recomputed from the game. `max_strategy_gap` and
/// `max_cost_gap` receive the largest disagreement with the file.
Trace replay_trace(const BuiltRun& built, const TraceRows& rows, double& max_strategy_gap,
                   double& max_cost_gap);

/// Bound and identity checks that apply to the trace, with "not applicable"
/// entries (and a reason) for the rest.
json audit_trace(const Trace& trace, const BuiltRun& built);

json make_summary(const RunConfig& config, const BuiltRun& built, const Trace& trace);

/// Mean over rounds of context z of the fraction of agents whose sampled
/// path uses each edge; rows are contexts that occurred, columns edges.
std::vector<std::vector<double>> edge_occupancy(const RoutingGame& game, const Trace& trace);
std::vector<std::vector<double>> edge_occupancy(const RoutingGame& game, const TraceRows& rows);

/// Relative file paths in the config made absolute so a stored canonical
/// config can be rebuilt from anywhere.
RunConfig with_absolute_paths(RunConfig config);

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
};

/// Writes trace.csv, curves.csv and summary.json into options.out and
/// returns the summary.
json cmd_run(const RunOptions& options);

/// Reads trace.csv and its sibling summary.json, writes audit.json (next to
/// the trace unless `out` is given) and returns the report.
json cmd_audit(const std::filesystem::path& trace_path, const std::optional<std::filesystem::path>& out);

/// Returns "<N> nodes, <E> edges" for the network file. With a trace,
/// writes occupancy.csv into `out` (default: the trace's directory).
std::string cmd_net(const std::optional<std::filesystem::path>& network,
                    const std::optional<std::filesystem::path>& trace_path,
                    const std::optional<std::filesystem::path>& out);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ctxgames::app
