#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "ctxgames/error.hpp"
#include "ctxgames_app/commands.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("ctxgames");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("CTXGAMES_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to "off"; only honour it when asked for.
    if (level != spdlog::level::off || std::string_view(env) == "off") spdlog::set_level(level);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Prediction-aware learning in time-varying games"};
  app.require_subcommand(1);

  ctxgames::app::RunOptions run;
  std::uint64_t seed = 0;
  auto* run_cmd = app.add_subcommand("run", "simulate a configured experiment");
  run_cmd->add_option("--config", run.config, "JSON run configuration")->required();
  run_cmd->add_option("--out", run.out, "output directory")->required();
  auto* seed_opt = run_cmd->add_option("--seed", seed, "override run.seed");
  run_cmd->add_option("--parallel", run.threads, "worker threads for the per-agent phases")
      ->check(CLI::PositiveNumber);

  std::filesystem::path trace;
  std::filesystem::path audit_out;
  auto* audit_cmd = app.add_subcommand("audit", "check bounds and identities on a recorded trace");
  audit_cmd->add_option("--trace", trace, "trace.csv written by run")->required();
  auto* audit_out_opt = audit_cmd->add_option("--out", audit_out, "directory for audit.json");

  std::filesystem::path network;
  std::filesystem::path net_trace;
  std::filesystem::path net_out;
  auto* net_cmd = app.add_subcommand("net", "inspect a network; export edge occupancy of a routing run");
  auto* network_opt = net_cmd->add_option("--network", network, "TNTP network file");
  auto* net_trace_opt = net_cmd->add_option("--trace", net_trace, "trace.csv of a routing run");
  auto* net_out_opt = net_cmd->add_option("--out", net_out, "directory for occupancy.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) {
      if (*seed_opt) run.seed = seed;
      const auto summary = ctxgames::app::cmd_run(run);
      for (const auto& a : summary["agents"])
        std::cout << "agent " << a["agent"].get<std::size_t>() << " (" << a["learner"].get<std::string>()
                  << "): external regret " << a["external_regret"].get<double>() << ", swap regret "
                  << a["swap_regret"].get<double>() << ", mispredictions "
                  << a["mispredictions"].get<std::size_t>() << '\n';
      if (summary.contains("routing"))
        std::cout << "routing agents: " << summary["routing"]["agents"].get<std::size_t>() << " (reference "
                  << ctxgames::app::kReferenceRoutingAgents << ")\n";
    } else if (*audit_cmd) {
      std::optional<std::filesystem::path> out;
      if (*audit_out_opt) out = audit_out;
      const auto doc = ctxgames::app::cmd_audit(trace, out);
      for (const auto& [name, check] : doc["checks"].items())
        std::cout << name << ": " << check["status"].get<std::string>() << '\n';
    } else if (*net_cmd) {
      std::optional<std::filesystem::path> n, t, o;
      if (*network_opt) n = network;
      if (*net_trace_opt) t = net_trace;
      if (*net_out_opt) o = net_out;
      std::cout << ctxgames::app::cmd_net(n, t, o) << '\n';
    }
  } catch (const ctxgames::ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return 0;
}
