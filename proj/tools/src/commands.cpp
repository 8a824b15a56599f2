#include "ctxgames_app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "ctxgames/error.hpp"
#include "ctxgames/format.hpp"
#include "ctxgames/network.hpp"

namespace ctxgames::app {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

// ---------------------------------------------------------------------------
// CSV

void write_trace_csv(const Trace& trace, std::ostream& out) {
  std::string line = "t,context,agent,predicted,cost";
  for (std::size_t k = 0; k < trace.actions(); ++k) line += ",w" + std::to_string(k);
  out << line << '\n';
  for (std::size_t t = 0; t < trace.rounds(); ++t)
    for (AgentIndex j = 0; j < trace.agents(); ++j) {
      line = std::to_string(t + 1) + ',' + std::to_string(trace.realized(t)) + ',' +
             std::to_string(j) + ',' + std::to_string(trace.predicted(t, j)) + ',' +
             format_double(trace.cost(t, j));
      for (double w : trace.strategy(t, j)) {
        line += ',';
        line += format_double(w);
      }
      out << line << '\n';
    }
}

void write_curves_csv(const Trace& trace, std::ostream& out) {
  std::vector<std::vector<CurvePoint>> curves;
  for (AgentIndex j = 0; j < trace.agents(); ++j) curves.push_back(regret_curve(agent_stream(trace, j)));
  out << "t,agent,cum_regret,cum_regret_avg,pred_err_rate,mispred_share\n";
  for (std::size_t t = 0; t < trace.rounds(); ++t)
    for (AgentIndex j = 0; j < trace.agents(); ++j) {
      const CurvePoint& p = curves[j][t];
      out << t + 1 << ',' << j << ',' << format_double(p.cum_regret) << ','
          << format_double(p.cum_regret / static_cast<double>(t + 1)) << ','
          << format_double(p.pred_err_rate) << ',' << format_double(p.mispred_share) << '\n';
    }
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::size_t parse_index(std::string_view s, std::size_t line, const char* what) {
  long long v = 0;
  try {
    v = parse_integer(s);
  } catch (const Error& e) {
    throw ParseError(std::string(what) + ": " + e.what(), line);
  }
  if (v < 0) throw ParseError(std::string(what) + " must be nonnegative", line);
  return static_cast<std::size_t>(v);
}

}  // namespace

TraceRows read_trace_csv(std::string_view text) {
  TraceRows rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header = true;
  bool fixed_agents = false;
  std::size_t in_round = 0;  // rows seen in the current round
  const auto close_round = [&](std::size_t line) {
    if (!fixed_agents) {
      rows.agents = in_round;
      fixed_agents = true;
    } else if (in_round != rows.agents) {
      throw ParseError("round " + std::to_string(rows.realized.size()) + " has " +
                           std::to_string(in_round) + " agents, expected " + std::to_string(rows.agents),
                       line);
    }
  };
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (header) {
      if (f.size() < 6 || f[0] != "t" || f[1] != "context" || f[2] != "agent" ||
          f[3] != "predicted" || f[4] != "cost")
        throw ParseError("expected header t,context,agent,predicted,cost,w0,...", line_no);
      rows.actions = f.size() - 5;
      for (std::size_t k = 0; k < rows.actions; ++k)
        if (f[5 + k] != "w" + std::to_string(k))
          throw ParseError("expected column w" + std::to_string(k), line_no);
      header = false;
      continue;
    }
    if (f.size() != 5 + rows.actions)
      throw ParseError("expected " + std::to_string(5 + rows.actions) + " fields", line_no);
    const std::size_t t = parse_index(f[0], line_no, "t");
    const std::size_t z = parse_index(f[1], line_no, "context");
    const std::size_t j = parse_index(f[2], line_no, "agent");
    const std::size_t p = parse_index(f[3], line_no, "predicted");
    if (j == 0) {
      if (!rows.realized.empty()) close_round(line_no);
      if (t != rows.realized.size() + 1)
        throw ParseError("expected round " + std::to_string(rows.realized.size() + 1), line_no);
      rows.realized.push_back(z);
      in_round = 0;
    } else {
      if (rows.realized.empty() || t != rows.realized.size() || j != in_round)
        throw ParseError("rows must be ordered by round, then agent", line_no);
      if (fixed_agents && j >= rows.agents) throw ParseError("agent index out of range", line_no);
      if (z != rows.realized.back())
        throw ParseError("context differs between agents of the same round", line_no);
    }
    rows.predicted.push_back(p);
    try {
      rows.costs.push_back(parse_double(f[4]));
      for (std::size_t k = 0; k < rows.actions; ++k) rows.strategies.push_back(parse_double(f[5 + k]));
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
    ++in_round;
  }
  if (header) throw ParseError("empty trace file", line_no);
  if (rows.realized.empty()) throw ParseError("trace has no rounds", line_no);
  close_round(line_no);
  return rows;
}

// ---------------------------------------------------------------------------
// Replay

Trace replay_trace(const BuiltRun& built, const TraceRows& rows, double& max_strategy_gap,
                   double& max_cost_gap) {
  const SimulationSpec& spec = built.spec;
  const Game& game = *spec.game;
  const std::size_t jn = game.agents();
  const std::size_t k = game.actions();
  if (rows.agents != jn || rows.actions != k)
    throw Error("trace has J=" + std::to_string(rows.agents) + ", K=" + std::to_string(rows.actions) +
                " but the config builds J=" + std::to_string(jn) + ", K=" + std::to_string(k));
  if (rows.rounds() != spec.horizon)
    throw Error("trace has " + std::to_string(rows.rounds()) + " rounds but the config says T=" +
                std::to_string(spec.horizon));

  std::vector<std::unique_ptr<Learner>> learners;
  bool any_bm = false;
  for (const AgentSetup& a : spec.agents) {
    learners.push_back(make_learner(a.learner, spec.contexts, k, a.eta));
    any_bm = any_bm || a.learner == LearnerKind::BlumMansour;
  }
  Trace trace(spec.contexts, jn, k, spec.keep_cost_matrices, any_bm);
  trace.reserve(rows.rounds());
  RunMetadata& meta = trace.metadata();
  meta.seed = spec.seed;
  meta.eta_preset = spec.eta_preset;
  meta.normalization_factor = game.normalization_factor();
  meta.shared_predictions = spec.shared_predictions;
  for (const auto& l : learners) {
    meta.learners.push_back(l->kind());
    meta.etas.push_back(l->eta());
  }

  max_strategy_gap = 0.0;
  max_cost_gap = 0.0;
  std::vector<Strategy> strategies(jn);
  std::vector<Matrix> recs(any_bm ? jn : 0, Matrix(k, k));
  std::vector<double> residuals(any_bm ? jn : 0, 0.0);
  const std::span<const ContextIndex> predicted_all(rows.predicted);
  for (std::size_t t = 0; t < rows.rounds(); ++t) {
    const auto predicted = predicted_all.subspan(t * jn, jn);
    parallel_for(jn, spec.threads, [&](std::size_t j) {
      strategies[j] = learners[j]->act(predicted[j]);
      if (any_bm)
        if (auto* bm = dynamic_cast<BlumMansour*>(learners[j].get())) {
          recs[j] = bm->last_recommendations();
          residuals[j] = bm->last_residual();
        }
    });
    const auto phis = game.cost_matrices(JointProfile(strategies));
    parallel_for(jn, spec.threads, [&](std::size_t j) { learners[j]->update(rows.realized[t], phis[j]); });
    trace.append(rows.realized[t], predicted, strategies, phis, recs, residuals);
    for (AgentIndex j = 0; j < jn; ++j) {
      const auto w = trace.strategy(t, j);
      for (std::size_t a = 0; a < k; ++a)
        max_strategy_gap = std::max(max_strategy_gap, std::abs(w[a] - rows.strategies[(t * jn + j) * k + a]));
      max_cost_gap = std::max(max_cost_gap, std::abs(trace.cost(t, j) - rows.costs[t * jn + j]));
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Audit

namespace {

json not_applicable(const std::string& reason) {
  return {{"status", "not applicable"}, {"reason", reason}};
}

json check_json(const BoundCheck& c) {
  return {{"regret", c.regret}, {"rhs", c.rhs}, {"slack", c.slack}, {"satisfied", c.satisfied}};
}

// Per-agent bound checks rolled into one entry.
json per_agent(const std::vector<BoundCheck>& checks) {
  json agents = json::array();
  bool ok = true;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < checks.size(); ++j) {
    json a = check_json(checks[j]);
    a["agent"] = j;
    agents.push_back(a);
    ok = ok && checks[j].satisfied;
    worst = std::min(worst, checks[j].slack);
  }
  return {{"status", ok ? "pass" : "fail"}, {"min_slack", worst}, {"agents", agents}};
}

std::optional<std::string> common_pomwu(const RunMetadata& meta) {
  for (std::size_t j = 0; j < meta.learners.size(); ++j) {
    if (meta.learners[j] != "pomwu")
      return "agent " + std::to_string(j) + " runs " + meta.learners[j] + "; the bound covers pomwu self-play";
    if (meta.etas[j] != meta.etas[0]) return "agents use different learning rates";
  }
  return std::nullopt;
}

}  // namespace

json audit_trace(const Trace& trace, const BuiltRun& built) {
  const RunMetadata& meta = trace.metadata();
  const std::size_t jn = trace.agents();
  const Game* game = built.tabular ? static_cast<const Game*>(built.tabular.get()) : nullptr;
  json report;

  std::vector<RegretAccumulator> acc;
  double max_ext = -std::numeric_limits<double>::infinity();
  double max_swap = max_ext;
  double regret_sum = 0.0;
  std::size_t worst_l = 0;
  for (AgentIndex j = 0; j < jn; ++j) {
    acc.push_back(accumulate(agent_stream(trace, j)));
    max_ext = std::max(max_ext, acc[j].external_regret());
    max_swap = std::max(max_swap, acc[j].swap_regret());
    regret_sum += acc[j].external_regret();
    worst_l = std::max(worst_l, acc[j].mispredictions());
  }
  const double rounds = static_cast<double>(trace.rounds());

  {
    std::vector<BoundCheck> checks;
    std::string reason;
    for (AgentIndex j = 0; j < jn && reason.empty(); ++j) {
      if (meta.learners[j] != "pomwu")
        reason = "agent " + std::to_string(j) + " runs " + meta.learners[j] + "; the bound covers pomwu";
      else
        checks.push_back(make_check(acc[j].external_regret(), rvu_bound_rhs(trace, j, meta.etas[j])));
    }
    report["rvu"] = reason.empty() ? per_agent(checks) : not_applicable(reason);
  }

  if (auto why = common_pomwu(meta)) {
    report["individual_regret"] = not_applicable(*why);
  } else {
    const double l_bar = std::max(built.l_bar, static_cast<double>(worst_l));
    std::vector<BoundCheck> checks;
    for (AgentIndex j = 0; j < jn; ++j)
      checks.push_back(make_check(acc[j].external_regret(),
                                  individual_bound_rhs(trace, j, meta.etas[j], l_bar)));
    report["individual_regret"] = per_agent(checks);
    report["individual_regret"]["L_bar"] = l_bar;
  }

  if (!meta.shared_predictions) {
    report["shared_prediction"] = not_applicable("predictions were not shared");
  } else if (auto why = common_pomwu(meta)) {
    report["shared_prediction"] = not_applicable(*why);
  } else {
    std::vector<BoundCheck> checks;
    for (AgentIndex j = 0; j < jn; ++j)
      checks.push_back(make_check(acc[j].external_regret(), shared_prediction_bound_rhs(trace, j, meta.etas[j])));
    report["shared_prediction"] = per_agent(checks);
  }

  if (jn < 2) {
    report["sum_regret"] = not_applicable("needs at least two agents");
  } else {
    try {
      const BoundCheck c = make_check(regret_sum, sum_regret_bound_rhs(trace));
      report["sum_regret"] = check_json(c);
      report["sum_regret"]["status"] = c.satisfied ? "pass" : "fail";
    } catch (const Error& e) {
      report["sum_regret"] = not_applicable(e.what());
    }
  }

  const auto identity = [&](double direct, double via_regret) {
    const double gap = std::abs(direct - via_regret);
    const bool ok = gap <= kIdentityTolerance;
    return json{{"status", ok ? "pass" : "fail"},
                {"direct", direct},
                {"from_regret", via_regret},
                {"gap", gap},
                {"tolerance", kIdentityTolerance}};
  };
  report["cce_identity"] = identity(cce_epsilon(trace, game), max_ext / rounds);
  report["ce_identity"] = identity(ce_epsilon(trace, game), max_swap / rounds);

  if (!trace.has_recommendations()) {
    report["swap_reduction"] = not_applicable("no agent runs the swap-regret wrapper");
  } else {
    json agents = json::array();
    bool ok = true;
    for (AgentIndex j = 0; j < jn; ++j) {
      if (meta.learners[j] != "bm") continue;
      double inner_sum = 0.0;
      for (const AgentStream& s : inner_streams(trace, j)) inner_sum += contextual_external_regret(s);
      double residual = 0.0;
      for (std::size_t t = 0; t < trace.rounds(); ++t) residual = std::max(residual, trace.residual(t, j));
      const BoundCheck c = make_check(acc[j].swap_regret(), inner_sum);
      const bool agent_ok = c.satisfied && residual <= kResidualTolerance;
      ok = ok && agent_ok;
      agents.push_back({{"agent", j},
                        {"swap_regret", c.regret},
                        {"inner_regret_sum", inner_sum},
                        {"slack", c.slack},
                        {"max_residual", residual},
                        {"satisfied", agent_ok}});
    }
    report["swap_reduction"] = {{"status", ok ? "pass" : "fail"}, {"agents", agents}};
  }

  if (!built.tabular) {
    report["welfare"] = not_applicable("needs a tabular game");
  } else if (!built.smoothness) {
    report["welfare"] = not_applicable("game.smoothness not configured");
  } else {
    const SmoothnessConfig& s = *built.smoothness;
    const SmoothnessResult sr = check_smoothness(*built.tabular, trace.contexts(), s.delta, s.mu);
    if (!sr.smooth) {
      report["welfare"] = not_applicable("game is not (" + format_double(s.delta) + ", " +
                                         format_double(s.mu) + ")-smooth; worst gap " +
                                         format_double(sr.worst_gap));
    } else {
      const double c_star = optimal_social_cost(*built.tabular, trace);
      const double avg = average_social_cost(trace);
      const double rhs = welfare_bound_rhs(c_star, regret_sum, s.delta, s.mu, trace.rounds());
      const BoundCheck c = make_check(avg, rhs);
      report["welfare"] = {{"status", c.satisfied ? "pass" : "fail"},
                           {"average_social_cost", avg},
                           {"optimal_social_cost", c_star},
                           {"rhs", rhs},
                           {"slack", c.slack},
                           {"delta", s.delta},
                           {"mu", s.mu}};
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Summary

json make_summary(const RunConfig& config, const BuiltRun& built, const Trace& trace) {
  const RunMetadata& meta = trace.metadata();
  json s;
  s["schema_version"] = kSchemaVersion;
  s["config"] = to_json(config);
  s["metadata"] = {{"seed", meta.seed},
                   {"T", trace.rounds()},
                   {"J", trace.agents()},
                   {"K", trace.actions()},
                   {"d", trace.dim()},
                   {"m", trace.contexts().size()},
                   {"normalization_factor", meta.normalization_factor},
                   {"eta_preset", meta.eta_preset.empty() ? json(nullptr) : json(meta.eta_preset)},
                   {"shared_predictions", meta.shared_predictions},
                   {"learners", meta.learners},
                   {"etas", meta.etas}};
  json agents = json::array();
  for (AgentIndex j = 0; j < trace.agents(); ++j) {
    const RegretAccumulator acc = accumulate(agent_stream(trace, j));
    agents.push_back({{"agent", j},
                      {"learner", meta.learners[j]},
                      {"eta", meta.etas[j]},
                      {"external_regret", acc.external_regret()},
                      {"swap_regret", acc.swap_regret()},
                      {"mispredictions", acc.mispredictions()},
                      {"mispred_share", acc.mispredicted_share()},
                      {"incurred_cost", acc.incurred()}});
  }
  s["agents"] = agents;
  const Game* game = built.tabular ? static_cast<const Game*>(built.tabular.get()) : nullptr;
  s["equilibrium"] = {{"cce_epsilon", cce_epsilon(trace, game)}, {"ce_epsilon", ce_epsilon(trace, game)}};
  json welfare = {{"average_social_cost", average_social_cost(trace)}};
  if (built.tabular) welfare["optimal_social_cost"] = optimal_social_cost(*built.tabular, trace);
  s["welfare"] = welfare;
  s["audit"] = audit_trace(trace, built);
  if (built.routing_build) {
    const RoutingBuild& b = *built.routing_build;
    s["routing"] = {{"agents", b.game->agents()},
                    {"reference_agents", kReferenceRoutingAgents},
                    {"candidates", b.candidates},
                    {"unreachable", b.unreachable},
                    {"too_few_paths", b.too_few_paths},
                    {"filtered", b.filtered},
                    {"nodes", b.game->graph().nodes()},
                    {"edges", b.game->graph().edge_count()}};
  }
  return s;
}

// ---------------------------------------------------------------------------
// Occupancy

namespace {

template <typename StrategyAt, typename ContextAt>
std::vector<std::vector<double>> occupancy_impl(const RoutingGame& game, std::size_t rounds,
                                                std::size_t contexts, StrategyAt strategy_at,
                                                ContextAt context_at) {
  const std::size_t jn = game.agents();
  const std::size_t k = game.actions();
  std::vector<std::vector<double>> occ(contexts, std::vector<double>(game.dim(), 0.0));
  std::vector<std::size_t> count(contexts, 0);
  for (std::size_t t = 0; t < rounds; ++t) {
    const ContextIndex z = context_at(t);
    if (z >= contexts) throw DimensionError("context index out of range in trace");
    ++count[z];
    for (AgentIndex j = 0; j < jn; ++j) {
      const std::span<const double> w = strategy_at(t, j);
      const auto& paths = game.agent(j).paths;
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t e : paths[a].edges) occ[z][e] += w[a];
    }
  }
  for (ContextIndex z = 0; z < contexts; ++z) {
    if (count[z] == 0) continue;
    const double scale = 1.0 / (static_cast<double>(count[z]) * static_cast<double>(jn));
    for (double& v : occ[z]) v *= scale;
  }
  return occ;
}

}  // namespace

std::vector<std::vector<double>> edge_occupancy(const RoutingGame& game, const Trace& trace) {
  if (trace.agents() != game.agents() || trace.actions() != game.actions())
    throw DimensionError("trace does not match the routing game");
  return occupancy_impl(
      game, trace.rounds(), trace.contexts().size(),
      [&](std::size_t t, AgentIndex j) { return trace.strategy(t, j); },
      [&](std::size_t t) { return trace.realized(t); });
}

std::vector<std::vector<double>> edge_occupancy(const RoutingGame& game, const TraceRows& rows) {
  if (rows.agents != game.agents() || rows.actions != game.actions())
    throw DimensionError("trace does not match the routing game");
  std::size_t m = 0;
  for (ContextIndex z : rows.realized) m = std::max(m, z + 1);
  return occupancy_impl(
      game, rows.rounds(), m,
      [&](std::size_t t, AgentIndex j) {
        return std::span<const double>(rows.strategies).subspan((t * rows.agents + j) * rows.actions, rows.actions);
      },
      [&](std::size_t t) { return rows.realized[t]; });
}

// ---------------------------------------------------------------------------
// Commands

RunConfig with_absolute_paths(RunConfig config) {
  const auto fix = [&](std::string& file) {
    if (file.empty()) return;
    std::filesystem::path p(file);
    if (p.is_relative()) p = config.base_dir / p;
    file = std::filesystem::weakly_canonical(std::filesystem::absolute(p)).string();
  };
  fix(config.game.network);
  fix(config.game.quantities);
  config.base_dir.clear();
  return config;
}

json cmd_run(const RunOptions& options) {
  RunConfig config = with_absolute_paths(load_config(options.config));
  if (options.seed) config.run.seed = *options.seed;
  if (options.threads == 0) throw ConfigError("--parallel", "must be >= 1");

  BuiltRun built = build_run(config);
  built.spec.threads = options.threads;
  if (built.routing_build) {
    const RoutingBuild& b = *built.routing_build;
    spdlog::info("routing game: {} agents kept of {} OD pairs (reference {}); {} unreachable, {} with too few "
                 "paths, {} filtered",
                 b.game->agents(), b.candidates, kReferenceRoutingAgents, b.unreachable, b.too_few_paths,
                 b.filtered);
  }
  spdlog::info("running J={} K={} m={} T={} seed={}", built.spec.game->agents(), built.spec.game->actions(),
               built.spec.contexts->size(), built.spec.horizon, built.spec.seed);
  const Trace trace = run_simulation(built.spec);

  std::filesystem::create_directories(options.out);
  {
    std::ostringstream ss;
    write_trace_csv(trace, ss);
    write_file(options.out / "trace.csv", ss.str());
  }
  {
    std::ostringstream ss;
    write_curves_csv(trace, ss);
    write_file(options.out / "curves.csv", ss.str());
  }
  json summary = make_summary(config, built, trace);
  write_file(options.out / "summary.json", summary.dump(2) + "\n");
  spdlog::info("wrote trace.csv, curves.csv and summary.json to {}", options.out.string());
  return summary;
}

namespace {

json load_summary(const std::filesystem::path& trace_path) {
  const auto path = trace_path.parent_path() / "summary.json";
  if (!std::filesystem::exists(path))
    throw Error("no summary.json next to '" + trace_path.string() + "'");
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error("summary.json is not valid JSON: " + std::string(e.what()));
  }
}

BuiltRun rebuild(const json& summary) {
  if (!summary.contains("schema_version") || summary["schema_version"] != kSchemaVersion)
    throw Error("summary.json has an unsupported schema version");
  if (!summary.contains("config")) throw Error("summary.json lacks the run config");
  const RunConfig config = parse_config(summary["config"]);
  BuiltRun built = build_run(config);
  const json& meta = summary.at("metadata");
  std::vector<std::string> learners;
  std::vector<double> etas;
  for (const AgentSetup& a : built.spec.agents) {
    learners.push_back(to_string(a.learner));
    etas.push_back(a.eta);
  }
  if (meta.at("learners") != json(learners) || meta.at("etas") != json(etas))
    throw Error("summary metadata does not match the learners rebuilt from its config");
  return built;
}

}  // namespace

json cmd_audit(const std::filesystem::path& trace_path, const std::optional<std::filesystem::path>& out) {
  const TraceRows rows = read_trace_csv(read_file(trace_path));
  const json summary = load_summary(trace_path);
  const BuiltRun built = rebuild(summary);
  double strategy_gap = 0.0;
  double cost_gap = 0.0;
  const Trace trace = replay_trace(built, rows, strategy_gap, cost_gap);

  json report = audit_trace(trace, built);
  const bool replay_ok = strategy_gap <= 1e-12 && cost_gap <= 1e-12;
  report["replay"] = {{"status", replay_ok ? "pass" : "fail"},
                      {"max_strategy_gap", strategy_gap},
                      {"max_cost_gap", cost_gap},
                      {"tolerance", 1e-12}};
  json doc = {{"schema_version", kSchemaVersion}, {"trace", trace_path.filename().string()}, {"checks", report}};
  const auto dir = out ? *out : trace_path.parent_path();
  std::filesystem::create_directories(dir.empty() ? "." : dir);
  write_file((dir.empty() ? std::filesystem::path(".") : dir) / "audit.json", doc.dump(2) + "\n");
  return doc;
}

std::string cmd_net(const std::optional<std::filesystem::path>& network,
                    const std::optional<std::filesystem::path>& trace_path,
                    const std::optional<std::filesystem::path>& out) {
  std::optional<json> summary;
  std::optional<RunConfig> config;
  if (trace_path) {
    summary = load_summary(*trace_path);
    config = parse_config(summary->at("config"));
    if (config->game.kind != "routing") throw Error("occupancy needs a trace of a routing game");
  }
  std::filesystem::path net_path;
  if (network) net_path = *network;
  else if (config) net_path = config->game.network;
  else throw ConfigError("--network", "give a network file or a routing trace");

  const TntpNetwork net = parse_tntp(read_file(net_path));
  std::string stats = std::to_string(net.nodes) + " nodes, " + std::to_string(net.links.size()) + " edges";
  if (!trace_path) return stats;

  const BuiltRun built = rebuild(*summary);
  const TraceRows rows = read_trace_csv(read_file(*trace_path));
  const auto occ = edge_occupancy(*built.routing, rows);
  const Graph& g = built.routing->graph();
  std::vector<std::size_t> count(occ.size(), 0);
  for (ContextIndex z : rows.realized) ++count[z];
  std::string text = "context,from,to,occupancy\n";
  for (ContextIndex z = 0; z < occ.size(); ++z) {
    if (count[z] == 0) continue;
    for (std::size_t e = 0; e < g.edge_count(); ++e)
      text += std::to_string(z) + ',' + std::to_string(g.edge(e).from + 1) + ',' +
              std::to_string(g.edge(e).to + 1) + ',' + format_double(occ[z][e]) + '\n';
  }
  auto dir = out ? *out : trace_path->parent_path();
  if (dir.empty()) dir = ".";
  std::filesystem::create_directories(dir);
  write_file(dir / "occupancy.csv", text);
  return stats;
}

}  // namespace ctxgames::app
