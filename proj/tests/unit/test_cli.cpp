#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ctxgames/format.hpp"
#include "ctxgames_app/commands.hpp"
#include "ctxgames_app/config.hpp"

using namespace ctxgames;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = CTXGAMES_SOURCE_DIR;

fs::path scratch(const std::string& name) {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  auto dir = fs::temp_directory_path() / "ctxgames_tests" /
             (std::string(info->test_suite_name()) + "_" + info->name()) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Result {
  int code;
  std::string out;
};

Result cli(const std::string& args) {
  const auto log = fs::temp_directory_path() / ("ctxgames_cli_" + std::to_string(std::random_device{}()));
  const std::string cmd = std::string(CTXGAMES_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Result r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, app::read_file(log)};
  fs::remove(log);
  return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Config, CanonicalFormRoundTrips) {
  for (const auto& entry : fs::directory_iterator(kSource / "configs")) {
    const auto cfg = app::load_config(entry.path());
    const auto canonical = app::to_json(cfg);
    const auto again = app::to_json(app::parse_config(canonical, cfg.base_dir));
    EXPECT_EQ(canonical, again) << entry.path();
  }
}

TEST(Config, FieldLevelErrors) {
  const auto field_of = [](const std::string& text) {
    try {
      app::parse_config(app::json::parse(text));
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  EXPECT_EQ(field_of(R"({"game": {"kind": "random_tabular", "J": 2, "bogus": 1}})"), "game.bogus");
  EXPECT_EQ(field_of(R"({"learner": {"kind": "sgd"}})"), "learner.kind");
  EXPECT_EQ(field_of(R"({"learner": {"eta": -1}})"), "learner.eta");
  EXPECT_EQ(field_of(R"({"run": {"T": 0}})"), "run.T");
  EXPECT_EQ(field_of(R"({"learner": {"eta": 0.1, "eta_preset": "robust"}})"), "learner.eta");
  EXPECT_EQ(field_of(R"({"game": {"kind": "example1"}, "learner": {"eta_preset": "sum_regret"}, "predictor": {"kind": "noisy", "epsilon": 2}})"),
            "predictor.epsilon");
}

TEST(Cli, RunWritesFilesAndCurvesMatchSummary) {
  const auto out = scratch("run");
  const auto r = cli("run --config " + (kSource / "configs/selfplay_noisy.json").string() + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  for (const char* f : {"trace.csv", "curves.csv", "summary.json"}) EXPECT_TRUE(fs::exists(out / f)) << f;
  const auto summary = app::json::parse(app::read_file(out / "summary.json"));
  const auto rows = csv_rows(app::read_file(out / "curves.csv"));
  ASSERT_EQ(rows[0], (std::vector<std::string>{"t", "agent", "cum_regret", "cum_regret_avg", "pred_err_rate", "mispred_share"}));
  const std::size_t agents = summary["metadata"]["J"].get<std::size_t>();
  const std::size_t rounds = summary["metadata"]["T"].get<std::size_t>();
  ASSERT_EQ(rows.size(), 1 + agents * rounds);
  for (std::size_t j = 0; j < agents; ++j) {
    const auto& last = rows[rows.size() - agents + j];
    EXPECT_EQ(last[1], std::to_string(j));
    EXPECT_EQ(parse_double(last[2]), summary["agents"][j]["external_regret"].get<double>());
    EXPECT_EQ(parse_double(last[5]), summary["agents"][j]["mispred_share"].get<double>());
  }
}

TEST(Cli, RerunsAreByteIdentical) {
  for (const char* config : {"swap_regret.json", "logistic_experts.json", "sioux_falls_omwu.json"}) {
    const auto a = scratch(std::string("a_") + config);
    const auto b = scratch(std::string("b_") + config);
    const auto path = (kSource / "configs" / config).string();
    ASSERT_EQ(cli("run --config " + path + " --seed 3 --out " + a.string()).code, 0);
    ASSERT_EQ(cli("run --config " + path + " --seed 3 --parallel 4 --out " + b.string()).code, 0);
    for (const char* f : {"trace.csv", "curves.csv", "summary.json"})
      EXPECT_EQ(app::read_file(a / f), app::read_file(b / f)) << config << " " << f;
  }
}

TEST(Cli, ExitCodes) {
  const auto out = scratch("codes");
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("run --out " + out.string()).code, 2);
  EXPECT_EQ(cli("run --config " + (kSource / "configs/minimal.json").string() + " --out " + out.string() +
                " --parallel 0").code,
            2);
  const auto bad = out / "bad.json";
  app::write_file(bad, R"({"game": {"kind": "random_tabular", "J": 2, "typo": 1}})");
  const auto r = cli("run --config " + bad.string() + " --out " + out.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("game.typo"), std::string::npos) << r.out;
  EXPECT_EQ(cli("audit --trace " + (out / "missing.csv").string()).code, 1);
  EXPECT_EQ(cli("net --network " + (out / "missing.tntp").string()).code, 1);
  EXPECT_EQ(cli("run --config " + (kSource / "configs/minimal.json").string() + " --out " + out.string()).code, 0);
}

TEST(Cli, AuditReportsApplicability) {
  const auto out = scratch("omwu");
  ASSERT_EQ(cli("run --config " + (kSource / "configs/example1_omwu.json").string() + " --out " + out.string()).code, 0);
  const auto r = cli("audit --trace " + (out / "trace.csv").string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto audit = app::json::parse(app::read_file(out / "audit.json"));
  EXPECT_EQ(audit["checks"]["rvu"]["status"], "not applicable");
  EXPECT_EQ(audit["checks"]["cce_identity"]["status"], "pass");
  EXPECT_EQ(audit["checks"]["replay"]["status"], "pass");

  const auto pom = scratch("pomwu");
  ASSERT_EQ(cli("run --config " + (kSource / "configs/selfplay_sum_regret.json").string() + " --out " + pom.string()).code, 0);
  ASSERT_EQ(cli("audit --trace " + (pom / "trace.csv").string()).code, 0);
  const auto checks = app::json::parse(app::read_file(pom / "audit.json"))["checks"];
  for (const char* name : {"rvu", "sum_regret", "cce_identity", "ce_identity", "replay"})
    EXPECT_EQ(checks[name]["status"], "pass") << name;
}

TEST(Cli, AuditDetectsTamperedTrace) {
  const auto out = scratch("tamper");
  ASSERT_EQ(cli("run --config " + (kSource / "configs/minimal.json").string() + " --out " + out.string()).code, 0);
  auto text = app::read_file(out / "trace.csv");
  const auto pos = text.find('\n', text.size() / 2);
  const auto end = text.find('\n', pos + 1);
  auto line = text.substr(pos + 1, end - pos - 1);
  line = line.substr(0, line.rfind(',')) + ",0.123456";
  text.replace(pos + 1, end - pos - 1, line);
  app::write_file(out / "trace.csv", text);
  const auto r = cli("audit --trace " + (out / "trace.csv").string());
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(app::json::parse(app::read_file(out / "audit.json"))["checks"]["replay"]["status"], "fail");
}

TEST(Cli, NetSummaryAndOccupancy) {
  const auto r = cli("net --network " + (kSource / "data/sioux_falls/SiouxFalls_net.tntp").string());
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "24 nodes, 76 edges\n");

  const auto out = scratch("occupancy");
  const auto cfg_path = out / "routing.json";
  app::write_file(cfg_path, app::json{
      {"game", {{"kind", "routing"},
                {"network", (kSource / "data/sioux_falls/SiouxFalls_net.tntp").string()},
                {"quantities", (kSource / "data/sioux_falls/SiouxFalls_quantities.txt").string()},
                {"K", 3}, {"m", 4}}},
      {"learner", {{"kind", "pomwu"}, {"eta", 1.0}}},
      {"process", {{"kind", "deterministic"}, {"sequence", {2}}}},
      {"run", {{"T", 6}, {"seed", 4}}}}.dump());
  ASSERT_EQ(cli("run --config " + cfg_path.string() + " --out " + out.string()).code, 0);
  const auto n = cli("net --trace " + (out / "trace.csv").string());
  ASSERT_EQ(n.code, 0) << n.out;
  EXPECT_EQ(n.out, "24 nodes, 76 edges\n");
  const auto rows = csv_rows(app::read_file(out / "occupancy.csv"));
  ASSERT_EQ(rows[0], (std::vector<std::string>{"context", "from", "to", "occupancy"}));
  ASSERT_EQ(rows.size(), 1u + 76u);  // only context 2 ever occurred
  double total = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][0], "2");
    const double v = parse_double(rows[i][3]);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    total += v;
  }
  EXPECT_GT(total, 0.0);
}

TEST(TraceFile, ReaderRejectsMalformedInput) {
  EXPECT_THROW(app::read_trace_csv("t,context,agent\n"), ParseError);
  const std::string header = "t,context,agent,predicted,cost,w0,w1\n";
  EXPECT_NO_THROW(app::read_trace_csv(header + "1,0,0,0,0.5,0.5,0.5\n1,0,1,0,0.5,0.5,0.5\n"));
  try {
    app::read_trace_csv(header + "1,0,0,0,0.5,0.5,0.5\n1,1,1,0,0.5,0.5,0.5\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(app::read_trace_csv(header + "2,0,0,0,0.5,0.5,0.5\n"), ParseError);
  EXPECT_THROW(app::read_trace_csv(header + "1,0,0,0,x,0.5,0.5\n"), ParseError);
}
