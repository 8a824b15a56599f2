#include "ctxgames_app/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ctxgames/error.hpp"
#include "ctxgames/games.hpp"
#include "ctxgames/network.hpp"

namespace ctxgames::app {

namespace {

// Typed access to one JSON object with dotted field names in every error and
// a final check for unknown keys.
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() || it->is_null() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(name(key), "must be a number");
    return v->get<double>();
  }

  std::optional<double> optional_number(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) throw ConfigError(name(key), "must be a number");
    return v->get<double>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer()) throw ConfigError(name(key), "must be nonnegative");
    throw ConfigError(name(key), "must be an integer");
  }

  std::size_t size(const std::string& key, std::size_t fallback) {
    return static_cast<std::size_t>(unsigned_integer(key, fallback));
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(name(key), "must be true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(name(key), "must be a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json* v = find(key);
    if (!v) return {};
    return number_array(*v, name(key));
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(name(it.key()), "unknown field");
  }

  static std::vector<double> number_array(const json& v, const std::string& field) {
    if (!v.is_array()) throw ConfigError(field, "must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(field, "must be an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

double threshold_from_json(Fields& f, const std::string& key, double fallback) {
  const json* v = f.find(key);
  if (!v) return fallback;
  if (v->is_string() && v->get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  if (!v->is_number()) throw ConfigError(f.name(key), "must be a number or \"inf\"");
  return v->get<double>();
}

json threshold_to_json(double v) { return std::isinf(v) ? json("inf") : json(v); }

LearnerConfig parse_learner(const json& j, const std::string& path) {
  Fields f(j, path);
  LearnerConfig c;
  c.kind = f.string("kind", c.kind);
  parse_learner_kind(c.kind);
  c.eta = f.optional_number("eta");
  c.eta_preset = f.string("eta_preset", "");
  c.eta_multiplier = f.number("eta_multiplier", c.eta_multiplier);
  c.l_bar = f.number("L_bar", c.l_bar);
  f.finish();
  if (c.eta && !c.eta_preset.empty())
    throw ConfigError(f.name("eta"), "give either eta or eta_preset, not both");
  if (!c.eta && c.eta_preset.empty()) c.eta = 0.1;
  if (c.eta && (!(*c.eta > 0.0) || !std::isfinite(*c.eta)))
    throw ConfigError(f.name("eta"), "must be positive and finite");
  if (!c.eta_preset.empty() && c.eta_preset != "individual" && c.eta_preset != "sum_regret" &&
      c.eta_preset != "robust")
    throw ConfigError(f.name("eta_preset"),
                      "expected 'individual', 'sum_regret' or 'robust', got '" + c.eta_preset + "'");
  if (!(c.eta_multiplier > 0.0) || !std::isfinite(c.eta_multiplier))
    throw ConfigError(f.name("eta_multiplier"), "must be positive and finite");
  if (!(c.l_bar >= 0.0) || !std::isfinite(c.l_bar))
    throw ConfigError(f.name("L_bar"), "must be nonnegative and finite");
  return c;
}

json learner_to_json(const LearnerConfig& c) {
  json j;
  j["kind"] = c.kind;
  j["eta"] = c.eta ? json(*c.eta) : json(nullptr);
  j["eta_preset"] = c.eta_preset.empty() ? json(nullptr) : json(c.eta_preset);
  j["eta_multiplier"] = c.eta_multiplier;
  j["L_bar"] = c.l_bar;
  return j;
}

PredictorSpec parse_predictor(const json& j, const std::string& path) {
  Fields f(j, path);
  PredictorSpec p;
  const std::string kind = f.string("kind", "oracle");
  try {
    p.kind = parse_predictor_kind(kind);
  } catch (const ConfigError&) {
    throw ConfigError(f.name("kind"), "unknown predictor '" + kind + "'");
  }
  p.epsilon = f.number("epsilon", p.epsilon);
  p.alpha0 = f.number("alpha0", p.alpha0);
  p.expert_eta = f.optional_number("eta");
  if (const json* e = f.find("experts")) {
    if (!e->is_array()) throw ConfigError(f.name("experts"), "must be an array of predictors");
    for (std::size_t i = 0; i < e->size(); ++i)
      p.experts.push_back(parse_predictor((*e)[i], f.name("experts") + "[" + std::to_string(i) + "]"));
  }
  f.finish();
  if (!(p.epsilon >= 0.0 && p.epsilon <= 1.0)) throw ConfigError(f.name("epsilon"), "must be in [0, 1]");
  if (!(p.alpha0 > 0.0) || !std::isfinite(p.alpha0))
    throw ConfigError(f.name("alpha0"), "must be positive and finite");
  if (p.expert_eta && !(*p.expert_eta > 0.0)) throw ConfigError(f.name("eta"), "must be positive");
  if (p.kind == PredictorKind::ExpertHedge && p.experts.empty())
    throw ConfigError(f.name("experts"), "expert_hedge needs at least one expert");
  if (p.kind != PredictorKind::ExpertHedge && !p.experts.empty())
    throw ConfigError(f.name("experts"), "only valid for kind expert_hedge");
  return p;
}

json predictor_to_json(const PredictorSpec& p) {
  json j;
  j["kind"] = to_string(p.kind);
  j["epsilon"] = p.epsilon;
  j["alpha0"] = p.alpha0;
  j["eta"] = p.expert_eta ? json(*p.expert_eta) : json(nullptr);
  j["experts"] = json::array();
  for (const auto& e : p.experts) j["experts"].push_back(predictor_to_json(e));
  return j;
}

GameConfig parse_game(const json& j) {
  Fields f(j, "game");
  GameConfig g;
  g.kind = f.string("kind", g.kind);
  if (g.kind != "example1" && g.kind != "random_tabular" && g.kind != "tabular" && g.kind != "routing")
    throw ConfigError("game.kind",
                      "expected example1, random_tabular, tabular or routing, got '" + g.kind + "'");
  g.negate_player2 = f.boolean("negate_player2", g.negate_player2);
  g.agents = f.size("J", g.agents);
  g.actions = f.size("K", g.kind == "routing" ? g.routing.paths : g.actions);
  g.dim = f.size("d", g.dim);
  g.contexts = f.size("m", g.kind == "routing" ? g.routing.contexts : g.contexts);
  g.payoffs = f.numbers("payoffs");
  if (const json* c = f.find("contexts")) {
    if (!c->is_array()) throw ConfigError("game.contexts", "must be an array of context vectors");
    for (std::size_t i = 0; i < c->size(); ++i)
      g.context_vectors.push_back(
          Fields::number_array((*c)[i], "game.contexts[" + std::to_string(i) + "]"));
  }
  if (const json* s = f.find("smoothness")) {
    Fields sf(*s, "game.smoothness");
    SmoothnessConfig sc;
    sc.delta = sf.number("delta", sc.delta);
    sc.mu = sf.number("mu", sc.mu);
    sf.finish();
    if (!(sc.delta >= 0.0)) throw ConfigError("game.smoothness.delta", "must be >= 0");
    if (!(sc.mu >= 0.0 && sc.mu < 1.0)) throw ConfigError("game.smoothness.mu", "must be in [0, 1)");
    g.smoothness = sc;
  }
  g.network = f.string("network", "");
  g.quantities = f.string("quantities", "");
  g.coefficient = f.string("coefficient", g.coefficient);
  RoutingConfig& r = g.routing;
  r.paths = g.actions;
  r.contexts = g.contexts;
  r.noise_scale = f.number("noise_scale", r.noise_scale);
  r.filter_threshold = threshold_from_json(f, "filter_threshold", r.filter_threshold);
  r.filter_measure = parse_filter_measure(f.string("filter_measure", to_string(r.filter_measure)));
  r.coef_scale = f.number("coef_scale", r.coef_scale);
  r.power = f.number("power", r.power);
  f.finish();

  if (g.actions == 0) throw ConfigError("game.K", "must be >= 1");
  if (g.contexts == 0) throw ConfigError("game.m", "must be >= 1");
  if (g.kind == "random_tabular" || g.kind == "tabular") {
    if (g.agents == 0) throw ConfigError("game.J", "must be >= 1");
    if (g.dim == 0) throw ConfigError("game.d", "must be >= 1");
  }
  if (g.kind == "tabular") {
    if (g.context_vectors.empty()) throw ConfigError("game.contexts", "tabular games need context vectors");
    if (g.payoffs.empty()) throw ConfigError("game.payoffs", "tabular games need a payoff tensor");
    g.contexts = g.context_vectors.size();
  } else if (!g.payoffs.empty() || !g.context_vectors.empty()) {
    throw ConfigError("game.payoffs", "only valid for kind tabular");
  }
  if (g.kind == "routing") {
    if (g.network.empty()) throw ConfigError("game.network", "routing games need a network file");
    if (g.quantities.empty()) throw ConfigError("game.quantities", "routing games need a quantities file");
    if (g.coefficient != "free_flow_time" && g.coefficient != "bpr")
      throw ConfigError("game.coefficient", "expected 'free_flow_time' or 'bpr', got '" + g.coefficient + "'");
    if (!(r.noise_scale >= 0.0)) throw ConfigError("game.noise_scale", "must be >= 0");
    if (!(r.coef_scale > 0.0)) throw ConfigError("game.coef_scale", "must be > 0");
    if (!(r.power > 0.0)) throw ConfigError("game.power", "must be > 0");
  }
  if (g.kind == "example1") {
    g.agents = 2;
    g.actions = 2;
    g.dim = 2;
    g.contexts = 2;
  }
  return g;
}

json game_to_json(const GameConfig& g) {
  json j;
  j["kind"] = g.kind;
  j["K"] = g.actions;
  j["m"] = g.contexts;
  if (g.kind == "example1") {
    j["negate_player2"] = g.negate_player2;
  } else if (g.kind == "random_tabular" || g.kind == "tabular") {
    j["J"] = g.agents;
    j["d"] = g.dim;
  }
  if (g.kind == "tabular") {
    j["payoffs"] = g.payoffs;
    j["contexts"] = g.context_vectors;
  }
  if (g.smoothness) j["smoothness"] = {{"delta", g.smoothness->delta}, {"mu", g.smoothness->mu}};
  if (g.kind == "routing") {
    j["network"] = g.network;
    j["quantities"] = g.quantities;
    j["coefficient"] = g.coefficient;
    j["noise_scale"] = g.routing.noise_scale;
    j["filter_threshold"] = threshold_to_json(g.routing.filter_threshold);
    j["filter_measure"] = to_string(g.routing.filter_measure);
    j["coef_scale"] = g.routing.coef_scale;
    j["power"] = g.routing.power;
  }
  return j;
}

ProcessConfig parse_process(const json& j) {
  Fields f(j, "process");
  ProcessConfig p;
  p.kind = f.string("kind", p.kind);
  if (const json* s = f.find("sequence")) {
    if (!s->is_array()) throw ConfigError("process.sequence", "must be an array of context indices");
    for (const auto& v : *s) {
      if (!v.is_number_unsigned()) throw ConfigError("process.sequence", "entries must be nonnegative integers");
      p.sequence.push_back(v.get<std::size_t>());
    }
  }
  p.probabilities = f.numbers("probabilities");
  p.features = f.size("features", p.features);
  p.variance = f.number("variance", p.variance);
  f.finish();
  if (p.kind != "auto" && p.kind != "deterministic" && p.kind != "iid" && p.kind != "logistic")
    throw ConfigError("process.kind", "expected auto, deterministic, iid or logistic, got '" + p.kind + "'");
  if (p.kind == "deterministic" && p.sequence.empty())
    throw ConfigError("process.sequence", "deterministic process needs a sequence");
  if (p.features == 0) throw ConfigError("process.features", "must be >= 1");
  if (!(p.variance > 0.0)) throw ConfigError("process.variance", "must be positive");
  return p;
}

json process_to_json(const ProcessConfig& p) {
  json j;
  j["kind"] = p.kind;
  if (p.kind == "deterministic") j["sequence"] = p.sequence;
  if (p.kind == "iid") j["probabilities"] = p.probabilities;
  if (p.kind == "logistic") {
    j["features"] = p.features;
    j["variance"] = p.variance;
  }
  return j;
}

std::string read_text(const std::filesystem::path& path, const std::string& field) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(field, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
  const std::filesystem::path p(file);
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  Fields root(doc, "");
  RunConfig c;
  c.base_dir = base_dir;
  if (const json* g = root.find("game")) c.game = parse_game(*g);
  if (const json* l = root.find("learner")) c.learner = parse_learner(*l, "learner");
  if (const json* p = root.find("predictor")) c.predictor = parse_predictor(*p, "predictor");
  if (const json* p = root.find("process")) c.process = parse_process(*p);
  if (const json* a = root.find("agents")) {
    Fields af(*a, "agents");
    if (const json* o = af.find("overrides")) {
      if (!o->is_array()) throw ConfigError("agents.overrides", "must be an array");
      for (std::size_t i = 0; i < o->size(); ++i) {
        const std::string path = "agents.overrides[" + std::to_string(i) + "]";
        Fields of((*o)[i], path);
        AgentOverride ov;
        if (!of.find("agent")) throw ConfigError(path + ".agent", "is required");
        ov.agent = of.size("agent", 0);
        if (const json* l = of.find("learner")) ov.learner = parse_learner(*l, path + ".learner");
        if (const json* p = of.find("predictor")) ov.predictor = parse_predictor(*p, path + ".predictor");
        of.finish();
        c.overrides.push_back(std::move(ov));
      }
    }
    af.finish();
  }
  if (const json* r = root.find("run")) {
    Fields rf(*r, "run");
    c.run.horizon = rf.size("T", c.run.horizon);
    c.run.seed = rf.unsigned_integer("seed", c.run.seed);
    c.run.shared_predictions = rf.boolean("shared_predictions", c.run.shared_predictions);
    c.run.shared_covariates = rf.boolean("shared_covariates", c.run.shared_covariates);
    c.run.covariate_noise = rf.number("covariate_noise", c.run.covariate_noise);
    rf.finish();
    if (c.run.horizon == 0) throw ConfigError("run.T", "must be >= 1");
    if (!(c.run.covariate_noise >= 0.0)) throw ConfigError("run.covariate_noise", "must be >= 0");
  }
  root.finish();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_text(path, "--config");
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc, path.parent_path());
}

json to_json(const RunConfig& c) {
  json j;
  j["game"] = game_to_json(c.game);
  j["learner"] = learner_to_json(c.learner);
  j["predictor"] = predictor_to_json(c.predictor);
  j["process"] = process_to_json(c.process);
  json overrides = json::array();
  for (const auto& o : c.overrides) {
    json e;
    e["agent"] = o.agent;
    if (o.learner) e["learner"] = learner_to_json(*o.learner);
    if (o.predictor) e["predictor"] = predictor_to_json(*o.predictor);
    overrides.push_back(e);
  }
  j["agents"] = {{"overrides", overrides}};
  j["run"] = {{"T", c.run.horizon},
              {"seed", c.run.seed},
              {"shared_predictions", c.run.shared_predictions},
              {"shared_covariates", c.run.shared_covariates},
              {"covariate_noise", c.run.covariate_noise}};
  return j;
}

namespace {

double resolve_eta(const LearnerConfig& l, const std::string& field, std::size_t agents,
                   std::size_t horizon, std::size_t actions, std::size_t contexts) {
  if (l.eta) return *l.eta;
  try {
    if (l.eta_preset == "individual")
      return eta_individual(l.eta_multiplier, agents, horizon, actions, l.l_bar, contexts);
    if (l.eta_preset == "sum_regret") return l.eta_multiplier * eta_sum_regret(agents);
    return eta_robust(l.eta_multiplier, actions, l.l_bar, contexts, horizon);
  } catch (const Error& e) {
    throw ConfigError(field + ".eta_preset", e.what());
  }
}

}  // namespace

BuiltRun build_run(const RunConfig& c) {
  BuiltRun out;
  SimulationSpec& spec = out.spec;
  spec.horizon = c.run.horizon;
  spec.seed = c.run.seed;
  spec.shared_predictions = c.run.shared_predictions;
  spec.shared_covariates = c.run.shared_covariates;
  spec.covariate_noise = c.run.covariate_noise;
  spec.eta_preset = c.learner.eta ? "" : c.learner.eta_preset;
  out.smoothness = c.game.smoothness;
  Rng game_rng = make_rng(c.run.seed, "game", 0);

  std::vector<ContextIndex> default_sequence;
  if (c.game.kind == "example1") {
    auto ex = example1_game(c.run.horizon, c.game.negate_player2);
    auto game = std::make_shared<const TabularGame>(std::move(ex.game));
    out.tabular = game;
    spec.game = game;
    spec.contexts = ex.contexts;
    default_sequence = std::move(ex.sequence);
  } else if (c.game.kind == "random_tabular") {
    auto rg = random_tabular_game(c.game.agents, c.game.actions, c.game.dim, c.game.contexts, game_rng);
    auto game = std::make_shared<const TabularGame>(std::move(rg.game));
    out.tabular = game;
    spec.game = game;
    spec.contexts = rg.contexts;
  } else if (c.game.kind == "tabular") {
    for (std::size_t i = 0; i < c.game.context_vectors.size(); ++i)
      if (c.game.context_vectors[i].size() != c.game.dim)
        throw ConfigError("game.contexts[" + std::to_string(i) + "]",
                          "needs d=" + std::to_string(c.game.dim) + " entries");
    std::shared_ptr<const ContextSpace> contexts;
    try {
      contexts = std::make_shared<const ContextSpace>(c.game.context_vectors);
    } catch (const Error& e) {
      throw ConfigError("game.contexts", e.what());
    }
    std::optional<TabularGame> raw;
    try {
      raw.emplace(c.game.agents, c.game.actions, c.game.dim, c.game.payoffs);
    } catch (const Error& e) {
      throw ConfigError("game.payoffs", e.what());
    }
    auto norm = validate_and_normalize(*raw, *contexts);
    auto game = std::make_shared<const TabularGame>(std::move(norm.game));
    out.tabular = game;
    spec.game = game;
    spec.contexts = contexts;
  } else {
    const auto net_path = resolve(c.base_dir, c.game.network);
    const auto q_path = resolve(c.base_dir, c.game.quantities);
    const TntpNetwork net = parse_tntp(read_text(net_path, "game.network"));
    auto graph = std::make_shared<const Graph>(net.graph());
    const auto quantities = parse_quantities(read_text(q_path, "game.quantities"), graph->nodes());
    const std::vector<double> base =
        c.game.coefficient == "bpr" ? bpr_coefficients(net) : std::vector<double>{};
    RoutingBuild build = build_routing_game(graph, quantities, c.game.routing, game_rng, base);
    out.routing = build.game;
    spec.game = build.game;
    spec.contexts = build.contexts;
    spec.keep_cost_matrices = false;
    out.routing_build = std::move(build);
  }

  const std::size_t jn = spec.game->agents();
  const std::size_t k = spec.game->actions();
  const std::size_t m = spec.contexts->size();

  std::string kind = c.process.kind;
  if (kind == "auto") {
    if (c.game.kind == "example1") kind = "deterministic";
    else if (c.game.kind == "routing") kind = "logistic";
    else kind = "iid";
  }
  if (kind == "deterministic") {
    spec.process = DeterministicSequence{c.process.sequence.empty() ? default_sequence : c.process.sequence};
  } else if (kind == "iid") {
    spec.process = IidCategorical{c.process.probabilities.empty()
                                      ? std::vector<double>(m, 1.0 / static_cast<double>(m))
                                      : c.process.probabilities};
  } else {
    Rng prng = make_rng(c.run.seed, "process_params", 0);
    LogisticCovariate lp = random_logistic_process(m, c.process.features, prng);
    lp.variance = c.process.variance;
    spec.process = std::move(lp);
  }

  std::vector<LearnerConfig> learners(jn, c.learner);
  std::vector<PredictorSpec> predictors(jn, c.predictor);
  std::vector<std::string> learner_field(jn, "learner");
  for (std::size_t i = 0; i < c.overrides.size(); ++i) {
    const AgentOverride& o = c.overrides[i];
    if (o.agent >= jn)
      throw ConfigError("agents.overrides[" + std::to_string(i) + "].agent",
                        "index " + std::to_string(o.agent) + " out of range (J=" + std::to_string(jn) + ")");
    if (o.learner) {
      learners[o.agent] = *o.learner;
      learner_field[o.agent] = "agents.overrides[" + std::to_string(i) + "].learner";
    }
    if (o.predictor) predictors[o.agent] = *o.predictor;
  }
  if (spec.shared_predictions)
    for (std::size_t j = 1; j < jn; ++j)
      if (predictor_to_json(predictors[j]) != predictor_to_json(predictors[0]))
        throw ConfigError("run.shared_predictions", "shared mode needs one predictor spec for every agent");
  const bool logistic_process = kind == "logistic";
  out.l_bar = 0.0;
  for (std::size_t j = 0; j < jn; ++j) {
    const std::function<void(const PredictorSpec&)> check = [&](const PredictorSpec& p) {
      if (p.kind == PredictorKind::Logistic && !logistic_process)
        throw ConfigError("predictor.kind", "logistic predictors need process.kind = logistic");
      for (const auto& e : p.experts) check(e);
    };
    check(predictors[j]);
    AgentSetup a;
    a.learner = parse_learner_kind(learners[j].kind);
    a.eta = resolve_eta(learners[j], learner_field[j], jn, spec.horizon, k, m);

    a.predictor = predictors[j];
    spec.agents.push_back(std::move(a));
    out.l_bar = std::max(out.l_bar, learners[j].l_bar);
  }
  return out;
}

}  // namespace ctxgames::app
