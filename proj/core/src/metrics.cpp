#include "ctxgames/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ctxgames {

namespace {

double log_k(std::size_t k) { return std::log(static_cast<double>(k)); }

void check_agent(const Trace& trace, AgentIndex agent) {
  if (agent >= trace.agents())
    throw DimensionError("agent index " + std::to_string(agent) + " out of range for J=" +
                         std::to_string(trace.agents()));
}

std::size_t argmin(std::span<const double> v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

AgentStream agent_stream(const Trace& trace, AgentIndex agent) {
  check_agent(trace, agent);
  AgentStream s;
  s.contexts = &trace.contexts();
  s.actions = trace.actions();
  const std::size_t n = trace.rounds();
  s.realized.reserve(n);
  s.predicted.reserve(n);
  s.strategies.reserve(n * s.actions);
  s.losses.reserve(n * s.actions);
  s.costs.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    s.realized.push_back(trace.realized(t));
    s.predicted.push_back(trace.predicted(t, agent));
    const auto w = trace.strategy(t, agent);
    const auto l = trace.loss(t, agent);
    s.strategies.insert(s.strategies.end(), w.begin(), w.end());
    s.losses.insert(s.losses.end(), l.begin(), l.end());
    s.costs.push_back(trace.cost(t, agent));
  }
  return s;
}

std::vector<AgentStream> inner_streams(const Trace& trace, AgentIndex agent) {
  check_agent(trace, agent);
  const std::size_t k = trace.actions();
  const std::size_t n = trace.rounds();
  std::vector<AgentStream> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    out[c].contexts = &trace.contexts();
    out[c].actions = k;
  }
  std::vector<double> scaled(k);
  for (std::size_t t = 0; t < n; ++t) {
    const Matrix& p = trace.recommendations(t, agent);
    const auto w = trace.strategy(t, agent);
    const auto l = trace.loss(t, agent);
    for (std::size_t c = 0; c < k; ++c) {
      AgentStream& s = out[c];
      s.realized.push_back(trace.realized(t));
      s.predicted.push_back(trace.predicted(t, agent));
      double cost = 0.0;
      for (std::size_t a = 0; a < k; ++a) {
        scaled[a] = w[c] * l[a];
        s.strategies.push_back(p(a, c));
        cost += scaled[a] * p(a, c);
      }
      s.losses.insert(s.losses.end(), scaled.begin(), scaled.end());
      s.costs.push_back(cost);
    }
  }
  return out;
}

RegretAccumulator::RegretAccumulator(std::size_t contexts, std::size_t actions)
    : m_(contexts), k_(actions), per_action_(contexts * actions, 0.0),
      swap_(contexts * actions * actions, 0.0), positive_(contexts * actions, 0.0),
      positive_mis_(contexts * actions, 0.0) {}

void RegretAccumulator::add(ContextIndex realized, ContextIndex predicted,
                            std::span<const double> w, std::span<const double> loss, double cost) {
  if (realized >= m_) throw DimensionError("realized context out of range");
  if (w.size() != k_ || loss.size() != k_) throw DimensionError("round has the wrong action count");
  ++rounds_;
  const bool miss = predicted != realized;
  if (miss) ++mispredictions_;
  incurred_ += cost;
  const std::size_t base = realized * k_;
  for (std::size_t k = 0; k < k_; ++k) {
    per_action_[base + k] += loss[k];
    double* row = &swap_[(base + k) * k_];
    for (std::size_t k2 = 0; k2 < k_; ++k2) row[k2] += w[k] * loss[k2];
    const double pos = std::max(0.0, cost - loss[k]);
    positive_[base + k] += pos;
    if (miss) positive_mis_[base + k] += pos;
  }
}

double RegretAccumulator::external_regret() const {
  double best = 0.0;
  for (std::size_t z = 0; z < m_; ++z) {
    const auto row = std::span<const double>(per_action_).subspan(z * k_, k_);
    best += *std::min_element(row.begin(), row.end());
  }
  return incurred_ - best;
}

double RegretAccumulator::swap_regret() const {
  double total = 0.0;
  for (std::size_t z = 0; z < m_; ++z)
    for (std::size_t k = 0; k < k_; ++k) {
      const auto row = std::span<const double>(swap_).subspan((z * k_ + k) * k_, k_);
      total += row[k] - *std::min_element(row.begin(), row.end());
    }
  return total;
}

double RegretAccumulator::mispredicted_share() const {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t z = 0; z < m_; ++z) {
    const std::size_t best =
        argmin(std::span<const double>(per_action_).subspan(z * k_, k_));
    num += positive_mis_[z * k_ + best];
    den += positive_[z * k_ + best];
  }
  return den > 0.0 ? num / den : 0.0;
}

RegretAccumulator accumulate(const AgentStream& s) {
  RegretAccumulator acc(s.contexts->size(), s.actions);
  for (std::size_t t = 0; t < s.rounds(); ++t)
    acc.add(s.realized[t], s.predicted[t], s.strategy(t), s.loss(t), s.costs[t]);
  return acc;
}

std::size_t misprediction_count(const Trace& trace, AgentIndex agent) {
  check_agent(trace, agent);
  std::size_t n = 0;
  for (std::size_t t = 0; t < trace.rounds(); ++t)
    if (trace.predicted(t, agent) != trace.realized(t)) ++n;
  return n;
}

double contextual_external_regret(const AgentStream& s) { return accumulate(s).external_regret(); }
double contextual_swap_regret(const AgentStream& s) { return accumulate(s).swap_regret(); }

double contextual_external_regret(const Trace& trace, AgentIndex agent) {
  return contextual_external_regret(agent_stream(trace, agent));
}

double contextual_swap_regret(const Trace& trace, AgentIndex agent) {
  return contextual_swap_regret(agent_stream(trace, agent));
}

double misprediction_regret_share(const Trace& trace, AgentIndex agent) {
  return accumulate(agent_stream(trace, agent)).mispredicted_share();
}

double classic_external_regret(const AgentStream& s) {
  double incurred = 0.0;
  std::vector<double> totals(s.actions, 0.0);
  for (std::size_t t = 0; t < s.rounds(); ++t) {
    const auto w = s.strategy(t);
    const auto l = s.loss(t);
    for (std::size_t k = 0; k < s.actions; ++k) {
      incurred += w[k] * l[k];
      totals[k] += l[k];
    }
  }
  return incurred - *std::min_element(totals.begin(), totals.end());
}

std::vector<CurvePoint> regret_curve(const AgentStream& s) {
  RegretAccumulator acc(s.contexts->size(), s.actions);
  std::vector<CurvePoint> out;
  out.reserve(s.rounds());
  for (std::size_t t = 0; t < s.rounds(); ++t) {
    acc.add(s.realized[t], s.predicted[t], s.strategy(t), s.loss(t), s.costs[t]);
    out.push_back({acc.external_regret(),
                   static_cast<double>(acc.mispredictions()) / static_cast<double>(t + 1),
                   acc.mispredicted_share()});
  }
  return out;
}

EmpiricalPolicy::EmpiricalPolicy(const Trace& trace)
    : trace_(&trace), rounds_(trace.contexts().size()) {
  for (std::size_t t = 0; t < trace.rounds(); ++t) rounds_[trace.realized(t)].push_back(t);
}

std::vector<JointProfile> EmpiricalPolicy::components(ContextIndex z) const {
  const auto& rs = rounds_.at(z);
  std::vector<JointProfile> out;
  if (rs.empty()) {
    out.emplace_back(std::vector<Strategy>(trace_->agents(), Strategy::uniform(trace_->actions())));
    return out;
  }
  out.reserve(rs.size());
  for (std::size_t t : rs) {
    std::vector<Strategy> ws;
    ws.reserve(trace_->agents());
    for (AgentIndex j = 0; j < trace_->agents(); ++j) {
      const auto w = trace_->strategy(t, j);
      ws.emplace_back(std::vector<double>(w.begin(), w.end()));
    }
    out.emplace_back(std::move(ws));
  }
  return out;
}

double EmpiricalPolicy::weight(ContextIndex z) const {
  const auto n = rounds_.at(z).size();
  return n == 0 ? 1.0 : 1.0 / static_cast<double>(n);
}

namespace {

// Calls fn(j, z, w, loss) for every component of the empirical policy and
// every agent, where loss = Phi^j(component)^T z.
template <class Fn>
void for_each_component(const Trace& trace, const Game* game, Fn&& fn) {
  const EmpiricalPolicy policy(trace);
  const ContextSpace& cs = trace.contexts();
  for (ContextIndex z = 0; z < cs.size(); ++z) {
    if (policy.occurrences(z) == 0) continue;
    if (game) {
      for (const JointProfile& profile : policy.components(z)) {
        const auto phis = game->cost_matrices(profile);
        for (AgentIndex j = 0; j < trace.agents(); ++j) {
          const auto l = phis[j].transpose_times(cs[z]);
          fn(j, z, profile[j].weights(), std::span<const double>(l));
        }
      }
    } else {
      for (std::size_t t : policy.rounds(z))
        for (AgentIndex j = 0; j < trace.agents(); ++j)
          fn(j, z, trace.strategy(t, j), trace.loss(t, j));
    }
  }
}

void check_game(const Trace& trace, const Game* game) {
  if (game && (game->agents() != trace.agents() || game->actions() != trace.actions() ||
               game->dim() != trace.dim()))
    throw DimensionError("game shape does not match the trace");
}

}  // namespace

double cce_epsilon(const Trace& trace, const Game* game) {
  check_game(trace, game);
  if (trace.rounds() == 0) return 0.0;
  const std::size_t m = trace.contexts().size();
  const std::size_t k = trace.actions();
  std::vector<double> played(trace.agents(), 0.0);
  std::vector<double> deviation(trace.agents() * m * k, 0.0);
  for_each_component(trace, game, [&](AgentIndex j, ContextIndex z, std::span<const double> w,
                                      std::span<const double> l) {
    double c = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      c += w[a] * l[a];
      deviation[(j * m + z) * k + a] += l[a];
    }
    played[j] += c;
  });
  double eps = -std::numeric_limits<double>::infinity();
  for (AgentIndex j = 0; j < trace.agents(); ++j) {
    double best = 0.0;
    for (ContextIndex z = 0; z < m; ++z) {
      const auto row = std::span<const double>(deviation).subspan((j * m + z) * k, k);
      best += *std::min_element(row.begin(), row.end());
    }
    eps = std::max(eps, (played[j] - best) / static_cast<double>(trace.rounds()));
  }
  return eps;
}

double ce_epsilon(const Trace& trace, const Game* game) {
  check_game(trace, game);
  if (trace.rounds() == 0) return 0.0;
  const std::size_t m = trace.contexts().size();
  const std::size_t k = trace.actions();
  std::vector<double> s(trace.agents() * m * k * k, 0.0);
  for_each_component(trace, game, [&](AgentIndex j, ContextIndex z, std::span<const double> w,
                                      std::span<const double> l) {
    double* block = &s[(j * m + z) * k * k];
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) block[a * k + b] += w[a] * l[b];
  });
  double eps = -std::numeric_limits<double>::infinity();
  for (AgentIndex j = 0; j < trace.agents(); ++j) {
    double gap = 0.0;
    for (ContextIndex z = 0; z < m; ++z)
      for (std::size_t a = 0; a < k; ++a) {
        const auto row = std::span<const double>(s).subspan(((j * m + z) * k + a) * k, k);
        gap += row[a] - *std::min_element(row.begin(), row.end());
      }
    eps = std::max(eps, gap / static_cast<double>(trace.rounds()));
  }
  return eps;
}

BoundCheck make_check(double regret, double rhs) {
  BoundCheck c;
  c.regret = regret;
  c.rhs = rhs;
  c.slack = rhs - regret;
  c.satisfied = c.slack >= -kBoundSlackTolerance;
  return c;
}

double rvu_bound_rhs(const AgentStream& s, double eta) {
  if (!(eta > 0.0)) throw Error("learning rate must be positive");
  const std::size_t m = s.contexts->size();
  const std::size_t k = s.actions;
  std::vector<double> prev_loss(m * k, 0.0);
  std::vector<double> prev_w(m * k, 1.0 / static_cast<double>(k));
  double path_phi = 0.0;
  double path_w = 0.0;
  std::size_t mis = 0;
  for (std::size_t t = 0; t < s.rounds(); ++t) {
    const ContextIndex z = s.realized[t];
    if (s.predicted[t] != z) ++mis;
    const auto l = s.loss(t);
    const auto w = s.strategy(t);
    double dl = 0.0;
    double dw = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      dl = std::max(dl, std::abs(l[a] - prev_loss[z * k + a]));
      dw += std::abs(w[a] - prev_w[z * k + a]);
      prev_loss[z * k + a] = l[a];
      prev_w[z * k + a] = w[a];
    }
    path_phi += dl * dl;
    path_w += dw * dw;
  }
  const double lk = log_k(k);
  const double l_t = static_cast<double>(mis);
  return ((5.0 + lk) * l_t + static_cast<double>(m) * lk) / eta + eta * (path_phi + 4.0 * l_t) -
         path_w / (16.0 * eta);
}

double rvu_bound_rhs(const Trace& trace, AgentIndex agent, double eta) {
  return rvu_bound_rhs(agent_stream(trace, agent), eta);
}

double individual_bound_rhs(const Trace& trace, AgentIndex agent, double eta, double l_bar) {
  check_agent(trace, agent);
  if (!(eta > 0.0)) throw Error("learning rate must be positive");
  std::size_t worst = 0;
  for (AgentIndex j = 0; j < trace.agents(); ++j)
    worst = std::max(worst, misprediction_count(trace, j));
  if (l_bar < static_cast<double>(worst))
    throw Error("bound premise violated: L_bar " + std::to_string(l_bar) +
                " is below the largest misprediction count " + std::to_string(worst));
  const double lk = log_k(trace.actions());
  const double m = static_cast<double>(trace.contexts().size());
  const double j1 = static_cast<double>(trace.agents() - 1);
  const double t = static_cast<double>(trace.rounds());
  return ((5.0 + lk) * l_bar + m * lk) / eta +
         eta * (j1 * j1 * (9.0 * t * eta * eta + 4.0 * l_bar) + 4.0 * l_bar);
}

double shared_prediction_bound_rhs(const Trace& trace, AgentIndex agent, double eta) {
  check_agent(trace, agent);
  if (!(eta > 0.0)) throw Error("learning rate must be positive");
  std::size_t shared_mis = 0;
  for (std::size_t t = 0; t < trace.rounds(); ++t) {
    const ContextIndex p = trace.predicted(t, 0);
    for (AgentIndex j = 1; j < trace.agents(); ++j)
      if (trace.predicted(t, j) != p)
        throw Error("shared-prediction bound needs identical predictions (round " +
                    std::to_string(t + 1) + ")");
    if (p != trace.realized(t)) ++shared_mis;
  }
  const double l = static_cast<double>(shared_mis);
  const double lk = log_k(trace.actions());
  const double m = static_cast<double>(trace.contexts().size());
  const double j1 = static_cast<double>(trace.agents() - 1);
  const double t = static_cast<double>(trace.rounds());
  const double a = (5.0 + lk) * l + m * lk;
  const double b = 9.0 * j1 * j1 * t;
  const double c = 12.0 * l;
  return a / eta + b * eta * eta * eta + c * eta;
}

double sum_regret_bound_rhs(const Trace& trace) {
  const std::size_t jn = trace.agents();
  if (jn < 2) throw Error("sum-of-regrets bound needs J >= 2");
  const auto& meta = trace.metadata();
  const double expected = 1.0 / (4.0 * static_cast<double>(jn - 1));
  if (meta.etas.size() != jn || meta.learners.size() != jn)
    throw Error("trace metadata lacks per-agent learner settings");
  for (AgentIndex j = 0; j < jn; ++j) {
    if (meta.learners[j] != "pomwu")
      throw Error("sum-of-regrets bound needs every agent on pomwu (agent " + std::to_string(j) +
                  " runs " + meta.learners[j] + ")");
    if (std::abs(meta.etas[j] - expected) > 1e-12 * expected)
      throw Error("sum-of-regrets bound needs eta = 1/(4(J-1)) = " + std::to_string(expected) +
                  " (agent " + std::to_string(j) + " has " + std::to_string(meta.etas[j]) + ")");
  }
  double l_total = 0.0;
  for (AgentIndex j = 0; j < jn; ++j) l_total += static_cast<double>(misprediction_count(trace, j));
  const double lk = log_k(trace.actions());
  const double m = static_cast<double>(trace.contexts().size());
  const double jd = static_cast<double>(jn);
  return 4.0 * jd * ((5.0 + lk) * l_total + m * jd * lk) + l_total / (jd - 1.0);
}

namespace {

// pd[(j * joint + a) * m + z] = <z, phi^j(a)>.
std::vector<double> bilinear_table(const TabularGame& game, const ContextSpace& contexts) {
  if (contexts.dim() != game.dim()) throw DimensionError("context dimension does not match game");
  const std::size_t m = contexts.size();
  std::vector<double> pd(game.agents() * game.joint_actions() * m);
  for (AgentIndex j = 0; j < game.agents(); ++j)
    for (std::size_t a = 0; a < game.joint_actions(); ++a) {
      const auto p = game.payoff_at(j, a);
      for (ContextIndex z = 0; z < m; ++z) pd[(j * game.joint_actions() + a) * m + z] = dot(contexts[z], p);
    }
  return pd;
}

}  // namespace

SmoothnessResult check_smoothness(const TabularGame& game, const ContextSpace& contexts,
                                  double delta, double mu, double tolerance) {
  if (!(delta >= 0.0) || !(mu >= 0.0)) throw Error("smoothness parameters must be nonnegative");
  const std::size_t jn = game.agents();
  const std::size_t n = game.joint_actions();
  const std::size_t m = contexts.size();
  constexpr std::size_t kLimit = 100'000'000;
  if (n > kLimit / n || n * n > kLimit / m)
    throw GuardError("smoothness check over (a, a*, z) exceeds " + std::to_string(kLimit) +
                     " triples");
  const auto pd = bilinear_table(game, contexts);
  std::vector<std::size_t> stride(jn, 1);
  for (std::size_t j = jn - 1; j-- > 0;) stride[j] = stride[j + 1] * game.actions();

  SmoothnessResult res;
  res.worst_gap = -std::numeric_limits<double>::infinity();
  std::size_t worst_a = 0;
  std::size_t worst_s = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t s = 0; s < n; ++s)
      for (ContextIndex z = 0; z < m; ++z) {
        double lhs = 0.0;
        double rhs = 0.0;
        for (AgentIndex j = 0; j < jn; ++j) {
          const std::size_t da = a / stride[j] % game.actions();
          const std::size_t ds = s / stride[j] % game.actions();
          const std::size_t mixed = a - da * stride[j] + ds * stride[j];
          lhs += pd[(j * n + mixed) * m + z];
          rhs += delta * pd[(j * n + s) * m + z] + mu * pd[(j * n + a) * m + z];
        }
        if (lhs - rhs > res.worst_gap) {
          res.worst_gap = lhs - rhs;
          worst_a = a;
          worst_s = s;
          res.z = z;
        }
      }
  res.smooth = res.worst_gap <= tolerance;
  res.a.assign(jn, 0);
  res.a_star.assign(jn, 0);
  game.decode(worst_a, res.a);
  game.decode(worst_s, res.a_star);
  return res;
}

std::vector<double> optimal_social_cost_per_context(const TabularGame& game,
                                                    const ContextSpace& contexts) {
  const auto pd = bilinear_table(game, contexts);
  const std::size_t n = game.joint_actions();
  const std::size_t m = contexts.size();
  std::vector<double> best(m, std::numeric_limits<double>::infinity());
  for (std::size_t a = 0; a < n; ++a)
    for (ContextIndex z = 0; z < m; ++z) {
      double total = 0.0;
      for (AgentIndex j = 0; j < game.agents(); ++j) total += pd[(j * n + a) * m + z];
      best[z] = std::min(best[z], total);
    }
  return best;
}

double optimal_social_cost(const TabularGame& game, const Trace& trace) {
  if (trace.rounds() == 0) return 0.0;
  const auto best = optimal_social_cost_per_context(game, trace.contexts());
  double total = 0.0;
  for (std::size_t t = 0; t < trace.rounds(); ++t) total += best[trace.realized(t)];
  return total / static_cast<double>(trace.rounds());
}

double average_social_cost(const Trace& trace) {
  if (trace.rounds() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t t = 0; t < trace.rounds(); ++t)
    for (AgentIndex j = 0; j < trace.agents(); ++j) total += trace.cost(t, j);
  return total / static_cast<double>(trace.rounds());
}

double welfare_bound_rhs(double c_star, double regret_sum, double delta, double mu,
                         std::size_t rounds) {
  if (!(mu < 1.0)) throw Error("welfare bound needs mu < 1");
  if (rounds == 0) throw Error("welfare bound needs T >= 1");
  return delta / (1.0 - mu) * c_star + regret_sum / ((1.0 - mu) * static_cast<double>(rounds));
}

double max_abs(std::span<const double> v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

double max_entry_norm(const Matrix& m) { return max_abs(m.data()); }

VariationMeasures variation_measures(std::span<const Matrix> seq, const std::optional<Matrix>& initial) {
  if (seq.empty()) return {0.0, 0.0};
  const std::size_t r = seq[0].rows();
  const std::size_t c = seq[0].cols();
  for (const Matrix& a : seq)
    if (a.rows() != r || a.cols() != c) throw DimensionError("matrix sequence shapes differ");
  if (initial && (initial->rows() != r || initial->cols() != c))
    throw DimensionError("initial matrix shape differs from the sequence");

  Matrix mean(r, c);
  for (const Matrix& a : seq)
    for (std::size_t i = 0; i < r * c; ++i) mean.data()[i] += a.data()[i];
  for (double& x : mean.data()) x /= static_cast<double>(seq.size());

  VariationMeasures out{0.0, 0.0};
  const Matrix* prev = initial ? &*initial : &seq[0];
  for (const Matrix& a : seq) {
    double dv = 0.0;
    double dw = 0.0;
    for (std::size_t i = 0; i < r * c; ++i) {
      dv = std::max(dv, std::abs(a.data()[i] - prev->data()[i]));
      dw = std::max(dw, std::abs(a.data()[i] - mean.data()[i]));
    }
    out.v += dv * dv;
    out.w += dw;
    prev = &a;
  }
  return out;
}

}  // namespace ctxgames
