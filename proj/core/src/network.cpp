#include "ctxgames/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <sstream>

#include "ctxgames/format.hpp"

namespace ctxgames {

Graph::Graph(std::size_t nodes, std::vector<Edge> edges)
    : nodes_(nodes), edges_(std::move(edges)), out_(nodes), in_(nodes) {
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& ed = edges_[e];
    if (ed.from >= nodes_ || ed.to >= nodes_)
      throw DimensionError("edge " + std::to_string(e) + " references a node out of range");
    if (ed.from == ed.to) throw Error("edge " + std::to_string(e) + " is a self-loop");
    if (!(ed.cost > 0.0) || !std::isfinite(ed.cost))
      throw Error("edge " + std::to_string(e) + " cost must be positive and finite");
    out_[ed.from].push_back(e);
    in_[ed.to].push_back(e);
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    ++line;
    fn(line, text.substr(pos, end - pos));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
}

double number_at(std::string_view tok, std::size_t line, const char* field) {
  try {
    return parse_double(tok);
  } catch (const Error&) {
    throw ParseError(std::string("malformed ") + field + " '" + std::string(tok) + "'", line);
  }
}

std::size_t count_at(std::string_view tok, std::size_t line, const char* field) {
  long long v = 0;
  try {
    v = parse_integer(tok);
  } catch (const Error&) {
    throw ParseError(std::string("malformed ") + field + " '" + std::string(tok) + "'", line);
  }
  if (v < 0) throw ParseError(std::string(field) + " must be nonnegative", line);
  return static_cast<std::size_t>(v);
}

}  // namespace

Graph TntpNetwork::graph() const {
  std::vector<Edge> edges;
  edges.reserve(links.size());
  for (const auto& l : links) edges.push_back({l.init_node - 1, l.term_node - 1, l.free_flow_time});
  return Graph(nodes, std::move(edges));
}

TntpNetwork parse_tntp(std::string_view text) {
  TntpNetwork net;
  bool in_metadata = true;
  std::optional<std::size_t> node_count;
  std::optional<std::size_t> link_count;
  std::size_t last_line = 0;
  for_each_line(text, [&](std::size_t line, std::string_view raw) {
    last_line = line;
    const auto s = trim(raw);
    if (s.empty() || s.front() == '~') return;
    if (in_metadata) {
      if (s.front() != '<')
        throw ParseError("expected a metadata header or <END OF METADATA>", line);
      const auto close = s.find('>');
      if (close == std::string_view::npos) throw ParseError("unterminated metadata header", line);
      const std::string key(trim(s.substr(1, close - 1)));
      const std::string value(trim(s.substr(close + 1)));
      if (key == "END OF METADATA") {
        if (!node_count) throw ParseError("missing <NUMBER OF NODES> header", line);
        if (!link_count) throw ParseError("missing <NUMBER OF LINKS> header", line);
        in_metadata = false;
      } else if (key == "NUMBER OF NODES") {
        node_count = count_at(value, line, "node count");
      } else if (key == "NUMBER OF LINKS") {
        link_count = count_at(value, line, "link count");
      } else {
        net.metadata[key] = value;
      }
      return;
    }
    auto tok = split_ws(s);
    if (!tok.empty() && tok.back() == ";") tok.pop_back();
    if (!tok.empty() && tok.back().size() > 1 && tok.back().back() == ';')
      tok.back().remove_suffix(1);
    if (tok.size() != 10)
      throw ParseError("link row has " + std::to_string(tok.size()) + " fields, expected 10", line);
    TntpLink l{};
    l.init_node = count_at(tok[0], line, "init_node");
    l.term_node = count_at(tok[1], line, "term_node");
    l.capacity = number_at(tok[2], line, "capacity");
    l.length = number_at(tok[3], line, "length");
    l.free_flow_time = number_at(tok[4], line, "free_flow_time");
    l.b = number_at(tok[5], line, "b");
    l.power = number_at(tok[6], line, "power");
    l.speed = number_at(tok[7], line, "speed");
    l.toll = number_at(tok[8], line, "toll");
    l.type = static_cast<int>(count_at(tok[9], line, "link type"));
    if (l.init_node < 1 || l.init_node > *node_count || l.term_node < 1 ||
        l.term_node > *node_count)
      throw ParseError("link endpoint outside 1.." + std::to_string(*node_count), line);
    if (l.init_node == l.term_node) throw ParseError("link is a self-loop", line);
    if (!(l.free_flow_time > 0.0)) throw ParseError("free_flow_time must be positive", line);
    net.links.push_back(l);
  });
  if (in_metadata) throw ParseError("missing <END OF METADATA>", last_line);
  if (net.links.size() != *link_count)
    throw ParseError("found " + std::to_string(net.links.size()) + " links, header declares " +
                         std::to_string(*link_count),
                     last_line);
  net.nodes = *node_count;
  return net;
}

std::string serialize_tntp(const TntpNetwork& net) {
  std::ostringstream os;
  for (const auto& [key, value] : net.metadata) os << '<' << key << "> " << value << '\n';
  os << "<NUMBER OF NODES> " << net.nodes << '\n';
  os << "<NUMBER OF LINKS> " << net.links.size() << '\n';
  os << "<END OF METADATA>\n\n\n";
  os << "~\tinit_node\tterm_node\tcapacity\tlength\tfree_flow_time\tb\tpower\tspeed\ttoll\tlink_type\t;\n";
  for (const auto& l : net.links) {
    os << '\t' << l.init_node << '\t' << l.term_node << '\t' << format_double(l.capacity) << '\t'
       << format_double(l.length) << '\t' << format_double(l.free_flow_time) << '\t'
       << format_double(l.b) << '\t' << format_double(l.power) << '\t' << format_double(l.speed)
       << '\t' << format_double(l.toll) << '\t' << l.type << "\t;\n";
  }
  return os.str();
}

std::vector<OdQuantity> parse_quantities(std::string_view text, std::size_t nodes) {
  std::vector<OdQuantity> out;
  for_each_line(text, [&](std::size_t line, std::string_view raw) {
    const auto s = trim(raw);
    if (s.empty() || s.front() == '#' || s.front() == '~') return;
    const auto tok = split_ws(s);
    if (tok.size() != 3)
      throw ParseError("quantity row has " + std::to_string(tok.size()) + " fields, expected 3", line);
    const std::size_t o = count_at(tok[0], line, "origin");
    const std::size_t d = count_at(tok[1], line, "destination");
    const double q = number_at(tok[2], line, "quantity");
    if (o < 1 || o > nodes || d < 1 || d > nodes)
      throw ParseError("node id outside 1.." + std::to_string(nodes), line);
    if (!(q >= 0.0) || !std::isfinite(q)) throw ParseError("quantity must be finite and >= 0", line);
    out.push_back({o - 1, d - 1, q});
  });
  return out;
}

double path_cost(const Graph& graph, const std::vector<std::size_t>& edges) {
  double c = 0.0;
  for (std::size_t e : edges) c += graph.edge(e).cost;
  return c;
}

void validate_path(const Graph& graph, const Path& path, std::size_t source, std::size_t target) {
  if (path.nodes.size() < 2 || path.edges.size() + 1 != path.nodes.size())
    throw Error("path must have at least one edge and one more node than edges");
  if (path.nodes.front() != source || path.nodes.back() != target)
    throw Error("path does not connect its origin and destination");
  for (std::size_t i = 0; i < path.edges.size(); ++i) {
    if (path.edges[i] >= graph.edge_count()) throw Error("path uses a nonexistent edge");
    const Edge& e = graph.edge(path.edges[i]);
    if (e.from != path.nodes[i] || e.to != path.nodes[i + 1])
      throw Error("path edge " + std::to_string(i) + " does not join consecutive nodes");
  }
}

namespace {

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

bool path_less(const Path& a, const Path& b) {
  if (!close(a.cost, b.cost)) return a.cost < b.cost;
  return a.nodes < b.nodes;
}

class SpurSearch {
 public:
  explicit SpurSearch(const Graph& g)
      : g_(g), node_blocked_(g.nodes(), 0), edge_blocked_(g.edge_count(), 0),
        dist_(g.nodes()) {}

  std::vector<char>& nodes() { return node_blocked_; }
  std::vector<char>& edges() { return edge_blocked_; }

  // Lexicographically smallest among the cheapest paths src -> dst that
  // avoid blocked nodes and edges.
  std::optional<Path> run(std::size_t src, std::size_t dst) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::fill(dist_.begin(), dist_.end(), inf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist_[dst] = 0.0;
    pq.push({0.0, dst});
    while (!pq.empty()) {
      auto [d, v] = pq.top();
      pq.pop();
      if (d > dist_[v]) continue;
      for (std::size_t e : g_.in_edges(v)) {
        if (edge_blocked_[e]) continue;
        const std::size_t u = g_.edge(e).from;
        if (node_blocked_[u]) continue;
        const double nd = d + g_.edge(e).cost;
        if (nd < dist_[u]) {
          dist_[u] = nd;
          pq.push({nd, u});
        }
      }
    }
    if (dist_[src] == inf) return std::nullopt;
    Path p;
    p.nodes.push_back(src);
    std::size_t cur = src;
    while (cur != dst) {
      std::size_t best_e = g_.edge_count();
      for (std::size_t e : g_.out_edges(cur)) {
        if (edge_blocked_[e]) continue;
        const Edge& ed = g_.edge(e);
        if (node_blocked_[ed.to] || dist_[ed.to] == inf) continue;
        if (!close(dist_[cur], ed.cost + dist_[ed.to])) continue;
        if (best_e == g_.edge_count()) {
          best_e = e;
          continue;
        }
        const Edge& be = g_.edge(best_e);
        if (ed.to < be.to || (ed.to == be.to && ed.cost < be.cost)) best_e = e;
      }
      if (best_e == g_.edge_count()) return std::nullopt;  // numerically unreachable
      p.edges.push_back(best_e);
      cur = g_.edge(best_e).to;
      if (std::find(p.nodes.begin(), p.nodes.end(), cur) != p.nodes.end()) return std::nullopt;
      p.nodes.push_back(cur);
    }
    return p;
  }

 private:
  const Graph& g_;
  std::vector<char> node_blocked_;
  std::vector<char> edge_blocked_;
  std::vector<double> dist_;
};

}  // namespace

std::vector<Path> yen_k_shortest(const Graph& graph, std::size_t source, std::size_t target,
                                 std::size_t k) {
  if (source >= graph.nodes() || target >= graph.nodes())
    throw DimensionError("path endpoint out of range");
  if (source == target) throw Error("source and target must differ");
  std::vector<Path> accepted;
  if (k == 0) return accepted;
  SpurSearch search(graph);
  auto first = search.run(source, target);
  if (!first) return accepted;
  first->cost = path_cost(graph, first->edges);
  accepted.push_back(std::move(*first));

  std::vector<Path> candidates;
  auto known = [&](const Path& p) {
    return std::find(accepted.begin(), accepted.end(), p) != accepted.end() ||
           std::find(candidates.begin(), candidates.end(), p) != candidates.end();
  };

  while (accepted.size() < k) {
    const Path prev = accepted.back();
    for (std::size_t i = 0; i + 1 < prev.nodes.size(); ++i) {
      const std::size_t spur = prev.nodes[i];
      auto& nb = search.nodes();
      auto& eb = search.edges();
      std::fill(nb.begin(), nb.end(), 0);
      std::fill(eb.begin(), eb.end(), 0);
      for (std::size_t r = 0; r < i; ++r) nb[prev.nodes[r]] = 1;
      for (const Path& p : accepted) {
        if (p.nodes.size() <= i + 1) continue;
        if (!std::equal(prev.nodes.begin(), prev.nodes.begin() + static_cast<long>(i) + 1,
                        p.nodes.begin()))
          continue;
        // Block every parallel edge to the next node so the same node
        // sequence cannot reappear through a different edge.
        for (std::size_t e : graph.out_edges(spur))
          if (graph.edge(e).to == p.nodes[i + 1]) eb[e] = 1;
      }
      auto tail = search.run(spur, target);
      if (!tail) continue;
      Path full;
      full.nodes.assign(prev.nodes.begin(), prev.nodes.begin() + static_cast<long>(i));
      full.edges.assign(prev.edges.begin(), prev.edges.begin() + static_cast<long>(i));
      full.nodes.insert(full.nodes.end(), tail->nodes.begin(), tail->nodes.end());
      full.edges.insert(full.edges.end(), tail->edges.begin(), tail->edges.end());
      full.cost = path_cost(graph, full.edges);
      if (!known(full)) candidates.push_back(std::move(full));
    }
    if (candidates.empty()) break;
    auto best = std::min_element(candidates.begin(), candidates.end(), path_less);
    accepted.push_back(std::move(*best));
    candidates.erase(best);
  }
  return accepted;
}

}  // namespace ctxgames
