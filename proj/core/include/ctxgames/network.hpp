#pragma once

// Directed road networks: the TNTP text format, OD quantity files and
// loopless k-shortest paths.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ctxgames/error.hpp"

namespace ctxgames {

struct Edge {
  std::size_t from;
  std::size_t to;
  double cost;
};

/// Directed graph with strictly positive, finite edge costs and no self-loops.
class Graph {
 public:
  Graph(std::size_t nodes, std::vector<Edge> edges);

  std::size_t nodes() const noexcept { return nodes_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const Edge& edge(std::size_t e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<std::size_t>& out_edges(std::size_t node) const { return out_[node]; }
  const std::vector<std::size_t>& in_edges(std::size_t node) const { return in_[node]; }

 private:
  std::size_t nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

/// One link row of a TNTP network file, fields in file order.
struct TntpLink {
  std::size_t init_node;  // 1-based as in the file
  std::size_t term_node;
  double capacity;
  double length;
  double free_flow_time;
  double b;
  double power;
  double speed;
  double toll;
  int type;
};

struct TntpNetwork {
  /// Metadata headers other than the node/link counts, keyed without brackets.
  std::map<std::string, std::string> metadata;
  std::size_t nodes = 0;
  std::vector<TntpLink> links;

  /// Graph with 0-based nodes and free-flow time as the edge cost.
  Graph graph() const;
};

TntpNetwork parse_tntp(std::string_view text);
std::string serialize_tntp(const TntpNetwork& network);

struct OdQuantity {
  std::size_t origin;  // 0-based
  std::size_t destination;
  double quantity;
};

/// Whitespace-separated "origin destination quantity" rows with 1-based node
/// ids. Blank lines and lines starting with '#' or '~' are ignored.
std::vector<OdQuantity> parse_quantities(std::string_view text, std::size_t nodes);

struct Path {
  std::vector<std::size_t> nodes;
  std::vector<std::size_t> edges;
  double cost = 0.0;

  bool operator==(const Path& o) const { return nodes == o.nodes; }
};

/// Up to k loopless source-target paths in nondecreasing cost order, ties
/// broken lexicographically on node sequences. Parallel edges collapse to the
/// cheapest (lowest index on ties). Empty when the target is unreachable.
std::vector<Path> yen_k_shortest(const Graph& graph, std::size_t source, std::size_t target,
                                 std::size_t k);

/// Sum of edge costs along `edges`, accumulated in path order.
double path_cost(const Graph& graph, const std::vector<std::size_t>& edges);

/// Checks that a path starts at `source`, ends at `target` and follows
/// existing edges; throws otherwise.
void validate_path(const Graph& graph, const Path& path, std::size_t source, std::size_t target);

}  // namespace ctxgames
