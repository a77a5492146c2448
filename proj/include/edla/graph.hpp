#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edla/random.hpp"

namespace edla {

using NodeId = int;          // 1-based, as in the graph files
using EdgeId = std::size_t;  // index into StochasticGraph::edges()

constexpr double kProbabilityTolerance = 1e-9;

// Malformed graph text. line() is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a graph or distribution invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WeightOutcome {
  double weight;
  double probability;
};

// Finite discrete distribution over positive edge weights. The support keeps
// its input order; sampling walks the cumulative distribution in that order.
class WeightDistribution {
 public:
  // Throws ValidationError if the support is empty, a weight is not strictly
  // positive, a probability is outside (0, 1], or the probabilities do not
  // sum to 1 within kProbabilityTolerance.
  explicit WeightDistribution(std::vector<WeightOutcome> support);

  static WeightDistribution constant(double weight) { return WeightDistribution({{weight, 1.0}}); }

  const std::vector<WeightOutcome>& support() const { return support_; }
  double expected() const;
  double variance() const;
  double sample(Rng& rng) const;

 private:
  std::vector<WeightOutcome> support_;
};

double expected_weight(const WeightDistribution& dist);

struct Edge {
  NodeId tail;
  NodeId head;
  WeightDistribution dist;

  // The endpoint that is not `from`. For directed edges `from` must be the tail.
  NodeId other(NodeId from) const { return from == tail ? head : tail; }
};

// G = (V, E, Q): nodes 1..n, edges carrying weight distributions.
// Immutable after construction.
class StochasticGraph {
 public:
  // Throws ValidationError on node ids outside [1, n], self-loops or duplicate
  // edges (unordered pairs when undirected).
  StochasticGraph(std::string name, bool directed, int node_count, std::vector<Edge> edges);

  const std::string& name() const { return name_; }
  bool directed() const { return directed_; }
  int node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId id) const;

  // Edges leaving `node` (directed) or touching it (undirected), in file order.
  const std::vector<EdgeId>& incident(NodeId node) const { return incident_.at(static_cast<std::size_t>(node)); }

  // Edge joining the pair, respecting direction. Throws std::out_of_range if absent.
  EdgeId find_edge(NodeId tail, NodeId head) const;
  bool has_edge(NodeId tail, NodeId head) const;

  double sample_edge(EdgeId id, Rng& rng) const { return edge(id).dist.sample(rng); }

 private:
  std::string name_;
  bool directed_;
  int node_count_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> incident_;  // indexed by node id, slot 0 unused
};

// Parses the line-oriented graph format:
//   graph <name> <directed|undirected> <n>
//   edge <tail> <head> w1:p1 w2:p2 ...
// Blank lines and lines starting with '#' are ignored.
StochasticGraph load_graph(std::string_view text);
StochasticGraph load_graph_file(const std::string& path);
std::string format_graph(const StochasticGraph& graph);

// Resolves a bundled dataset name ("graph2", "alex1a") or a file path.
StochasticGraph resolve_graph(const std::string& name_or_path);
std::vector<std::string> bundled_dataset_names();

// Deterministic optima of the expected-weight graph.

struct PathOptimum {
  std::vector<NodeId> nodes;
  std::vector<EdgeId> edges;
  double expected_weight = 0.0;
};

struct TreeOptimum {
  std::vector<EdgeId> edges;  // sorted by (min endpoint, max endpoint)
  double expected_weight = 0.0;
};

// Minimum expected-weight path; ties broken by the lexicographically smallest
// node sequence. Throws ValidationError if `dest` is unreachable.
PathOptimum oracle_shortest_path(const StochasticGraph& graph, NodeId source, NodeId dest);

// Minimum expected-weight spanning tree; ties broken by lexicographic edge
// order. Throws ValidationError for directed or disconnected graphs.
TreeOptimum oracle_min_spanning_tree(const StochasticGraph& graph);

// True if `dest` can be reached from `source` following edge directions.
bool reachable(const StochasticGraph& graph, NodeId source, NodeId dest);

// Endpoints of an edge as (min, max); used for undirected edge keys.
std::pair<NodeId, NodeId> edge_key(const Edge& edge);

}  // namespace edla
