#include "edla/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "bundled_datasets.hpp"
#include "edla/union_find.hpp"

namespace edla {

namespace {

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string round_trip_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  // Prefer the shortest representation that parses back exactly.
  for (int precision = 1; precision < 17; ++precision) {
    char shorter[32];
    std::snprintf(shorter, sizeof shorter, "%.*g", precision, x);
    if (std::strtod(shorter, nullptr) == x) return shorter;
  }
  return buf;
}

bool parse_int(const std::string& token, int& out) {
  std::size_t used = 0;
  try {
    long v = std::stol(token, &used);
    if (used != token.size() || v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) return false;
    out = static_cast<int>(v);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_double(const std::string& token, double& out) {
  std::size_t used = 0;
  try {
    out = std::stod(token, &used);
    return used == token.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

WeightDistribution::WeightDistribution(std::vector<WeightOutcome> support) : support_(std::move(support)) {
  if (support_.empty()) throw ValidationError("empty weight support");
  double sum = 0.0;
  for (const auto& o : support_) {
    if (!(o.weight > 0.0)) throw ValidationError("nonpositive weight " + short_number(o.weight));
    if (!(o.probability > 0.0) || o.probability > 1.0)
      throw ValidationError("probability " + short_number(o.probability) + " outside (0,1]");
    sum += o.probability;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance)
    throw ValidationError("probability sum " + short_number(sum) + " ≠ 1");
}

double WeightDistribution::expected() const {
  double mean = 0.0;
  for (const auto& o : support_) mean += o.weight * o.probability;
  return mean;
}

double WeightDistribution::variance() const {
  const double mean = expected();
  double var = 0.0;
  for (const auto& o : support_) var += o.probability * (o.weight - mean) * (o.weight - mean);
  return var;
}

double WeightDistribution::sample(Rng& rng) const {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (const auto& o : support_) {
    cumulative += o.probability;
    if (u < cumulative) return o.weight;
  }
  return support_.back().weight;
}

double expected_weight(const WeightDistribution& dist) { return dist.expected(); }

std::pair<NodeId, NodeId> edge_key(const Edge& edge) {
  return {std::min(edge.tail, edge.head), std::max(edge.tail, edge.head)};
}

StochasticGraph::StochasticGraph(std::string name, bool directed, int node_count, std::vector<Edge> edges)
    : name_(std::move(name)), directed_(directed), node_count_(node_count), edges_(std::move(edges)) {
  if (node_count_ < 1) throw ValidationError("graph needs at least one node");
  incident_.assign(static_cast<std::size_t>(node_count_) + 1, {});
  std::set<std::pair<NodeId, NodeId>> seen;
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    const Edge& e = edges_[id];
    for (NodeId v : {e.tail, e.head}) {
      if (v < 1 || v > node_count_)
        throw ValidationError("node id " + std::to_string(v) + " outside [1," + std::to_string(node_count_) + "]");
    }
    if (e.tail == e.head) throw ValidationError("self-loop at node " + std::to_string(e.tail));
    auto key = directed_ ? std::make_pair(e.tail, e.head) : edge_key(e);
    if (!seen.insert(key).second)
      throw ValidationError("duplicate edge (" + std::to_string(e.tail) + "," + std::to_string(e.head) + ")");
    incident_[static_cast<std::size_t>(e.tail)].push_back(id);
    if (!directed_) incident_[static_cast<std::size_t>(e.head)].push_back(id);
  }
}

const Edge& StochasticGraph::edge(EdgeId id) const {
  if (id >= edges_.size()) throw std::out_of_range("unknown edge id " + std::to_string(id));
  return edges_[id];
}

EdgeId StochasticGraph::find_edge(NodeId tail, NodeId head) const {
  if (tail >= 1 && tail <= node_count_) {
    for (EdgeId id : incident(tail)) {
      if (edges_[id].other(tail) == head) return id;
    }
  }
  throw std::out_of_range("no edge (" + std::to_string(tail) + "," + std::to_string(head) + ")");
}

bool StochasticGraph::has_edge(NodeId tail, NodeId head) const {
  if (tail < 1 || tail > node_count_) return false;
  const auto& inc = incident(tail);
  return std::any_of(inc.begin(), inc.end(), [&](EdgeId id) { return edges_[id].other(tail) == head; });
}

StochasticGraph load_graph(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::string name;
  bool directed = false;
  int n = 0;
  std::vector<Edge> edges;
  std::size_t header_line = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string keyword;
    if (!(tokens >> keyword) || keyword[0] == '#') continue;

    if (keyword == "graph") {
      if (have_header) throw ParseError(line_no, "duplicate graph header");
      std::string kind, count, extra;
      if (!(tokens >> name >> kind >> count) || (tokens >> extra))
        throw ParseError(line_no, "expected 'graph <name> <directed|undirected> <n>'");
      if (kind == "directed") {
        directed = true;
      } else if (kind == "undirected") {
        directed = false;
      } else {
        throw ParseError(line_no, "graph kind must be 'directed' or 'undirected', got '" + kind + "'");
      }
      if (!parse_int(count, n) || n < 1) throw ParseError(line_no, "invalid node count '" + count + "'");
      have_header = true;
      header_line = line_no;
    } else if (keyword == "edge") {
      if (!have_header) throw ParseError(line_no, "edge before graph header");
      std::string tail_tok, head_tok;
      int tail = 0, head = 0;
      if (!(tokens >> tail_tok >> head_tok) || !parse_int(tail_tok, tail) || !parse_int(head_tok, head))
        throw ParseError(line_no, "expected 'edge <tail> <head> w:p ...'");
      std::vector<WeightOutcome> support;
      std::string pair;
      while (tokens >> pair) {
        auto colon = pair.find(':');
        double w = 0.0, p = 0.0;
        if (colon == std::string::npos || !parse_double(pair.substr(0, colon), w) ||
            !parse_double(pair.substr(colon + 1), p))
          throw ParseError(line_no, "malformed weight:probability pair '" + pair + "'");
        support.push_back({w, p});
      }
      try {
        edges.push_back({tail, head, WeightDistribution(std::move(support))});
      } catch (const ValidationError& e) {
        throw ValidationError("line " + std::to_string(line_no) + ": edge (" + tail_tok + "," + head_tok +
                              "): " + e.what());
      }
    } else {
      throw ParseError(line_no, "unknown keyword '" + keyword + "'");
    }
  }
  if (!have_header) throw ParseError(line_no == 0 ? 1 : line_no, "missing graph header");
  try {
    return StochasticGraph(name, directed, n, std::move(edges));
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("graph declared at line ") + std::to_string(header_line) + ": " + e.what());
  }
}

StochasticGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_graph(buf.str());
}

std::string format_graph(const StochasticGraph& graph) {
  std::ostringstream out;
  out << "graph " << graph.name() << ' ' << (graph.directed() ? "directed" : "undirected") << ' '
      << graph.node_count() << '\n';
  for (const auto& e : graph.edges()) {
    out << "edge " << e.tail << ' ' << e.head;
    for (const auto& o : e.dist.support())
      out << ' ' << round_trip_number(o.weight) << ':' << round_trip_number(o.probability);
    out << '\n';
  }
  return out.str();
}

StochasticGraph resolve_graph(const std::string& name_or_path) {
  if (auto text = bundled_dataset_text(name_or_path)) return load_graph(*text);
  return load_graph_file(name_or_path);
}

std::vector<std::string> bundled_dataset_names() { return detail_bundled_names(); }

bool reachable(const StochasticGraph& graph, NodeId source, NodeId dest) {
  const int n = graph.node_count();
  if (source < 1 || source > n || dest < 1 || dest > n) return false;
  std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
  std::vector<NodeId> stack{source};
  seen[static_cast<std::size_t>(source)] = true;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    if (v == dest) return true;
    for (EdgeId id : graph.incident(v)) {
      NodeId w = graph.edge(id).other(v);
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        stack.push_back(w);
      }
    }
  }
  return false;
}

PathOptimum oracle_shortest_path(const StochasticGraph& graph, NodeId source, NodeId dest) {
  const int n = graph.node_count();
  if (source < 1 || source > n || dest < 1 || dest > n) throw ValidationError("source or destination outside graph");
  if (!reachable(graph, source, dest))
    throw ValidationError("destination " + std::to_string(dest) + " unreachable from " + std::to_string(source));

  // Dijkstra over (distance, node sequence) labels. With strictly positive
  // weights every label is final when its node is settled, so comparing full
  // sequences on distance ties yields the lexicographically smallest optimum.
  const auto size = static_cast<std::size_t>(n) + 1;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(size, inf);
  std::vector<std::vector<NodeId>> path(size);
  std::vector<std::vector<EdgeId>> via(size);
  std::vector<bool> settled(size, false);
  dist[static_cast<std::size_t>(source)] = 0.0;
  path[static_cast<std::size_t>(source)] = {source};

  for (;;) {
    NodeId u = 0;
    for (NodeId v = 1; v <= n; ++v) {
      auto vi = static_cast<std::size_t>(v);
      if (!settled[vi] && dist[vi] < inf && (u == 0 || dist[vi] < dist[static_cast<std::size_t>(u)])) u = v;
    }
    if (u == 0 || u == dest) break;
    auto ui = static_cast<std::size_t>(u);
    settled[ui] = true;
    for (EdgeId id : graph.incident(u)) {
      const Edge& e = graph.edge(id);
      NodeId w = e.other(u);
      auto wi = static_cast<std::size_t>(w);
      if (settled[wi]) continue;
      double candidate = dist[ui] + e.dist.expected();
      std::vector<NodeId> candidate_path = path[ui];
      candidate_path.push_back(w);
      bool better = candidate < dist[wi] - kProbabilityTolerance ||
                    (std::abs(candidate - dist[wi]) <= kProbabilityTolerance && candidate_path < path[wi]);
      if (better) {
        dist[wi] = candidate;
        path[wi] = std::move(candidate_path);
        via[wi] = via[ui];
        via[wi].push_back(id);
      }
    }
  }

  PathOptimum result;
  auto di = static_cast<std::size_t>(dest);
  result.expected_weight = dist[di];
  result.edges = via[di];
  if (source != dest) result.nodes = path[di];
  return result;
}

TreeOptimum oracle_min_spanning_tree(const StochasticGraph& graph) {
  if (graph.directed()) throw ValidationError("spanning tree oracle needs an undirected graph");
  std::vector<EdgeId> order(graph.edge_count());
  std::iota(order.begin(), order.end(), EdgeId{0});
  std::vector<double> mean(graph.edge_count());
  for (EdgeId id = 0; id < graph.edge_count(); ++id) mean[id] = graph.edge(id).dist.expected();
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    if (std::abs(mean[a] - mean[b]) > kProbabilityTolerance) return mean[a] < mean[b];
    return edge_key(graph.edge(a)) < edge_key(graph.edge(b));
  });

  UnionFind components(static_cast<std::size_t>(graph.node_count()) + 1);
  TreeOptimum result;
  for (EdgeId id : order) {
    const Edge& e = graph.edge(id);
    if (components.unite(static_cast<std::size_t>(e.tail), static_cast<std::size_t>(e.head))) {
      result.edges.push_back(id);
      result.expected_weight += mean[id];
    }
  }
  if (result.edges.size() + 1 != static_cast<std::size_t>(graph.node_count()))
    throw ValidationError("graph is disconnected");
  std::sort(result.edges.begin(), result.edges.end(),
            [&](EdgeId a, EdgeId b) { return edge_key(graph.edge(a)) < edge_key(graph.edge(b)); });
  return result;
}

}  // namespace edla
