#include "edla/solvers.hpp"

#include <chrono>
#include <cmath>

#include "edla/union_find.hpp"

namespace edla {

namespace {

template <typename Construct>
RunRecord run_learning_loop(const StochasticGraph& graph, const SolverConfig& config, AutomataNetwork& network,
                            Rng& rng, Construct&& construct) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<EdgeId> optimum = optimal_edges(graph, config);
  Threshold threshold(config.threshold);
  const Direction direction = Direction::minimize;

  RunRecord record;
  double probability = 0.0;
  std::size_t consecutive_discards = 0;
  SubGraph last;

  while (record.iterations < config.max_iterations && !(probability > config.probability_target)) {
    ConstructOutcome outcome = construct(network, rng);
    if (!outcome.subgraph) {
      ++record.discarded_attempts;
      record.discarded_samples += outcome.samples;
      if (++consecutive_discards > config.max_consecutive_discards)
        throw std::runtime_error("too many consecutive discarded constructions");
      continue;
    }
    consecutive_discards = 0;
    SubGraph sub = std::move(*outcome.subgraph);
    record.edge_samples += outcome.samples;
    ++record.iterations;

    const double optimal_q = edge_set_probability(network, optimum);
    const double bound = threshold.current_bound(direction);
    const Reinforcement verdict = threshold.evaluate(sub.total_weight, direction);
    reinforce(sub, network, verdict);
    threshold.update(sub.total_weight);
    probability = subgraph_probability(network, sub);

    record.optimal_probability.push_back(optimal_q);
    if (config.record_trace)
      record.trace.push_back({record.iterations, sub.total_weight, sub.edge_ids(), probability, optimal_q, bound, verdict});
    last = std::move(sub);
  }

  record.converged = probability > config.probability_target;
  record.final_edges = last.edge_ids();
  record.final_weight = last.total_weight;
  record.final_probability = probability;
  record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

LearningRates rates_of(const SolverConfig& config) { return {config.learning_rate, config.penalty_rate}; }

}  // namespace

void SolverConfig::validate() const {
  if (!(learning_rate > 0.0 && learning_rate < 1.0)) throw ConfigError("learning rate must lie in (0,1)");
  if (!(penalty_rate >= 0.0 && penalty_rate < 1.0)) throw ConfigError("penalty rate must lie in [0,1)");
  if (!(probability_target > 0.0 && probability_target <= 1.0))
    throw ConfigError("probability target must lie in (0,1]");
  if (problem == Problem::sspp && source == dest) throw ConfigError("source and destination must differ");
  if (algorithm == Algorithm::dla_baseline && problem != Problem::sspp)
    throw ConfigError("the DLA baseline solves shortest-path problems only");
  if (algorithm == Algorithm::la_colony_baseline && problem != Problem::smstp)
    throw ConfigError("the LA-colony baseline solves spanning-tree problems only");
  if (threshold.kind == ThresholdKind::variance_aware) {
    const auto& v = threshold.variance;
    if (!(v.mean_step > 0.0 && v.mean_step <= 1.0)) throw ConfigError("mean step must lie in (0,1]");
    if (!(v.deviation_step > 0.0 && v.deviation_step <= 1.0)) throw ConfigError("deviation step must lie in (0,1]");
    if (!(v.mean_scale > 0.0)) throw ConfigError("bound mean scale must be positive");
  }
}

ThresholdConfig default_threshold(Algorithm algorithm) {
  ThresholdConfig t;
  t.kind = algorithm == Algorithm::edla ? ThresholdKind::variance_aware : ThresholdKind::dynamic;
  return t;
}

std::vector<EdgeId> optimal_edges(const StochasticGraph& graph, const SolverConfig& config) {
  if (config.problem == Problem::sspp) return oracle_shortest_path(graph, config.source, config.dest).edges;
  return oracle_min_spanning_tree(graph).edges;
}

RunRecord solve(const StochasticGraph& graph, const SolverConfig& config) {
  config.validate();
  switch (config.algorithm) {
    case Algorithm::dla_baseline: return solve_dla_baseline(graph, config);
    case Algorithm::la_colony_baseline: return solve_la_colony_baseline(graph, config);
    case Algorithm::edla: break;
  }
  if (config.problem == Problem::sspp) {
    if (!reachable(graph, config.source, config.dest))
      throw ValidationError("destination " + std::to_string(config.dest) + " unreachable from " +
                            std::to_string(config.source));
  } else if (graph.directed()) {
    throw ConfigError("spanning-tree problems need an undirected graph");
  }
  AutomataNetwork network(graph, rates_of(config));
  Rng rng(config.seed);
  const EdlaConfig engine_config = config.problem == Problem::sspp
                                       ? EdlaConfig::shortest_path(config.source, config.dest)
                                       : EdlaConfig::spanning_tree();
  EdlaEngine engine(network, engine_config);
  return run_learning_loop(graph, config, network, rng,
                           [&](AutomataNetwork&, Rng& r) { return construct_subgraph(engine, r); });
}

RunRecord solve_dla_baseline(const StochasticGraph& graph, const SolverConfig& config) {
  SolverConfig checked = config;
  checked.algorithm = Algorithm::dla_baseline;
  checked.validate();
  if (!reachable(graph, config.source, config.dest))
    throw ValidationError("destination " + std::to_string(config.dest) + " unreachable from " +
                          std::to_string(config.source));
  AutomataNetwork network(graph, rates_of(config));
  Rng rng(config.seed);
  return run_learning_loop(graph, checked, network, rng, [&](AutomataNetwork& net, Rng& r) {
    return construct_dla_path(net, config.source, config.dest, r);
  });
}

RunRecord solve_la_colony_baseline(const StochasticGraph& graph, const SolverConfig& config) {
  SolverConfig checked = config;
  checked.algorithm = Algorithm::la_colony_baseline;
  checked.validate();
  if (graph.directed()) throw ConfigError("spanning-tree problems need an undirected graph");
  AutomataNetwork network(graph, rates_of(config));
  Rng rng(config.seed);
  return run_learning_loop(graph, checked, network, rng,
                           [](AutomataNetwork& net, Rng& r) { return construct_colony_tree(net, r); });
}

ConstructOutcome construct_dla_path(AutomataNetwork& network, NodeId source, NodeId dest, Rng& rng) {
  const auto& graph = network.graph();
  std::vector<bool> visited(static_cast<std::size_t>(graph.node_count()) + 1, false);
  SubGraph path;
  NodeId current = source;
  visited[static_cast<std::size_t>(source)] = true;
  bool dead_end = false;

  while (current != dest) {
    if (!network.has_automaton(current)) {
      dead_end = true;
      break;
    }
    auto& automaton = network.automaton(current);
    const auto& actions = network.actions(current);
    for (std::size_t i = 0; i < actions.size(); ++i)
      if (visited[static_cast<std::size_t>(actions[i].target)]) automaton.disable_action(i);
    if (automaton.enabled_count() == 0) {
      dead_end = true;
      break;
    }
    std::vector<bool> mask = automaton.enabled();
    const std::size_t action = automaton.select_action(rng);
    const auto& chosen = actions[action];
    path.add({chosen.edge, current, action, graph.sample_edge(chosen.edge, rng), std::move(mask)});
    current = chosen.target;
    visited[static_cast<std::size_t>(current)] = true;
  }
  network.enable_all();

  ConstructOutcome outcome;
  outcome.samples = path.size();
  if (!dead_end) outcome.subgraph = std::move(path);
  return outcome;
}

ConstructOutcome construct_colony_tree(AutomataNetwork& network, Rng& rng) {
  const auto& graph = network.graph();
  const int n = graph.node_count();
  UnionFind components(static_cast<std::size_t>(n) + 1);
  std::vector<bool> used(graph.edge_count(), false);
  std::vector<bool> acted(static_cast<std::size_t>(n) + 1, false);
  SubGraph tree;
  std::vector<NodeId> candidates;

  while (tree.size() + 1 < static_cast<std::size_t>(n)) {
    candidates.clear();
    for (NodeId v = 1; v <= n; ++v) {
      if (acted[static_cast<std::size_t>(v)] || !network.has_automaton(v)) continue;
      auto& automaton = network.automaton(v);
      const auto& actions = network.actions(v);
      for (std::size_t i = 0; i < actions.size(); ++i) {
        if (!automaton.is_enabled(i)) continue;
        if (used[actions[i].edge] ||
            components.connected(static_cast<std::size_t>(v), static_cast<std::size_t>(actions[i].target)))
          automaton.disable_action(i);
      }
      if (automaton.enabled_count() > 0) candidates.push_back(v);
    }
    if (candidates.empty()) break;

    const NodeId node = candidates[rng.index(candidates.size())];
    acted[static_cast<std::size_t>(node)] = true;
    auto& automaton = network.automaton(node);
    std::vector<bool> mask = automaton.enabled();
    const std::size_t action = automaton.select_action(rng);
    const auto& chosen = network.actions(node)[action];
    tree.add({chosen.edge, node, action, graph.sample_edge(chosen.edge, rng), std::move(mask)});
    used[chosen.edge] = true;
    components.unite(static_cast<std::size_t>(node), static_cast<std::size_t>(chosen.target));
  }
  network.enable_all();

  ConstructOutcome outcome;
  outcome.samples = tree.size();
  if (tree.size() + 1 == static_cast<std::size_t>(n)) outcome.subgraph = std::move(tree);
  return outcome;
}

UniformSamplingResult uniform_sampling_baseline(const StochasticGraph& graph, Problem problem, NodeId source,
                                                NodeId dest, std::uint64_t seed, std::size_t horizon) {
  Rng rng(seed);
  const std::size_t m = graph.edge_count();
  std::vector<double> sums(m, 0.0);
  std::vector<EdgeId> truth = problem == Problem::sspp ? oracle_shortest_path(graph, source, dest).edges
                                                       : oracle_min_spanning_tree(graph).edges;
  std::size_t last_wrong = 0;
  for (std::size_t round = 1; round <= horizon; ++round) {
    for (EdgeId id = 0; id < m; ++id) sums[id] += graph.sample_edge(id, rng);
    std::vector<Edge> estimated;
    estimated.reserve(m);
    for (EdgeId id = 0; id < m; ++id) {
      const Edge& e = graph.edge(id);
      estimated.push_back({e.tail, e.head, WeightDistribution::constant(sums[id] / static_cast<double>(round))});
    }
    StochasticGraph estimate(graph.name(), graph.directed(), graph.node_count(), std::move(estimated));
    std::vector<EdgeId> got = problem == Problem::sspp ? oracle_shortest_path(estimate, source, dest).edges
                                                       : oracle_min_spanning_tree(estimate).edges;
    if (got != truth) last_wrong = round;
  }
  const std::size_t rounds = last_wrong + 1;
  return {rounds, rounds * m, horizon};
}

std::string to_string(Problem p) { return p == Problem::sspp ? "sspp" : "smstp"; }

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::edla: return "edla";
    case Algorithm::dla_baseline: return "dla";
    case Algorithm::la_colony_baseline: return "la-colony";
  }
  return "?";
}

std::string to_string(ThresholdKind k) { return k == ThresholdKind::dynamic ? "dynamic" : "variance"; }

Problem parse_problem(const std::string& s) {
  if (s == "sspp") return Problem::sspp;
  if (s == "smstp") return Problem::smstp;
  throw ConfigError("unknown problem '" + s + "' (expected sspp|smstp)");
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "edla") return Algorithm::edla;
  if (s == "dla") return Algorithm::dla_baseline;
  if (s == "la-colony") return Algorithm::la_colony_baseline;
  throw ConfigError("unknown algorithm '" + s + "' (expected edla|dla|la-colony)");
}

ThresholdKind parse_threshold_kind(const std::string& s) {
  if (s == "dynamic") return ThresholdKind::dynamic;
  if (s == "variance") return ThresholdKind::variance_aware;
  throw ConfigError("unknown threshold '" + s + "' (expected dynamic|variance)");
}

}  // namespace edla
