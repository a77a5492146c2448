#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "edla/engine.hpp"
#include "edla/graph.hpp"
#include "edla/threshold.hpp"

namespace edla {

enum class Problem { sspp, smstp };
enum class Algorithm { edla, dla_baseline, la_colony_baseline };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SolverConfig {
  Problem problem = Problem::sspp;
  NodeId source = 1;
  NodeId dest = 1;
  Algorithm algorithm = Algorithm::edla;
  double learning_rate = 0.05;
  double penalty_rate = 0.0;
  ThresholdConfig threshold{};
  std::size_t max_iterations = 10000;  // K_s
  double probability_target = 0.9;     // P_s
  std::uint64_t seed = 1;
  bool record_trace = true;
  // Give up after this many consecutive discarded constructions.
  std::size_t max_consecutive_discards = 100000;

  // Throws ConfigError on out-of-range values or an algorithm/problem mismatch.
  void validate() const;
};

// Default threshold per algorithm: the proposed solver uses the
// variance-aware criterion, the baselines the running mean.
ThresholdConfig default_threshold(Algorithm algorithm);

struct IterationRecord {
  std::size_t iteration;       // 1-based
  double weight;               // W_s
  std::vector<EdgeId> edges;   // in selection order
  double probability;          // q of this sub-graph after reinforcement
  double optimal_probability;  // q of the known optimum when this sub-graph was built
  double threshold;            // bound the weight was compared against
  Reinforcement verdict;
};

struct RunRecord {
  std::vector<IterationRecord> trace;        // empty unless record_trace
  std::vector<double> optimal_probability;   // per iteration, always recorded
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t edge_samples = 0;       // draws in accepted constructions
  std::size_t discarded_attempts = 0;
  std::size_t discarded_samples = 0;  // draws in discarded constructions
  double wall_seconds = 0.0;
  std::vector<EdgeId> final_edges;
  double final_weight = 0.0;
  double final_probability = 0.0;

  std::size_t total_samples() const { return edge_samples + discarded_samples; }
};

// Known optimum of the expected-weight problem, as an edge list.
std::vector<EdgeId> optimal_edges(const StochasticGraph& graph, const SolverConfig& config);

// Dispatches on config.algorithm.
RunRecord solve(const StochasticGraph& graph, const SolverConfig& config);
// Same loop with activation following the chosen action directly.
RunRecord solve_dla_baseline(const StochasticGraph& graph, const SolverConfig& config);
// Same loop with a colony of automata picking edges at random nodes.
RunRecord solve_la_colony_baseline(const StochasticGraph& graph, const SolverConfig& config);

// One DLA path construction from source to dest; discarded on a dead end.
ConstructOutcome construct_dla_path(AutomataNetwork& network, NodeId source, NodeId dest, Rng& rng);
// One colony tree construction: nodes act in random order, each at most once;
// discarded if it ends with fewer than n-1 edges.
ConstructOutcome construct_colony_tree(AutomataNetwork& network, Rng& rng);

// Reference point for sampling efficiency: draw one weight from every edge per
// round and solve the problem on the running sample means.
struct UniformSamplingResult {
  std::size_t rounds_to_stabilize;  // rounds after which the estimate never left the optimum
  std::size_t samples;              // rounds_to_stabilize * |E|
  std::size_t horizon;
};

UniformSamplingResult uniform_sampling_baseline(const StochasticGraph& graph, Problem problem, NodeId source,
                                                NodeId dest, std::uint64_t seed, std::size_t horizon);

std::string to_string(Problem p);
std::string to_string(Algorithm a);
std::string to_string(ThresholdKind k);
Problem parse_problem(const std::string& s);
Algorithm parse_algorithm(const std::string& s);
ThresholdKind parse_threshold_kind(const std::string& s);

}  // namespace edla
