#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "edla/automaton.hpp"
#include "edla/graph.hpp"
#include "edla/random.hpp"
#include "edla/union_find.hpp"

namespace edla {

// One automaton per node whose actions are the node's outgoing edges
// (directed) or incident edges (undirected), in file order. Nodes without
// edges to act on have no automaton.
class AutomataNetwork {
 public:
  struct Action {
    EdgeId edge;
    NodeId target;
  };

  AutomataNetwork(const StochasticGraph& graph, LearningRates rates);

  const StochasticGraph& graph() const { return *graph_; }
  bool has_automaton(NodeId node) const { return automata_.at(slot(node)).has_value(); }
  LearningAutomaton& automaton(NodeId node);
  const LearningAutomaton& automaton(NodeId node) const;
  const std::vector<Action>& actions(NodeId node) const { return actions_.at(slot(node)); }

  // Index of `edge` in the action list of `node`, if the node owns it.
  std::optional<std::size_t> action_for(NodeId node, EdgeId edge) const;

  void enable_all();

 private:
  static std::size_t slot(NodeId node) { return static_cast<std::size_t>(node); }

  const StochasticGraph* graph_;
  std::vector<std::vector<Action>> actions_;
  std::vector<std::optional<LearningAutomaton>> automata_;
};

// One edge chosen during a run: who chose it, the sampled weight, and the
// chooser's enabled mask at selection time (needed to reinforce on the same
// scaled action set).
struct Selection {
  EdgeId edge;
  NodeId chooser;
  std::size_t action;
  double weight;
  std::vector<bool> mask;
};

struct SubGraph {
  std::vector<Selection> selections;  // in selection order
  double total_weight = 0.0;

  std::size_t size() const { return selections.size(); }
  bool empty() const { return selections.empty(); }
  std::vector<EdgeId> edge_ids() const;
  std::vector<double> weights() const;
  void add(Selection s) {
    total_weight += s.weight;
    selections.push_back(std::move(s));
  }
};

enum class ActivityLevel { passive, active, fire, off };

enum class FirePolicy {
  follow_action,   // the head of the chosen action fires next
  uniform_active,  // uniform draw over the Active automata
};
enum class RootPolicy { fixed, uniform_random };
enum class Termination {
  target_off,  // run ends once the target automaton is Off
  all_off,     // run ends when no automaton is Active
};
enum class CycleGuard {
  none,
  simple_path,  // disable actions leading to Fire/Off automata
  forest,       // disable actions joining two nodes already connected
};

struct EdlaConfig {
  FirePolicy fire = FirePolicy::follow_action;
  RootPolicy root = RootPolicy::fixed;
  NodeId root_node = 1;
  Termination termination = Termination::target_off;
  NodeId target = 1;
  CycleGuard guard = CycleGuard::simple_path;

  static EdlaConfig shortest_path(NodeId source, NodeId dest);
  static EdlaConfig spanning_tree();
};

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// D^t = (Off, Fire, Active, Passive), each sorted by node id.
struct InstantaneousDescription {
  std::vector<NodeId> off;
  std::vector<NodeId> fire;
  std::vector<NodeId> active;
  std::vector<NodeId> passive;

  friend bool operator==(const InstantaneousDescription&, const InstantaneousDescription&) = default;
};

enum class RunStatus { idle, running, complete, dead_end };

// Activity-level state machine that builds one sub-graph per run.
//
// A step has two phases. promote_fire() moves one Active automaton to Fire and
// raises its Passive neighbours to Active; act() lets the Fire automaton pick an
// enabled action, samples that edge, and drops the automaton to Off.
// Automata that are already Off never have their masks changed, so each
// Selection::mask is the mask the chooser ended the run with.
class EdlaEngine {
 public:
  EdlaEngine(AutomataNetwork& network, EdlaConfig config);

  const EdlaConfig& config() const { return config_; }
  const AutomataNetwork& network() const { return *network_; }

  // D^0 = (∅, ∅, {root}, rest). Resets masks and levels from any previous run.
  void start_run(Rng& rng);

  // Returns the automaton now at Fire level, or nothing if the run ended.
  std::optional<NodeId> promote_fire(Rng& rng);
  // Returns the edge chosen by the Fire automaton, or nothing for "no action".
  std::optional<EdgeId> act(Rng& rng);
  // promote_fire followed by act.
  std::optional<EdgeId> fire_step(Rng& rng);

  RunStatus status() const { return status_; }
  bool running() const { return status_ == RunStatus::running; }
  NodeId root() const { return root_; }
  ActivityLevel level(NodeId node) const { return levels_.at(static_cast<std::size_t>(node)); }
  InstantaneousDescription description() const;
  const SubGraph& subgraph() const { return subgraph_; }
  std::size_t samples_drawn() const { return subgraph_.size(); }

  // Re-enables all actions and puts every automaton back to Passive.
  void reset();

 private:
  void set_level(NodeId node, ActivityLevel level);
  void promote_neighbours(NodeId node);
  void apply_guard();
  void apply_guard_to(NodeId node);
  void finish(RunStatus status);

  AutomataNetwork* network_;
  EdlaConfig config_;
  std::vector<ActivityLevel> levels_;
  std::vector<NodeId> active_;  // Active automata in promotion order
  NodeId root_ = 0;
  NodeId fire_ = 0;
  std::optional<NodeId> next_fire_;
  RunStatus status_ = RunStatus::idle;
  SubGraph subgraph_;
  UnionFind components_;
};

struct ConstructOutcome {
  std::optional<SubGraph> subgraph;  // empty when the attempt was discarded
  std::size_t samples = 0;           // edge weights drawn by the attempt
};

// Runs the engine to completion once. Dead ends, and forests that fail to span
// the graph under all_off termination, are discarded. The engine is reset
// afterwards either way.
ConstructOutcome construct_subgraph(EdlaEngine& engine, Rng& rng);

// Rewards (or, with a nonzero penalty rate, penalises) every selection on the
// mask it was chosen under, then re-enables all actions.
void reinforce(const SubGraph& subgraph, AutomataNetwork& network, Reinforcement verdict);

// Product of the choosers' current probabilities for the selected actions.
double subgraph_probability(const AutomataNetwork& network, const SubGraph& subgraph);

// Probability of a reference edge set: each directed edge is owned by its
// tail automaton; an undirected edge takes the larger of its two endpoint
// probabilities. Throws EngineError for an edge with no owning action.
double edge_set_probability(const AutomataNetwork& network, std::span<const EdgeId> edges);

// Node sequence of a path sub-graph (chooser of each selection, then the last head).
std::vector<NodeId> path_nodes(const StochasticGraph& graph, const SubGraph& subgraph);

}  // namespace edla
