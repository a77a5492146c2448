#include "edla/engine.hpp"

#include <algorithm>
#include <string>

namespace edla {

AutomataNetwork::AutomataNetwork(const StochasticGraph& graph, LearningRates rates) : graph_(&graph) {
  const auto size = static_cast<std::size_t>(graph.node_count()) + 1;
  actions_.resize(size);
  automata_.resize(size);
  for (NodeId v = 1; v <= graph.node_count(); ++v) {
    auto& list = actions_[slot(v)];
    for (EdgeId id : graph.incident(v)) list.push_back({id, graph.edge(id).other(v)});
    if (!list.empty()) automata_[slot(v)].emplace(list.size(), rates);
  }
}

LearningAutomaton& AutomataNetwork::automaton(NodeId node) {
  auto& a = automata_.at(slot(node));
  if (!a) throw EngineError("node " + std::to_string(node) + " has no automaton");
  return *a;
}

const LearningAutomaton& AutomataNetwork::automaton(NodeId node) const {
  const auto& a = automata_.at(slot(node));
  if (!a) throw EngineError("node " + std::to_string(node) + " has no automaton");
  return *a;
}

std::optional<std::size_t> AutomataNetwork::action_for(NodeId node, EdgeId edge) const {
  if (node < 1 || node > graph_->node_count()) return std::nullopt;
  const auto& list = actions_[slot(node)];
  for (std::size_t i = 0; i < list.size(); ++i)
    if (list[i].edge == edge) return i;
  return std::nullopt;
}

void AutomataNetwork::enable_all() {
  for (auto& a : automata_)
    if (a) a->enable_all();
}

std::vector<EdgeId> SubGraph::edge_ids() const {
  std::vector<EdgeId> ids;
  ids.reserve(selections.size());
  for (const auto& s : selections) ids.push_back(s.edge);
  return ids;
}

std::vector<double> SubGraph::weights() const {
  std::vector<double> w;
  w.reserve(selections.size());
  for (const auto& s : selections) w.push_back(s.weight);
  return w;
}

EdlaConfig EdlaConfig::shortest_path(NodeId source, NodeId dest) {
  return {FirePolicy::follow_action, RootPolicy::fixed, source, Termination::target_off, dest, CycleGuard::simple_path};
}

EdlaConfig EdlaConfig::spanning_tree() {
  return {FirePolicy::uniform_active, RootPolicy::uniform_random, 1, Termination::all_off, 0, CycleGuard::forest};
}

EdlaEngine::EdlaEngine(AutomataNetwork& network, EdlaConfig config)
    : network_(&network),
      config_(config),
      levels_(static_cast<std::size_t>(network.graph().node_count()) + 1, ActivityLevel::passive),
      components_(static_cast<std::size_t>(network.graph().node_count()) + 1) {
  const int n = network.graph().node_count();
  if (config_.root == RootPolicy::fixed && (config_.root_node < 1 || config_.root_node > n))
    throw EngineError("root node outside graph");
  if (config_.termination == Termination::target_off && (config_.target < 1 || config_.target > n))
    throw EngineError("target node outside graph");
}

void EdlaEngine::set_level(NodeId node, ActivityLevel level) { levels_[static_cast<std::size_t>(node)] = level; }

void EdlaEngine::reset() {
  network_->enable_all();
  std::fill(levels_.begin(), levels_.end(), ActivityLevel::passive);
  active_.clear();
  fire_ = 0;
  next_fire_.reset();
  status_ = RunStatus::idle;
  components_.reset();
}

void EdlaEngine::start_run(Rng& rng) {
  reset();
  subgraph_ = {};
  const int n = network_->graph().node_count();
  root_ = config_.root == RootPolicy::fixed ? config_.root_node : static_cast<NodeId>(rng.index(static_cast<std::size_t>(n))) + 1;
  set_level(root_, ActivityLevel::active);
  active_.push_back(root_);
  next_fire_ = root_;
  status_ = RunStatus::running;
}

void EdlaEngine::finish(RunStatus status) {
  status_ = status;
  fire_ = 0;
}

void EdlaEngine::promote_neighbours(NodeId node) {
  for (const auto& action : network_->actions(node)) {
    if (level(action.target) == ActivityLevel::passive) {
      set_level(action.target, ActivityLevel::active);
      active_.push_back(action.target);
    }
  }
}

void EdlaEngine::apply_guard_to(NodeId node) {
  if (config_.guard == CycleGuard::none || !network_->has_automaton(node)) return;
  auto& automaton = network_->automaton(node);
  const auto& actions = network_->actions(node);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (!automaton.is_enabled(i)) continue;
    const NodeId target = actions[i].target;
    bool closes_cycle = false;
    if (config_.guard == CycleGuard::simple_path) {
      closes_cycle = level(target) == ActivityLevel::off || level(target) == ActivityLevel::fire;
    } else {
      closes_cycle = components_.connected(static_cast<std::size_t>(node), static_cast<std::size_t>(target));
    }
    if (closes_cycle) automaton.disable_action(i);
  }
}

void EdlaEngine::apply_guard() {
  for (NodeId v : active_) apply_guard_to(v);
  if (fire_ != 0) apply_guard_to(fire_);
}

std::optional<NodeId> EdlaEngine::promote_fire(Rng& rng) {
  if (!running()) return std::nullopt;
  if (fire_ != 0) throw EngineError("promote_fire while an automaton is at Fire level");

  NodeId chosen = 0;
  if (config_.fire == FirePolicy::follow_action) {
    if (!next_fire_ || level(*next_fire_) != ActivityLevel::active) {
      finish(active_.empty() && config_.termination == Termination::all_off ? RunStatus::complete
                                                                            : RunStatus::dead_end);
      return std::nullopt;
    }
    chosen = *next_fire_;
  } else {
    if (active_.empty()) {
      finish(config_.termination == Termination::all_off ? RunStatus::complete : RunStatus::dead_end);
      return std::nullopt;
    }
    chosen = active_[rng.index(active_.size())];
  }
  next_fire_.reset();
  active_.erase(std::find(active_.begin(), active_.end(), chosen));
  set_level(chosen, ActivityLevel::fire);
  fire_ = chosen;
  promote_neighbours(chosen);
  apply_guard();
  return chosen;
}

std::optional<EdgeId> EdlaEngine::act(Rng& rng) {
  if (!running() || fire_ == 0) throw EngineError("act without a Fire automaton");
  const NodeId node = fire_;

  const bool is_target = config_.termination == Termination::target_off && node == config_.target;
  const bool can_act =
      !is_target && network_->has_automaton(node) && network_->automaton(node).enabled_count() > 0;

  if (!can_act) {
    set_level(node, ActivityLevel::off);
    fire_ = 0;
    if (is_target) {
      finish(RunStatus::complete);
    } else if (config_.fire == FirePolicy::follow_action) {
      finish(RunStatus::dead_end);
    } else if (active_.empty()) {
      finish(config_.termination == Termination::all_off ? RunStatus::complete : RunStatus::dead_end);
    }
    return std::nullopt;
  }

  auto& automaton = network_->automaton(node);
  std::vector<bool> mask = automaton.enabled();
  const std::size_t action = automaton.select_action(rng);
  const auto& chosen = network_->actions(node)[action];
  const double weight = network_->graph().sample_edge(chosen.edge, rng);
  subgraph_.add({chosen.edge, node, action, weight, std::move(mask)});

  if (!network_->graph().directed() && level(chosen.target) != ActivityLevel::off) {
    if (auto mirror = network_->action_for(chosen.target, chosen.edge))
      network_->automaton(chosen.target).disable_action(*mirror);
  }
  components_.unite(static_cast<std::size_t>(node), static_cast<std::size_t>(chosen.target));

  set_level(node, ActivityLevel::off);
  fire_ = 0;
  next_fire_ = chosen.target;
  apply_guard();

  if (config_.termination == Termination::all_off && active_.empty()) finish(RunStatus::complete);
  return chosen.edge;
}

std::optional<EdgeId> EdlaEngine::fire_step(Rng& rng) {
  if (!promote_fire(rng)) return std::nullopt;
  return act(rng);
}

InstantaneousDescription EdlaEngine::description() const {
  InstantaneousDescription d;
  for (NodeId v = 1; v <= network_->graph().node_count(); ++v) {
    switch (level(v)) {
      case ActivityLevel::off: d.off.push_back(v); break;
      case ActivityLevel::fire: d.fire.push_back(v); break;
      case ActivityLevel::active: d.active.push_back(v); break;
      case ActivityLevel::passive: d.passive.push_back(v); break;
    }
  }
  return d;
}

ConstructOutcome construct_subgraph(EdlaEngine& engine, Rng& rng) {
  engine.start_run(rng);
  while (engine.running()) engine.fire_step(rng);

  ConstructOutcome outcome;
  outcome.samples = engine.samples_drawn();
  bool accepted = engine.status() == RunStatus::complete;
  const auto& cfg = engine.config();
  if (accepted && cfg.termination == Termination::all_off && cfg.guard == CycleGuard::forest) {
    accepted = engine.subgraph().size() + 1 == static_cast<std::size_t>(engine.network().graph().node_count());
  }
  if (accepted) outcome.subgraph = engine.subgraph();
  engine.reset();
  return outcome;
}

void reinforce(const SubGraph& subgraph, AutomataNetwork& network, Reinforcement verdict) {
  for (const auto& s : subgraph.selections) {
    auto& automaton = network.automaton(s.chooser);
    if (automaton.rates().penalty == 0.0 && verdict == Reinforcement::penalty) continue;
    automaton.set_enabled(s.mask);
    automaton.update(s.action, verdict);
    automaton.enable_all();
  }
  network.enable_all();
}

double subgraph_probability(const AutomataNetwork& network, const SubGraph& subgraph) {
  double q = 1.0;
  for (const auto& s : subgraph.selections) q *= network.automaton(s.chooser).probability(s.action);
  return q;
}

double edge_set_probability(const AutomataNetwork& network, std::span<const EdgeId> edges) {
  const auto& graph = network.graph();
  double q = 1.0;
  for (EdgeId id : edges) {
    const Edge& e = graph.edge(id);
    double best = -1.0;
    for (NodeId owner : {e.tail, e.head}) {
      if (graph.directed() && owner != e.tail) continue;
      if (auto action = network.action_for(owner, id)) best = std::max(best, network.automaton(owner).probability(*action));
    }
    if (best < 0.0) throw EngineError("edge " + std::to_string(id) + " has no owning action");
    q *= best;
  }
  return q;
}

std::vector<NodeId> path_nodes(const StochasticGraph& graph, const SubGraph& subgraph) {
  std::vector<NodeId> nodes;
  for (const auto& s : subgraph.selections) nodes.push_back(s.chooser);
  if (!subgraph.empty()) nodes.push_back(graph.edge(subgraph.selections.back().edge).other(subgraph.selections.back().chooser));
  return nodes;
}

}  // namespace edla
