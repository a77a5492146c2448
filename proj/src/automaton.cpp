#include "edla/automaton.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace edla {

namespace {

constexpr double kDriftLimit = 1e-6;

}  // namespace

LearningAutomaton::LearningAutomaton(std::size_t action_count, LearningRates rates)
    : probabilities_(action_count, action_count ? 1.0 / static_cast<double>(action_count) : 0.0),
      enabled_(action_count, true),
      rates_(rates) {
  if (action_count == 0) throw AutomatonError("automaton needs at least one action");
  if (!(rates.reward > 0.0 && rates.reward < 1.0)) throw AutomatonError("reward rate must lie in (0,1)");
  if (!(rates.penalty >= 0.0 && rates.penalty < 1.0)) throw AutomatonError("penalty rate must lie in [0,1)");
}

std::size_t LearningAutomaton::enabled_count() const {
  return static_cast<std::size_t>(std::count(enabled_.begin(), enabled_.end(), true));
}

double LearningAutomaton::enabled_mass() const {
  double k = 0.0;
  for (std::size_t i = 0; i < probabilities_.size(); ++i)
    if (enabled_[i]) k += probabilities_[i];
  return k;
}

std::vector<double> LearningAutomaton::scaled_probabilities() const {
  std::vector<double> scaled(probabilities_.size(), 0.0);
  const double k = enabled_mass();
  const std::size_t r = enabled_count();
  for (std::size_t i = 0; i < probabilities_.size(); ++i) {
    if (!enabled_[i]) continue;
    // All enabled mass can underflow after very long reward streaks elsewhere.
    scaled[i] = k > 0.0 ? probabilities_[i] / k : 1.0 / static_cast<double>(r);
  }
  return scaled;
}

std::size_t LearningAutomaton::select_action(Rng& rng) const {
  const std::size_t r = enabled_count();
  if (r == 0) throw AutomatonError("select_action with no enabled actions");
  const double k = enabled_mass();
  if (!(k > 0.0)) {
    std::size_t pick = rng.index(r);
    for (std::size_t i = 0; i < enabled_.size(); ++i)
      if (enabled_[i] && pick-- == 0) return i;
  }
  const double target = rng.uniform() * k;
  double cumulative = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < probabilities_.size(); ++i) {
    if (!enabled_[i]) continue;
    cumulative += probabilities_[i];
    last = i;
    if (target < cumulative) return i;
  }
  return last;
}

void LearningAutomaton::update(std::size_t chosen, Reinforcement signal) {
  if (chosen >= probabilities_.size())
    throw AutomatonError("action " + std::to_string(chosen) + " out of range");
  if (!enabled_[chosen]) throw AutomatonError("action " + std::to_string(chosen) + " is disabled");

  const std::size_t r = enabled_count();
  const double k = enabled_mass();
  if (r == 1 || !(k > 0.0)) return;

  const double a = rates_.reward;
  const double b = rates_.penalty;
  if (signal == Reinforcement::penalty && b == 0.0) return;

  for (std::size_t j = 0; j < probabilities_.size(); ++j) {
    if (!enabled_[j]) continue;
    double scaled = probabilities_[j] / k;
    if (signal == Reinforcement::reward) {
      scaled = (1.0 - a) * scaled + (j == chosen ? a : 0.0);
    } else {
      scaled = (1.0 - b) * scaled + (j == chosen ? 0.0 : b / static_cast<double>(r - 1));
    }
    probabilities_[j] = scaled * k;
  }
  renormalize();
}

void LearningAutomaton::disable_action(std::size_t action) { enabled_.at(action) = false; }

void LearningAutomaton::enable_all() { std::fill(enabled_.begin(), enabled_.end(), true); }

void LearningAutomaton::set_enabled(const std::vector<bool>& mask) {
  if (mask.size() != enabled_.size()) throw AutomatonError("mask size mismatch");
  enabled_ = mask;
}

void LearningAutomaton::set_probabilities(std::vector<double> p) {
  if (p.size() != probabilities_.size()) throw AutomatonError("probability vector size mismatch");
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0 && x <= 1.0)) throw AutomatonError("probability outside [0,1]");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw AutomatonError("probabilities do not sum to 1");
  probabilities_ = std::move(p);
}

void LearningAutomaton::renormalize() {
  const double sum = std::accumulate(probabilities_.begin(), probabilities_.end(), 0.0);
  if (std::abs(sum - 1.0) > kDriftLimit)
    throw AutomatonError("probability drift " + std::to_string(sum - 1.0) + " beyond limit");
  for (double& p : probabilities_) p = std::clamp(p / sum, 0.0, 1.0);
}

}  // namespace edla
