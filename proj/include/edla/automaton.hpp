#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "edla/random.hpp"

namespace edla {

// P-model environment response.
enum class Reinforcement { reward, penalty };

struct LearningRates {
  double reward = 0.05;   // a, in (0, 1)
  double penalty = 0.0;   // b, in [0, 1); 0 gives linear reward-inaction
};

class AutomatonError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Variable-structure learning automaton with a variable action set.
//
// Selection and updates operate on the probabilities of the enabled actions
// scaled by their total mass K; the updated scaled vector is multiplied back
// by K, so disabled actions keep their stored probability and the full vector
// still sums to one.
class LearningAutomaton {
 public:
  // Uniform initial probabilities. Throws AutomatonError on zero actions or
  // rates outside their ranges.
  LearningAutomaton(std::size_t action_count, LearningRates rates);

  std::size_t action_count() const { return probabilities_.size(); }
  const std::vector<double>& probabilities() const { return probabilities_; }
  double probability(std::size_t action) const { return probabilities_.at(action); }
  const LearningRates& rates() const { return rates_; }

  const std::vector<bool>& enabled() const { return enabled_; }
  bool is_enabled(std::size_t action) const { return enabled_.at(action); }
  std::size_t enabled_count() const;
  double enabled_mass() const;

  // Selection distribution over all actions (zero for disabled ones).
  std::vector<double> scaled_probabilities() const;

  // Throws AutomatonError when no action is enabled.
  std::size_t select_action(Rng& rng) const;

  // Linear update of the scaled vector. With penalty rate 0 a penalty leaves
  // the vector untouched. Throws AutomatonError if `chosen` is out of range or
  // disabled.
  void update(std::size_t chosen, Reinforcement signal);

  void disable_action(std::size_t action);
  void enable_all();
  void set_enabled(const std::vector<bool>& mask);

  // Replaces the probability vector; it must be a valid distribution.
  void set_probabilities(std::vector<double> p);

 private:
  void renormalize();

  std::vector<double> probabilities_;
  std::vector<bool> enabled_;
  LearningRates rates_;
};

}  // namespace edla
