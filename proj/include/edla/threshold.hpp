#pragma once

#include <cstddef>
#include <variant>

#include "edla/automaton.hpp"

namespace edla {

enum class Direction { minimize, maximize };

// Running arithmetic mean of every sub-graph weight seen so far.
// The first weight is rewarded unconditionally because there is no history.
class DynamicThreshold {
 public:
  std::size_t count() const { return count_; }
  double mean() const { return mean_; }

  // Inclusive comparison: a weight equal to the mean is rewarded.
  Reinforcement evaluate(double weight, Direction direction) const;
  void update(double weight);

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
};

struct VarianceAwareParams {
  double mean_step = 0.125;      // step size of the mean estimate
  double deviation_step = 0.25;  // step size of the absolute-deviation estimate
  double mean_scale = 0.5;       // factor applied to the mean in the bound
};

// Smoothed mean plus smoothed mean absolute deviation.
//   err  = W - T
//   T   += mean_step * err
//   Var += deviation_step * (|err| - Var)
// Minimisation rewards W <= mean_scale*T + 2*Var; maximisation rewards
// W >= mean_scale*T - 2*Var. The first observation initialises T = W, Var = 0,
// and, like the dynamic threshold, is rewarded unconditionally.
class VarianceAwareThreshold {
 public:
  explicit VarianceAwareThreshold(VarianceAwareParams params = {});
  // Starts from an explicit state instead of waiting for the first weight.
  VarianceAwareThreshold(VarianceAwareParams params, double mean, double deviation);

  bool initialized() const { return initialized_; }
  double mean() const { return mean_; }
  double deviation() const { return deviation_; }
  const VarianceAwareParams& params() const { return params_; }

  double bound(Direction direction) const;
  Reinforcement evaluate(double weight, Direction direction) const;
  void update(double weight);

 private:
  VarianceAwareParams params_;
  bool initialized_ = false;
  double mean_ = 0.0;
  double deviation_ = 0.0;
};

enum class ThresholdKind { dynamic, variance_aware };

struct ThresholdConfig {
  ThresholdKind kind = ThresholdKind::variance_aware;
  VarianceAwareParams variance{};
};

// Either evaluation criterion behind one interface.
class Threshold {
 public:
  explicit Threshold(const ThresholdConfig& config);

  Reinforcement evaluate(double weight, Direction direction) const;
  void update(double weight);
  // The value a weight is compared against next; 0 before any observation.
  double current_bound(Direction direction) const;

  const std::variant<DynamicThreshold, VarianceAwareThreshold>& state() const { return state_; }

 private:
  std::variant<DynamicThreshold, VarianceAwareThreshold> state_;
};

}  // namespace edla
