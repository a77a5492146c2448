#include "edla/threshold.hpp"

#include <cmath>
#include <stdexcept>

namespace edla {

namespace {

Reinforcement compare(double weight, double bound, Direction direction) {
  const bool satisfied = direction == Direction::minimize ? weight <= bound : weight >= bound;
  return satisfied ? Reinforcement::reward : Reinforcement::penalty;
}

}  // namespace

Reinforcement DynamicThreshold::evaluate(double weight, Direction direction) const {
  if (count_ == 0) return Reinforcement::reward;
  return compare(weight, mean_, direction);
}

void DynamicThreshold::update(double weight) {
  const auto k = static_cast<double>(count_);
  mean_ = (k * mean_ + weight) / (k + 1.0);
  ++count_;
}

VarianceAwareThreshold::VarianceAwareThreshold(VarianceAwareParams params) : params_(params) {
  if (!(params.mean_step > 0.0 && params.mean_step <= 1.0)) throw std::invalid_argument("mean step must lie in (0,1]");
  if (!(params.deviation_step > 0.0 && params.deviation_step <= 1.0))
    throw std::invalid_argument("deviation step must lie in (0,1]");
  if (!(params.mean_scale > 0.0)) throw std::invalid_argument("mean scale must be positive");
}

VarianceAwareThreshold::VarianceAwareThreshold(VarianceAwareParams params, double mean, double deviation)
    : VarianceAwareThreshold(params) {
  if (!(deviation >= 0.0)) throw std::invalid_argument("deviation estimate must be non-negative");
  initialized_ = true;
  mean_ = mean;
  deviation_ = deviation;
}

double VarianceAwareThreshold::bound(Direction direction) const {
  const double centre = params_.mean_scale * mean_;
  return direction == Direction::minimize ? centre + 2.0 * deviation_ : centre - 2.0 * deviation_;
}

Reinforcement VarianceAwareThreshold::evaluate(double weight, Direction direction) const {
  if (!initialized_) return Reinforcement::reward;
  return compare(weight, bound(direction), direction);
}

void VarianceAwareThreshold::update(double weight) {
  if (!initialized_) {
    mean_ = weight;
    deviation_ = 0.0;
    initialized_ = true;
    return;
  }
  const double err = weight - mean_;
  mean_ += params_.mean_step * err;
  deviation_ += params_.deviation_step * (std::abs(err) - deviation_);
  if (deviation_ < 0.0) deviation_ = 0.0;
}

Threshold::Threshold(const ThresholdConfig& config)
    : state_(config.kind == ThresholdKind::dynamic
                 ? std::variant<DynamicThreshold, VarianceAwareThreshold>(DynamicThreshold{})
                 : std::variant<DynamicThreshold, VarianceAwareThreshold>(VarianceAwareThreshold(config.variance))) {}

Reinforcement Threshold::evaluate(double weight, Direction direction) const {
  return std::visit([&](const auto& t) { return t.evaluate(weight, direction); }, state_);
}

void Threshold::update(double weight) {
  std::visit([&](auto& t) { t.update(weight); }, state_);
}

double Threshold::current_bound(Direction direction) const {
  if (const auto* d = std::get_if<DynamicThreshold>(&state_)) return d->mean();
  const auto& v = std::get<VarianceAwareThreshold>(state_);
  return v.initialized() ? v.bound(direction) : 0.0;
}

}  // namespace edla
