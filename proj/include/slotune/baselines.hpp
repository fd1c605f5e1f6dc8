#pragma once

// Comparison tuners: a one-point bandit-gradient tuner in the style of
// SelfTune, and Bayesian optimization without the fast model or trust region.

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "slotune/controller.hpp"

namespace slotune {

struct SelfTuneConfig {
  double delta = 0.1;   // perturbation radius
  double eta = 0.01;    // learning rate
  double beta_r = 0.3;  // reward scale
  std::size_t settle_factor = 2;  // intervals each deployment is held

  void validate() const;
};

/// tanh(-beta_r g)
double selftune_reward(double g, double beta_r);

/// Deploys center + delta u for settle_factor intervals, then updates
/// center <- center + (eta / delta) r u from the last measurement. Works in
/// unconstrained coordinates: hypercube values clamped to [0,1], simplex
/// blocks as logits mapped through softmax before actuation.
class SelfTune final : public Tuner {
 public:
  SelfTune(ParamSpace space, SloSpec slo, SelfTuneConfig config, ObjectiveSpec objective,
           const ParamVector& x0, std::uint64_t seed, std::size_t rolling_window = 20);

  const ParamVector& current() const override { return current_; }
  StepResult step(const SliVector& raw, const WorkloadSpec& workload) override;

  /// Applies one gradient update with the given reward and deploys a fresh
  /// perturbation.
  void update(double reward);

  const std::vector<double>& center() const { return center_; }
  const std::vector<double>& direction() const { return direction_; }
  /// Overrides the current perturbation direction (unit norm expected).
  void set_direction(std::vector<double> u);
  ParamVector actuate(const std::vector<double>& theta) const;

 private:
  void draw_direction();
  void deploy();

  ParamSpace space_;
  SloSpec slo_;
  SelfTuneConfig config_;
  ObjectiveSpec objective_;
  std::mt19937_64 rng_;
  std::vector<double> center_;
  std::vector<double> direction_;
  ParamVector current_;
  RollingBest best_;
  std::size_t held_ = 0;
  std::size_t iteration_ = 0;
};

/// The main controller with no_model and no_trust_region: a GP on the
/// observed objective and EI over the whole space.
std::unique_ptr<Controller> make_vanilla_bo(ParamSpace space, SloSpec slo, ControllerConfig config,
                                            ParamVector x0, std::uint64_t seed);

}  // namespace slotune
