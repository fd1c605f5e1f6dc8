#pragma once

// Closed-loop tuner. Each step takes the SLIs measured under the configuration
// currently deployed and returns the next one:
//
//   denoise -> objective -> regime detection -> model query -> residual
//   -> admission -> GP refit -> trust-region proposal
//
// The rolling best g_best is the minimum objective over the last W_g steps.
// A sustained spike above phi * g_best resets that window and re-centers the
// trust region on the current configuration.

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slotune/acquisition.hpp"
#include "slotune/denoiser.hpp"
#include "slotune/objective.hpp"
#include "slotune/paramspace.hpp"
#include "slotune/surrogate.hpp"
#include "slotune/testbed/testbed.hpp"

namespace slotune {

struct AblationFlags {
  bool no_trust_region = false;
  bool no_correction = false;  // g_hat = f, sigma fixed to sigma0
  bool no_model = false;       // GP fit directly on g (f = 0)
  bool no_denoiser = false;

  /// Comma-separated flag names; "" clears all. Throws ConfigError on an
  /// unknown name.
  static AblationFlags parse(const std::string& list);
  std::string to_string() const;
  friend bool operator==(const AblationFlags&, const AblationFlags&) = default;
};

struct ControllerConfig {
  std::size_t W_g = 20;
  std::size_t W_s = 64;
  double phi = 1.5;
  std::size_t k_shift = 2;
  double d_novel = 0.02;
  double kappa = 1.0;
  double tau_rel = 0.05;
  double sigma0 = 0.1;  // surrogate stddev under no_correction
  // The denoiser restarts when the deployed configuration moves farther than
  // this from the previous one, so it only averages repeated trials of
  // nearly the same configuration.
  double smooth_radius = 0.05;
  bool select_kernel = false;  // BIC over kernel x mean families on every refit

  ObjectiveSpec objective;
  TrustRegionSpec trust_region;
  ProposalConfig proposal;
  DenoiserConfig denoiser;
  FitOptions gp;
  AblationFlags ablation;

  void validate() const;
};

struct Sample {
  std::size_t iteration = 0;
  ParamVector x;  // normalized
  SliVector raw;
  SliVector smoothed;
  double g = 0.0;
  double f = 0.0;
  double residual = 0.0;
  bool admitted = false;
};

/// Everything one control step observed and decided.
struct StepResult {
  Sample sample;
  double g_best = 0.0;  // after this step's update
  ParamVector x_best;
  double distance_to_best = 0.0;  // of sample.x from the x_best it was proposed around
  double ei = 0.0;                // EI of sample.x when it was proposed
  bool regime_shift = false;
  bool compliant = false;  // all smoothed ratios <= 1
  bool model_failed = false;
  bool proposal_failed = false;
  ParamVector next;
};

/// Common interface of the main controller and the baselines.
class Tuner {
 public:
  virtual ~Tuner() = default;
  /// Configuration to deploy for the next measurement.
  virtual const ParamVector& current() const = 0;
  virtual StepResult step(const SliVector& raw, const WorkloadSpec& workload) = 0;
};

/// Spike counter: fires once the spike condition held for k consecutive
/// steps. The caller clears it on reset.
class RegimeDetector {
 public:
  RegimeDetector(double phi, std::size_t k) : phi_(phi), k_(k) {}

  bool update(double g, double g_best);
  void clear() { count_ = 0; }
  std::size_t count() const { return count_; }

 private:
  double phi_;
  std::size_t k_;
  std::size_t count_ = 0;
};

/// Minimum objective over the last W_g observations.
class RollingBest {
 public:
  explicit RollingBest(std::size_t window) : window_(window) {}

  void push(double g, const ParamVector& x);
  /// Drops the history and restarts it at (g, x).
  void reset(double g, const ParamVector& x);
  bool empty() const { return history_.empty(); }
  std::size_t size() const { return history_.size(); }

  /// Throws StateError when empty. Ties resolve to the most recent entry.
  std::pair<double, const ParamVector*> best() const;

 private:
  std::size_t window_;
  std::deque<std::pair<double, ParamVector>> history_;
};

/// Novel: farther than d_novel from every window point. Surprising: the
/// corrected prediction misses g_obs by more than max(kappa sigma, tau |g|).
bool admit(const std::vector<ParamVector>& window, const ParamVector& x, double g_obs,
           const CorrectedPrediction& prediction, const ControllerConfig& config,
           const ParamSpace& space);

class Controller final : public Tuner {
 public:
  /// `model` may be null only under no_model. `x0` is normalized.
  Controller(ParamSpace space, SloSpec slo, ControllerConfig config,
             std::shared_ptr<const PerformanceModel> model, ParamVector x0, std::uint64_t seed);

  const ParamVector& current() const override { return current_; }
  StepResult step(const SliVector& raw, const WorkloadSpec& workload) override;

  std::size_t iteration() const { return iteration_; }
  const std::deque<Sample>& window() const { return window_; }
  const TrainingSet& training_set() const { return training_; }
  const std::optional<GpModel>& gp() const { return gp_; }
  std::pair<double, const ParamVector*> rolling_best() const { return best_.best(); }
  std::size_t model_calls() const { return model_calls_; }
  const ControllerConfig& config() const { return config_; }

  /// Corrected prediction under the current surrogate.
  CorrectedPrediction predict(const ParamVector& x, const WorkloadSpec& workload) const;

 private:
  double model_objective(const ParamVector& x, const WorkloadSpec& workload) const;
  void refit();

  ParamSpace space_;
  SloSpec slo_;
  ControllerConfig config_;
  std::shared_ptr<const PerformanceModel> model_;
  std::uint64_t seed_;

  ParamVector current_;
  std::optional<ParamVector> previous_;
  double current_ei_ = 0.0;
  double current_distance_ = 0.0;
  std::size_t iteration_ = 0;

  SliDenoiser denoiser_;
  RegimeDetector detector_;
  RollingBest best_;
  std::deque<Sample> window_;
  TrainingSet training_;
  std::optional<GpModel> gp_;
  mutable std::size_t model_calls_ = 0;
};

}  // namespace slotune
