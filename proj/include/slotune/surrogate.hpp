#pragma once

// Gaussian-process regression on objective residuals R(x) = g(x) - f(x).
//
// The fitted model keeps the Cholesky factor of K + s_n^2 I so predictions
// cost O(n d + n^2). Hyperparameters are chosen by maximizing the log
// marginal likelihood with a multi-start compass search in log space. For
// the constant mean family the mean value is profiled out in closed form
// (generalized least squares) at every likelihood evaluation.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slotune/paramspace.hpp"

namespace slotune {

enum class KernelFamily { SquaredExponential, Matern52 };
enum class MeanFamily { Zero, Constant };

struct GpHyperparams {
  KernelFamily kernel = KernelFamily::SquaredExponential;
  MeanFamily mean = MeanFamily::Constant;
  std::vector<double> length_scales;  // one per input dimension
  double signal_variance = 1.0;
  double noise_variance = 1e-8;
  double mean_value = 0.0;  // ignored for MeanFamily::Zero

  /// Number of free hyperparameters, as counted by BIC.
  std::size_t num_parameters() const;
};

struct TrainingSet {
  std::vector<std::vector<double>> inputs;
  std::vector<double> targets;

  std::size_t size() const { return targets.size(); }
  std::size_t dimension() const { return inputs.empty() ? 0 : inputs.front().size(); }
  void add(std::vector<double> x, double y);
};

struct SurrogatePosterior {
  double mu = 0.0;
  double var = 0.0;
};

struct FitOptions {
  KernelFamily kernel = KernelFamily::SquaredExponential;
  MeanFamily mean = MeanFamily::Constant;
  int n_starts = 8;
  int evals_per_start = 200;
  double length_scale_min = 0.05;
  double length_scale_max = 5.0;
  double signal_variance_min = 1e-4;
  double signal_variance_max = 25.0;
  double noise_variance_min = 1e-8;
  double noise_variance_max = 1.0;
  double jitter = 1e-8;
  double max_jitter = 1e-4;
};

class GpModel {
 public:
  /// Conditions a GP with fixed hyperparameters on `data`. Escalates extra
  /// diagonal jitter by decades up to `max_jitter`; throws NumericError if
  /// the covariance is still not positive definite.
  static GpModel condition(TrainingSet data, GpHyperparams hp, double max_jitter = 1e-4);

  SurrogatePosterior predict(std::span<const double> x) const;

  /// Log marginal likelihood of the conditioning data.
  double log_marginal_likelihood() const { return lml_; }
  /// k ln n - 2 LML
  double bic() const;

  const GpHyperparams& hyperparams() const { return hp_; }
  const TrainingSet& data() const { return data_; }
  /// Noise variance actually added to the diagonal, including escalated jitter.
  double diagonal_noise() const { return diag_noise_; }
  std::size_t dimension() const { return dim_; }

  double kernel(std::span<const double> a, std::span<const double> b) const;

 private:
  GpModel() = default;

  TrainingSet data_;
  GpHyperparams hp_;
  std::size_t dim_ = 0;
  double diag_noise_ = 0.0;
  Eigen::MatrixXd chol_;   // lower factor
  Eigen::VectorXd alpha_;  // (K + s_n^2 I)^{-1} (y - m)
  double lml_ = 0.0;
};

/// Kernel value for explicit hyperparameters.
double kernel_value(const GpHyperparams& hp, std::span<const double> a, std::span<const double> b);

/// Multi-start maximum-likelihood fit. `warm_start`, when given, replaces
/// the first random start.
GpModel fit(const TrainingSet& data, const FitOptions& options, std::uint64_t seed,
            const GpHyperparams* warm_start = nullptr);

/// Recomputes the log marginal likelihood of `data` under the model's
/// hyperparameters.
double log_marginal_likelihood(const GpModel& model, const TrainingSet& data);

struct GpCandidate {
  KernelFamily kernel;
  MeanFamily mean;
};

/// Fits every candidate and returns the one with the lowest BIC. With fewer
/// than four points only the squared-exponential/constant default is fitted.
GpModel bic_select(const TrainingSet& data, const FitOptions& options,
                   std::span<const GpCandidate> candidates, std::uint64_t seed);

std::vector<GpCandidate> default_candidates();

struct CorrectedPrediction {
  double mean = 0.0;
  double stddev = 0.0;
};

/// g_hat = f + mu_R, sigma_g = sigma_R.
CorrectedPrediction corrected_predict(double f_value, const SurrogatePosterior& post);

/// GP coordinates: hypercube coordinates as-is, simplex blocks clr-mapped.
std::vector<double> gp_input(const ParamVector& x, const ParamSpace& space,
                             double simplex_floor = 1e-6);

}  // namespace slotune
