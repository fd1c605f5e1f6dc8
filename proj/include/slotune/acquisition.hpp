#pragma once

// Expected Improvement anchored at the best observed objective, a quadratic
// trust-region penalty, and the multi-start optimizer that proposes the next
// configuration. Simplex blocks are searched as unconstrained logits and
// mapped through softmax before every evaluation.

#include <cstdint>
#include <functional>

#include "slotune/paramspace.hpp"
#include "slotune/surrogate.hpp"

namespace slotune {

struct TrustRegionSpec {
  double epsilon = 0.3;
  double beta = 1e4;
  DistanceSpec distance;
  bool enabled = true;  // false: no penalty and global start points

  void validate() const;
};

struct ProposalConfig {
  int n_starts = 64;
  int local_budget = 200;
  double uniform_fraction = 0.5;  // share of starts drawn uniformly in the region
  // EI below ei_floor * |g_best| counts as zero during the search, so the
  // mean tie-break takes over once no meaningful improvement is expected.
  double ei_floor = 0.03;
  std::uint64_t seed = 0;

  void validate() const;
};

double normal_pdf(double z);
double normal_cdf(double z);

/// (g_best - mu) Phi(z) + sigma phi(z); max(g_best - mu, 0) when sigma = 0.
double expected_improvement(double mu, double sigma, double g_best);

/// 0 inside the ball, beta (d - eps)^2 outside.
double tr_penalty(double d, const TrustRegionSpec& spec);

/// Bias-corrected surrogate evaluated at a normalized configuration. May
/// throw; the optimizer treats a throwing candidate as infeasible.
using SurrogateFn = std::function<CorrectedPrediction(const ParamVector&)>;

struct AcquisitionValue {
  double value = 0.0;  // -EI + penalty
  double ei = 0.0;
  double penalty = 0.0;
  double distance = 0.0;
  CorrectedPrediction prediction;
};

AcquisitionValue acquisition_value(const ParamVector& x, const SurrogateFn& surrogate,
                                   double g_best, const TrustRegionSpec& tr,
                                   const ParamVector& x_best, const ParamSpace& space);

struct Proposal {
  ParamVector x;
  AcquisitionValue acquisition;
  int start_index = 0;
};

/// Minimizes -EI + penalty over the region around x_best. Ties at zero EI
/// are broken by the penalized surrogate mean, then by distance to x_best.
/// Throws ProposalError when no start yields a finite value.
Proposal propose(const ParamSpace& space, const SurrogateFn& surrogate, double g_best,
                 const ParamVector& x_best, const TrustRegionSpec& tr,
                 const ProposalConfig& config);

}  // namespace slotune
