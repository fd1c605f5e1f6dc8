#pragma once

// Scalar cost over per-class SLIs: smooth worst-case SLO ratio plus a
// fairness penalty that pulls the ratios together.

#include <span>
#include <string>
#include <vector>

namespace slotune {

using SliVector = std::vector<double>;

struct SloSpec {
  std::vector<double> thresholds;
  std::vector<std::string> labels;  // e.g. DSCP values, optional

  std::size_t num_classes() const { return thresholds.size(); }
  void validate() const;
};

struct ObjectiveSpec {
  double c = 10.0;      // LSE sharpness
  double lambda = 0.5;  // fairness weight

  void validate() const;
};

std::vector<double> ratios(std::span<const double> y, const SloSpec& slo);

/// (1/c) ln sum exp(c r_i), evaluated with a max shift.
double lse(std::span<const double> r, double c);

/// Mean absolute deviation of the ratios from their mean.
double fairness(std::span<const double> r);

double objective(std::span<const double> y, const SloSpec& slo, const ObjectiveSpec& spec);

/// All ratios at or below one.
bool compliant(std::span<const double> r);

}  // namespace slotune
