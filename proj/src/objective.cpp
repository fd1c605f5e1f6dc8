#include "slotune/objective.hpp"

#include <algorithm>
#include <cmath>

#include "slotune/error.hpp"

namespace slotune {

void SloSpec::validate() const {
  if (thresholds.empty()) throw ConfigError("SLO needs at least one class");
  for (double v : thresholds)
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("SLO thresholds must be positive");
  if (!labels.empty() && labels.size() != thresholds.size())
    throw ConfigError("SLO label count does not match threshold count");
}

void ObjectiveSpec::validate() const {
  if (!(c > 0.0)) throw ConfigError("objective c must be > 0");
  if (!(lambda >= 0.0)) throw ConfigError("objective lambda must be >= 0");
}

std::vector<double> ratios(std::span<const double> y, const SloSpec& slo) {
  if (y.size() != slo.thresholds.size())
    throw ShapeError("SLI vector has " + std::to_string(y.size()) + " classes, SLO has " +
                     std::to_string(slo.thresholds.size()));
  std::vector<double> r(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] / slo.thresholds[i];
  return r;
}

double lse(std::span<const double> r, double c) {
  if (r.empty()) throw ShapeError("lse of an empty vector");
  const double m = *std::max_element(r.begin(), r.end());
  double s = 0.0;
  for (double v : r) s += std::exp(c * (v - m));
  return m + std::log(s) / c;
}

double fairness(std::span<const double> r) {
  if (r.empty()) throw ShapeError("fairness of an empty vector");
  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= static_cast<double>(r.size());
  double dev = 0.0;
  for (double v : r) dev += std::abs(v - mean);
  return dev / static_cast<double>(r.size());
}

double objective(std::span<const double> y, const SloSpec& slo, const ObjectiveSpec& spec) {
  const auto r = ratios(y, slo);
  return lse(r, spec.c) + spec.lambda * fairness(r);
}

bool compliant(std::span<const double> r) {
  return std::all_of(r.begin(), r.end(), [](double v) { return v <= 1.0; });
}

}  // namespace slotune
