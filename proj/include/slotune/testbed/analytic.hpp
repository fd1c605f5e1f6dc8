#pragma once

// Closed-form three-class testbed with a known optimum:
//
//   y_i = B_i (1 + L_i / (w_i + 0.05)) (1 + 4 (K_i - K*_i)^2)
//             (1 + 2 (c_i - c*_i)^2) exp(nu xi_i)
//
// with L_i = 0.6 load_i / mean(load) and xi_i standard normal. The model is
// the same surface with biased constants.

#include <memory>

#include "slotune/testbed/testbed.hpp"

namespace slotune {

struct AnalyticConstants {
  std::vector<double> base{4.0, 5.0, 6.0};
  std::vector<double> marking_opt{0.3, 0.5, 0.7};
  std::vector<double> cwnd_opt{0.5, 0.5, 0.5};
  double load_coeff = 0.6;
  double weight_offset = 0.05;
};

/// Multiplicative base bias b_i and marking-optimum shift delta_i.
struct AnalyticBias {
  std::vector<double> scale{-0.2, -0.2, -0.2};
  std::vector<double> shift{0.0, 0.2, 0.0};

  static AnalyticBias none() { return {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}; }
};

SliVector analytic_system_evaluate(const KnobView& knobs, const WorkloadSpec& workload,
                                   double noise_nu, std::uint64_t seed,
                                   const AnalyticConstants& constants = {});

SliVector analytic_model_predict(const KnobView& knobs, const WorkloadSpec& workload,
                                 const AnalyticBias& bias,
                                 const AnalyticConstants& constants = {});

class AnalyticSystem final : public SystemUnderTest {
 public:
  AnalyticSystem(ParamSpace space, double noise_nu, AnalyticConstants constants = {});
  SystemResponse measure(const ParamVector& x, const WorkloadSpec& workload,
                         std::uint64_t seed) override;

 private:
  ParamSpace space_;
  double noise_;
  AnalyticConstants constants_;
};

class AnalyticModel final : public PerformanceModel {
 public:
  AnalyticModel(ParamSpace space, AnalyticBias bias, AnalyticConstants constants = {});
  SliVector predict(const ParamVector& x, const WorkloadSpec& workload) const override;

 private:
  ParamSpace space_;
  AnalyticBias bias_;
  AnalyticConstants constants_;
};

}  // namespace slotune
