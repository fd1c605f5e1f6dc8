#include "slotune/testbed/analytic.hpp"

#include <cmath>
#include <random>

#include "slotune/error.hpp"

namespace slotune {

namespace {

void check_classes(const KnobView& k, const WorkloadSpec& w, const AnalyticConstants& c) {
  const std::size_t n = c.base.size();
  if (k.weights.size() != n || k.marking.size() != n || k.cwnd.size() != n ||
      w.loads_bps.size() != n || c.marking_opt.size() != n || c.cwnd_opt.size() != n)
    throw ShapeError("analytic testbed expects " + std::to_string(n) + " classes");
}

SliVector surface(const KnobView& k, const WorkloadSpec& w, const std::vector<double>& base,
                  const std::vector<double>& marking_opt, const AnalyticConstants& c) {
  const std::size_t n = base.size();
  double mean_load = 0.0;
  for (double l : w.loads_bps) mean_load += l;
  mean_load /= static_cast<double>(n);
  if (!(mean_load > 0.0)) throw ConfigError("analytic testbed needs a positive mean load");
  SliVector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double load = c.load_coeff * w.loads_bps[i] / mean_load;
    const double dk = k.marking[i] - marking_opt[i];
    const double dc = k.cwnd[i] - c.cwnd_opt[i];
    y[i] = base[i] * (1.0 + load / (k.weights[i] + c.weight_offset)) * (1.0 + 4.0 * dk * dk) *
           (1.0 + 2.0 * dc * dc);
  }
  return y;
}

}  // namespace

SliVector analytic_system_evaluate(const KnobView& knobs, const WorkloadSpec& workload,
                                   double noise_nu, std::uint64_t seed,
                                   const AnalyticConstants& constants) {
  check_classes(knobs, workload, constants);
  if (!(noise_nu >= 0.0)) throw ConfigError("noise level must be >= 0");
  auto y = surface(knobs, workload, constants.base, constants.marking_opt, constants);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : y) {
    const double xi = normal(rng);
    v *= std::exp(noise_nu * xi);
  }
  return y;
}

SliVector analytic_model_predict(const KnobView& knobs, const WorkloadSpec& workload,
                                 const AnalyticBias& bias, const AnalyticConstants& constants) {
  check_classes(knobs, workload, constants);
  const std::size_t n = constants.base.size();
  if (bias.scale.size() != n || bias.shift.size() != n)
    throw ShapeError("analytic bias field expects " + std::to_string(n) + " classes");
  std::vector<double> base(n), opt(n);
  for (std::size_t i = 0; i < n; ++i) {
    base[i] = constants.base[i] * (1.0 + bias.scale[i]);
    opt[i] = constants.marking_opt[i] + bias.shift[i];
  }
  return surface(knobs, workload, base, opt, constants);
}

AnalyticSystem::AnalyticSystem(ParamSpace space, double noise_nu, AnalyticConstants constants)
    : space_(std::move(space)), noise_(noise_nu), constants_(std::move(constants)) {
  check_knob_layout(space_, constants_.base.size());
}

SystemResponse AnalyticSystem::measure(const ParamVector& x, const WorkloadSpec& workload,
                                       std::uint64_t seed) {
  SystemResponse r;
  r.slowdowns = analytic_system_evaluate(knob_view(x, space_), workload, noise_, seed, constants_);
  r.flow_counts.assign(r.slowdowns.size(), 0);
  return r;
}

AnalyticModel::AnalyticModel(ParamSpace space, AnalyticBias bias, AnalyticConstants constants)
    : space_(std::move(space)), bias_(std::move(bias)), constants_(std::move(constants)) {
  check_knob_layout(space_, constants_.base.size());
}

SliVector AnalyticModel::predict(const ParamVector& x, const WorkloadSpec& workload) const {
  return analytic_model_predict(knob_view(x, space_), workload, bias_, constants_);
}

}  // namespace slotune
