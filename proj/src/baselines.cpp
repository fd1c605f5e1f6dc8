#include "slotune/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slotune/error.hpp"

namespace slotune {

namespace {

constexpr double kLogitBound = 30.0;

}  // namespace

void SelfTuneConfig::validate() const {
  if (!(delta > 0.0)) throw ConfigError("selftune delta must be > 0");
  if (!(eta > 0.0)) throw ConfigError("selftune eta must be > 0");
  if (!(beta_r > 0.0)) throw ConfigError("selftune beta_r must be > 0");
  if (settle_factor < 1) throw ConfigError("selftune settle_factor must be >= 1");
}

double selftune_reward(double g, double beta_r) { return std::tanh(-beta_r * g); }

SelfTune::SelfTune(ParamSpace space, SloSpec slo, SelfTuneConfig config, ObjectiveSpec objective,
                   const ParamVector& x0, std::uint64_t seed, std::size_t rolling_window)
    : space_(std::move(space)),
      slo_(std::move(slo)),
      config_(config),
      objective_(objective),
      rng_(seed),
      best_(rolling_window) {
  config_.validate();
  objective_.validate();
  slo_.validate();
  check_normalized(x0, space_);
  for (std::size_t k = 0; k < space_.num_blocks(); ++k) {
    if (space_.blocks()[k].kind == BlockKind::Hypercube) {
      center_.insert(center_.end(), x0.blocks[k].begin(), x0.blocks[k].end());
    } else {
      const auto c = clr(x0.blocks[k]);
      center_.insert(center_.end(), c.begin(), c.end());
    }
  }
  draw_direction();
  deploy();
}

void SelfTune::draw_direction() {
  std::normal_distribution<double> normal(0.0, 1.0);
  double norm = 0.0;
  direction_.assign(center_.size(), 0.0);
  while (norm == 0.0) {
    norm = 0.0;
    for (auto& v : direction_) {
      v = normal(rng_);
      norm += v * v;
    }
    norm = std::sqrt(norm);
  }
  for (auto& v : direction_) v /= norm;
}

void SelfTune::set_direction(std::vector<double> u) {
  if (u.size() != center_.size()) throw ShapeError("direction has the wrong dimension");
  direction_ = std::move(u);
  deploy();
}

ParamVector SelfTune::actuate(const std::vector<double>& theta) const {
  if (theta.size() != space_.dimension()) throw ShapeError("theta has the wrong dimension");
  ParamVector x;
  std::size_t off = 0;
  for (const auto& b : space_.blocks()) {
    std::vector<double> v(theta.begin() + off, theta.begin() + off + b.dim);
    if (b.kind == BlockKind::Hypercube) {
      for (auto& c : v) c = std::clamp(c, 0.0, 1.0);
      x.blocks.push_back(std::move(v));
    } else {
      for (auto& c : v) c = std::clamp(c, -kLogitBound, kLogitBound);
      x.blocks.push_back(softmax_map(v));
    }
    off += b.dim;
  }
  return x;
}

void SelfTune::deploy() {
  std::vector<double> theta = center_;
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += config_.delta * direction_[i];
  current_ = actuate(theta);
}

void SelfTune::update(double reward) {
  const double scale = config_.eta / config_.delta * reward;
  std::size_t off = 0;
  for (const auto& b : space_.blocks()) {
    for (std::size_t i = 0; i < b.dim; ++i) {
      double& c = center_[off + i];
      c += scale * direction_[off + i];
      c = b.kind == BlockKind::Hypercube ? std::clamp(c, 0.0, 1.0)
                                         : std::clamp(c, -kLogitBound, kLogitBound);
    }
    off += b.dim;
  }
  draw_direction();
  deploy();
}

StepResult SelfTune::step(const SliVector& raw, const WorkloadSpec&) {
  if (raw.size() != slo_.num_classes()) throw ShapeError("observation does not match the SLO");
  StepResult r;
  Sample& s = r.sample;
  s.iteration = iteration_++;
  s.x = current_;
  s.raw = raw;
  s.smoothed = raw;
  s.g = objective(raw, slo_, objective_);
  s.f = std::numeric_limits<double>::quiet_NaN();
  s.residual = std::numeric_limits<double>::quiet_NaN();
  r.compliant = compliant(ratios(raw, slo_));
  r.ei = std::numeric_limits<double>::quiet_NaN();
  best_.push(s.g, s.x);
  const auto [g_best, x_best] = best_.best();
  r.g_best = g_best;
  r.x_best = *x_best;
  if (++held_ >= config_.settle_factor) {
    held_ = 0;
    update(selftune_reward(s.g, config_.beta_r));
  }
  r.next = current_;
  return r;
}

std::unique_ptr<Controller> make_vanilla_bo(ParamSpace space, SloSpec slo, ControllerConfig config,
                                            ParamVector x0, std::uint64_t seed) {
  config.ablation.no_model = true;
  config.ablation.no_trust_region = true;
  return std::make_unique<Controller>(std::move(space), std::move(slo), std::move(config), nullptr,
                                      std::move(x0), seed);
}

}  // namespace slotune
