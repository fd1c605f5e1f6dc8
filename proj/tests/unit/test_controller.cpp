#include <cmath>
#include <memory>

#include "doctest.h"
#include "slotune/controller.hpp"
#include "slotune/error.hpp"
#include "slotune/testbed/analytic.hpp"

using namespace slotune;

TEST_CASE("regime detector traces") {
  RegimeDetector d(1.5, 2);
  CHECK_FALSE(d.update(1.6, 1.0));
  CHECK(d.update(1.7, 1.0));

  RegimeDetector e(1.5, 2);
  CHECK_FALSE(e.update(1.6, 1.0));
  CHECK_FALSE(e.update(1.2, 1.0));
  CHECK(e.count() == 0);

  RegimeDetector f(1.5, 2);
  for (int i = 0; i < 10; ++i) CHECK_FALSE(f.update(1.4, 1.0));
}

TEST_CASE("rolling best") {
  const ParamVector a{{{0.1}}}, b{{{0.2}}}, c{{{0.3}}};
  RollingBest r(3);
  CHECK_THROWS_AS(r.best(), StateError);
  r.push(1.2, a);
  r.push(0.9, b);
  r.push(1.5, c);
  CHECK(r.best().first == 0.9);
  CHECK(*r.best().second == b);

  RollingBest w(2);
  w.push(1.2, a);
  w.push(0.9, b);
  w.push(1.5, c);
  CHECK(w.best().first == 0.9);
  w.push(1.4, a);
  CHECK(w.best().first == 1.4);

  r.reset(2.0, c);
  CHECK(r.size() == 1);
  CHECK(r.best().first == 2.0);

  RollingBest tie(4);
  tie.push(1.0, a);
  tie.push(1.0, b);
  CHECK(*tie.best().second == b);
}

TEST_CASE("admission rule") {
  const ParamSpace s({BlockSpec::hypercube({0, 0}, {1, 1})});
  const ControllerConfig cfg;
  const ParamVector x{{{0.5, 0.5}}};
  CHECK(admit({}, x, 1.0, {1.0, 0.1}, cfg, s));
  CHECK_FALSE(admit({x}, x, 1.0, {1.0, 0.1}, cfg, s));
  CHECK(admit({x}, x, 1.0, {0.5, 0.1}, cfg, s));
  // within both gates: error 0.04 < max(0.1, 0.05)
  CHECK_FALSE(admit({x}, x, 1.0, {1.04, 0.1}, cfg, s));
  const ParamVector far{{{0.53, 0.5}}};
  CHECK(admit({x}, far, 1.0, {1.0, 0.1}, cfg, s));
}

TEST_CASE("ablation flags") {
  const auto f = AblationFlags::parse("no_tr, no_model");
  CHECK(f.no_trust_region);
  CHECK(f.no_model);
  CHECK_FALSE(f.no_correction);
  CHECK(f.to_string() == "no_tr,no_model");
  CHECK(AblationFlags::parse("no_trust_region").no_trust_region);
  CHECK(AblationFlags::parse("") == AblationFlags{});
  CHECK_THROWS_AS(AblationFlags::parse("no_gp"), ConfigError);
}

TEST_CASE("config validation") {
  ControllerConfig c;
  CHECK_NOTHROW(c.validate());
  c.W_s = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.phi = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.k_shift = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

namespace {

const ParamSpace kSpace = canonical_space();
const SloSpec kSlo{{10.8, 13.5, 16.2}, {}};

WorkloadSpec workload() {
  WorkloadSpec w;
  w.loads_bps = {2e9, 2e9, 2e9};
  return w;
}

ParamVector start() {
  return {{{0.5, 0.3, 0.2}, {0.6, 0.2, 0.4}, {0.8, 0.25, 0.75}}};
}

ControllerConfig fast_config() {
  ControllerConfig c;
  c.proposal.n_starts = 8;
  c.proposal.local_budget = 60;
  c.gp.n_starts = 2;
  c.gp.evals_per_start = 60;
  return c;
}

struct Loop {
  std::shared_ptr<AnalyticModel> model;
  AnalyticSystem system;
  Controller ctl;

  Loop(ControllerConfig cfg, AnalyticBias bias, double noise, std::uint64_t seed = 1)
      : model(std::make_shared<AnalyticModel>(kSpace, bias)),
        system(kSpace, noise),
        ctl(kSpace, kSlo, cfg, model, start(), seed) {}

  StepResult step(std::size_t i) {
    const auto y = system.measure(ctl.current(), workload(), 1000 + i).slowdowns;
    return ctl.step(y, workload());
  }
};

}  // namespace

TEST_CASE("first step is admitted and stays in the region") {
  Loop l(fast_config(), AnalyticBias::none(), 0.05);
  const auto r = l.step(0);
  CHECK(r.sample.admitted);
  CHECK(r.x_best == start());
  CHECK(mixed_distance(r.next, start(), kSpace) <= 0.35);
  CHECK(l.ctl.window().size() == 1);
}

TEST_CASE("perfect model gives zero residuals") {
  Loop l(fast_config(), AnalyticBias::none(), 0.0);
  for (std::size_t i = 0; i < 6; ++i) {
    const auto r = l.step(i);
    CHECK(std::abs(r.sample.residual) <= 1e-12);
    CHECK(r.sample.residual == r.sample.g - r.sample.f);
  }
  const auto p = l.ctl.predict(l.ctl.current(), workload());
  const double f = objective(l.model->predict(l.ctl.current(), workload()), kSlo, ObjectiveSpec{});
  CHECK(std::abs(p.mean - f) <= 1e-3);
}

TEST_CASE("window and training set invariants") {
  auto cfg = fast_config();
  cfg.W_s = 4;
  Loop l(cfg, AnalyticBias{}, 0.05);
  for (std::size_t i = 0; i < 12; ++i) {
    l.step(i);
    const auto& w = l.ctl.window();
    CHECK(w.size() <= 4);
    CHECK(l.ctl.training_set().size() == w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
      CHECK(w[k].admitted);
      CHECK(l.ctl.training_set().targets[k] == w[k].residual);
      if (k > 0) CHECK(w[k].iteration > w[k - 1].iteration);
    }
  }
}

TEST_CASE("each ablation touches one stage") {
  SUBCASE("no_denoiser keeps raw SLIs") {
    auto cfg = fast_config();
    cfg.ablation.no_denoiser = true;
    Loop l(cfg, AnalyticBias{}, 0.05);
    for (std::size_t i = 0; i < 5; ++i) {
      const auto r = l.step(i);
      CHECK(r.sample.smoothed == r.sample.raw);
    }
  }
  SUBCASE("no_model fits g directly") {
    auto cfg = fast_config();
    cfg.ablation.no_model = true;
    Controller c(kSpace, kSlo, cfg, nullptr, start(), 1);
    AnalyticSystem sys(kSpace, 0.05);
    for (std::size_t i = 0; i < 4; ++i) {
      const auto r = c.step(sys.measure(c.current(), workload(), i).slowdowns, workload());
      CHECK(r.sample.f == 0.0);
      CHECK(r.sample.residual == r.sample.g);
    }
    CHECK(c.gp().has_value());
  }
  SUBCASE("no_correction uses the model with fixed spread") {
    auto cfg = fast_config();
    cfg.ablation.no_correction = true;
    Loop l(cfg, AnalyticBias{}, 0.05);
    for (std::size_t i = 0; i < 4; ++i) l.step(i);
    CHECK_FALSE(l.ctl.gp().has_value());
    const auto p = l.ctl.predict(start(), workload());
    CHECK(p.stddev == cfg.sigma0);
    CHECK(p.mean == objective(l.model->predict(start(), workload()), kSlo, ObjectiveSpec{}));
  }
  SUBCASE("no_trust_region leaves the ball") {
    auto cfg = fast_config();
    cfg.ablation.no_trust_region = true;
    Loop l(cfg, AnalyticBias{}, 0.05);
    double widest = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      const auto r = l.step(i);
      widest = std::max(widest, mixed_distance(r.next, r.x_best, kSpace));
    }
    CHECK(widest > 0.35);
  }
  SUBCASE("a model is required unless no_model") {
    CHECK_THROWS_AS(Controller(kSpace, kSlo, fast_config(), nullptr, start(), 1), ConfigError);
  }
}

TEST_CASE("regime shift resets the rolling best") {
  Loop l(fast_config(), AnalyticBias::none(), 0.0);
  for (std::size_t i = 0; i < 5; ++i) l.step(i);
  const double before = l.ctl.rolling_best().first;
  auto spike = [&](double factor) {
    auto y = l.system.measure(l.ctl.current(), workload(), 0).slowdowns;
    for (auto& v : y) v *= factor;
    return l.ctl.step(y, workload());
  };
  const auto a = spike(3.0);
  CHECK_FALSE(a.regime_shift);
  const auto b = spike(3.0);
  CHECK(b.regime_shift);
  CHECK(b.g_best == b.sample.g);
  CHECK(b.g_best > before);
  CHECK(b.x_best == b.sample.x);
}

TEST_CASE("controller is deterministic") {
  Loop a(fast_config(), AnalyticBias{}, 0.05, 7), b(fast_config(), AnalyticBias{}, 0.05, 7);
  for (std::size_t i = 0; i < 6; ++i) {
    const auto ra = a.step(i);
    const auto rb = b.step(i);
    CHECK(ra.next == rb.next);
    CHECK(ra.sample.g == rb.sample.g);
  }
}

TEST_CASE("model failure skips the update") {
  struct Failing : PerformanceModel {
    SliVector predict(const ParamVector&, const WorkloadSpec&) const override {
      throw NumericError("model down");
    }
  };
  Controller c(kSpace, kSlo, fast_config(), std::make_shared<Failing>(), start(), 1);
  const auto r = c.step({10.0, 12.0, 15.0}, workload());
  CHECK(r.model_failed);
  CHECK(std::isnan(r.sample.f));
  CHECK(c.window().empty());
  CHECK(r.proposal_failed);
  CHECK(r.next == start());
}

TEST_CASE("observation shape is checked") {
  Loop l(fast_config(), AnalyticBias{}, 0.0);
  CHECK_THROWS_AS(l.ctl.step({1.0, 2.0}, workload()), ShapeError);
}
