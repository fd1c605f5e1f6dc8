#include <cmath>

#include "doctest.h"
#include "slotune/baselines.hpp"
#include "slotune/error.hpp"
#include "slotune/testbed/analytic.hpp"

using namespace slotune;

namespace {

const ParamSpace kSpace = canonical_space();
const SloSpec kSlo{{10.8, 13.5, 16.2}, {}};

ParamVector start() { return {{{0.5, 0.3, 0.2}, {0.6, 0.2, 0.4}, {0.8, 0.25, 0.75}}}; }

WorkloadSpec workload() {
  WorkloadSpec w;
  w.loads_bps = {2e9, 2e9, 2e9};
  return w;
}

}  // namespace

TEST_CASE("selftune reward") {
  CHECK(selftune_reward(0.0, 0.3) == 0.0);
  CHECK(selftune_reward(1.0, 0.3) == doctest::Approx(std::tanh(-0.3)));
  CHECK(selftune_reward(1e6, 0.3) > -1.0 - 1e-12);
  CHECK(selftune_reward(2.0, 0.3) < selftune_reward(1.0, 0.3));
}

TEST_CASE("selftune gradient step") {
  SelfTune st(kSpace, kSlo, SelfTuneConfig{}, ObjectiveSpec{}, start(), 1);
  const auto c0 = st.center();
  std::vector<double> u(c0.size(), 0.0);
  u[3] = 1.0;  // first marking threshold
  st.set_direction(u);
  CHECK(st.current().blocks[1][0] == doctest::Approx(0.6 + 0.1));
  st.update(-0.5);
  // center moves by (eta / delta) r u
  CHECK(st.center()[3] == doctest::Approx(c0[3] + 0.01 / 0.1 * -0.5));
  for (std::size_t i = 0; i < c0.size(); ++i)
    if (i != 3) CHECK(st.center()[i] == doctest::Approx(c0[i]));
}

TEST_CASE("selftune actuation stays feasible") {
  SelfTune st(kSpace, kSlo, SelfTuneConfig{}, ObjectiveSpec{}, start(), 1);
  std::vector<double> theta(9, 0.0);
  theta[0] = 100.0;
  theta[3] = -2.0;
  theta[6] = 3.0;
  const auto x = st.actuate(theta);
  CHECK_NOTHROW(check_normalized(x, kSpace));
  CHECK(x.blocks[1][0] == 0.0);
  CHECK(x.blocks[2][0] == 1.0);
  CHECK(x.blocks[0][0] > 0.99);
  CHECK_THROWS_AS(st.actuate({1.0}), ShapeError);
}

TEST_CASE("selftune holds each deployment for the settle interval") {
  SelfTuneConfig cfg;
  cfg.settle_factor = 2;
  SelfTune st(kSpace, kSlo, cfg, ObjectiveSpec{}, start(), 4);
  AnalyticSystem sys(kSpace, 0.0);
  const auto x0 = st.current();
  auto r = st.step(sys.measure(st.current(), workload(), 0).slowdowns, workload());
  CHECK(r.next == x0);
  CHECK(std::isnan(r.sample.f));
  CHECK(r.sample.smoothed == r.sample.raw);
  r = st.step(sys.measure(st.current(), workload(), 1).slowdowns, workload());
  CHECK_FALSE(r.next == x0);
  CHECK_THROWS_AS((SelfTuneConfig{0.0}.validate()), ConfigError);
}

TEST_CASE("vanilla BO drops the model and the trust region") {
  ControllerConfig cfg;
  cfg.proposal.n_starts = 4;
  cfg.proposal.local_budget = 40;
  cfg.gp.n_starts = 2;
  cfg.gp.evals_per_start = 40;
  auto bo = make_vanilla_bo(kSpace, kSlo, cfg, start(), 3);
  CHECK(bo->config().ablation.no_model);
  CHECK(bo->config().ablation.no_trust_region);
  AnalyticSystem sys(kSpace, 0.05);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto r = bo->step(sys.measure(bo->current(), workload(), i).slowdowns, workload());
    CHECK(r.sample.f == 0.0);
  }
  CHECK(bo->model_calls() == 0);
}
