#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "slotune/error.hpp"
#include "slotune/surrogate.hpp"

using namespace slotune;

namespace {

struct RandomProblem {
  TrainingSet data;
  GpHyperparams hp;
  oracle::DenseGp dense;
};

RandomProblem random_problem(std::uint64_t seed, std::size_t n, std::size_t d) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomProblem p;
  p.hp.length_scales.resize(d);
  for (auto& l : p.hp.length_scales) l = 0.2 + unit(rng);
  p.hp.signal_variance = 0.5 + 2.0 * unit(rng);
  p.hp.noise_variance = 1e-3 + 0.1 * unit(rng);
  p.hp.mean_value = unit(rng) - 0.5;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(d);
    for (auto& v : x) v = unit(rng);
    p.data.add(x, std::sin(6.0 * x[0]) + unit(rng));
  }
  p.dense = {p.data.inputs, p.data.targets, p.hp.length_scales, p.hp.signal_variance,
             p.hp.noise_variance, p.hp.mean_value};
  return p;
}

}  // namespace

TEST_CASE("conditioning matches the dense oracle") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 1 + seed % 8;
    auto p = random_problem(seed, n, 1 + seed % 3);
    const auto m = GpModel::condition(p.data, p.hp);
    CHECK(m.log_marginal_likelihood() == doctest::Approx(p.dense.lml()).epsilon(1e-10));
    std::mt19937_64 rng(seed + 1000);
    std::uniform_real_distribution<double> unit(-0.2, 1.2);
    for (int q = 0; q < 5; ++q) {
      std::vector<double> x(p.data.dimension());
      for (auto& v : x) v = unit(rng);
      const auto got = m.predict(x);
      const auto [mu, var] = p.dense.predict(x);
      CHECK(std::abs(got.mu - mu) <= 1e-8);
      CHECK(std::abs(got.var - var) <= 1e-8);
    }
  }
}

TEST_CASE("zero mean family ignores mean_value") {
  auto p = random_problem(3, 5, 2);
  p.hp.mean = MeanFamily::Zero;
  p.dense.mean = 0.0;
  const auto m = GpModel::condition(p.data, p.hp);
  CHECK(m.log_marginal_likelihood() == doctest::Approx(p.dense.lml()).epsilon(1e-10));
  CHECK(m.hyperparams().mean_value == 0.0);
}

TEST_CASE("single point interpolation and prior reversion") {
  TrainingSet d;
  d.add({0.3, 0.6}, 0.4);
  GpHyperparams hp;
  hp.length_scales = {0.2, 0.2};
  hp.noise_variance = 1e-8;
  hp.mean = MeanFamily::Zero;
  const auto m = GpModel::condition(d, hp);
  CHECK(m.predict(std::vector<double>{0.3, 0.6}).mu == doctest::Approx(0.4).epsilon(1e-6));
  CHECK(m.predict(std::vector<double>{0.3, 0.6}).var <= 1e-6 + 1e-8);
  const auto far = m.predict(std::vector<double>{50.0, 50.0});
  CHECK(std::abs(far.mu) <= 1e-3);
  CHECK(far.var == doctest::Approx(hp.signal_variance).epsilon(1e-3));
}

TEST_CASE("scalar log marginal likelihood") {
  TrainingSet d;
  d.add({0.0}, 0.0);
  GpHyperparams hp;
  hp.length_scales = {1.0};
  hp.noise_variance = 0.0;
  hp.mean = MeanFamily::Zero;
  const auto m = GpModel::condition(d, hp);
  CHECK(m.log_marginal_likelihood() == doctest::Approx(-0.91894).epsilon(1e-5));
}

TEST_CASE("fit profiles the constant mean") {
  TrainingSet d;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 12; ++i) d.add({unit(rng), unit(rng)}, 0.7);
  const auto m = fit(d, FitOptions{}, 9);
  CHECK(m.predict(std::vector<double>{40.0, -40.0}).mu == doctest::Approx(0.7).epsilon(1e-3));

  // the stored mean is the generalized least squares estimate
  auto p = random_problem(5, 8, 2);
  const auto f = fit(p.data, FitOptions{}, 1);
  oracle::DenseGp dense{p.data.inputs, p.data.targets, f.hyperparams().length_scales,
                        f.hyperparams().signal_variance, f.diagonal_noise(), 0.0};
  CHECK(f.hyperparams().mean_value == doctest::Approx(dense.gls_mean()).epsilon(1e-8));
}

TEST_CASE("fit respects bounds and is deterministic") {
  auto p = random_problem(8, 20, 3);
  FitOptions o;
  const auto a = fit(p.data, o, 4);
  const auto b = fit(p.data, o, 4);
  CHECK(a.hyperparams().length_scales == b.hyperparams().length_scales);
  CHECK(a.log_marginal_likelihood() == b.log_marginal_likelihood());
  for (double l : a.hyperparams().length_scales) {
    CHECK(l >= o.length_scale_min * (1 - 1e-12));
    CHECK(l <= o.length_scale_max * (1 + 1e-12));
  }
  CHECK(a.hyperparams().noise_variance >= o.noise_variance_min * (1 - 1e-12));
  CHECK(a.hyperparams().signal_variance <= o.signal_variance_max * (1 + 1e-12));

  // a warm start at the optimum cannot end worse than it started
  const auto w = fit(p.data, o, 99, &a.hyperparams());
  CHECK(w.log_marginal_likelihood() >= a.log_marginal_likelihood() - 1e-9);
  CHECK(log_marginal_likelihood(a, p.data) == doctest::Approx(a.log_marginal_likelihood()));
}

TEST_CASE("posterior properties") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto p = random_problem(seed, 2 + seed % 10, 2);
    const auto m = GpModel::condition(p.data, p.hp);

    // permutation invariance
    TrainingSet shuffled;
    std::vector<std::size_t> idx(p.data.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (auto i : idx) shuffled.add(p.data.inputs[i], p.data.targets[i]);
    const auto ms = GpModel::condition(shuffled, p.hp);

    for (int q = 0; q < 20; ++q) {
      const std::vector<double> x{unit(rng) * 2 - 0.5, unit(rng) * 2 - 0.5};
      const auto a = m.predict(x);
      const auto b = ms.predict(x);
      CHECK(a.var >= 0.0);
      CHECK(a.var <= p.hp.signal_variance + p.hp.noise_variance + 1e-9);
      CHECK(std::abs(a.mu - b.mu) <= 1e-9);
      CHECK(std::abs(a.var - b.var) <= 1e-9);
    }
  }
}

TEST_CASE("noise-free interpolation") {
  auto p = random_problem(21, 6, 2);
  p.hp.noise_variance = 1e-10;
  p.hp.length_scales = {0.3, 0.3};
  const auto m = GpModel::condition(p.data, p.hp);
  for (std::size_t i = 0; i < p.data.size(); ++i)
    CHECK(m.predict(p.data.inputs[i]).mu == doctest::Approx(p.data.targets[i]).epsilon(1e-6));
}

TEST_CASE("jitter escalation and errors") {
  TrainingSet d;
  d.add({0.5}, 1.0);
  d.add({0.5}, 1.0);
  GpHyperparams hp;
  hp.length_scales = {1.0};
  hp.noise_variance = 0.0;
  const auto m = GpModel::condition(d, hp);
  CHECK(m.diagonal_noise() > 0.0);
  CHECK(m.diagonal_noise() <= 1e-4);

  CHECK_THROWS_AS(m.predict(std::vector<double>{0.1, 0.2}), ShapeError);
  CHECK_THROWS_AS(GpModel::condition(TrainingSet{}, hp), StateError);
  TrainingSet bad;
  bad.add({0.1}, NAN);
  CHECK_THROWS_AS(GpModel::condition(bad, hp), NumericError);
  CHECK_THROWS_AS(d.add({0.1, 0.2}, 0.0), ShapeError);
}

TEST_CASE("bic selection") {
  // constant data: the constant-mean model should win most of the time
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    TrainingSet d;
    for (int i = 0; i < 10; ++i) d.add({unit(rng)}, 3.0 + noise(rng));
    const std::vector<GpCandidate> cands{{KernelFamily::SquaredExponential, MeanFamily::Zero},
                                         {KernelFamily::SquaredExponential, MeanFamily::Constant}};
    FitOptions o;
    o.n_starts = 4;
    const auto m = bic_select(d, o, cands, seed);
    if (m.hyperparams().mean == MeanFamily::Constant) ++wins;
  }
  CHECK(wins >= 10);

  TrainingSet small;
  small.add({0.1}, 1.0);
  small.add({0.9}, 2.0);
  const std::vector<GpCandidate> only_zero{{KernelFamily::Matern52, MeanFamily::Zero}};
  const auto m = bic_select(small, FitOptions{}, only_zero, 1);
  CHECK(m.hyperparams().kernel == KernelFamily::SquaredExponential);
  CHECK(m.hyperparams().mean == MeanFamily::Constant);
}

TEST_CASE("corrected prediction and GP input") {
  const auto c = corrected_predict(1.2, {0.3, 0.04});
  CHECK(c.mean == doctest::Approx(1.5));
  CHECK(c.stddev == doctest::Approx(0.2));
  CHECK(corrected_predict(1.2, {0.0, 0.0}).stddev == 0.0);

  const ParamSpace s({BlockSpec::hypercube({0, 0}, {1, 1}), BlockSpec::simplex(2)});
  const auto in = gp_input({{{0.25, 0.75}, {0.5, 0.5}}}, s);
  CHECK(in.size() == 4);
  CHECK(in[0] == 0.25);
  CHECK(in[2] == doctest::Approx(0.0));
  CHECK(in[3] == doctest::Approx(0.0));
}

TEST_CASE("matern kernel shape") {
  GpHyperparams hp;
  hp.kernel = KernelFamily::Matern52;
  hp.length_scales = {1.0};
  hp.signal_variance = 2.0;
  const std::vector<double> a{0.0}, b{1.0};
  const double r = 1.0;
  const double expect = 2.0 * (1 + std::sqrt(5.0) * r + 5.0 * r * r / 3) * std::exp(-std::sqrt(5.0) * r);
  CHECK(kernel_value(hp, a, b) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(kernel_value(hp, a, a) == doctest::Approx(2.0));
}
