#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "slotune/denoiser.hpp"
#include "slotune/error.hpp"

using namespace slotune;

TEST_CASE("pass-through cases") {
  Denoiser d;
  CHECK(d.push(7.5) == 7.5);
  Denoiser c;
  for (int i = 0; i < 10; ++i) CHECK(c.push(5.0) == 5.0);
  CHECK(c.last_width() == 0.0);
}

TEST_CASE("output stays inside the buffer range") {
  std::mt19937_64 rng(4);
  std::lognormal_distribution<double> noise(0.0, 0.5);
  Denoiser d;
  for (int i = 0; i < 500; ++i) {
    const double out = d.push(10.0 * noise(rng));
    const auto b = d.buffer();
    CHECK(out >= *std::min_element(b.begin(), b.end()));
    CHECK(out <= *std::max_element(b.begin(), b.end()));
    CHECK(b.size() <= d.config().window);
  }
}

TEST_CASE("smoothing reduces variance of stationary noise") {
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> n(10.0, 1.0);
  Denoiser d;
  std::vector<double> in, out;
  for (int i = 0; i < 200; ++i) {
    in.push_back(n(rng));
    out.push_back(d.push(in.back()));
  }
  auto var = [](const std::vector<double>& v, std::size_t from) {
    double m = 0.0;
    for (std::size_t i = from; i < v.size(); ++i) m += v[i];
    m /= static_cast<double>(v.size() - from);
    double s = 0.0;
    for (std::size_t i = from; i < v.size(); ++i) s += (v[i] - m) * (v[i] - m);
    return s / static_cast<double>(v.size() - from);
  };
  CHECK(var(out, 20) < 0.6 * var(in, 20));
}

TEST_CASE("causality") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(3.0, 0.5);
  std::vector<double> seq(50);
  for (auto& v : seq) v = n(rng);
  Denoiser a, b;
  std::vector<double> oa, ob;
  for (double v : seq) oa.push_back(a.push(v));
  for (std::size_t i = 0; i < 30; ++i) ob.push_back(b.push(seq[i]));
  for (std::size_t i = 0; i < 30; ++i) CHECK(oa[i] == ob[i]);
}

TEST_CASE("reset and multi-channel") {
  Denoiser d;
  d.push(1.0);
  d.push(9.0);
  d.reset();
  CHECK(d.buffer().empty());
  CHECK(d.push(4.0) == 4.0);

  SliDenoiser s(2, DenoiserConfig{}, true);
  s.push(std::vector<double>{1.0, 2.0});
  const auto o = s.push(std::vector<double>{3.0, 2.0});
  CHECK(o[1] == 2.0);
  CHECK(o[0] > 1.0);
  CHECK(o[0] < 3.0);
  CHECK_THROWS_AS(s.push(std::vector<double>{1.0}), ShapeError);

  SliDenoiser off(2, DenoiserConfig{}, false);
  off.push(std::vector<double>{1.0, 2.0});
  CHECK(off.push(std::vector<double>{3.0, 5.0}) == std::vector<double>{3.0, 5.0});
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS((DenoiserConfig{1, 3.0, 0.2, 0.01}.validate()), ConfigError);
  CHECK_THROWS_AS((DenoiserConfig{8, 0.0, 0.2, 0.01}.validate()), ConfigError);
  CHECK_THROWS_AS((DenoiserConfig{8, 3.0, 0.2, 0.3}.validate()), ConfigError);
  CHECK_THROWS_AS(Denoiser{}.push(NAN), NumericError);
}
