#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "slotune/error.hpp"
#include "slotune/paramspace.hpp"

using namespace slotune;

namespace {

ParamSpace mixed_space() {
  return ParamSpace({BlockSpec::simplex(3, {"a", "b", "c"}),
                     BlockSpec::hypercube({8, 8}, {256, 256}, {"k1", "k2"}),
                     BlockSpec::simplex(2)});
}

}  // namespace

TEST_CASE("space construction rejects bad blocks") {
  CHECK_THROWS_AS(ParamSpace(std::vector<BlockSpec>{}), ConfigError);
  CHECK_THROWS_AS(ParamSpace({BlockSpec::simplex(1)}), ConfigError);
  CHECK_THROWS_AS(ParamSpace({BlockSpec::hypercube({1.0}, {1.0})}), ConfigError);
  CHECK_THROWS_AS(ParamSpace({BlockSpec::hypercube({0.0, 0.0}, {1.0})}), ConfigError);
  CHECK_THROWS_AS(ParamSpace({BlockSpec::simplex(3, {"x"})}), ConfigError);

  const auto s = mixed_space();
  CHECK(s.dimension() == 7);
  CHECK(s.hypercube_dimension() == 2);
  CHECK(s.has_simplex());
  CHECK(s.labels() == std::vector<std::string>{"a", "b", "c", "k1", "k2", "block2[0]", "block2[1]"});
}

TEST_CASE("normalize and denormalize") {
  const auto s = mixed_space();
  const ParamVector raw{{{0.2, 0.3, 0.5}, {8.0, 256.0}, {0.5, 0.5}}};
  const auto n = normalize(raw, s);
  CHECK(n.blocks[1][0] == 0.0);
  CHECK(n.blocks[1][1] == 1.0);
  CHECK(n.blocks[0] == raw.blocks[0]);
  CHECK(denormalize(n, s) == raw);

  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const auto x = sample_uniform(s, rng);
    const auto back = normalize(denormalize(x, s), s);
    for (std::size_t k = 0; k < x.blocks.size(); ++k)
      for (std::size_t i = 0; i < x.blocks[k].size(); ++i)
        CHECK(back.blocks[k][i] == doctest::Approx(x.blocks[k][i]).epsilon(1e-12));
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(normalize({{{0.2, 0.3, 0.5}, {4.0, 9.0}, {0.5, 0.5}}}, s), RangeError);
    CHECK_THROWS_AS(normalize({{{0.2, 0.3, 0.6}, {8.0, 9.0}, {0.5, 0.5}}}, s), RangeError);
    CHECK_THROWS_AS(normalize({{{0.2, 0.3, 0.5}, {8.0}, {0.5, 0.5}}}, s), ShapeError);
    CHECK_THROWS_AS(denormalize({{{0.2, 0.3, 0.5}, {1.2, 0.0}, {0.5, 0.5}}}, s), RangeError);
    CHECK_THROWS_AS(check_shape({{{0.5, 0.5}}}, s), ShapeError);
  }
}

TEST_CASE("flatten round trip") {
  const auto s = mixed_space();
  const ParamVector x{{{0.2, 0.3, 0.5}, {0.1, 0.9}, {0.4, 0.6}}};
  const auto flat = x.flatten();
  CHECK(flat.size() == 7);
  CHECK(ParamVector::unflatten(s, flat) == x);
  CHECK_THROWS_AS(ParamVector::unflatten(s, std::vector<double>(6)), ShapeError);
}

TEST_CASE("softmax and clr") {
  const auto u = softmax_map(std::vector<double>{1000.0, 1000.0, -1000.0});
  CHECK(u[0] == doctest::Approx(0.5));
  CHECK(u[2] == doctest::Approx(0.0));
  CHECK(u[0] + u[1] + u[2] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(softmax_map(std::vector<double>{1.0}), ShapeError);
  CHECK_THROWS_AS(softmax_map(std::vector<double>{1.0, NAN}), NumericError);

  const auto c = clr(std::vector<double>{0.5, 0.5});
  CHECK(c[0] == doctest::Approx(0.0));
  CHECK(c[1] == doctest::Approx(0.0));

  // softmax inverts clr up to the floor
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto v = oracle::random_composition(4, rng);
    const auto back = softmax_map(clr(v, 1e-12));
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(back[i] == doctest::Approx(v[i]).epsilon(1e-9));
  }

  const auto z = close_composition(std::vector<double>{0.0, 1.0}, 1e-6);
  CHECK(z[0] > 0.0);
  CHECK(z[0] + z[1] == doctest::Approx(1.0));
}

TEST_CASE("aitchison distance properties") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dims(2, 6);
  for (int t = 0; t < 1000; ++t) {
    const auto d = static_cast<std::size_t>(dims(rng));
    const auto a = oracle::random_composition(d, rng);
    const auto b = oracle::random_composition(d, rng);
    const auto c = oracle::random_composition(d, rng);
    const double ab = aitchison_distance(a, b);
    CHECK(std::abs(ab - aitchison_distance(b, a)) <= 1e-9);
    CHECK(ab <= aitchison_distance(a, c) + aitchison_distance(c, b) + 1e-9);
    CHECK(aitchison_distance(a, a) <= 1e-12);

    // perturbation: component-wise product with p, then closure
    const auto p = oracle::random_composition(d, rng);
    auto perturb = [&](std::vector<double> v) {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) s += (v[i] *= p[i]);
      for (auto& x : v) x /= s;
      return v;
    };
    // floor well below the smallest component so flooring does not bind
    CHECK(std::abs(aitchison_distance(perturb(a), perturb(b), 1e-300) -
                   aitchison_distance(a, b, 1e-300)) <= 1e-9);
  }
  CHECK_THROWS_AS(aitchison_distance(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 0.0, 0.0}),
                  ShapeError);
}

TEST_CASE("mixed distance") {
  const ParamSpace s({BlockSpec::hypercube({0, 0, 0}, {1, 1, 1}), BlockSpec::simplex(3)});
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto x = sample_uniform(s, rng);
    const auto y = sample_uniform(s, rng);
    double e = 0.0;
    for (int i = 0; i < 3; ++i) e += std::pow(x.blocks[0][i] - y.blocks[0][i], 2);
    CHECK(mixed_distance(x, y, s, {0.0, 1e-6}) == doctest::Approx(std::sqrt(e)).epsilon(1e-12));

    const double da = aitchison_distance(x.blocks[1], y.blocks[1]);
    CHECK(mixed_distance(x, y, s, {0.5, 1e-6}) ==
          doctest::Approx(std::sqrt(e + 0.5 * da * da)).epsilon(1e-12));
  }
}

TEST_CASE("uniform sampling stays normalized") {
  const auto s = mixed_space();
  std::mt19937_64 rng(1);
  for (int t = 0; t < 500; ++t) CHECK_NOTHROW(check_normalized(sample_uniform(s, rng), s));
}

TEST_CASE("distance spec validation") {
  CHECK_NOTHROW(DistanceSpec{}.validate(3));
  CHECK_THROWS_AS((DistanceSpec{-1.0, 1e-6}.validate(3)), ConfigError);
  CHECK_THROWS_AS((DistanceSpec{0.5, 0.5}.validate(3)), ConfigError);
}
