#pragma once

#include <random>

namespace slotune {

template <class Rng>
ParamVector sample_uniform(const ParamSpace& space, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  ParamVector x;
  x.blocks.reserve(space.num_blocks());
  for (const auto& b : space.blocks()) {
    std::vector<double> v(b.dim);
    if (b.kind == BlockKind::Hypercube) {
      for (auto& c : v) c = unit(rng);
    } else {
      double sum = 0.0;
      for (auto& c : v) {
        c = expo(rng);
        sum += c;
      }
      for (auto& c : v) c /= sum;
    }
    x.blocks.push_back(std::move(v));
  }
  return x;
}

}  // namespace slotune
