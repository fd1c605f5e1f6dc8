#pragma once

// Derivative-free compass search over a box. Shared by the GP
// hyperparameter fit and the acquisition optimizer.

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace slotune::detail {

template <class Value>
struct SearchResult {
  std::vector<double> x;
  Value value;
  int evaluations = 0;
};

/// Value needs a strict weak ordering via operator<. Moves are accepted only
/// on strict improvement, so ties keep the earlier point.
template <class Value, class F>
SearchResult<Value> pattern_search(F&& f, std::vector<double> x, std::vector<double> step,
                                   std::span<const double> lo, std::span<const double> hi,
                                   int budget, double min_step = 1e-6) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
  SearchResult<Value> r{x, f(x), 1};
  std::vector<double> y;
  while (r.evaluations < budget) {
    bool improved = false;
    for (std::size_t i = 0; i < n && r.evaluations < budget; ++i) {
      for (double sign : {1.0, -1.0}) {
        if (r.evaluations >= budget) break;
        y = r.x;
        y[i] = std::clamp(r.x[i] + sign * step[i], lo[i], hi[i]);
        if (y[i] == r.x[i]) continue;
        Value v = f(y);
        ++r.evaluations;
        if (v < r.value) {
          r.x = std::move(y);
          r.value = std::move(v);
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      bool active = false;
      for (auto& s : step) {
        s *= 0.5;
        active = active || s > min_step;
      }
      if (!active) break;
    }
  }
  return r;
}

}  // namespace slotune::detail
