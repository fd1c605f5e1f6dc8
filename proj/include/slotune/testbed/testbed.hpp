#pragma once

// Pluggable ground truth ("system", g) and fast predictor ("model", f).
// Both consume normalized configurations of the canonical knob layout: one
// simplex block of per-class scheduler weights, then a hypercube block of
// per-class marking thresholds, then a hypercube block of per-class initial
// windows.

#include <cstdint>
#include <vector>

#include "slotune/objective.hpp"
#include "slotune/paramspace.hpp"
#include "slotune/testbed/workload.hpp"

namespace slotune {

struct SystemResponse {
  SliVector slowdowns;  // per-class p99 FCT slowdown
  std::vector<std::size_t> flow_counts;
  bool low_sample_warning = false;
  std::vector<FlowRecord> flows;  // optional
};

class SystemUnderTest {
 public:
  virtual ~SystemUnderTest() = default;
  virtual SystemResponse measure(const ParamVector& x, const WorkloadSpec& workload,
                                 std::uint64_t seed) = 0;
};

class PerformanceModel {
 public:
  virtual ~PerformanceModel() = default;
  virtual SliVector predict(const ParamVector& x, const WorkloadSpec& workload) const = 0;
};

/// Per-class knob values extracted from a normalized configuration.
struct KnobView {
  std::vector<double> weights;  // simplex
  std::vector<double> marking;  // normalized [0,1]
  std::vector<double> cwnd;     // normalized [0,1]
};

/// Throws ConfigError unless the space has the canonical layout for
/// `classes` traffic classes.
void check_knob_layout(const ParamSpace& space, std::size_t classes);
KnobView knob_view(const ParamVector& x, const ParamSpace& space);

/// The canonical space: weights, marking threshold in KB, initial window in
/// packets.
ParamSpace canonical_space(std::size_t classes = 3, double k_lo_kb = 8.0, double k_hi_kb = 256.0,
                           double cwnd_lo = 1.0, double cwnd_hi = 64.0);

}  // namespace slotune
