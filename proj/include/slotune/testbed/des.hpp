#pragma once

// Discrete-event simulation of one bottleneck link shared by per-class
// queues. The link serves queues by deficit round robin with quanta
// proportional to the class weights. Senders are window-paced: each flow
// starts at its initial window, and once per window of acknowledgements it
// either grows the window by one packet or shrinks it by F/2, where F is the
// fraction of its packets that found the class queue above the marking
// threshold.

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "slotune/testbed/testbed.hpp"

namespace slotune {

struct DesPacket {
  std::size_t flow = 0;
  std::uint32_t bytes = 0;
  bool marked = false;
};

class DwrrScheduler {
 public:
  explicit DwrrScheduler(std::vector<double> quanta);

  void enqueue(std::size_t cls, DesPacket p);
  std::optional<std::pair<std::size_t, DesPacket>> dequeue();

  std::size_t num_classes() const { return queues_.size(); }
  std::uint64_t queued_bytes(std::size_t cls) const { return bytes_[cls]; }
  bool empty() const { return active_.empty(); }

 private:
  std::vector<double> quanta_;
  std::vector<double> deficit_;
  std::vector<std::deque<DesPacket>> queues_;
  std::vector<std::uint64_t> bytes_;
  std::deque<std::size_t> active_;
  bool turn_open_ = false;
};

/// DRR quanta for the given weights: uniform weights give one MTU each.
std::vector<double> dwrr_quanta(const std::vector<double>& weights, std::size_t mtu_bytes);

struct DesKnobs {
  std::vector<double> weights;
  std::vector<double> marking_bytes;
  std::vector<double> init_cwnd_packets;
};

struct DesOptions {
  double duration_s = 1.0;
  std::uint32_t mtu_bytes = 1500;
  double drain_factor = 4.0;  // stop draining at duration * drain_factor
  std::size_t min_flows_per_class = 200;
  bool keep_flows = false;
};

struct DesResult {
  SystemResponse response;
  std::vector<double> median_slowdown;
  std::vector<std::uint64_t> served_bytes;
  std::uint64_t completed_bytes = 0;
  std::size_t incomplete_flows = 0;
  double end_time_s = 0.0;
};

DesResult des_run(const DesKnobs& knobs, const WorkloadSpec& workload, const DesOptions& options,
                  std::uint64_t seed);

/// Raw configuration (weights, KB, packets) through the canonical layout.
SystemResponse des_simulate(const ParamVector& raw, const ParamSpace& space,
                            const WorkloadSpec& workload, const DesOptions& options,
                            std::uint64_t seed);

class DesSystem final : public SystemUnderTest {
 public:
  DesSystem(ParamSpace space, DesOptions options);
  SystemResponse measure(const ParamVector& x, const WorkloadSpec& workload,
                         std::uint64_t seed) override;

 private:
  ParamSpace space_;
  DesOptions options_;
};

/// Coarse queueing approximation of the simulator, used as the fast model in
/// DES scenarios: a work-conserving weighted share per class, an M/M/1-style
/// delay term scaled by the marking threshold and a window start-up term.
class QueueingModel final : public PerformanceModel {
 public:
  explicit QueueingModel(ParamSpace space);
  SliVector predict(const ParamVector& x, const WorkloadSpec& workload) const override;

 private:
  ParamSpace space_;
};

}  // namespace slotune
