#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace slotune {

/// Flow sizes as a piecewise-linear CDF over bytes.
class FlowSizeDistribution {
 public:
  FlowSizeDistribution() = default;
  /// Points (bytes, cumulative probability), non-decreasing in both, ending at 1.
  FlowSizeDistribution(std::string name, std::vector<std::pair<double, double>> cdf);

  /// "websearch" or "fixed:<bytes>".
  static FlowSizeDistribution builtin(const std::string& name);
  /// Whitespace-separated "bytes cdf" per line; '#' starts a comment.
  static FlowSizeDistribution from_file(const std::string& path);

  /// Inverse CDF at u in [0,1].
  double quantile(double u) const;
  double mean() const;
  const std::string& name() const { return name_; }
  const std::vector<std::pair<double, double>>& points() const { return cdf_; }

 private:
  std::string name_;
  std::vector<std::pair<double, double>> cdf_;
};

/// One completed flow as captured by a host probe.
struct FlowRecord {
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;
  std::int64_t src = 0;
  std::int64_t dst = 0;
  std::int64_t sport = 0;
  std::int64_t dport = 0;
  int dscp = 0;
  std::int64_t bytes = 0;

  friend bool operator==(const FlowRecord&, const FlowRecord&) = default;
};

/// Flow records parsed from a trace file, replayable as an arrival sequence.
struct WorkloadReplay {
  std::vector<FlowRecord> flows;  // sorted by start time
  std::map<int, std::int64_t> bytes_per_dscp;
  std::map<int, std::size_t> flows_per_dscp;
  std::int64_t span_ns = 0;  // last start minus first start

  /// Offered load per class in bits/s over the trace span.
  std::vector<double> offered_loads(const std::vector<int>& dscp) const;
};

struct WorkloadSpec {
  std::vector<double> loads_bps;  // offered load per class
  std::vector<int> dscp{10, 18, 26};
  FlowSizeDistribution sizes = FlowSizeDistribution::builtin("websearch");
  double burst_sigma = 2.0;  // log-normal inter-arrival shape
  double base_rtt_s = 20e-6;
  double capacity_bps = 10e9;
  std::shared_ptr<const WorkloadReplay> replay;  // when set, arrivals come from the trace

  std::size_t num_classes() const { return loads_bps.size(); }
  /// Throws ConfigError on negative loads, zero capacity or load above 95%.
  void validate() const;
};

}  // namespace slotune
