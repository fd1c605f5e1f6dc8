#include "slotune/testbed/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "slotune/error.hpp"

namespace slotune {

namespace {

// Web-search flow sizes (bytes, CDF), as used in data-center transport studies.
const std::vector<std::pair<double, double>> kWebSearch = {
    {0.0, 0.0},          {10000.0, 0.15},    {20000.0, 0.2},    {30000.0, 0.3},
    {50000.0, 0.4},      {80000.0, 0.53},    {200000.0, 0.6},   {1000000.0, 0.7},
    {2000000.0, 0.8},    {5000000.0, 0.9},   {10000000.0, 0.97}, {30000000.0, 1.0}};

}  // namespace

FlowSizeDistribution::FlowSizeDistribution(std::string name,
                                           std::vector<std::pair<double, double>> cdf)
    : name_(std::move(name)), cdf_(std::move(cdf)) {
  if (cdf_.empty()) throw ConfigError("flow-size CDF is empty");
  for (std::size_t i = 0; i < cdf_.size(); ++i) {
    const auto [s, p] = cdf_[i];
    if (!(s >= 0.0) || !(p >= 0.0 && p <= 1.0)) throw ConfigError("flow-size CDF point out of range");
    if (i > 0 && (s < cdf_[i - 1].first || p < cdf_[i - 1].second))
      throw ConfigError("flow-size CDF must be non-decreasing");
  }
  if (std::abs(cdf_.back().second - 1.0) > 1e-9) throw ConfigError("flow-size CDF must end at 1");
}

FlowSizeDistribution FlowSizeDistribution::builtin(const std::string& name) {
  if (name == "websearch") return {"websearch", kWebSearch};
  if (name.rfind("fixed:", 0) == 0) {
    const double bytes = std::stod(name.substr(6));
    if (!(bytes >= 1.0)) throw ConfigError("fixed flow size must be >= 1 byte");
    return {name, {{bytes, 0.0}, {bytes, 1.0}}};
  }
  throw ConfigError("unknown flow-size distribution '" + name + "'");
}

FlowSizeDistribution FlowSizeDistribution::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open flow-size CDF file " + path);
  std::vector<std::pair<double, double>> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    double s = 0.0, p = 0.0;
    if (!(ls >> s)) continue;
    if (!(ls >> p)) throw ParseError(path + ":" + std::to_string(lineno) + ": expected 'bytes cdf'");
    pts.emplace_back(s, p);
  }
  return {path, std::move(pts)};
}

double FlowSizeDistribution::quantile(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  if (u <= cdf_.front().second) return cdf_.front().first;
  for (std::size_t i = 1; i < cdf_.size(); ++i) {
    const auto [s1, p1] = cdf_[i];
    if (u <= p1) {
      const auto [s0, p0] = cdf_[i - 1];
      if (p1 == p0) return s1;
      return s0 + (s1 - s0) * (u - p0) / (p1 - p0);
    }
  }
  return cdf_.back().first;
}

double FlowSizeDistribution::mean() const {
  double m = cdf_.front().first * cdf_.front().second;
  for (std::size_t i = 1; i < cdf_.size(); ++i)
    m += 0.5 * (cdf_[i].first + cdf_[i - 1].first) * (cdf_[i].second - cdf_[i - 1].second);
  return m;
}

std::vector<double> WorkloadReplay::offered_loads(const std::vector<int>& dscp) const {
  const double span = std::max<double>(static_cast<double>(span_ns), 1.0) * 1e-9;
  std::vector<double> loads;
  for (int d : dscp) {
    const auto it = bytes_per_dscp.find(d);
    loads.push_back(it == bytes_per_dscp.end() ? 0.0 : static_cast<double>(it->second) * 8.0 / span);
  }
  return loads;
}

void WorkloadSpec::validate() const {
  if (loads_bps.empty()) throw ConfigError("workload has no classes");
  if (dscp.size() != loads_bps.size()) throw ConfigError("workload dscp list does not match loads");
  if (!(capacity_bps > 0.0)) throw ConfigError("link capacity must be > 0");
  if (!(base_rtt_s > 0.0)) throw ConfigError("base RTT must be > 0");
  if (!(burst_sigma > 0.0)) throw ConfigError("burst sigma must be > 0");
  double total = 0.0;
  for (double l : loads_bps) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("offered loads must be >= 0");
    total += l;
  }
  if (total / capacity_bps > 0.95 + 1e-12)
    throw ConfigError("total offered load exceeds 95% of capacity");
}

}  // namespace slotune
