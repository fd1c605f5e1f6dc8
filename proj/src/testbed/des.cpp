#include "slotune/testbed/des.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>

#include "slotune/error.hpp"

namespace slotune {

DwrrScheduler::DwrrScheduler(std::vector<double> quanta)
    : quanta_(std::move(quanta)),
      deficit_(quanta_.size(), 0.0),
      queues_(quanta_.size()),
      bytes_(quanta_.size(), 0) {
  if (quanta_.empty()) throw ConfigError("DWRR scheduler needs at least one class");
  for (double q : quanta_)
    if (!(q > 0.0)) throw ConfigError("DWRR quanta must be > 0");
}

void DwrrScheduler::enqueue(std::size_t cls, DesPacket p) {
  if (cls >= queues_.size()) throw ShapeError("DWRR class index out of range");
  if (queues_[cls].empty()) active_.push_back(cls);
  bytes_[cls] += p.bytes;
  queues_[cls].push_back(p);
}

std::optional<std::pair<std::size_t, DesPacket>> DwrrScheduler::dequeue() {
  while (!active_.empty()) {
    const std::size_t cls = active_.front();
    if (!turn_open_) {
      deficit_[cls] += quanta_[cls];
      turn_open_ = true;
    }
    auto& q = queues_[cls];
    if (static_cast<double>(q.front().bytes) <= deficit_[cls]) {
      const DesPacket p = q.front();
      q.pop_front();
      deficit_[cls] -= p.bytes;
      bytes_[cls] -= p.bytes;
      if (q.empty()) {
        deficit_[cls] = 0.0;
        active_.pop_front();
        turn_open_ = false;
      }
      return std::make_pair(cls, p);
    }
    active_.pop_front();
    active_.push_back(cls);
    turn_open_ = false;
  }
  return std::nullopt;
}

std::vector<double> dwrr_quanta(const std::vector<double>& weights, std::size_t mtu_bytes) {
  if (weights.empty()) throw ShapeError("no weights");
  const double wmax = *std::max_element(weights.begin(), weights.end());
  if (!(wmax > 0.0)) throw ConfigError("at least one weight must be positive");
  // Weights below 1% of the largest are raised to 1% so that a starved class
  // still drains, and the inner DRR loop stays bounded.
  std::vector<double> q;
  q.reserve(weights.size());
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("weights must be >= 0");
    q.push_back(static_cast<double>(mtu_bytes) * std::max(w, 1e-2 * wmax) / wmax);
  }
  return q;
}

namespace {

struct Flow {
  std::size_t cls = 0;
  double start = 0.0;
  std::uint64_t size = 0;
  std::int64_t src = 0, dst = 0, sport = 0, dport = 0;
  double cwnd = 1.0;
  std::uint64_t sent = 0;
  std::uint64_t acked = 0;
  std::uint64_t round_end = 0;
  std::uint32_t inflight = 0;
  std::uint32_t round_pkts = 0;
  std::uint32_t round_marked = 0;
  double finish = -1.0;
};

enum class EventKind { Arrival, TxDone, Ack };

struct Event {
  double t;
  std::uint64_t seq;
  EventKind kind;
  std::size_t flow;
  std::uint32_t bytes;
  bool marked;

  bool operator>(const Event& o) const { return t != o.t ? t > o.t : seq > o.seq; }
};

double quantile(std::vector<double> v, double p) {
  if (v.empty()) return 1.0;
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + frac * (v[i + 1] - v[i]);
}

std::vector<Flow> generate_flows(const DesKnobs& knobs, const WorkloadSpec& w,
                                 const DesOptions& opt, std::uint64_t seed) {
  const std::size_t n = w.num_classes();
  std::vector<Flow> flows;
  if (w.replay) {
    const auto& recs = w.replay->flows;
    const std::int64_t t0 = recs.empty() ? 0 : recs.front().start_ns;
    for (const auto& r : recs) {
      const auto it = std::find(w.dscp.begin(), w.dscp.end(), r.dscp);
      if (it == w.dscp.end()) continue;
      const double t = static_cast<double>(r.start_ns - t0) * 1e-9;
      if (t >= opt.duration_s) break;
      Flow f;
      f.cls = static_cast<std::size_t>(it - w.dscp.begin());
      f.start = t;
      f.size = static_cast<std::uint64_t>(r.bytes);
      f.src = r.src;
      f.dst = r.dst;
      f.sport = r.sport;
      f.dport = r.dport;
      flows.push_back(f);
    }
  } else {
    const double mean_bytes = w.sizes.mean();
    const double sigma = w.burst_sigma;
    for (std::size_t c = 0; c < n; ++c) {
      if (w.loads_bps[c] <= 0.0) continue;
      // Independent stream per class so that changing one class's load does
      // not reshuffle the others.
      std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (c + 1)));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double mean_gap = mean_bytes * 8.0 / w.loads_bps[c];
      std::lognormal_distribution<double> gap(std::log(mean_gap) - 0.5 * sigma * sigma, sigma);
      double t = gap(rng) * unit(rng);
      std::int64_t port = 10000;
      while (t < opt.duration_s) {
        Flow f;
        f.cls = c;
        f.start = t;
        f.size = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(w.sizes.quantile(unit(rng)))));
        f.src = static_cast<std::int64_t>(c);
        f.dst = 100;
        f.sport = port++;
        f.dport = 5000 + w.dscp[c];
        flows.push_back(f);
        t += gap(rng);
      }
    }
  }
  for (auto& f : flows) f.cwnd = std::max(1.0, knobs.init_cwnd_packets[f.cls]);
  return flows;
}

}  // namespace

DesResult des_run(const DesKnobs& knobs, const WorkloadSpec& workload, const DesOptions& options,
                  std::uint64_t seed) {
  workload.validate();
  const std::size_t n = workload.num_classes();
  if (knobs.weights.size() != n || knobs.marking_bytes.size() != n ||
      knobs.init_cwnd_packets.size() != n)
    throw ShapeError("DES knobs do not match the workload's class count");
  if (!(options.duration_s > 0.0)) throw ConfigError("simulated duration must be > 0");
  if (options.mtu_bytes == 0) throw ConfigError("MTU must be > 0");

  auto flows = generate_flows(knobs, workload, options, seed);
  if (flows.empty()) throw ConfigError("workload produced no flows");

  const double cap = workload.capacity_bps;
  const double rtt = workload.base_rtt_s;
  const double horizon = options.duration_s * std::max(1.0, options.drain_factor);
  DwrrScheduler link(dwrr_quanta(knobs.weights, options.mtu_bytes));

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  std::uint64_t seq = 0;
  auto push = [&](double t, EventKind k, std::size_t flow, std::uint32_t bytes, bool marked) {
    events.push(Event{t, seq++, k, flow, bytes, marked});
  };
  for (std::size_t i = 0; i < flows.size(); ++i) push(flows[i].start, EventKind::Arrival, i, 0, false);

  DesResult res;
  res.served_bytes.assign(n, 0);
  bool busy = false;
  double now = 0.0;

  auto start_tx = [&]() {
    if (busy) return;
    if (auto next = link.dequeue()) {
      busy = true;
      const auto& [cls, pkt] = *next;
      res.served_bytes[cls] += pkt.bytes;
      const double done = now + static_cast<double>(pkt.bytes) * 8.0 / cap;
      push(done, EventKind::TxDone, pkt.flow, pkt.bytes, pkt.marked);
    }
  };

  auto send_window = [&](std::size_t fi) {
    auto& f = flows[fi];
    const auto window = static_cast<std::uint32_t>(std::max(1.0, std::floor(f.cwnd)));
    while (f.sent < f.size && f.inflight < window) {
      const auto bytes =
          static_cast<std::uint32_t>(std::min<std::uint64_t>(options.mtu_bytes, f.size - f.sent));
      const bool marked = static_cast<double>(link.queued_bytes(f.cls)) > knobs.marking_bytes[f.cls];
      link.enqueue(f.cls, DesPacket{fi, bytes, marked});
      f.sent += bytes;
      ++f.inflight;
    }
    start_tx();
  };

  while (!events.empty()) {
    const Event e = events.top();
    if (e.t > horizon) break;
    events.pop();
    now = e.t;
    switch (e.kind) {
      case EventKind::Arrival: {
        send_window(e.flow);
        flows[e.flow].round_end = flows[e.flow].sent;
        break;
      }
      case EventKind::TxDone:
        busy = false;
        push(now + rtt, EventKind::Ack, e.flow, e.bytes, e.marked);
        start_tx();
        break;
      case EventKind::Ack: {
        auto& f = flows[e.flow];
        f.acked += e.bytes;
        --f.inflight;
        ++f.round_pkts;
        if (e.marked) ++f.round_marked;
        if (f.acked >= f.size) {
          f.finish = now;
          res.completed_bytes += f.size;
          break;
        }
        if (f.acked >= f.round_end) {
          if (f.round_marked > 0) {
            const double frac = static_cast<double>(f.round_marked) / f.round_pkts;
            f.cwnd = std::max(1.0, f.cwnd * (1.0 - 0.5 * frac));
          } else {
            f.cwnd += 1.0;
          }
          f.round_pkts = 0;
          f.round_marked = 0;
          send_window(e.flow);
          f.round_end = f.sent;
        } else {
          send_window(e.flow);
        }
        break;
      }
    }
  }
  res.end_time_s = now;

  std::vector<std::vector<double>> per_class(n);
  res.response.flow_counts.assign(n, 0);
  for (const auto& f : flows) {
    const double ideal = static_cast<double>(f.size) * 8.0 / cap + rtt;
    double end = f.finish;
    if (end < 0.0) {
      ++res.incomplete_flows;
      end = std::max(now, f.start);  // censored at the end of the run
    }
    per_class[f.cls].push_back(std::max(1.0, (end - f.start) / ideal));
    ++res.response.flow_counts[f.cls];
    if (options.keep_flows && f.finish >= 0.0) {
      FlowRecord r;
      r.start_ns = std::llround(f.start * 1e9);
      r.end_ns = std::llround(f.finish * 1e9);
      r.src = f.src;
      r.dst = f.dst;
      r.sport = f.sport;
      r.dport = f.dport;
      r.dscp = workload.dscp[f.cls];
      r.bytes = static_cast<std::int64_t>(f.size);
      res.response.flows.push_back(r);
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    res.response.slowdowns.push_back(quantile(per_class[c], 0.99));
    res.median_slowdown.push_back(quantile(per_class[c], 0.5));
    if (per_class[c].size() < options.min_flows_per_class && workload.loads_bps[c] > 0.0)
      res.response.low_sample_warning = true;
  }
  if (options.keep_flows)
    std::sort(res.response.flows.begin(), res.response.flows.end(),
              [](const FlowRecord& a, const FlowRecord& b) { return a.start_ns < b.start_ns; });
  return res;
}

SystemResponse des_simulate(const ParamVector& raw, const ParamSpace& space,
                            const WorkloadSpec& workload, const DesOptions& options,
                            std::uint64_t seed) {
  check_knob_layout(space, workload.num_classes());
  normalize(raw, space);  // range check
  DesKnobs k;
  k.weights = raw.blocks[0];
  for (double kb : raw.blocks[1]) k.marking_bytes.push_back(kb * 1024.0);
  k.init_cwnd_packets = raw.blocks[2];
  return des_run(k, workload, options, seed).response;
}

DesSystem::DesSystem(ParamSpace space, DesOptions options)
    : space_(std::move(space)), options_(options) {}

SystemResponse DesSystem::measure(const ParamVector& x, const WorkloadSpec& workload,
                                  std::uint64_t seed) {
  return des_simulate(denormalize(x, space_), space_, workload, options_, seed);
}

QueueingModel::QueueingModel(ParamSpace space) : space_(std::move(space)) {}

SliVector QueueingModel::predict(const ParamVector& x, const WorkloadSpec& workload) const {
  const std::size_t n = workload.num_classes();
  check_knob_layout(space_, n);
  const auto k = knob_view(x, space_);
  double rho = 0.0;
  for (double l : workload.loads_bps) rho += l / workload.capacity_bps;
  const double slack = std::max(1.0 - rho, 0.02);
  SliVector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rho_i = workload.loads_bps[i] / workload.capacity_bps;
    // Spare capacity is handed out in proportion to weight; queueing grows
    // as the class's share of it shrinks.
    const double queueing = rho_i / (std::max(k.weights[i], 1e-3) * slack);
    const double depth = 0.3 + k.marking[i];
    const double underrun = 0.15 / (k.marking[i] + 0.1);
    const double startup = 1.5 * (1.0 - k.cwnd[i]) * (1.0 - k.cwnd[i]) + 0.5 * k.cwnd[i] * k.cwnd[i];
    y[i] = 1.0 + 2.0 * queueing * depth + underrun + startup;
  }
  return y;
}

}  // namespace slotune
