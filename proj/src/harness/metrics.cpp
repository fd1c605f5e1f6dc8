#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <json.hpp>

#include "slotune/error.hpp"
#include "slotune/harness.hpp"

namespace slotune {

using nlohmann::json;

std::optional<std::size_t> convergence_time(const std::vector<bool>& compliant, std::size_t k) {
  if (k == 0) return std::nullopt;
  std::size_t run = 0;
  for (std::size_t i = 0; i < compliant.size(); ++i) {
    run = compliant[i] ? run + 1 : 0;
    if (run == k) return i + 1 - k;
  }
  return std::nullopt;
}

double hindsight_regret(const std::vector<double>& g, double g_star, double dt) {
  double r = 0.0;
  for (double v : g)
    if (std::isfinite(v)) r += std::max(v - g_star, 0.0) * dt;
  return r;
}

double minmax_fairness(const std::vector<double>& r) {
  if (r.empty()) throw DomainError("fairness of an empty ratio vector");
  for (double v : r)
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("ratios must be positive and finite");
  const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
  return *lo / *hi;
}

namespace {

// Normalized configuration from a raw trace row. Simplex blocks are
// re-closed first because 9-digit serialization can move their sum by ~1e-9.
ParamVector normalized_row(const std::vector<double>& flat, const ParamSpace& space) {
  auto x = ParamVector::unflatten(space, flat);
  for (std::size_t k = 0; k < space.num_blocks(); ++k) {
    const auto& b = space.blocks()[k];
    if (b.kind == BlockKind::Simplex) {
      double s = 0.0;
      for (double v : x.blocks[k]) s += v;
      for (auto& v : x.blocks[k]) v /= s;
    } else {
      for (std::size_t i = 0; i < b.dim; ++i)
        x.blocks[k][i] = std::clamp((x.blocks[k][i] - b.lo[i]) / (b.hi[i] - b.lo[i]), 0.0, 1.0);
    }
  }
  return x;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json opt_json(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }
json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

template <class T>
std::optional<T> opt_get(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

double num(const json& j, const char* key) {
  const auto& v = j.at(key);
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

}  // namespace

RunSummary summarize(const ScenarioConfig& config, const std::vector<IterationTrace>& trace) {
  if (trace.empty()) throw ConfigError("cannot summarize an empty trace");
  RunSummary s;
  s.scenario = config.name;
  s.variant = config.variant();
  s.seed = config.seed;
  s.iterations = trace.size();
  s.k_conv = config.k_conv;
  s.dt = config.dt;

  std::vector<bool> flags;
  std::vector<double> g;
  for (const auto& t : trace) {
    flags.push_back(t.compliant);
    g.push_back(t.g);
    if (t.regime_shift) s.regime_shifts.push_back(t.iteration);
  }
  s.convergence_time = convergence_time(flags, config.k_conv);

  s.g_star = std::numeric_limits<double>::infinity();
  for (double v : g) {
    if (!std::isfinite(v)) continue;
    s.g_star = std::min(s.g_star, v);
    s.sum_g += v;
    ++s.finite_g;
  }
  if (s.finite_g == 0) s.g_star = std::numeric_limits<double>::quiet_NaN();
  s.hindsight_regret = s.finite_g ? hindsight_regret(g, s.g_star, config.dt) : 0.0;

  s.final_objective = trace.back().g;
  const std::size_t tail = std::min<std::size_t>(10, trace.size());
  double acc = 0.0;
  for (std::size_t i = trace.size() - tail; i < trace.size(); ++i) acc += trace[i].g;
  s.final_objective_last10 = acc / static_cast<double>(tail);

  try {
    s.minmax_fairness = minmax_fairness(ratios(trace.back().smoothed, config.slo));
  } catch (const Error&) {
    s.minmax_fairness.reset();
  }

  std::vector<double> steps;
  const std::size_t horizon = std::min<std::size_t>(20, trace.size());
  for (std::size_t i = 1; i < horizon; ++i) {
    const auto a = normalized_row(trace[i - 1].x, config.space);
    const auto b = normalized_row(trace[i].x, config.space);
    steps.push_back(mixed_distance(a, b, config.space, config.control.trust_region.distance));
  }
  s.median_step_first20 = median(steps);

  for (std::size_t p = 0; p < config.phases.size(); ++p) {
    PhaseSummary ph;
    ph.start = config.phases[p].start;
    ph.end = p + 1 < config.phases.size() ? config.phases[p + 1].start : config.iterations;
    ph.end = std::min(ph.end, trace.size());
    if (ph.start >= ph.end) continue;
    std::vector<bool> sub(flags.begin() + ph.start, flags.begin() + ph.end);
    ph.convergence = convergence_time(sub, config.k_conv);
    for (std::size_t i = ph.start; i < ph.end; ++i)
      if (trace[i].regime_shift) {
        ph.first_shift = i - ph.start;
        break;
      }
    s.phases.push_back(ph);
  }
  return s;
}

std::string summary_json(const RunSummary& s, int indent) {
  json j;
  j["scenario"] = s.scenario;
  j["variant"] = s.variant;
  j["seed"] = s.seed;
  j["iterations"] = s.iterations;
  j["k_conv"] = s.k_conv;
  j["convergence_time"] = opt_json(s.convergence_time);
  j["dt"] = s.dt;
  j["g_star"] = s.g_star;
  j["sum_g"] = s.sum_g;
  j["finite_g"] = s.finite_g;
  j["hindsight_regret"] = s.hindsight_regret;
  j["minmax_fairness"] = opt_json(s.minmax_fairness);
  j["final_objective"] = s.final_objective;
  j["final_objective_last10"] = s.final_objective_last10;
  j["median_step_first20"] = s.median_step_first20;
  j["regime_shifts"] = s.regime_shifts;
  json phases = json::array();
  for (const auto& p : s.phases)
    phases.push_back({{"start", p.start},
                      {"end", p.end},
                      {"convergence", opt_json(p.convergence)},
                      {"first_shift", opt_json(p.first_shift)}});
  j["phases"] = phases;
  j["wall_clock_s"] = opt_json(s.wall_clock_s);
  return j.dump(indent);
}

RunSummary parse_summary_json(const std::string& text) {
  RunSummary s;
  try {
    const auto j = json::parse(text);
    s.scenario = j.at("scenario").get<std::string>();
    s.variant = j.at("variant").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.iterations = j.at("iterations").get<std::size_t>();
    s.k_conv = j.at("k_conv").get<std::size_t>();
    s.convergence_time = opt_get<std::size_t>(j, "convergence_time");
    s.dt = num(j, "dt");
    s.g_star = num(j, "g_star");
    s.sum_g = num(j, "sum_g");
    s.finite_g = j.at("finite_g").get<std::size_t>();
    s.hindsight_regret = num(j, "hindsight_regret");
    s.minmax_fairness = opt_get<double>(j, "minmax_fairness");
    s.final_objective = num(j, "final_objective");
    s.final_objective_last10 = num(j, "final_objective_last10");
    s.median_step_first20 = num(j, "median_step_first20");
    s.regime_shifts = j.at("regime_shifts").get<std::vector<std::size_t>>();
    for (const auto& p : j.at("phases")) {
      PhaseSummary ph;
      ph.start = p.at("start").get<std::size_t>();
      ph.end = p.at("end").get<std::size_t>();
      ph.convergence = opt_get<std::size_t>(p, "convergence");
      ph.first_shift = opt_get<std::size_t>(p, "first_shift");
      s.phases.push_back(ph);
    }
    s.wall_clock_s = opt_get<double>(j, "wall_clock_s");
  } catch (const json::exception& e) {
    throw ParseError(std::string("summary JSON: ") + e.what());
  }
  return s;
}

std::string compare_json(const std::vector<RunSummary>& rows, int indent) {
  std::map<std::pair<std::string, std::uint64_t>, double> best;
  for (const auto& r : rows) {
    if (!std::isfinite(r.g_star)) continue;
    auto key = std::make_pair(r.scenario, r.seed);
    auto it = best.find(key);
    if (it == best.end()) best.emplace(key, r.g_star);
    else it->second = std::min(it->second, r.g_star);
  }
  json table = json::array();
  std::map<std::pair<std::string, std::string>, std::vector<const RunSummary*>> groups;
  std::map<const RunSummary*, double> shared_regret;
  for (const auto& r : rows) {
    double regret = r.hindsight_regret;
    if (auto it = best.find({r.scenario, r.seed}); it != best.end())
      regret = (r.sum_g - static_cast<double>(r.finite_g) * it->second) * r.dt;
    shared_regret[&r] = regret;
    groups[{r.scenario, r.variant}].push_back(&r);
    table.push_back({{"scenario", r.scenario},
                     {"variant", r.variant},
                     {"seed", r.seed},
                     {"convergence_time", opt_json(r.convergence_time)},
                     {"hindsight_regret", r.hindsight_regret},
                     {"regret_vs_best", regret},
                     {"minmax_fairness", opt_json(r.minmax_fairness)},
                     {"final_objective", r.final_objective},
                     {"final_objective_last10", r.final_objective_last10}});
  }
  json agg = json::array();
  for (const auto& [key, members] : groups) {
    std::vector<double> reg, last10;
    std::size_t converged = 0;
    for (const auto* m : members) {
      reg.push_back(shared_regret[m]);
      last10.push_back(m->final_objective_last10);
      if (m->convergence_time) ++converged;
    }
    agg.push_back({{"scenario", key.first},
                   {"variant", key.second},
                   {"runs", members.size()},
                   {"converged", converged},
                   {"median_regret_vs_best", median(reg)},
                   {"median_final_objective_last10", median(last10)}});
  }
  return json{{"runs", table}, {"variants", agg}}.dump(indent);
}

}  // namespace slotune
