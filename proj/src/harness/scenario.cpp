#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "slotune/error.hpp"
#include "slotune/harness.hpp"
#include "slotune/testbed/flow_trace.hpp"

namespace slotune {

using nlohmann::json;

ControllerKind parse_controller_kind(const std::string& s) {
  if (s == "polyphony") return ControllerKind::Polyphony;
  if (s == "selftune") return ControllerKind::SelfTune;
  if (s == "vanilla_bo") return ControllerKind::VanillaBo;
  throw ConfigError("unknown controller '" + s + "' (polyphony|selftune|vanilla_bo)");
}

std::string to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::Polyphony: return "polyphony";
    case ControllerKind::SelfTune: return "selftune";
    case ControllerKind::VanillaBo: return "vanilla_bo";
  }
  return "?";
}

TestbedKind parse_testbed_kind(const std::string& s) {
  if (s == "analytic") return TestbedKind::Analytic;
  if (s == "des") return TestbedKind::Des;
  if (s == "trace-replay") return TestbedKind::TraceReplay;
  throw ConfigError("unknown testbed '" + s + "' (analytic|des|trace-replay)");
}

std::string to_string(TestbedKind k) {
  switch (k) {
    case TestbedKind::Analytic: return "analytic";
    case TestbedKind::Des: return "des";
    case TestbedKind::TraceReplay: return "trace-replay";
  }
  return "?";
}

void ScenarioConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (space.num_blocks() == 0) throw ConfigError("scenario has no parameter space");
  check_normalized(initial, space);
  slo.validate();
  control.validate();
  selftune.validate();
  if (!(noise_nu >= 0.0)) throw ConfigError("noise_nu must be >= 0");
  if (phases.empty()) throw ConfigError("scenario has no workload");
  if (phases.front().start != 0) throw ConfigError("first phase must start at iteration 0");
  for (std::size_t p = 0; p < phases.size(); ++p) {
    if (p > 0 && phases[p].start <= phases[p - 1].start)
      throw ConfigError("phase starts must be strictly increasing");
    if (phases[p].start >= iterations)
      throw ConfigError("phase " + std::to_string(p) + " starts after the last iteration");
    phases[p].workload.validate();
    if (phases[p].workload.num_classes() != slo.num_classes())
      throw ConfigError("phase " + std::to_string(p) + " class count does not match the SLO");
    if (testbed == TestbedKind::TraceReplay && !phases[p].workload.replay)
      throw ConfigError("trace-replay testbed needs a trace in every phase");
  }
  check_knob_layout(space, slo.num_classes());
  if (k_conv < 1) throw ConfigError("k_conv must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
}

std::size_t ScenarioConfig::phase_of(std::size_t iteration) const {
  std::size_t p = 0;
  while (p + 1 < phases.size() && phases[p + 1].start <= iteration) ++p;
  return p;
}

std::string ScenarioConfig::variant() const {
  std::string v = to_string(controller);
  if (controller == ControllerKind::Polyphony) {
    const auto a = control.ablation.to_string();
    if (!a.empty()) v += "+" + a;
  }
  return v;
}

namespace {

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::string resolve(const std::string& base, const std::string& p) {
  const std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (std::filesystem::path(base) / path).string();
}

ParamSpace parse_space(const json& j, std::size_t classes) {
  if (j.is_null()) return canonical_space(classes);
  if (j.contains("blocks")) {
    std::vector<BlockSpec> blocks;
    for (const auto& b : j.at("blocks")) {
      const auto kind = b.at("kind").get<std::string>();
      std::vector<std::string> labels;
      read_opt(b, "labels", labels);
      if (kind == "simplex") {
        blocks.push_back(BlockSpec::simplex(b.at("dim").get<std::size_t>(), labels));
      } else if (kind == "hypercube") {
        blocks.push_back(BlockSpec::hypercube(b.at("lo").get<std::vector<double>>(),
                                              b.at("hi").get<std::vector<double>>(), labels));
      } else {
        throw ConfigError("unknown block kind '" + kind + "'");
      }
    }
    return ParamSpace(std::move(blocks));
  }
  std::vector<double> k{8.0, 256.0}, c{1.0, 64.0};
  read_opt(j, "marking_kb", k);
  read_opt(j, "init_cwnd", c);
  if (k.size() != 2 || c.size() != 2) throw ConfigError("space ranges must be [lo, hi] pairs");
  return canonical_space(classes, k[0], k[1], c[0], c[1]);
}

WorkloadSpec parse_workload(const json& j, const std::string& base) {
  WorkloadSpec w;
  read_opt(j, "dscp", w.dscp);
  if (j.contains("sizes")) {
    const auto& s = j.at("sizes");
    if (s.is_string()) w.sizes = FlowSizeDistribution::builtin(s.get<std::string>());
    else w.sizes = FlowSizeDistribution::from_file(resolve(base, s.at("cdf_file").get<std::string>()));
  }
  read_opt(j, "burst_sigma", w.burst_sigma);
  if (j.contains("base_rtt_us")) w.base_rtt_s = j.at("base_rtt_us").get<double>() * 1e-6;
  if (j.contains("capacity_gbps")) w.capacity_bps = j.at("capacity_gbps").get<double>() * 1e9;
  if (j.contains("trace")) {
    w.replay = std::make_shared<WorkloadReplay>(read_flow_trace(resolve(base, j.at("trace").get<std::string>())));
    w.loads_bps = w.replay->offered_loads(w.dscp);
  }
  if (j.contains("loads_mbps")) {
    w.loads_bps.clear();
    for (double l : j.at("loads_mbps").get<std::vector<double>>()) w.loads_bps.push_back(l * 1e6);
  }
  if (j.contains("loads_bps")) w.loads_bps = j.at("loads_bps").get<std::vector<double>>();
  if (w.loads_bps.empty()) throw ConfigError("workload needs loads_mbps, loads_bps or a trace");
  return w;
}

void parse_controller(const json& j, ControllerConfig& c) {
  read_opt(j, "W_g", c.W_g);
  read_opt(j, "W_s", c.W_s);
  read_opt(j, "phi", c.phi);
  read_opt(j, "k_shift", c.k_shift);
  read_opt(j, "d_novel", c.d_novel);
  read_opt(j, "kappa", c.kappa);
  read_opt(j, "tau_rel", c.tau_rel);
  read_opt(j, "sigma0", c.sigma0);
  read_opt(j, "smooth_radius", c.smooth_radius);
  read_opt(j, "select_kernel", c.select_kernel);
  if (j.contains("trust_region")) {
    const auto& t = j.at("trust_region");
    read_opt(t, "epsilon", c.trust_region.epsilon);
    read_opt(t, "beta", c.trust_region.beta);
    read_opt(t, "alpha", c.trust_region.distance.alpha);
    read_opt(t, "simplex_floor", c.trust_region.distance.simplex_floor);
  }
  if (j.contains("proposal")) {
    const auto& p = j.at("proposal");
    read_opt(p, "n_starts", c.proposal.n_starts);
    read_opt(p, "local_budget", c.proposal.local_budget);
    read_opt(p, "uniform_fraction", c.proposal.uniform_fraction);
    read_opt(p, "ei_floor", c.proposal.ei_floor);
  }
  if (j.contains("denoiser")) {
    const auto& d = j.at("denoiser");
    read_opt(d, "window", c.denoiser.window);
    read_opt(d, "sigma_max", c.denoiser.sigma_max);
    read_opt(d, "v_ref", c.denoiser.v_ref);
    read_opt(d, "v_off", c.denoiser.v_off);
  }
  if (j.contains("gp")) {
    const auto& g = j.at("gp");
    read_opt(g, "n_starts", c.gp.n_starts);
    read_opt(g, "evals_per_start", c.gp.evals_per_start);
    read_opt(g, "length_scale_min", c.gp.length_scale_min);
    read_opt(g, "length_scale_max", c.gp.length_scale_max);
    read_opt(g, "signal_variance_min", c.gp.signal_variance_min);
    read_opt(g, "signal_variance_max", c.gp.signal_variance_max);
    read_opt(g, "noise_variance_min", c.gp.noise_variance_min);
    read_opt(g, "noise_variance_max", c.gp.noise_variance_max);
    if (g.contains("kernel")) {
      const auto k = g.at("kernel").get<std::string>();
      if (k == "se") c.gp.kernel = KernelFamily::SquaredExponential;
      else if (k == "matern52") c.gp.kernel = KernelFamily::Matern52;
      else throw ConfigError("unknown kernel '" + k + "' (se|matern52)");
    }
    if (g.contains("mean")) {
      const auto m = g.at("mean").get<std::string>();
      if (m == "constant") c.gp.mean = MeanFamily::Constant;
      else if (m == "zero") c.gp.mean = MeanFamily::Zero;
      else throw ConfigError("unknown mean '" + m + "' (constant|zero)");
    }
  }
}

ParamVector default_initial(const ParamSpace& space) {
  ParamVector x;
  for (const auto& b : space.blocks())
    x.blocks.emplace_back(b.dim, b.kind == BlockKind::Simplex ? 1.0 / static_cast<double>(b.dim) : 0.5);
  return x;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  ScenarioConfig c;
  try {
    read_opt(j, "name", c.name);
    c.iterations = j.at("iterations").get<std::size_t>();
    read_opt(j, "seed", c.seed);
    if (j.contains("controller")) c.controller = parse_controller_kind(j.at("controller").get<std::string>());

    const auto& slo = j.at("slo");
    c.slo.thresholds = slo.at("thresholds").get<std::vector<double>>();
    read_opt(slo, "labels", c.slo.labels);
    const std::size_t classes = c.slo.num_classes();

    c.space = parse_space(j.contains("space") ? j.at("space") : json(), classes);
    if (j.contains("initial")) {
      ParamVector raw;
      raw.blocks = j.at("initial").get<std::vector<std::vector<double>>>();
      c.initial = normalize(raw, c.space);
    } else {
      c.initial = default_initial(c.space);
    }

    if (j.contains("objective")) {
      read_opt(j.at("objective"), "c", c.control.objective.c);
      read_opt(j.at("objective"), "lambda", c.control.objective.lambda);
    }
    if (j.contains("control")) parse_controller(j.at("control"), c.control);
    if (j.contains("ablate")) c.control.ablation = AblationFlags::parse(j.at("ablate").get<std::string>());
    if (j.contains("selftune")) {
      const auto& s = j.at("selftune");
      read_opt(s, "delta", c.selftune.delta);
      read_opt(s, "eta", c.selftune.eta);
      read_opt(s, "beta_r", c.selftune.beta_r);
      read_opt(s, "settle_factor", c.selftune.settle_factor);
    }

    const auto& tb = j.at("testbed");
    c.testbed = parse_testbed_kind(tb.at("kind").get<std::string>());
    read_opt(tb, "noise_nu", c.noise_nu);
    if (tb.contains("bias")) {
      const auto& b = tb.at("bias");
      if (b.is_string() && b.get<std::string>() == "none") {
        c.bias = AnalyticBias::none();
      } else {
        read_opt(b, "scale", c.bias.scale);
        read_opt(b, "shift", c.bias.shift);
      }
    }
    read_opt(tb, "duration_s", c.des.duration_s);
    read_opt(tb, "drain_factor", c.des.drain_factor);
    read_opt(tb, "min_flows_per_class", c.des.min_flows_per_class);

    if (j.contains("phases")) {
      for (const auto& p : j.at("phases")) {
        PhaseSpec ph;
        ph.start = p.at("start").get<std::size_t>();
        read_opt(p, "label", ph.label);
        ph.workload = parse_workload(p.at("workload"), base_dir);
        c.phases.push_back(std::move(ph));
      }
    } else {
      c.phases.push_back(PhaseSpec{0, parse_workload(j.at("workload"), base_dir), ""});
    }
    if (j.contains("metrics")) {
      read_opt(j.at("metrics"), "k_conv", c.k_conv);
      read_opt(j.at("metrics"), "dt", c.dt);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario field error: ") + e.what());
  }
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto dir = std::filesystem::path(path).parent_path().string();
  if (dir.empty()) dir = ".";
  return parse_scenario(ss.str(), dir);
}

}  // namespace slotune
