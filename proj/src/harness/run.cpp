#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "slotune/detail/seed.hpp"
#include "slotune/error.hpp"
#include "slotune/harness.hpp"

namespace slotune {

namespace {

class CountingModel final : public PerformanceModel {
 public:
  explicit CountingModel(std::shared_ptr<const PerformanceModel> inner) : inner_(std::move(inner)) {}
  SliVector predict(const ParamVector& x, const WorkloadSpec& w) const override {
    ++calls_;
    return inner_->predict(x, w);
  }
  std::size_t calls() const { return calls_; }

 private:
  std::shared_ptr<const PerformanceModel> inner_;
  mutable std::atomic<std::size_t> calls_{0};
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

Testbed make_testbed(const ScenarioConfig& config) {
  Testbed t;
  switch (config.testbed) {
    case TestbedKind::Analytic:
      t.system = std::make_unique<AnalyticSystem>(config.space, config.noise_nu);
      t.model = std::make_shared<AnalyticModel>(config.space, config.bias);
      break;
    case TestbedKind::Des:
    case TestbedKind::TraceReplay:
      t.system = std::make_unique<DesSystem>(config.space, config.des);
      t.model = std::make_shared<QueueingModel>(config.space);
      break;
  }
  return t;
}

std::unique_ptr<Tuner> make_tuner(const ScenarioConfig& config,
                                  std::shared_ptr<const PerformanceModel> model) {
  const std::uint64_t seed = detail::mix_seed(config.seed, 0, 3);
  switch (config.controller) {
    case ControllerKind::Polyphony:
      return std::make_unique<Controller>(config.space, config.slo, config.control,
                                          config.control.ablation.no_model ? nullptr : model,
                                          config.initial, seed);
    case ControllerKind::VanillaBo:
      return make_vanilla_bo(config.space, config.slo, config.control, config.initial, seed);
    case ControllerKind::SelfTune:
      return std::make_unique<SelfTune>(config.space, config.slo, config.selftune,
                                        config.control.objective, config.initial, seed,
                                        config.control.W_g);
  }
  throw ConfigError("unknown controller");
}

RunOutput run_scenario(const ScenarioConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto bed = make_testbed(config);
  auto counter = std::make_shared<CountingModel>(bed.model);
  auto tuner = make_tuner(config, counter);
  const std::size_t classes = config.slo.num_classes();

  std::vector<IterationTrace> trace;
  trace.reserve(config.iterations);
  for (std::size_t it = 0; it < config.iterations; ++it) {
    const std::size_t phase = config.phase_of(it);
    const auto& workload = config.phases[phase].workload;
    IterationTrace rec;
    rec.iteration = it;
    rec.phase = phase;
    const ParamVector x = tuner->current();
    rec.x = denormalize(x, config.space).flatten();

    SystemResponse resp;
    try {
      resp = bed.system->measure(x, workload, detail::mix_seed(config.seed, it, 7));
    } catch (const Error&) {
      rec.status = "measure_failed";
    }
    if (rec.status == "ok") {
      try {
        const auto step = tuner->step(resp.slowdowns, workload);
        rec.raw = step.sample.raw;
        rec.smoothed = step.sample.smoothed;
        rec.g = step.sample.g;
        rec.f = step.sample.f;
        rec.residual = step.sample.residual;
        rec.g_best = step.g_best;
        rec.distance_to_best = step.distance_to_best;
        rec.ei = step.ei;
        rec.admitted = step.sample.admitted;
        rec.regime_shift = step.regime_shift;
        rec.compliant = step.compliant;
        if (step.model_failed) rec.status = "model_failed";
        else if (step.proposal_failed) rec.status = "proposal_failed";
      } catch (const Error&) {
        rec.status = "step_failed";
        rec.raw = resp.slowdowns;
      }
    }
    if (rec.raw.size() != classes) rec.raw.assign(classes, kNaN);
    if (rec.smoothed.size() != classes) rec.smoothed.assign(classes, kNaN);
    if (rec.status == "measure_failed" || rec.status == "step_failed") {
      rec.g = rec.f = rec.residual = rec.g_best = rec.distance_to_best = rec.ei = kNaN;
    }
    trace.push_back(std::move(rec));
  }

  RunOutput out;
  // Summaries are computed from the serialized trace so that recomputing
  // them from the CSV file reproduces the same numbers.
  std::istringstream csv(trace_csv(config, trace));
  out.trace = read_trace_csv(csv);
  out.summary = summarize(config, out.trace);
  out.summary.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.model_calls = counter->calls();
  return out;
}

RunFiles write_run_files(const ScenarioConfig& config, const RunOutput& run,
                         const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::string variant = config.variant();
  for (auto& c : variant)
    if (c == '+' || c == ',') c = '-';
  const std::string stem = (std::filesystem::path(out_dir) /
                            (config.name + "_" + variant + "_seed" + std::to_string(config.seed)))
                               .string();
  RunFiles f{stem + ".trace.csv", stem + ".summary.json"};
  {
    std::ofstream out(f.trace, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + f.trace);
    write_trace_csv(out, config, run.trace);
  }
  {
    std::ofstream out(f.summary, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + f.summary);
    out << summary_json(run.summary) << '\n';
  }
  return f;
}

}  // namespace slotune
