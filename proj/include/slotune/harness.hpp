#pragma once

// Scenario-driven experiments: wires a tuner to a testbed, runs the closed
// loop with an optional phase schedule, and reduces the per-iteration trace
// to a summary.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slotune/baselines.hpp"
#include "slotune/controller.hpp"
#include "slotune/testbed/analytic.hpp"
#include "slotune/testbed/des.hpp"

namespace slotune {

enum class ControllerKind { Polyphony, SelfTune, VanillaBo };
enum class TestbedKind { Analytic, Des, TraceReplay };

ControllerKind parse_controller_kind(const std::string& s);
std::string to_string(ControllerKind k);
TestbedKind parse_testbed_kind(const std::string& s);
std::string to_string(TestbedKind k);

struct PhaseSpec {
  std::size_t start = 0;  // first iteration of the phase
  WorkloadSpec workload;
  std::string label;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::size_t iterations = 0;
  std::uint64_t seed = 0;

  ParamSpace space;
  ParamVector initial;  // normalized
  SloSpec slo;
  ControllerKind controller = ControllerKind::Polyphony;
  ControllerConfig control;  // objective spec lives in control.objective
  SelfTuneConfig selftune;

  TestbedKind testbed = TestbedKind::Analytic;
  double noise_nu = 0.0;
  AnalyticBias bias;
  DesOptions des;
  std::vector<PhaseSpec> phases;

  std::size_t k_conv = 3;
  double dt = 1.0;  // control interval used for regret

  /// Throws ConfigError on any inconsistency.
  void validate() const;
  std::size_t phase_of(std::size_t iteration) const;
  /// "polyphony", "polyphony+no_tr,no_model", "selftune", ...
  std::string variant() const;
};

/// Parses a scenario file. Relative paths inside it (traces, CDF files)
/// resolve against the file's directory.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir = ".");

struct IterationTrace {
  std::size_t iteration = 0;
  std::size_t phase = 0;
  std::vector<double> x;  // raw units, flattened
  SliVector raw;
  SliVector smoothed;
  double g = 0.0;
  double f = 0.0;
  double residual = 0.0;
  double g_best = 0.0;
  double distance_to_best = 0.0;
  double ei = 0.0;
  bool admitted = false;
  bool regime_shift = false;
  bool compliant = false;
  std::string status = "ok";  // ok | measure_failed | step_failed | model_failed | proposal_failed
};

struct PhaseSummary {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::optional<std::size_t> convergence;  // relative to start
  std::optional<std::size_t> first_shift;  // relative to start
};

struct RunSummary {
  std::string scenario;
  std::string variant;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  std::size_t k_conv = 3;
  std::optional<std::size_t> convergence_time;
  double dt = 1.0;
  double g_star = 0.0;  // min g in this trace
  double sum_g = 0.0;
  std::size_t finite_g = 0;  // records with a finite objective
  double hindsight_regret = 0.0;
  std::optional<double> minmax_fairness;
  double final_objective = 0.0;
  double final_objective_last10 = 0.0;
  double median_step_first20 = 0.0;  // mixed distance between consecutive configurations
  std::vector<std::size_t> regime_shifts;
  std::vector<PhaseSummary> phases;
  std::optional<double> wall_clock_s;
};

struct RunOutput {
  std::vector<IterationTrace> trace;
  RunSummary summary;
  std::size_t model_calls = 0;
};

/// Builds the tuner for a scenario. `model` may be null for baselines that
/// do not use it.
std::unique_ptr<Tuner> make_tuner(const ScenarioConfig& config,
                                  std::shared_ptr<const PerformanceModel> model);

struct Testbed {
  std::unique_ptr<SystemUnderTest> system;
  std::shared_ptr<const PerformanceModel> model;
};
Testbed make_testbed(const ScenarioConfig& config);

RunOutput run_scenario(const ScenarioConfig& config);

struct RunFiles {
  std::string trace;
  std::string summary;
};
/// Writes <out_dir>/<name>_<variant>_seed<seed>.{trace.csv,summary.json}.
RunFiles write_run_files(const ScenarioConfig& config, const RunOutput& run,
                         const std::string& out_dir);

// Trace CSV ---------------------------------------------------------------

/// Column header for a scenario's trace.
std::vector<std::string> trace_columns(const ScenarioConfig& config);
void write_trace_csv(std::ostream& out, const ScenarioConfig& config,
                     const std::vector<IterationTrace>& trace);
std::string trace_csv(const ScenarioConfig& config, const std::vector<IterationTrace>& trace);
/// Header-driven reader; throws ParseError with a line number.
std::vector<IterationTrace> read_trace_csv(std::istream& in);
std::vector<IterationTrace> read_trace_csv_file(const std::string& path);

// Metrics -----------------------------------------------------------------

/// First index starting k consecutive true flags, if any.
std::optional<std::size_t> convergence_time(const std::vector<bool>& compliant, std::size_t k);
/// sum_t max(g_t - g_star, 0) dt
double hindsight_regret(const std::vector<double>& g, double g_star, double dt);
/// min r / max r; throws DomainError on a non-positive ratio.
double minmax_fairness(const std::vector<double>& r);

RunSummary summarize(const ScenarioConfig& config, const std::vector<IterationTrace>& trace);
std::string summary_json(const RunSummary& s, int indent = 2);
RunSummary parse_summary_json(const std::string& text);

/// Aggregates summaries into one table. Regret is recomputed against the
/// best objective over all rows sharing a scenario and seed.
std::string compare_json(const std::vector<RunSummary>& rows, int indent = 2);

}  // namespace slotune
