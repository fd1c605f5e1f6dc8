// Command-line front end: run scenarios, recompute metrics, compare runs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "slotune/error.hpp"
#include "slotune/harness.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw slotune::ConfigError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop SLO tuner: scenarios, metrics and comparisons"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario and write its trace and summary");
  std::string scenario_path, out_dir = "out", controller, ablate;
  std::uint64_t seed = 0;
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--out-dir", out_dir, "Output directory");
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--controller", controller, "polyphony | selftune | vanilla_bo");
  auto* ablate_opt =
      run->add_option("--ablate", ablate, "Comma list of no_tr,no_correction,no_model,no_denoiser");

  auto* metrics = app.add_subcommand("metrics", "Recompute a summary from a trace CSV");
  std::string trace_path, slo_path;
  metrics->add_option("trace", trace_path, "Trace CSV")->required()->check(CLI::ExistingFile);
  metrics->add_option("--slo", slo_path, "Scenario JSON the trace was produced with")
      ->required()
      ->check(CLI::ExistingFile);

  auto* compare = app.add_subcommand("compare", "Aggregate *.summary.json files in a directory");
  std::string compare_dir;
  compare->add_option("dir", compare_dir, "Directory of summaries")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto config = slotune::load_scenario(scenario_path);
      if (*seed_opt) config.seed = seed;
      if (!controller.empty()) config.controller = slotune::parse_controller_kind(controller);
      if (*ablate_opt) config.control.ablation = slotune::AblationFlags::parse(ablate);
      config.validate();
      const auto result = slotune::run_scenario(config);
      const auto files = slotune::write_run_files(config, result, out_dir);
      std::cout << slotune::summary_json(result.summary) << '\n';
      std::cerr << "trace:   " << files.trace << "\nsummary: " << files.summary << '\n';
    } else if (*metrics) {
      const auto config = slotune::load_scenario(slo_path);
      const auto trace = slotune::read_trace_csv_file(trace_path);
      auto s = slotune::summarize(config, trace);
      // Variant and seed are not recorded in the trace; take them from the
      // file name when it follows the run naming scheme.
      const auto stem = fs::path(trace_path).filename().string();
      if (auto p = stem.rfind("_seed"); p != std::string::npos) {
        s.seed = std::stoull(stem.substr(p + 5));
        const auto prefix = config.name + "_";
        if (stem.rfind(prefix, 0) == 0) {
          std::string v = stem.substr(prefix.size(), p - prefix.size());
          if (auto dash = v.find('-'); dash != std::string::npos) {
            v[dash] = '+';
            for (std::size_t i = dash + 1; i < v.size(); ++i)
              if (v[i] == '-') v[i] = ',';
          }
          s.variant = v;
        }
      }
      std::cout << slotune::summary_json(s) << '\n';
    } else if (*compare) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(compare_dir)) {
        const auto name = e.path().filename().string();
        if (name.size() > 13 && name.ends_with(".summary.json")) files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) throw slotune::ConfigError("no *.summary.json files in " + compare_dir);
      std::vector<slotune::RunSummary> rows;
      for (const auto& f : files) rows.push_back(slotune::parse_summary_json(slurp(f.string())));
      const auto table = slotune::compare_json(rows);
      std::ofstream(fs::path(compare_dir) / "comparison.json") << table << '\n';
      std::cout << table << '\n';
    }
  } catch (const slotune::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
