#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "slotune/acquisition.hpp"
#include "slotune/denoiser.hpp"
#include "slotune/error.hpp"
#include "slotune/harness.hpp"
#include "slotune/objective.hpp"
#include "slotune/paramspace.hpp"
#include "slotune/testbed/analytic.hpp"
#include "slotune/testbed/testbed.hpp"

namespace py = pybind11;
using namespace slotune;

namespace {

SloSpec slo_of(const std::vector<double>& thresholds) { return SloSpec{thresholds, {}}; }

ParamVector blocks_of(const ParamSpace& space, const std::vector<double>& flat) {
  return ParamVector::unflatten(space, flat);
}

py::dict run_dict(const ScenarioConfig& config, const RunOutput& out) {
  py::dict d;
  d["summary"] = summary_json(out.summary);
  d["trace_csv"] = trace_csv(config, out.trace);
  d["model_calls"] = out.model_calls;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings for the slotune controller and testbeds";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());

  m.def("lse", [](const std::vector<double>& r, double c) { return lse(r, c); },
        py::arg("r"), py::arg("c") = 10.0);
  m.def("fairness", [](const std::vector<double>& r) { return fairness(r); });
  m.def("ratios", [](const std::vector<double>& y, const std::vector<double>& v) {
    return ratios(y, slo_of(v));
  });
  m.def(
      "objective",
      [](const std::vector<double>& y, const std::vector<double>& v, double c, double lambda) {
        return objective(y, slo_of(v), ObjectiveSpec{c, lambda});
      },
      py::arg("y"), py::arg("thresholds"), py::arg("c") = 10.0, py::arg("lam") = 0.5);
  m.def("compliant", [](const std::vector<double>& r) { return compliant(r); });

  m.def("expected_improvement", &expected_improvement, py::arg("mu"), py::arg("sigma"),
        py::arg("g_best"));
  m.def("aitchison_distance",
        [](const std::vector<double>& u, const std::vector<double>& v) {
          return aitchison_distance(u, v);
        });
  m.def(
      "mixed_distance",
      [](const std::vector<double>& x, const std::vector<double>& y, double alpha) {
        const auto space = canonical_space();
        DistanceSpec d;
        d.alpha = alpha;
        return mixed_distance(blocks_of(space, x), blocks_of(space, y), space, d);
      },
      py::arg("x"), py::arg("y"), py::arg("alpha") = 0.5,
      "Distance between two normalized, flattened points of the canonical 3-class space.");

  m.def(
      "analytic_system",
      [](const std::vector<double>& x, const std::vector<double>& loads_bps, double noise_nu,
         std::uint64_t seed) {
        const auto space = canonical_space();
        WorkloadSpec w;
        w.loads_bps = loads_bps;
        return analytic_system_evaluate(knob_view(blocks_of(space, x), space), w, noise_nu, seed);
      },
      py::arg("x"), py::arg("loads_bps"), py::arg("noise_nu") = 0.0, py::arg("seed") = 0);

  py::class_<Denoiser>(m, "Denoiser")
      .def(py::init<>())
      .def("push", &Denoiser::push)
      .def("reset", &Denoiser::reset)
      .def_property_readonly("last_width", &Denoiser::last_width)
      .def_property_readonly("buffer", [](const Denoiser& d) {
        return std::vector<double>(d.buffer().begin(), d.buffer().end());
      });

  m.def(
      "run_scenario",
      [](const std::string& path, std::optional<std::uint64_t> seed) {
        auto config = load_scenario(path);
        if (seed) config.seed = *seed;
        RunOutput out;
        {
          py::gil_scoped_release release;
          out = run_scenario(config);
        }
        return run_dict(config, out);
      },
      py::arg("path"), py::arg("seed") = py::none(),
      "Runs a scenario file; returns the summary JSON, the trace CSV and the model call count.");
}
