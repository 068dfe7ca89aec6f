// Copyright 2026 The qsprep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <memory>
#include <string>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qsprep/analysis.hpp"
#include "qsprep/error.hpp"
#include "qsprep/evolution.hpp"
#include "qsprep/experiment.hpp"
#include "qsprep/filter.hpp"
#include "qsprep/grid.hpp"
#include "qsprep/hamiltonian.hpp"
#include "qsprep/spectral.hpp"

namespace py = pybind11;
using namespace qsprep;

namespace {

FilterSchedule schedule_for(const Hamiltonian& h, const std::string& mode, double B, std::optional<int> k,
                            std::optional<int> s_max) {
  const int n = h.grid().qubits();
  if (mode == "basic") return basic_schedule(n, h.p(), k, s_max);
  if (mode == "refined") return refined_schedule(n, h.p(), B, k, s_max);
  throw Error(Errc::InvalidArgument, "schedule must be basic or refined");
}

py::object json_loads(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

}  // namespace

PYBIND11_MODULE(_qsprep, m) {
  m.doc() = "Eigenvalue-filtering state preparation simulator";

  py::register_exception<Error>(m, "QsprepError", PyExc_ValueError);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<int>(), py::arg("qubits"))
      .def_property_readonly("qubits", &GridSpec::qubits)
      .def_property_readonly("size", &GridSpec::size)
      .def_property_readonly("spacing", &GridSpec::spacing)
      .def("nodes", &GridSpec::nodes);

  py::class_<TargetFunction>(m, "TargetFunction")
      .def_readonly("grid", &TargetFunction::grid)
      .def_readonly("samples", &TargetFunction::samples)
      .def_readonly("name", &TargetFunction::name);

  m.def(
      "gaussian_target",
      [](int n, double center, double sigma) { return sample_function(gaussian(center, sigma), GridSpec(n), "gaussian"); },
      py::arg("n"), py::arg("center") = 0.5, py::arg("sigma") = 0.1);
  m.def(
      "sine_target", [](int n) { return sample_function(sine_mode(), GridSpec(n), "sine"); }, py::arg("n"));
  m.def(
      "table_target",
      [](const std::vector<double>& table, int n) { return sample_table(table, GridSpec(n)); }, py::arg("table"),
      py::arg("n"));
  m.def("extend_with_tails", &extend_with_tails, py::arg("target"), py::arg("decay_ratio"));
  m.def("kinetic_eigenvalues", [](int n) { return kinetic_eigenvalues(GridSpec(n)); }, py::arg("n"));

  py::class_<Hamiltonian>(m, "Hamiltonian")
      .def(py::init([](const TargetFunction& t) { return assemble_hamiltonian(build_potential(t), t.grid); }),
           py::arg("target"))
      .def_property_readonly("potential", [](const Hamiltonian& h) { return h.potential().values; })
      .def_property_readonly("norm_bound", &Hamiltonian::norm_bound)
      .def_property_readonly("p", &Hamiltonian::p)
      .def("dense", &Hamiltonian::dense)
      .def("apply", [](const Hamiltonian& h, const RealVector& x) { return h.apply(x); });

  py::class_<SpectralData, std::shared_ptr<SpectralData>>(m, "SpectralData")
      .def_readonly("eigenvalues", &SpectralData::eigenvalues)
      .def_readonly("eigenvectors", &SpectralData::eigenvectors)
      .def_readonly("gap", &SpectralData::gap);
  m.def("diagonalize", [](const Hamiltonian& h) { return std::make_shared<SpectralData>(diagonalize(h)); });
  m.def("eigen_overlaps", &eigen_overlaps, py::arg("spectral"), py::arg("state"));
  m.def("phase_of", &phase_of, py::arg("lam"), py::arg("t"));
  m.def("apply_exact_U", &apply_exact_U, py::arg("spectral"), py::arg("t"), py::arg("state"));

  m.def("g_function", &g_function, py::arg("phi"), py::arg("j") = 0);
  m.def(
      "splitting_defect",
      [](const Hamiltonian& h, int order, double duration) {
        return splitting_defect(make_splitting(order), h, duration);
      },
      py::arg("hamiltonian"), py::arg("order"), py::arg("duration"));
  m.def(
      "predict_amplitudes",
      [](const ComplexVector& d, const SpectralData& spec, const Hamiltonian& h, const std::string& schedule,
         double B, std::optional<int> k, std::optional<int> s_max) {
        const auto pred = predict_amplitudes(d, spec, schedule_for(h, schedule, B, k, s_max));
        return py::make_tuple(pred.amplitudes, pred.success);
      },
      py::arg("d"), py::arg("spectral"), py::arg("hamiltonian"), py::arg("schedule") = "basic", py::arg("B") = 1.0,
      py::arg("k") = py::none(), py::arg("s_max") = py::none());
  m.def(
      "run_filter",
      [](const ComplexVector& initial, const TargetFunction& target, const std::string& schedule, double B,
         std::optional<int> k, std::optional<int> s_max) {
        const Hamiltonian h = assemble_hamiltonian(build_potential(target), target.grid);
        auto spec = std::make_shared<const SpectralData>(diagonalize(h));
        const auto res = run_filter(SimState{initial}, schedule_for(h, schedule, B, k, s_max),
                                    Propagator::exact(spec), Measurement{}, target.samples);
        return py::make_tuple(res.state.amplitudes, res.ledger.cumulative_success, res.ledger.final_fidelity);
      },
      "Exact-evolution, postselected filter run; returns (state, cum_success, final_fidelity).",
      py::arg("initial"), py::arg("target"), py::arg("schedule") = "basic", py::arg("B") = 1.0,
      py::arg("k") = py::none(), py::arg("s_max") = py::none());
  m.def(
      "verify_probability_perturbation",
      [](const Hamiltonian& h, double t, int trials, double eps, std::uint64_t seed) {
        return json_loads(to_json(verify_probability_perturbation(h, t, trials, eps, seed)));
      },
      py::arg("hamiltonian"), py::arg("t"), py::arg("trials"), py::arg("eps"), py::arg("seed") = 1);
  m.def(
      "verify_state_perturbation",
      [](const Hamiltonian& h, double t, int trials, double eps, std::uint64_t seed) {
        return json_loads(to_json(verify_state_perturbation(h, t, trials, eps, seed)));
      },
      py::arg("hamiltonian"), py::arg("t"), py::arg("trials"), py::arg("eps"), py::arg("seed") = 1);

  m.def("parse_config", [](const std::string& text) { return emit_config(parse_config(text)); },
        "Validates key=value settings and returns the normalized form.");
  m.def(
      "run_experiment",
      [](const std::string& config_text) {
        const ExperimentResult res = run_experiment(parse_config(config_text));
        return py::make_tuple(json_loads(record_to_json(res.record)), ledger_to_jsonl(res.ledger, res.summary));
      },
      "Runs the full pipeline; returns (record dict, JSON-lines ledger).", py::arg("config"));
}
