// Copyright 2026 The qequil Authors
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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qequil/errors.h"
#include "qequil/experiments.h"
#include "qequil/hamiltonians.h"
#include "qequil/markov2.h"
#include "qequil/matcore.h"
#include "qequil/results.h"

namespace py = pybind11;

namespace {

py::object cell_to_py(const qequil::Cell& c) {
  return std::visit([](const auto& v) -> py::object { return py::cast(v); }, c);
}

py::dict result_to_dict(const qequil::ExperimentResult& r) {
  py::list rows;
  for (const auto& row : r.table.rows) {
    py::list out;
    for (const auto& c : row) out.append(cell_to_py(c));
    rows.append(out);
  }
  py::dict d;
  d["kind"] = r.kind;
  d["seed"] = r.seed;
  d["columns"] = r.table.columns;
  d["rows"] = rows;
  d["csv"] = qequil::to_csv(r.table);
  d["summary"] = qequil::summary_json(r);
  d["attachments"] = r.attachments;
  return d;
}

qequil::ExperimentConfig parse(const std::string& kind, const std::string& config_json) {
  return qequil::config_from_json(config_json, qequil::kind_from_name(kind));
}

}  // namespace

PYBIND11_MODULE(_qequil, m) {
  m.doc() = "Bindings for the qequil experiment drivers and chain utilities";

  // Translators run newest first, so the base class goes in before ConfigError.
  py::register_exception<qequil::Error>(m, "QequilError", PyExc_RuntimeError);
  py::register_exception<qequil::ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def(
      "default_config",
      [](const std::string& kind) {
        return qequil::config_to_json(qequil::default_config(qequil::kind_from_name(kind)));
      },
      py::arg("kind"), "Default configuration for an experiment kind, as JSON text.");

  m.def(
      "run_experiment",
      [](const std::string& kind, const std::string& config_json) {
        qequil::ExperimentConfig cfg = parse(kind, config_json);
        if (cfg.threads <= 0) cfg.threads = 1;
        qequil::ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = qequil::run_experiment(cfg);
        }
        return result_to_dict(r);
      },
      py::arg("kind"), py::arg("config_json") = "{}",
      "Run one experiment. Returns columns, rows, CSV text and the summary JSON.");

  m.def(
      "write_experiment",
      [](const std::string& kind, const std::string& config_json, const std::string& out_dir,
         const std::string& stem) {
        qequil::ExperimentConfig cfg = parse(kind, config_json);
        if (cfg.threads <= 0) cfg.threads = 1;
        py::gil_scoped_release release;
        qequil::emit_results(qequil::run_experiment(cfg), out_dir, stem);
      },
      py::arg("kind"), py::arg("config_json"), py::arg("out_dir"), py::arg("stem"));

  m.def("trace_norm", [](const qequil::ComplexMatrix& a) { return qequil::trace_norm(a); });
  m.def("gibbs_weights", &qequil::gibbs_weights, py::arg("energies"), py::arg("beta"));
  m.def(
      "exact_chain",
      [](const qequil::RealVector& e, double beta) { return qequil::exact_chain(e, beta).matrix(); },
      py::arg("energies"), py::arg("beta"));
  m.def(
      "approximate_chain",
      [](const qequil::RealVector& e, double beta, int m_bits) {
        return qequil::approximate_chain(qequil::phase_kernel(e, m_bits), beta).matrix();
      },
      py::arg("energies"), py::arg("beta"), py::arg("m_bits"));
  m.def(
      "stationary_distribution",
      [](const qequil::RealMatrix& p) { return qequil::stationary_distribution(qequil::MarkovMatrix(p)); },
      py::arg("chain"));
  m.def("dirichlet_probability", &qequil::dirichlet_probability, py::arg("x"), py::arg("outcomes"));
}
