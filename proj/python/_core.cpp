#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "msfem/harness.hpp"

namespace py = pybind11;
using namespace msfem;

namespace {

py::dict tensor_dict(const Tensor2& t) {
  py::dict d;
  d["xx"] = t.xx;
  d["xy"] = t.xy;
  d["yy"] = t.yy;
  return d;
}

py::dict row_dict(const ConvergenceRow& r) {
  py::dict d;
  d["n_coarse"] = r.n_coarse;
  d["H"] = r.H;
  d["h"] = r.h;
  d["m"] = r.m;
  d["epsilon"] = r.epsilon;
  d["basis_type"] = to_string(r.basis_type);
  d["err_interp_energy"] = r.err_interp_energy;
  d["err_bestapprox_energy"] = r.err_bestapprox_energy;
  d["err_pg_energy"] = r.err_pg_energy;
  d["err_l2_hom"] = r.err_l2_hom;
  d["max_jump"] = r.max_jump;
  d["lambda"] = r.lambda;
  d["cg_iters_fine"] = r.cg_iters_fine;
  d["max_jump_u_hat"] = r.max_jump_u_hat;
  d["max_basis_energy"] = r.max_basis_energy;
  d["lagrange_deviation"] = r.lagrange_deviation;
  d["standard_q1_energy"] = r.standard_q1_energy;
  return d;
}

RunConfig config_from_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "<string>");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multiscale finite element lab";

  py::register_exception<StageError>(m, "StageError");

  py::class_<RunConfig>(m, "RunConfig")
      .def_readwrite("n_coarse_list", &RunConfig::n_coarse_list)
      .def_readwrite("refine", &RunConfig::refine)
      .def_readwrite("n_fine", &RunConfig::n_fine)
      .def_readwrite("m", &RunConfig::m)
      .def_readwrite("epsilon", &RunConfig::epsilon)
      .def_readwrite("coefficient", &RunConfig::coefficient)
      .def_readwrite("coefficient_params", &RunConfig::coefficient_params)
      .def_readwrite("source", &RunConfig::source)
      .def_readwrite("n_cell", &RunConfig::n_cell)
      .def_readwrite("output", &RunConfig::output)
      .def_property_readonly("basis_type", &RunConfig::basis_type_name);

  m.def("parse_config", &config_from_text, py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));
  m.def("validate_config", &validate_config, py::arg("config"));

  m.def(
      "run_convergence",
      [](const RunConfig& c) {
        validate_config(c);
        const ConvergenceResult r = run_convergence(c);
        py::list rows;
        for (const auto& row : r.rows) rows.append(row_dict(row));
        py::dict out;
        out["rows"] = rows;
        out["csv"] = r.csv;
        out["summary"] = r.summary;
        out["warnings"] = r.warnings;
        return out;
      },
      py::arg("config"));

  m.def(
      "run_cell",
      [](const RunConfig& c) {
        const CellRunResult r = run_cell(c);
        py::dict out;
        out["kappa_bar"] = tensor_dict(r.kappa_bar);
        out["raw_matrix"] = r.raw_matrix;
        out["n_cell"] = r.cell.n_cell;
        out["chi1"] = r.cell.chi1;
        out["chi2"] = r.cell.chi2;
        out["files"] = r.files;
        return out;
      },
      py::arg("config"));

  m.def(
      "run_basis_dump",
      [](const RunConfig& c, int element) {
        const BasisDumpResult r = run_basis_dump(c, element);
        py::dict out;
        out["owner"] = r.patch.owner;
        py::dict sets;
        for (const auto& [type, set] : r.sets) {
          py::dict s;
          s["rcond"] = set.rcond;
          py::list rows;
          for (int q = 0; q < 4; ++q) {
            py::list row;
            for (int j = 0; j < 4; ++j) row.append(set.lagrange(q, j));
            rows.append(row);
          }
          s["lagrange"] = rows;
          sets[py::str(to_string(type))] = s;
        }
        out["sets"] = sets;
        out["files"] = r.files;
        return out;
      },
      py::arg("config"), py::arg("element"));

  m.def(
      "run_jumps", [](const RunConfig& c) { return run_jumps(c).csv; }, py::arg("config"));

  m.def(
      "effective_tensor",
      [](const std::string& coefficient, int n_cell) {
        RunConfig c = config_from_text("coefficient = " + coefficient + "\n");
        c.n_cell = n_cell;
        return tensor_dict(run_cell(c).kappa_bar);
      },
      py::arg("coefficient"), py::arg("n_cell") = 64);

  m.def(
      "fit_rate", [](const std::vector<double>& H, const std::vector<double>& e) { return fit_rate(H, e); },
      py::arg("H"), py::arg("errors"));
  m.def(
      "fit_resonance_model",
      [](const std::vector<double>& H, const std::vector<double>& e, double eps) {
        const ResonanceFit f = fit_resonance_model(H, e, eps);
        py::dict d;
        d["a"] = f.a;
        d["b"] = f.b;
        d["r2"] = f.r2;
        return d;
      },
      py::arg("H"), py::arg("errors"), py::arg("epsilon"));

  m.def("format_double", &format_double);
  m.attr("CSV_HEADER") = kCsvHeader;
}
