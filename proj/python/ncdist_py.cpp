// Python bindings: JSON-level entry points plus a few numeric kernels on dense matrices.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ncdist/acceptance.hpp"
#include "ncdist/bounds.hpp"
#include "ncdist/figures.hpp"
#include "ncdist/metrics.hpp"
#include "ncdist/state_io.hpp"

namespace py = pybind11;
using namespace ncdist;

namespace {

// Documents cross the boundary as JSON text; the Python wrapper handles dict conversion.
std::string report_json(const std::string& doc, double tail_tol, int trunc, std::uint64_t seed) {
  ReportConfig cfg;
  cfg.tail_tol = tail_tol;
  cfg.cutoff = trunc;
  cfg.qsup.seed = seed;
  py::gil_scoped_release release;
  return report(parse_state_description(doc), cfg).to_json().dump();
}

std::string qsup_json_text(const std::string& doc, double tail_tol, int trunc, std::uint64_t seed) {
  const StateDescription d = parse_state_description(doc);
  const TruncationSpec t = trunc > 0 ? TruncationSpec::uniform(d.modes(), trunc, tail_tol) : truncation_for(d, tail_tol);
  QSupOptions opts;
  opts.seed = seed;
  py::gil_scoped_release release;
  nlohmann::json j = qsup_json(q_sup(density(d, t), {}, opts));
  if (const auto analytic = analytic_qsup(d)) j["analytic"] = qsup_json(*analytic);
  return j.dump();
}

py::dict figure_dict(const std::string& which, std::optional<double> from, std::optional<double> to, std::optional<int> steps,
                     bool lp_columns) {
  FigureOptions o;
  o.from = from;
  o.to = to;
  o.steps = steps;
  o.lp_columns = lp_columns;
  FigureTable table;
  {
    py::gil_scoped_release release;
    table = figure_table(parse_figure_kind(which), o);
  }
  py::dict out;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    std::vector<double> col;
    col.reserve(table.rows.size());
    for (const auto& row : table.rows) col.push_back(row[c]);
    out[py::str(table.header[c])] = col;
  }
  return out;
}

DensityMatrix single_mode(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) throw InvalidArgument("expected a non-empty square matrix");
  return DensityMatrix::from_dense(TruncationSpec::uniform(1, static_cast<int>(m.rows()) - 1), m);
}

py::list verify(const std::vector<std::string>& only, std::uint64_t seed) {
  AcceptanceOptions o;
  o.only = {only.begin(), only.end()};
  o.seed = seed;
  std::vector<CheckResult> results;
  {
    py::gil_scoped_release release;
    results = run_acceptance(o);
  }
  py::list out;
  for (const auto& r : results) {
    py::dict d;
    d["criterion"] = r.criterion;
    d["group"] = r.group;
    d["name"] = r.name;
    d["relation"] = to_string(r.relation);
    d["expected"] = r.expected;
    d["computed"] = r.computed;
    d["tolerance"] = r.tolerance;
    d["passed"] = r.passed;
    d["note"] = r.note;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_ncdist, m) {
  m.doc() = "Bounds on the nonclassical distance of quantum-optical states";

  static py::exception<Error> base(m, "NcdistError");
  static py::exception<SchemaError> schema(m, "SchemaError", PyExc_ValueError);
  static py::exception<InvalidArgument> invalid(m, "InvalidArgument", PyExc_ValueError);
  static py::exception<TruncationTooSmall> truncation(m, "TruncationTooSmall", base.ptr());
  static py::exception<NumericalError> numerical(m, "NumericalError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const SchemaError& e) {
      schema(e.what());
    } catch (const InvalidArgument& e) {
      invalid(e.what());
    } catch (const TruncationTooSmall& e) {
      truncation(e.what());
    } catch (const NumericalError& e) {
      numerical(e.what());
    } catch (const Error& e) {
      base(e.what());
    }
  });

  m.attr("DEFAULT_SEED") = kDefaultSeed;
  m.attr("DEFAULT_TAIL_TOL") = kDefaultTailTol;

  m.def("report_json", &report_json, py::arg("doc"), py::arg("tail_tol") = kDefaultTailTol, py::arg("trunc") = 0,
        py::arg("seed") = kDefaultSeed, "Bound report of a JSON state description, as JSON text");
  m.def("qsup_json", &qsup_json_text, py::arg("doc"), py::arg("tail_tol") = kDefaultTailTol, py::arg("trunc") = 0,
        py::arg("seed") = kDefaultSeed, "Husimi supremum of a JSON state description, as JSON text");
  m.def("canonical_id", [](const std::string& doc) { return canonical_id(parse_state_description(doc)); }, py::arg("doc"));
  m.def("figure", &figure_dict, py::arg("which"), py::arg("start") = py::none(), py::arg("stop") = py::none(),
        py::arg("steps") = py::none(), py::arg("lp_columns") = true, "Figure sweep as a dict of columns");
  m.def("verify", &verify, py::arg("only") = std::vector<std::string>{}, py::arg("seed") = kDefaultSeed,
        "Run the acceptance suite and return every check");
  m.def("acceptance_groups", &acceptance_groups);

  m.def("gamma_n", &gamma_n, py::arg("n"));
  m.def(
      "cat_qmax",
      [](const std::string& parity, double beta) {
        if (parity != "even" && parity != "odd") throw InvalidArgument("parity must be 'even' or 'odd'");
        const auto q = cat_qmax({parity == "even" ? Parity::even : Parity::odd, beta});
        return py::make_tuple(q.value, std::abs(q.argmax.front().alpha[0]));
      },
      py::arg("parity"), py::arg("beta"), "(m, alpha*) for the even or odd cat state");
  m.def(
      "trace_distance", [](const ComplexMatrix& a, const ComplexMatrix& b) { return trace_distance(single_mode(a), single_mode(b)); },
      py::arg("rho"), py::arg("sigma"));
  m.def(
      "fidelity", [](const ComplexMatrix& a, const ComplexMatrix& b) { return fidelity(single_mode(a), single_mode(b)); },
      py::arg("rho"), py::arg("sigma"));
  m.def(
      "density",
      [](const std::string& doc, double tail_tol) {
        const StateDescription d = parse_state_description(doc);
        return density(d, truncation_for(d, tail_tol)).to_dense();
      },
      py::arg("doc"), py::arg("tail_tol") = kDefaultTailTol, "Dense density matrix of a JSON state description");
}
