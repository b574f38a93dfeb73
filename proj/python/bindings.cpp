// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "strsolve/bench.hpp"
#include "strsolve/smtlib.hpp"

namespace py = pybind11;
using namespace strsolve;

namespace {

bench::RunOptions options_from(const py::dict& d) {
  bench::RunOptions o;
  for (auto [k, v] : d) {
    auto key = k.cast<std::string>();
    if (key == "timeout") o.timeout_s = v.cast<double>();
    else if (key == "theory_branching") o.theory_branching = v.cast<bool>();
    else if (key == "case_split") o.case_split = v.cast<bool>();
    else if (key == "validate_model") o.validate_model = v.cast<bool>();
    else if (key == "model") o.produce_model = v.cast<bool>();
    else if (key == "debug_checks") o.debug_checks = v.cast<bool>();
    else if (key == "seed") o.seed = v.cast<std::uint64_t>();
    else if (key == "alphabet") o.alphabet = Alphabet::parse(v.cast<std::string>());
    else throw py::key_error("unknown option '" + key + "'");
  }
  return o;
}

py::dict report_dict(const bench::RunReport& r) {
  py::dict d;
  d["file"] = r.file;
  d["verdict"] = bench::outcome_name(r.verdict);
  d["reason"] = r.reason;
  d["time"] = r.time_s;
  d["stats"] = r.stats;
  d["exit_code"] = bench::exit_code(r);
  if (r.validation) d["validation"] = *r.validation;
  else d["validation"] = py::none();
  d["model"] = r.model;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "String constraint solver";

  m.def(
      "check",
      [](const std::string& script, const py::dict& options) {
        bench::RunOptions o = options_from(options);
        bench::RunReport r;
        {
          py::gil_scoped_release release;
          r = bench::run_script(script, o, "<string>");
        }
        return report_dict(r);
      },
      py::arg("script"), py::arg("options") = py::dict());

  m.def(
      "run_file",
      [](const std::string& path, const py::dict& options) {
        bench::RunOptions o = options_from(options);
        bench::RunReport r;
        {
          py::gil_scoped_release release;
          r = bench::run_file(path, o);
        }
        return report_dict(r);
      },
      py::arg("path"), py::arg("options") = py::dict());

  m.def(
      "run_suite",
      [](const std::string& dir, const py::dict& options, unsigned jobs) {
        bench::RunOptions o = options_from(options);
        bench::SuiteResult res;
        {
          py::gil_scoped_release release;
          res = bench::run_suite(dir, o, jobs);
        }
        py::list reports;
        for (const auto& r : res.reports) reports.append(report_dict(r));
        py::dict counts;
        for (auto o2 : bench::kOutcomes) counts[bench::outcome_name(o2)] = res.summary.counts[o2];
        py::dict out;
        out["reports"] = reports;
        out["counts"] = counts;
        out["total_time"] = res.summary.total_time_s;
        out["total_time_without_timeouts"] = res.summary.total_without_timeouts_s;
        out["summary"] = bench::format_summary(res.summary);
        out["csv"] = bench::to_csv(res.reports);
        return out;
      },
      py::arg("directory"), py::arg("options") = py::dict(), py::arg("jobs") = 1);

  m.def("tokenize", [](const std::string& text) {
    py::list out;
    static const char* names[] = {"lparen", "rparen", "symbol", "string", "numeral", "keyword"};
    for (const auto& t : smtlib::tokenize(text))
      out.append(py::make_tuple(names[static_cast<int>(t.kind)], t.text, t.pos.line, t.pos.column));
    return out;
  });

  m.def("decode_string_literal", [](const std::string& lexeme) { return smtlib::decode_string_literal(lexeme); });

  py::register_exception<smtlib::ParseError>(m, "ParseError", PyExc_ValueError);
}
