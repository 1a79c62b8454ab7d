#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "clearsheet/audit.hpp"
#include "clearsheet/formula.hpp"

namespace py = pybind11;
namespace cs = clearsheet;

namespace {

// Finite scores come back as int, Opaque as None.
py::object score_object(cs::Score s) {
  if (s.is_opaque()) return py::none();
  return py::int_(*s.finite());
}

cs::CellAddress parse_cell(const std::string& text) {
  auto bang = text.rfind('!');
  if (bang == std::string::npos) throw py::value_error("address needs a sheet: " + text);
  auto area = cs::parse_area(text.substr(bang + 1), text.substr(0, bang));
  if (!area || area->top_left != area->bottom_right) throw py::value_error("not a single cell: " + text);
  return area->top_left;
}

}  // namespace

PYBIND11_MODULE(_clearsheet, m) {
  m.doc() = "Steps-from-transparency scoring for spreadsheet workbooks";
  m.attr("__version__") = cs::kToolVersion;

  py::register_exception<cs::LoadError>(m, "LoadError");
  py::register_exception<cs::ConfigError>(m, "ConfigError");
  py::register_exception<cs::FormulaError>(m, "FormulaError");

  m.def(
      "audit_json",
      [](const std::vector<std::filesystem::path>& paths, const std::string& config_text) {
        cs::AuditConfig cfg = cs::parse_config(config_text);
        cs::AuditReport report;
        {
          py::gil_scoped_release release;
          report = cs::run_audit(paths, cfg);
        }
        return py::make_tuple(cs::emit_structured(report), report.exit_code);
      },
      py::arg("paths"), py::arg("config_text") = "",
      "Audits the workbooks; returns (structured report text, exit code).");

  m.def(
      "cell_score",
      [](const std::filesystem::path& path, const std::string& address) {
        cs::WorkbookModel wb = cs::load_workbook(path);
        return score_object(cs::cell_score(wb, parse_cell(address)).total);
      },
      py::arg("path"), py::arg("address"), "Score of one cell; None when opaque.");

  m.def(
      "model_score",
      [](const std::filesystem::path& path) { return score_object(cs::model_score(cs::load_workbook(path)).total); },
      py::arg("path"), "Model score of a workbook; None when opaque.");

  m.def(
      "normalize_formula", [](const std::string& text) { return cs::serialize(cs::parse_formula(text)); },
      py::arg("text"), "Parses a formula and prints it back in canonical form.");

  m.def(
      "dump_formula", [](const std::string& text) { return cs::dump_ast(cs::parse_formula(text)); }, py::arg("text"));

  m.def(
      "parameter_grade",
      [](const std::string& function, int index) {
        return std::string(cs::to_string(cs::parameter_grade(cs::FunctionCatalog::builtin(), function, index)));
      },
      py::arg("function"), py::arg("index"), "Grade of a 0-based argument in the built-in catalog.");

  m.def(
      "summary_line",
      [](std::optional<int> total) {
        return cs::summary_line(total ? cs::Score::steps(*total) : cs::Score::opaque());
      },
      py::arg("total"));
}
