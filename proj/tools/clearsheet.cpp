#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "clearsheet/audit.hpp"
#include "clearsheet/formula.hpp"

namespace cs = clearsheet;

namespace {

int run_audit_command(const std::vector<std::string>& files, const std::string& config_path,
                      const std::string& catalog_path, bool strict, const std::string& vicinity,
                      const std::string& chain_mode, const std::optional<int>& threshold, const std::string& format,
                      const std::string& out_path, bool timing, int jobs) {
  cs::AuditConfig cfg;
  if (!config_path.empty()) cfg = cs::load_config(config_path);
  if (!catalog_path.empty()) cfg.catalog_path = catalog_path;
  if (strict) cfg.scoring.strict_labels = true;
  if (!vicinity.empty()) cfg.scoring.vicinity = cs::parse_vicinity(vicinity, cfg.scoring.vicinity);
  if (!chain_mode.empty()) cfg.scoring.chain_mode = chain_mode == "per-path" ? cs::ChainMode::per_path : cs::ChainMode::set;
  if (threshold) {
    if (*threshold > 0) throw cs::ConfigError("--fail-threshold must be zero or negative");
    cfg.fail_threshold = threshold;
  }
  if (!format.empty()) cfg.format = format == "structured" ? cs::OutputFormat::structured : cs::OutputFormat::text;
  if (timing) cfg.timing = true;
  if (jobs > 0) cfg.jobs = jobs;

  std::vector<std::filesystem::path> paths(files.begin(), files.end());
  cs::AuditReport report = cs::run_audit(paths, cfg);
  std::string body = cs::emit(report, cfg.format);
  if (out_path.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw cs::ConfigError("cannot write '" + out_path + "'");
    out << body;
  }
  for (const auto& f : report.files) {
    if (f.load_error) std::cerr << "clearsheet: " << f.path << ": " << *f.load_error << "\n";
  }
  return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Static transparency audit for spreadsheet workbooks"};
  app.set_version_flag("--version", std::string(cs::kToolVersion));
  app.require_subcommand(1);

  auto* audit = app.add_subcommand("audit", "Score workbooks and report lint findings");
  std::vector<std::string> files;
  std::string config_path, catalog_path, vicinity, chain_mode, format, out_path;
  bool strict = false, timing = false;
  std::optional<int> threshold;
  int jobs = 0;
  audit->add_option("files", files, "XLSX/XLSM workbooks")->required();
  audit->add_option("--config", config_path, "key=value configuration file");
  audit->add_option("--catalog", catalog_path, "function parameter catalog");
  audit->add_flag("--strict-labels", strict, "number formats never satisfy unit or format labels");
  audit->add_option("--vicinity", vicinity, "window size as ROWSxCOLS (default 40x20)");
  audit->add_option("--chain-mode", chain_mode, "chain totals: set or per-path")->check(CLI::IsMember({"set", "per-path"}));
  audit->add_option("--fail-threshold", threshold, "exit 2 when a finite model score is below N (N <= 0)");
  audit->add_option("--format", format, "text or structured")->check(CLI::IsMember({"text", "structured"}));
  audit->add_option("--out", out_path, "write the report to a file");
  audit->add_flag("--timing", timing, "include per-file elapsed time");
  audit->add_option("--jobs", jobs, "parallel workers (default: one per core)")->check(CLI::PositiveNumber);

  auto* ast = app.add_subcommand("ast", "Print the syntax tree of a formula");
  std::string formula;
  ast->add_option("formula", formula, "formula text, starting with '='")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : cs::kExitLoadFailure;
  }

  try {
    if (*ast) {
      std::cout << cs::dump_ast(cs::parse_formula(formula));
      return 0;
    }
    return run_audit_command(files, config_path, catalog_path, strict, vicinity, chain_mode, threshold, format,
                             out_path, timing, jobs);
  } catch (const cs::FormulaError& e) {
    std::cerr << "clearsheet: " << e.what() << "\n";
    return cs::kExitLoadFailure;
  } catch (const std::exception& e) {
    std::cerr << "clearsheet: " << e.what() << "\n";
    return cs::kExitLoadFailure;
  }
}
