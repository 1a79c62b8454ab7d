#include <doctest.h>

#include <json.hpp>

#include "support.hpp"

using namespace clearsheet;
using testsupport::at;
using testsupport::fixture;
using testsupport::load_fixture;

namespace {

AuditResources builtin() { return load_resources(AuditConfig{}); }

std::vector<Finding> findings_for(const std::string& name) {
  return audit_file(fixture(name), AuditConfig{}, builtin()).findings;
}

bool has_finding(const std::vector<Finding>& fs, const std::string& rule, Severity sev) {
  return std::any_of(fs.begin(), fs.end(), [&](const Finding& f) { return f.rule_id == rule && f.severity == sev; });
}

}  // namespace

TEST_CASE("config files") {
  AuditConfig c = parse_config(
      "# defaults changed\n"
      "vicinity = 30x10\n"
      "steps.function_help = 2\n"
      "strict_labels = yes\n"
      "chain_mode = per-path\n"
      "fail_threshold = -5\n"
      "format = structured\n"
      "lexicon.units = /tmp/units.lex\n"
      "unknown_function_grade = help\n"
      "disclosed_sheets = Fees, Vault\n");
  CHECK(c.scoring.vicinity.rows_visible == 30);
  CHECK(c.scoring.vicinity.cols_visible == 10);
  CHECK(c.scoring.costs.function_help == 2);
  CHECK(c.scoring.strict_labels);
  CHECK(c.scoring.chain_mode == ChainMode::per_path);
  CHECK(c.fail_threshold == -5);
  CHECK(c.format == OutputFormat::structured);
  CHECK(c.lexicon_paths.at("units") == "/tmp/units.lex");
  CHECK(c.unknown_function_grade == ParamGrade::help_sufficient);
  CHECK(c.load.disclosed_sheets == std::vector<std::string>{"Fees", "Vault"});

  CHECK_THROWS_AS(parse_config("colour = blue\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("fail_threshold = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("steps.navigation = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("chain_mode = sometimes\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("lexicon.colours = x\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("no equals sign\n"), ConfigError);
}

TEST_CASE("vicinity text") {
  VicinityConfig v = parse_vicinity("25x8");
  CHECK(v.rows_visible == 25);
  CHECK(v.cols_visible == 8);
  CHECK_THROWS_AS(parse_vicinity("25"), ConfigError);
  CHECK_THROWS_AS(parse_vicinity("0x8"), ConfigError);
  CHECK_THROWS_AS(parse_vicinity("axb"), ConfigError);
}

TEST_CASE("exit codes rank worst first") {
  CHECK(worse_exit_code(kExitOk, kExitOpaque) == kExitOpaque);
  CHECK(worse_exit_code(kExitBelowThreshold, kExitOpaque) == kExitOpaque);
  CHECK(worse_exit_code(kExitOpaque, kExitLoadFailure) == kExitLoadFailure);
  CHECK(worse_exit_code(kExitOk, kExitBelowThreshold) == kExitBelowThreshold);
  CHECK(worse_exit_code(kExitOk, kExitOk) == kExitOk);
}

TEST_CASE("per-file and batch exit codes") {
  AuditConfig cfg;
  cfg.fail_threshold = -1;
  AuditReport r = run_audit({fixture("grid_inputs"), fixture("vlookup_grid"), fixture("div_zero"),
                             fixture("not_a_workbook"), fixture("absent")},
                            cfg);
  REQUIRE(r.files.size() == 5);
  CHECK(r.files[0].exit_code == kExitOk);
  CHECK(r.files[1].exit_code == kExitBelowThreshold);
  CHECK(r.files[2].exit_code == kExitOpaque);
  CHECK(r.files[3].exit_code == kExitLoadFailure);
  CHECK(r.files[3].load_error_kind == "not-ooxml");
  CHECK(r.files[4].exit_code == kExitLoadFailure);
  CHECK(r.files[4].digest.empty());
  CHECK(r.exit_code == kExitLoadFailure);
  CHECK(r.files[2].path == fixture("div_zero").string());
}

TEST_CASE("summary lines") {
  CHECK(summary_line(Score::steps(0)) == "TRANSPARENT (0 steps from transparency)");
  CHECK(summary_line(Score::steps(-4)) == "-4 steps from transparency");
  CHECK(summary_line(Score::opaque()) == "OPAQUE");
}

TEST_CASE("sha256 digests") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("structured report layout") {
  AuditReport r = run_audit({fixture("vlookup_grid"), fixture("not_a_workbook")}, AuditConfig{});
  auto j = nlohmann::ordered_json::parse(emit_structured(r));
  CHECK(j["schema"] == kReportSchema);
  CHECK(j["tool_version"] == kToolVersion);
  CHECK(j["config"]["vicinity"]["rows"] == 40);
  CHECK(j["config"]["catalog"] == "builtin");
  CHECK(j["exit_code"] == kExitLoadFailure);
  const auto& ok = j["files"][0];
  CHECK(ok["status"] == "ok");
  CHECK(ok["digest"].get<std::string>().rfind("sha256:", 0) == 0);
  CHECK(ok["model"]["total"] == -2);
  CHECK(ok["model"]["classification"] == "translucent");
  CHECK(ok["model"]["summary"] == "-2 steps from transparency");
  const auto& cells = ok["model"]["cells"];
  auto b1 = std::find_if(cells.begin(), cells.end(), [](const auto& c) { return c["cell"] == "Sheet1!B1"; });
  REQUIRE(b1 != cells.end());
  CHECK((*b1)["formula"] == "=VLOOKUP(A1,A3:B5,2,FALSE)");
  CHECK((*b1)["total"] == -2);
  CHECK((*b1)["items"].size() == 2);
  CHECK((*b1)["items"][1]["kind"] == "function-help");
  const auto& bad = j["files"][1];
  CHECK(bad["status"] == "load-error");
  CHECK(bad["model"].is_null());
  CHECK(bad["error"]["kind"] == "not-ooxml");
  CHECK_FALSE(ok.contains("timing_ms"));

  AuditConfig timed;
  timed.timing = true;
  auto t = nlohmann::ordered_json::parse(emit_structured(run_audit({fixture("grid_inputs")}, timed)));
  CHECK(t["files"][0].contains("timing_ms"));
  CHECK(emit_text(r).find("-2 steps from transparency") != std::string::npos);
}

TEST_CASE("every opaque cell has an error finding") {
  AuditConfig cfg;
  std::vector<std::filesystem::path> paths;
  for (const auto& n : testsupport::ledger_names()) paths.push_back(fixture(n));
  AuditReport r = run_audit(paths, cfg);
  for (const auto& f : r.files) {
    CAPTURE(f.path);
    REQUIRE(f.model);
    for (const auto& [addr, why] : f.model->opaque_cells) {
      CAPTURE(format_address(addr));
      bool found = std::any_of(f.findings.begin(), f.findings.end(), [&](const Finding& x) {
        return x.severity == Severity::error && x.address == addr;
      });
      CHECK(found);
    }
  }
}

TEST_CASE("lint rules fire on their fixtures") {
  CHECK(has_finding(findings_for("literal_in_formula"), "L1", Severity::error));
  CHECK(has_finding(findings_for("unconstrained_indirect"), "L2", Severity::error));
  CHECK(has_finding(findings_for("div_zero"), "L3", Severity::error));
  CHECK(has_finding(findings_for("hidden_sheets"), "L4", Severity::error));
  CHECK(has_finding(findings_for("hidden_sheets"), "L4", Severity::warn));
  CHECK(has_finding(findings_for("daisy_chain"), "L5", Severity::warn));
  CHECK(has_finding(findings_for("header_unfrozen"), "L6", Severity::error));
  CHECK(has_finding(findings_for("header_unfrozen"), "L7", Severity::warn));
  CHECK(has_finding(findings_for("circular"), "L9", Severity::error));
  CHECK(findings_for("grid_inputs").empty());
  for (const auto& r : lint_rules()) CHECK_FALSE(r.recommendation.empty());
  CHECK(lint_rules().size() == 10);
  CHECK(find_rule("L8"));
}

TEST_CASE("audits repeat byte for byte") {
  std::vector<std::filesystem::path> paths;
  for (const auto& n : testsupport::ledger_names()) paths.push_back(fixture(n));
  AuditConfig cfg;
  std::string a = emit_structured(run_audit(paths, cfg));
  cfg.jobs = 1;
  std::string b = emit_structured(run_audit(paths, cfg));
  CHECK(a == b);
}

TEST_CASE("models agree with the hand-computed ledgers") {
  for (const auto& name : testsupport::ledger_names()) {
    CAPTURE(name);
    auto ledger = testsupport::read_ledger(testsupport::fixture_dir() / (name + ".ledger"));
    auto problems = testsupport::ledger_mismatches(ledger, model_score(load_fixture(name)));
    CHECK_MESSAGE(problems.empty(), testsupport::join(problems, "; "));
  }
}

TEST_CASE("disclosed passwords do not reveal very hidden sheets") {
  LoadOptions opts;
  opts.passwords_disclosed = true;
  WorkbookModel wb = load_fixture("hidden_sheets", opts);
  CHECK(wb.passwords_disclosed());
  ModelScore m = model_score(wb);
  CHECK(m.per_cell.at(at("Fees!B1")).total == Score::steps(-2));
  CHECK(m.per_cell.at(at("Vault!B1")).total.is_opaque());
}
