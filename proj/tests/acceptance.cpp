// Runs each acceptance criterion and prints one PASS/FAIL line per criterion.
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>

#include "formula_corpus.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace clearsheet;
using testsupport::at;
using testsupport::load_fixture;

namespace {

struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string show(Score s) { return to_string(s); }

void golden_lookup(Check& c) {
  ScoreBreakdown b = cell_score(load_fixture("vlookup_grid"), at("Sheet1!B1"));
  c.expect(b.total == Score::steps(-2), "B1 total " + show(b.total));
  c.expect(b.items.size() == 2, "item count " + std::to_string(b.items.size()));
  if (b.items.size() == 2) {
    c.expect(b.items[0].kind == "formula-inspection" && b.items[0].cost == Score::steps(-1), "inspection item");
    c.expect(b.items[1].kind == "function-help" && b.items[1].cost == Score::steps(-1) &&
                 b.items[1].description.find("range_lookup") != std::string::npos,
             "range_lookup help item");
  }
}

void golden_payment(Check& c) {
  Score near = cell_score(load_fixture("pmt_near"), at("Loan!B1")).total;
  ScoreBreakdown far = cell_score(load_fixture("pmt_far"), at("Payment!B1"));
  c.expect(near == Score::steps(0), "near " + show(near));
  c.expect(far.total == Score::steps(-4), "far " + show(far.total));
  int nav = 0;
  for (const auto& i : far.items) {
    if (i.kind == "navigation" && i.cost == Score::steps(-1)) ++nav;
  }
  c.expect(nav == 4 && far.items.size() == 4, "far items are not four -1 navigations");
}

void golden_structured(Check& c) {
  Score s = cell_score(load_fixture("structured_net_income"), at("Tax!E5")).total;
  c.expect(s == Score::steps(0), "net income " + show(s));
}

void golden_opaque(Check& c) {
  Score lit = cell_score(load_fixture("literal_in_formula"), at("Inputs!B6")).total;
  c.expect(lit.is_opaque(), "literal 12 gives " + show(lit));
  Score div = cell_score(load_fixture("div_zero"), at("Sales!B3")).total;
  c.expect(div.is_opaque(), "#DIV/0! gives " + show(div));
  Score ind = cell_score(load_fixture("unconstrained_indirect"), at("Lookup!B3")).total;
  c.expect(ind.is_opaque(), "unconstrained INDIRECT gives " + show(ind));
  WorkbookModel wb = load_fixture("constrained_indirect");
  Scorer s(wb);
  for (const char* a : {"Scenarios!B21", "Scenarios!B22", "Scenarios!B23"}) {
    c.expect(!s.cell(at(a)).total.is_opaque(), std::string("constrained lookup ") + a + " is opaque");
  }
}

void catalog_fidelity(Check& c) {
  const FunctionCatalog& cat = FunctionCatalog::builtin();
  c.expect(parameter_grade(cat, "VLOOKUP", 2) == ParamGrade::tooltip_sufficient, "VLOOKUP col_index_num");
  c.expect(parameter_grade(cat, "VLOOKUP", 3) == ParamGrade::help_sufficient, "VLOOKUP range_lookup");
  c.expect(parameter_grade(cat, "PMT", 0) == ParamGrade::help_sufficient, "PMT rate");
  c.expect(parameter_grade(cat, "PMT", 1) == ParamGrade::insufficient, "PMT nper");
}

void properties(Check& c) {
  for (int v = -50; v <= 0; ++v) {
    Score f = Score::steps(v);
    c.expect(score_add(f, Score::opaque()).is_opaque() && score_add(Score::opaque(), f).is_opaque(),
             "absorption at " + std::to_string(v));
  }
  c.expect(score_add(Score::opaque(), Score::opaque()).is_opaque(), "opaque + opaque");

  std::mt19937 rng(11);
  int cases = 0;
  int visible = 0;
  for (int i = 0; i < 2000; ++i) {
    props::RandomLayout l = props::random_layout(rng);
    ++cases;
    bool base = co_visible(l.wb, l.cells, l.vic);
    c.expect(base == props::oracle_co_visible(l.wb, l.cells, l.vic), "co_visible disagrees with oracle");
    if (!base) continue;
    ++visible;
    VicinityConfig bigger = l.vic;
    bigger.rows_visible += std::uniform_int_distribution<int>(0, 30)(rng);
    bigger.cols_visible += std::uniform_int_distribution<int>(0, 15)(rng);
    c.expect(co_visible(l.wb, l.cells, bigger), "co_visible not monotone");
    std::size_t n = l.cells.size();
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<CellAddress> sub;
      for (std::size_t k = 0; k < n; ++k) {
        if (mask & (1u << k)) sub.push_back(l.cells[k]);
      }
      c.expect(co_visible(l.wb, sub, l.vic), "co_visible not hereditary");
    }
  }
  c.expect(cases >= 1000 && visible > 200, "too few co_visible cases");

  std::mt19937 evict(20240611);
  for (int t = 0; t < 300; ++t) {
    props::EvictionOutcome o = props::eviction_trial(evict);
    bool ok = !o.before.is_opaque() && !o.after.is_opaque() &&
              *o.after.finite() - *o.before.finite() == o.expected_delta;
    c.expect(ok, "eviction trial " + std::to_string(t) + ": " + show(o.before) + " -> " + show(o.after));
  }
}

void ledgers(Check& c) {
  int small = 0;
  for (const auto& name : testsupport::ledger_names()) {
    auto ledger = testsupport::read_ledger(testsupport::fixture_dir() / (name + ".ledger"));
    ModelScore m = model_score(load_fixture(name));
    if (m.occupied_count <= 30) ++small;
    auto problems = testsupport::ledger_mismatches(ledger, m);
    c.expect(problems.empty(), name + ": " + testsupport::join(problems, "; "));
  }
  c.expect(small >= 10, "too few ledgered fixtures");
}

void parser_corpus(Check& c) {
  std::vector<std::string> all = corpus::worked_example_formulas();
  auto synth = corpus::synthetic_formulas(200, 20240611);
  all.insert(all.end(), synth.begin(), synth.end());
  std::set<std::size_t> kinds;
  std::set<LiteralKind> literal_kinds;
  for (const auto& text : all) {
    try {
      FormulaAst a = parse_formula(text);
      std::string once = serialize(a);
      FormulaAst b = parse_formula(once);
      c.expect(structurally_equal(a, b) && serialize(b) == once, "round trip " + text);
      if (a.root) corpus::collect_kinds(*a.root, kinds, literal_kinds);
    } catch (const std::exception& e) {
      c.expect(false, "parse " + text + ": " + e.what());
    }
  }
  c.expect(kinds.size() == std::variant_size_v<decltype(Node::v)>, "node kinds covered " + std::to_string(kinds.size()));
  c.expect(literal_kinds.size() == 6, "literal kinds covered " + std::to_string(literal_kinds.size()));
}

void determinism(Check& c) {
  std::vector<std::filesystem::path> paths;
  for (const auto& n : testsupport::ledger_names()) paths.push_back(testsupport::fixture(n));
  paths.push_back(testsupport::fixture("not_a_workbook"));
  AuditConfig cfg;
  std::string a = emit_structured(run_audit(paths, cfg));
  std::string b = emit_structured(run_audit(paths, cfg));
  c.expect(a == b, "structured reports differ");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* what;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "lookup grid B1 scores -2 (inspection, range_lookup help)", golden_lookup},
      {2, "PMT scores 0 near and -4 far as four navigations", golden_payment},
      {3, "structured-reference net income scores 0", golden_structured},
      {4, "literal, #DIV/0!, unconstrained INDIRECT opaque; constrained lookup finite", golden_opaque},
      {5, "catalog reproduces the four stated parameter gradings", catalog_fidelity},
      {6, "absorption, co-visibility and vicinity-eviction properties", properties},
      {7, "fixture models equal their hand-computed ledgers", ledgers},
      {8, "formula corpus parses and round-trips, all node kinds covered", parser_corpus},
      {9, "two batch runs give byte-identical structured reports", determinism},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    bool ok = c.failures.empty();
    std::printf("%s %d %s\n", ok ? "PASS" : "FAIL", cr.id, cr.what);
    for (std::size_t i = 0; i < c.failures.size() && i < 10; ++i) std::printf("    %s\n", c.failures[i].c_str());
    if (!ok) ++failed;
  }
  return failed ? 1 : 0;
}
