#include <doctest.h>

#include "clearsheet/catalog.hpp"
#include "clearsheet/lexicon.hpp"

using namespace clearsheet;

TEST_CASE("reference gradings in the built-in catalog") {
  const FunctionCatalog& cat = FunctionCatalog::builtin();
  CHECK(parameter_grade(cat, "VLOOKUP", 2) == ParamGrade::tooltip_sufficient);
  CHECK(parameter_grade(cat, "VLOOKUP", 3) == ParamGrade::help_sufficient);
  CHECK(parameter_grade(cat, "PMT", 0) == ParamGrade::help_sufficient);
  CHECK(parameter_grade(cat, "PMT", 1) == ParamGrade::insufficient);
  CHECK(parameter_grade(cat, "vlookup", 2) == ParamGrade::tooltip_sufficient);
  CHECK(cat.find("VLOOKUP")->param(3)->name == "range_lookup");
  CHECK(cat.size() > 50);
}

TEST_CASE("unknown functions and positions fall back to the configured grade") {
  FunctionCatalog cat = FunctionCatalog::builtin();
  CHECK(parameter_grade(cat, "NOSUCHFN", 0) == ParamGrade::insufficient);
  CHECK(parameter_grade(cat, "VLOOKUP", 4) == ParamGrade::insufficient);
  cat.unknown_grade = ParamGrade::help_sufficient;
  CHECK(parameter_grade(cat, "NOSUCHFN", 0) == ParamGrade::help_sufficient);
}

TEST_CASE("error-handling and indirect flags") {
  const FunctionCatalog& cat = FunctionCatalog::builtin();
  CHECK(is_error_handling_function(cat, "IFERROR"));
  CHECK(is_error_handling_function(cat, "IFNA"));
  CHECK_FALSE(is_error_handling_function(cat, "SUM"));
  CHECK(cat.find("INDIRECT")->indirect_class);
  CHECK(cat.find("OFFSET")->indirect_class);
}

TEST_CASE("catalog text format") {
  auto cat = parse_catalog(
      "# comment\n"
      "\n"
      "SUM;1;255;number=insufficient;\n"
      "ROUND;2;2;number=insufficient,num_digits=tooltip;\n"
      "IFERROR;2;2;value=insufficient,value_if_error=tooltip;error-handling\n");
  CHECK(cat.size() == 3);
  // The last parameter repeats up to the maximum arity.
  CHECK(parameter_grade(cat, "SUM", 200) == ParamGrade::insufficient);
  CHECK(cat.find("SUM")->param(254));
  CHECK_FALSE(cat.find("SUM")->param(255));
  CHECK(parameter_grade(cat, "ROUND", 1) == ParamGrade::tooltip_sufficient);
  CHECK(is_error_handling_function(cat, "IFERROR"));
}

TEST_CASE("catalog errors carry a line number") {
  auto line_of = [](const char* text) {
    try {
      parse_catalog(text);
    } catch (const CatalogError& e) {
      return std::pair(e.kind(), e.line());
    }
    return std::pair(CatalogError::Kind::unreadable, -1);
  };
  CHECK(line_of("SUM;1;2;number=sometimes;") == std::pair(CatalogError::Kind::parse_error, 1));
  CHECK(line_of("# x\nSUM;2;1;number=tooltip;") == std::pair(CatalogError::Kind::parse_error, 2));
  CHECK(line_of("SUM;1;2;number=tooltip;\nSUM;1;2;number=tooltip;") ==
        std::pair(CatalogError::Kind::duplicate_function, 2));
  CHECK(line_of("SUM;1;2;number=tooltip;sparkly") == std::pair(CatalogError::Kind::parse_error, 1));
  CHECK(line_of("SUM;one;2;number=tooltip;") == std::pair(CatalogError::Kind::parse_error, 1));
  CHECK_THROWS_AS(load_catalog("/nonexistent/catalog.txt"), CatalogError);
}

TEST_CASE("term lists") {
  TermList t = parse_term_list("# units\nUSD\n  Months Per Year \nre:^[a-z]+/[a-z]+$\n");
  CHECK(t.contains("usd"));
  CHECK(t.contains("months per year"));
  CHECK_FALSE(t.contains("kg/day"));
  CHECK(t.matches("kg/day"));
  CHECK_FALSE(t.matches("kg per day"));
  try {
    parse_term_list("ok\nre:([unclosed\n", "units.lex");
    FAIL("expected a lexicon error");
  } catch (const LexiconError& e) {
    CHECK(e.line() == 2);
    CHECK(e.file() == "units.lex");
  }
  const Lexicons& lex = Lexicons::builtin();
  CHECK(lex.units.contains("USD"));
  CHECK(lex.formats.matches("mm/dd/yyyy"));
  CHECK(lex.documentation_sheets.contains("Documentation"));
  CHECK(lex.identity.matches("tblScenario1"));
}
