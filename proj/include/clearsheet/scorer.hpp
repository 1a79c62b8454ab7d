#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clearsheet/catalog.hpp"
#include "clearsheet/formula.hpp"
#include "clearsheet/labeling.hpp"
#include "clearsheet/lexicon.hpp"
#include "clearsheet/score.hpp"
#include "clearsheet/steps.hpp"
#include "clearsheet/workbook.hpp"

namespace clearsheet {

enum class ChainMode { set, per_path };

std::string_view to_string(ChainMode m);

struct ScoringConfig {
  VicinityConfig vicinity;
  bool strict_labels = false;
  StepCosts costs;
  ChainMode chain_mode = ChainMode::set;

  LabelOptions label_options() const { return LabelOptions{vicinity, strict_labels, costs}; }
};

enum class ItemLevel { surface, source };

std::string_view to_string(ItemLevel l);

// One counted step group, or the reason a cell is opaque.
struct BreakdownItem {
  ItemLevel level = ItemLevel::surface;
  std::string kind;         // short machine tag, e.g. "formula-inspection", "navigation", "literal"
  std::string description;  // human-readable
  Score cost;               // negative step count or Opaque
  std::string rule;         // lint rule id the item maps to; set for every opaque item
  std::optional<Span> span;
  std::optional<CellAddress> target;
  std::optional<LabelPart> label;

  bool operator==(const BreakdownItem&) const = default;
};

struct ScoreBreakdown {
  CellAddress address;
  ValueType type = ValueType::empty;
  bool has_formula = false;
  Score surface;
  Score source;
  Score total;
  std::vector<BreakdownItem> items;  // surface items first, then source items in operand order
  LabelResolution labels;

  const BreakdownItem* first_opaque_item() const;
};

struct TableItem {
  std::string table;
  std::optional<DataConnection> connection;
  Score cost;
  std::string description;
};

struct ModelScore {
  Score total;
  std::map<CellAddress, ScoreBreakdown> per_cell;  // occupied non-label cells
  std::vector<TableItem> table_items;
  std::vector<std::pair<CellAddress, std::string>> opaque_cells;  // in occupied-cell order
  long long finite_subtotal = 0;
  std::size_t occupied_count = 0;
  std::size_t label_count = 0;
};

// Scores one workbook. Results are memoized; the object is not safe for concurrent use,
// but independent Scorer instances over the same workbook are.
class Scorer {
 public:
  Scorer(const WorkbookModel& wb, ScoringConfig cfg = {}, const FunctionCatalog& catalog = FunctionCatalog::builtin(),
         const Lexicons& lex = Lexicons::builtin());
  ~Scorer();
  Scorer(const Scorer&) = delete;
  Scorer& operator=(const Scorer&) = delete;

  ValueType value_type(const CellAddress& a);
  const LabelResolution& labels(const CellAddress& a);

  // Surface part of the breakdown (surface, items of level surface).
  ScoreBreakdown surface(const CellAddress& a);
  // Source part; zero with no items for cells without a formula.
  ScoreBreakdown source(const CellAddress& a);
  const ScoreBreakdown& cell(const CellAddress& a);

  bool downstream_error_handled(const CellAddress& a);
  // Cells the formula at a reads, including constrained indirect candidates, row-major.
  const std::vector<CellAddress>& precedents(const CellAddress& a);
  bool in_cycle(const CellAddress& a);

  Score chain(const CellAddress& a);
  ModelScore model();

  const WorkbookModel& workbook() const { return wb_; }
  const ScoringConfig& config() const { return cfg_; }
  const FunctionCatalog& catalog() const { return catalog_; }
  const Lexicons& lexicons() const { return lex_; }

  // Parsed formula for a cell, or nullptr when the cell has no formula or it fails to parse.
  const FormulaAst* formula(const CellAddress& a);
  std::optional<std::string> formula_error(const CellAddress& a);

 private:
  struct Impl;
  const WorkbookModel& wb_;
  ScoringConfig cfg_;
  const FunctionCatalog& catalog_;
  const Lexicons& lex_;
  std::unique_ptr<Impl> impl_;
};

// Free-function forms; each builds a fresh Scorer.
ScoreBreakdown surface_score(const WorkbookModel& wb, const CellAddress& a, const ScoringConfig& cfg = {},
                             const Lexicons& lex = Lexicons::builtin());
ScoreBreakdown source_score(const WorkbookModel& wb, const CellAddress& a, const ScoringConfig& cfg = {},
                            const Lexicons& lex = Lexicons::builtin(),
                            const FunctionCatalog& catalog = FunctionCatalog::builtin());
ScoreBreakdown cell_score(const WorkbookModel& wb, const CellAddress& a, const ScoringConfig& cfg = {},
                          const Lexicons& lex = Lexicons::builtin(),
                          const FunctionCatalog& catalog = FunctionCatalog::builtin());
bool downstream_error_handled(const WorkbookModel& wb, const CellAddress& a,
                              const FunctionCatalog& catalog = FunctionCatalog::builtin());
Score chain_score(const WorkbookModel& wb, const CellAddress& a, const ScoringConfig& cfg = {},
                  const Lexicons& lex = Lexicons::builtin(),
                  const FunctionCatalog& catalog = FunctionCatalog::builtin());
ModelScore model_score(const WorkbookModel& wb, const ScoringConfig& cfg = {},
                       const Lexicons& lex = Lexicons::builtin(),
                       const FunctionCatalog& catalog = FunctionCatalog::builtin());

}  // namespace clearsheet
