#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "clearsheet/lexicon.hpp"
#include "clearsheet/steps.hpp"
#include "clearsheet/workbook.hpp"

namespace clearsheet {

enum class ValueType { quantity, date_time_duration, flag, identity, attribute, label_text, error, empty };

std::string_view to_string(ValueType v);

enum class PartKind { subject, unit, format, question };

std::string_view to_string(PartKind k);

enum class LabelSource {
  same_cell_format,
  vicinity_cell,
  comment,
  validation_message,
  defined_name,
  documentation_cell,
  function_tooltip,
  function_help
};

std::string_view to_string(LabelSource s);

struct LabelPart {
  PartKind kind = PartKind::subject;
  std::string text;
  LabelSource source = LabelSource::vicinity_cell;
  std::optional<CellAddress> cell;  // vicinity and documentation cells
  int steps = 0;

  bool operator==(const LabelPart&) const = default;
};

struct LabelResolution {
  ValueType type = ValueType::empty;
  std::vector<LabelPart> parts;  // at most one per kind
  std::set<PartKind> missing;    // required kinds with no part
  // Label-text cells in the cell's row or column that lie outside the window.
  std::vector<CellAddress> beyond_vicinity;

  const LabelPart* part(PartKind k) const;
  // Steps needed to read the parts that satisfy the requirement, each location paid once.
  int steps() const;
};

struct VicinityConfig {
  int rows_visible = 40;
  int cols_visible = 20;
  bool honor_frozen_panes = true;

  bool operator==(const VicinityConfig&) const = default;
};

struct LabelOptions {
  VicinityConfig vicinity;
  bool strict_labels = false;  // number formats never satisfy unit/format parts
  StepCosts costs;
};

// Fits in one window; frozen rows/columns are always on screen. Cells on different sheets never are.
bool co_visible(const WorkbookModel& wb, const std::vector<CellAddress>& cells, const VicinityConfig& cfg);

ValueType classify_value_type(const WorkbookModel& wb, const CellAddress& addr, const Lexicons& lex);
bool is_label_cell(const WorkbookModel& wb, const CellAddress& addr, const Lexicons& lex);

const std::set<PartKind>& required_parts(ValueType vt);

struct Sufficiency {
  bool sufficient = false;
  std::set<PartKind> missing;
};

Sufficiency sufficiency(ValueType vt, const LabelResolution& res);

// Parts a piece of label text supplies: unit/format words, a question, and the remaining subject.
std::vector<std::pair<PartKind, std::string>> label_text_parts(std::string_view text, const Lexicons& lex);

LabelResolution resolve_labels(const WorkbookModel& wb, const CellAddress& addr, const LabelOptions& opts,
                               const Lexicons& lex);

}  // namespace clearsheet
