#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace clearsheet {

inline constexpr int kMaxRows = 1048576;
inline constexpr int kMaxCols = 16384;

struct CellAddress {
  std::string sheet;
  int row = 1;  // 1-based
  int col = 1;  // 1-based

  auto operator<=>(const CellAddress&) const = default;
  bool operator==(const CellAddress&) const = default;
};

// Rectangle on one sheet, corners inclusive.
struct AreaRef {
  CellAddress top_left;
  CellAddress bottom_right;

  auto operator<=>(const AreaRef&) const = default;
  bool operator==(const AreaRef&) const = default;

  const std::string& sheet() const { return top_left.sheet; }
  int rows() const { return bottom_right.row - top_left.row + 1; }
  int cols() const { return bottom_right.col - top_left.col + 1; }
  bool contains(const CellAddress& a) const;
  static AreaRef single(const CellAddress& a) { return {a, a}; }
};

enum class ErrorCode { div0, na, ref, name, value, num, null_intersection };

std::string_view to_string(ErrorCode e);
std::optional<ErrorCode> parse_error_code(std::string_view text);

struct Empty {
  bool operator==(const Empty&) const = default;
};

using CellValue = std::variant<Empty, double, std::string, bool, ErrorCode>;

std::string display_value(const CellValue& v);

struct CellRecord {
  CellAddress address;
  CellValue stored_value;
  std::optional<std::string> formula_text;  // always begins with '='
  std::string number_format = "General";
  std::optional<std::string> comment_text;
  std::optional<std::string> validation_message;
  std::optional<std::vector<std::string>> validation_list;

  bool has_formula() const { return formula_text.has_value(); }
  bool is_occupied() const;
  bool is_text() const { return std::holds_alternative<std::string>(stored_value); }
  bool is_error() const { return std::holds_alternative<ErrorCode>(stored_value); }

  bool operator==(const CellRecord&) const = default;
};

struct NameConstant {
  std::string text;  // the refers-to text without '='
  bool operator==(const NameConstant&) const = default;
};

// Refers-to text that is neither a plain area nor a constant, kept verbatim.
struct NameExpression {
  std::string text;
  bool operator==(const NameExpression&) const = default;
};

struct DefinedName {
  std::string name;
  std::variant<AreaRef, NameConstant, NameExpression> refers_to;
  std::optional<std::string> scope_sheet;  // absent = workbook scope

  bool operator==(const DefinedName&) const = default;
};

bool is_valid_defined_name(std::string_view name);

enum class ConnectionKind { ms_query, power_query, other };

std::string_view to_string(ConnectionKind k);

struct DataConnection {
  ConnectionKind kind = ConnectionKind::other;
  std::string name;
  std::string definition_text;

  bool operator==(const DataConnection&) const = default;
};

struct TableModel {
  std::string name;
  AreaRef area;  // includes header and totals rows
  std::vector<std::string> header_row;
  std::optional<std::vector<std::string>> uom_row;
  std::optional<DataConnection> connection;
  int header_row_count = 1;
  int totals_row_count = 0;

  int first_data_row() const { return area.top_left.row + header_row_count; }
  int last_data_row() const { return area.bottom_right.row - totals_row_count; }
  std::optional<int> column_index(std::string_view column_name) const;  // 0-based

  bool operator==(const TableModel&) const = default;
};

enum class SheetState { visible, hidden, very_hidden };

enum class Visibility { visible, hidden_row, hidden_column, hidden_sheet, very_hidden_sheet };

std::string_view to_string(Visibility v);

struct VisibilityState {
  Visibility state = Visibility::visible;
  bool is_protected = false;
  bool password_disclosed = false;

  bool operator==(const VisibilityState&) const = default;
};

struct Sheet {
  std::string name;
  SheetState state = SheetState::visible;
  std::set<int> hidden_rows;
  std::set<int> hidden_cols;
  int frozen_rows = 0;
  int frozen_cols = 0;
  bool is_protected = false;
  std::map<std::pair<int, int>, CellRecord> cells;  // keyed (row, col)

  const CellRecord* find(int row, int col) const;

  bool operator==(const Sheet&) const = default;
};

class WorkbookError : public std::runtime_error {
 public:
  enum class Kind { address_out_of_range, unknown_table, unknown_sheet, invalid_model };
  WorkbookError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Immutable snapshot of a workbook. Construct with WorkbookBuilder or load_workbook.
class WorkbookModel {
 public:
  WorkbookModel() = default;

  const std::vector<Sheet>& sheets() const { return sheets_; }
  const std::vector<DefinedName>& defined_names() const { return names_; }
  const std::vector<TableModel>& tables() const { return tables_; }
  bool structure_locked() const { return structure_locked_; }
  bool passwords_disclosed() const { return passwords_disclosed_; }

  const Sheet* sheet(std::string_view name) const;
  std::optional<std::size_t> sheet_index(std::string_view name) const;
  const CellRecord* cell(const CellAddress& a) const;
  const TableModel* table(std::string_view name) const;
  const TableModel* table_at(const CellAddress& a) const;
  // Sheet-scoped names shadow workbook-scoped ones.
  const DefinedName* defined_name(std::string_view name, std::string_view from_sheet) const;
  std::vector<const DefinedName*> names_covering(const CellAddress& a) const;

  // Occupied cells inside the area, row-major.
  std::vector<const CellRecord*> cells_in(const AreaRef& area) const;

  bool operator==(const WorkbookModel&) const = default;

 private:
  friend class WorkbookBuilder;

  std::vector<Sheet> sheets_;
  std::vector<DefinedName> names_;
  std::vector<TableModel> tables_;
  bool structure_locked_ = false;
  bool passwords_disclosed_ = false;
  std::set<std::string> disclosed_sheets_;

  friend VisibilityState visibility(const WorkbookModel& wb, const CellAddress& addr);
};

class WorkbookBuilder {
 public:
  WorkbookBuilder& add_sheet(std::string name, SheetState state = SheetState::visible);

  // Cell setters; the sheet must already exist.
  WorkbookBuilder& set_value(const CellAddress& a, CellValue value, std::string number_format = "General");
  WorkbookBuilder& set_formula(const CellAddress& a, std::string formula_text, CellValue cached = Empty{},
                               std::string number_format = "General");
  WorkbookBuilder& set_comment(const CellAddress& a, std::string text);
  WorkbookBuilder& set_validation(const CellAddress& a, std::optional<std::string> message,
                                  std::optional<std::vector<std::string>> list);
  WorkbookBuilder& set_number_format(const CellAddress& a, std::string number_format);

  WorkbookBuilder& hide_row(std::string_view sheet, int row);
  WorkbookBuilder& hide_col(std::string_view sheet, int col);
  WorkbookBuilder& freeze(std::string_view sheet, int rows, int cols);
  WorkbookBuilder& protect_sheet(std::string_view sheet);
  WorkbookBuilder& lock_structure();
  WorkbookBuilder& disclose_passwords(bool all = true);
  WorkbookBuilder& disclose_sheet_password(std::string sheet);

  WorkbookBuilder& add_name(DefinedName name);
  // Empty header list means "take the header texts from the header row cells".
  WorkbookBuilder& add_table(std::string name, AreaRef area, std::vector<std::string> header_row = {},
                             std::optional<DataConnection> connection = std::nullopt, int header_row_count = 1,
                             int totals_row_count = 0);

  bool has_sheet(std::string_view name) const;

  // Validates invariants and derives table UOM rows. Throws WorkbookError(invalid_model).
  WorkbookModel build() &&;

 private:
  Sheet& sheet_ref(std::string_view name);
  CellRecord& cell_ref(const CellAddress& a);

  WorkbookModel wb_;
};

std::vector<CellAddress> occupied_cells(const WorkbookModel& wb);
VisibilityState visibility(const WorkbookModel& wb, const CellAddress& addr);
std::optional<DataConnection> connection_for_table(const WorkbookModel& wb, std::string_view table);

// A1-notation helpers.
std::string column_letters(int col);
std::optional<int> column_number(std::string_view letters);
std::string format_address(const CellAddress& a, bool with_sheet = true);
std::string format_area(const AreaRef& a, bool with_sheet = true);
std::string quote_sheet_name(std::string_view sheet);
// Parses "A1", "$B$2", "Sheet1!A1:B5", "'My Sheet'!C3". default_sheet fills unqualified text.
std::optional<AreaRef> parse_area(std::string_view text, std::string_view default_sheet);

}  // namespace clearsheet
