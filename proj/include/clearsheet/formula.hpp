#pragma once

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "clearsheet/workbook.hpp"

namespace clearsheet {

// Half-open character range into the formula text (the leading '=' is index 0).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

class FormulaError : public std::runtime_error {
 public:
  enum class Kind { syntax_error, unknown_token };
  FormulaError(Kind kind, std::size_t position, std::vector<std::string> expected, const std::string& what)
      : std::runtime_error(what), kind_(kind), position_(position), expected_(std::move(expected)) {}
  Kind kind() const { return kind_; }
  std::size_t position() const { return position_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  Kind kind_;
  std::size_t position_;
  std::vector<std::string> expected_;
};

struct SheetQualifier {
  std::optional<std::string> workbook;  // external book, e.g. "[Book.xlsx]" or "[1]" without brackets
  std::string sheet;
  bool operator==(const SheetQualifier&) const = default;
};

enum class LiteralKind { number, text, boolean, error, array, missing };

struct Literal {
  LiteralKind kind = LiteralKind::number;
  std::string lexeme;  // numbers keep their source spelling
  double number = 0;
  bool boolean = false;
  ErrorCode error = ErrorCode::value;
  std::string text;
  std::vector<std::vector<Literal>> rows;  // array constants only

  bool operator==(const Literal&) const;
};

struct RefCorner {
  int row = 0;  // 0 when the reference is a whole-column range
  int col = 0;  // 0 when the reference is a whole-row range
  bool row_abs = false;
  bool col_abs = false;
  bool operator==(const RefCorner&) const = default;
};

struct CellRef {
  std::optional<SheetQualifier> qualifier;
  RefCorner cell;
  bool operator==(const CellRef&) const = default;
};

enum class RangeShape { cells, columns, rows };

struct RangeRef {
  std::optional<SheetQualifier> qualifier;
  RefCorner first;
  RefCorner last;
  RangeShape shape = RangeShape::cells;
  bool operator==(const RangeRef&) const = default;
};

struct NamedRef {
  std::optional<SheetQualifier> qualifier;
  std::string name;
  bool operator==(const NamedRef&) const = default;
};

enum class TableRegion { data, headers, totals, this_row, all };

std::string_view to_string(TableRegion r);

struct StructuredRef {
  std::optional<std::string> table;  // absent means the table containing the formula
  std::vector<TableRegion> regions;  // empty means data
  std::optional<std::string> first_column;
  std::optional<std::string> last_column;  // set for [Col1]:[Col2]
  bool operator==(const StructuredRef&) const = default;
};

struct Node;
using Expr = std::unique_ptr<Node>;

struct FuncCall {
  std::string name;  // uppercase, without _xlfn./_xlws. prefixes
  std::vector<Expr> args;
};

struct BinaryOp {
  std::string op;  // + - * / ^ & = <> < > <= >= : , and " " for intersection
  Expr lhs;
  Expr rhs;
};

struct UnaryOp {
  char op = '-';
  Expr operand;
};

struct PercentOp {
  Expr operand;
};

struct Paren {
  Expr inner;
};

struct Node {
  Span span;
  std::variant<Literal, CellRef, RangeRef, NamedRef, StructuredRef, FuncCall, BinaryOp, UnaryOp, PercentOp, Paren> v;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&v);
  }
  bool is_leaf() const;
  bool is_reference() const;
};

struct FormulaAst {
  std::string source;
  Expr root;
};

// Throws FormulaError. The text must begin with '='.
FormulaAst parse_formula(std::string_view text);

// Canonical text ("=" + expression) with whitespace normalized away.
std::string serialize(const FormulaAst& ast);
std::string serialize(const Node& node);

// Equality of tree shape and payloads, ignoring spans.
bool structurally_equal(const Node& a, const Node& b);
bool structurally_equal(const FormulaAst& a, const FormulaAst& b);

// Writes an indented tree dump, one node per line.
std::string dump_ast(const FormulaAst& ast);

enum class OperandKind { literal, cell_area, named, structured };

std::string_view to_string(OperandKind k);

struct FunctionContext {
  std::string function;
  int arg_index = 0;  // 0-based
  bool operator==(const FunctionContext&) const = default;
};

// A leaf of the formula; points into the AST it came from.
struct SourceOperand {
  OperandKind kind = OperandKind::literal;
  const Node* leaf = nullptr;
  // Present iff the leaf is a direct argument of a call, looking through
  // parentheses and unary signs.
  std::optional<FunctionContext> function_context;
  // Every enclosing call, outermost first; used for error-handling checks.
  std::vector<FunctionContext> enclosing_calls;
  Span position;
};

std::vector<SourceOperand> operands(const FormulaAst& ast);

enum class ConstraintEvidence { literal_range_argument, table_argument, validation_constrained_input, single_cell_offset };

std::string_view to_string(ConstraintEvidence e);

struct IndirectUse {
  std::string function;
  std::set<ConstraintEvidence> evidence;
  Span enclosing_span;
  const Node* call = nullptr;
};

bool is_indirect_function(std::string_view upper_name);

// Calls to INDIRECT/OFFSET/LOOKUP/VLOOKUP/HLOOKUP/INDEX in depth-first order,
// with the structurally visible evidence filled in.
std::vector<IndirectUse> indirect_uses(const FormulaAst& ast);

// Strips parentheses and unary signs.
const Node* unwrap(const Node* n);

// Rewrites relative cell references by (drow, dcol); used to expand shared formulas.
std::string shift_formula(std::string_view text, int drow, int dcol);

}  // namespace clearsheet
