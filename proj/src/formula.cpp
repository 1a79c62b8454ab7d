#include "clearsheet/formula.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

#include "formula_lexer.hpp"

namespace clearsheet {

using detail::Tok;
using detail::Token;

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

std::string strip_future_prefix(std::string_view name) {
  for (std::string_view prefix : {"_xlfn._xlws.", "_xlfn.", "_xlws.", "_xll."}) {
    if (upper(name.substr(0, prefix.size())) == upper(prefix)) return upper(name.substr(prefix.size()));
  }
  return upper(name);
}

Expr make(Span span, auto payload) {
  auto n = std::make_unique<Node>();
  n->span = span;
  n->v = std::move(payload);
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, std::vector<Token> toks) : text_(text), toks_(std::move(toks)) {}

  Expr parse() {
    if (peek().kind == Tok::end) fail({"expression"});
    Expr e = comparison(false);
    if (peek().kind != Tok::end) fail({"operator", "end of formula"});
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at_op(std::string_view op) const { return peek().kind == Tok::op && peek().text == op; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::end ? "end of formula" : "'" + t.text + "'";
    std::string msg = "syntax error at position " + std::to_string(t.span.begin) + ": found " + found + ", expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? " or " : "") + expected[i];
    throw FormulaError(FormulaError::Kind::syntax_error, t.span.begin, std::move(expected), msg);
  }

  Expr binary(Expr lhs, std::string op, Expr rhs) {
    Span span{lhs->span.begin, rhs->span.end};
    return make(span, BinaryOp{std::move(op), std::move(lhs), std::move(rhs)});
  }

  Expr comparison(bool union_ok) {
    Expr lhs = concat(union_ok);
    while (peek().kind == Tok::op &&
           (at_op("=") || at_op("<>") || at_op("<") || at_op(">") || at_op("<=") || at_op(">="))) {
      std::string op = next().text;
      lhs = binary(std::move(lhs), op, concat(union_ok));
    }
    return lhs;
  }

  Expr concat(bool union_ok) {
    Expr lhs = additive(union_ok);
    while (at_op("&")) {
      next();
      lhs = binary(std::move(lhs), "&", additive(union_ok));
    }
    return lhs;
  }

  Expr additive(bool union_ok) {
    Expr lhs = multiplicative(union_ok);
    while (at_op("+") || at_op("-")) {
      std::string op = next().text;
      lhs = binary(std::move(lhs), op, multiplicative(union_ok));
    }
    return lhs;
  }

  Expr multiplicative(bool union_ok) {
    Expr lhs = power(union_ok);
    while (at_op("*") || at_op("/")) {
      std::string op = next().text;
      lhs = binary(std::move(lhs), op, power(union_ok));
    }
    return lhs;
  }

  Expr power(bool union_ok) {
    Expr lhs = percent(union_ok);
    while (at_op("^")) {
      next();
      lhs = binary(std::move(lhs), "^", percent(union_ok));
    }
    return lhs;
  }

  Expr percent(bool union_ok) {
    Expr e = unary(union_ok);
    while (peek().kind == Tok::percent) {
      Span span{e->span.begin, next().span.end};
      e = make(span, PercentOp{std::move(e)});
    }
    return e;
  }

  Expr unary(bool union_ok) {
    if (at_op("-") || at_op("+")) {
      const Token& t = next();
      char op = t.text[0];
      std::size_t begin = t.span.begin;
      Expr operand = unary(union_ok);
      Span span{begin, operand->span.end};
      return make(span, UnaryOp{op, std::move(operand)});
    }
    return reference_union(union_ok);
  }

  Expr reference_union(bool union_ok) {
    Expr lhs = intersection();
    while (union_ok && peek().kind == Tok::comma) {
      next();
      lhs = binary(std::move(lhs), ",", intersection());
    }
    return lhs;
  }

  static bool starts_reference(const Token& t) {
    return t.kind == Tok::word || t.kind == Tok::sheet || t.kind == Tok::structured;
  }

  Expr intersection() {
    Expr lhs = range();
    while (peek().space_before && starts_reference(peek()) && unwrap(lhs.get())->is_reference()) {
      lhs = binary(std::move(lhs), " ", range());
    }
    return lhs;
  }

  Expr range() {
    Expr lhs = primary();
    while (peek().kind == Tok::colon) {
      next();
      Expr rhs = primary();
      const auto* a = lhs->as<CellRef>();
      const auto* b = rhs->as<CellRef>();
      if (a && b && (!b->qualifier || b->qualifier == a->qualifier)) {
        Span span{lhs->span.begin, rhs->span.end};
        lhs = make(span, RangeRef{a->qualifier, a->cell, b->cell, RangeShape::cells});
      } else {
        lhs = binary(std::move(lhs), ":", std::move(rhs));
      }
    }
    return lhs;
  }

  // Whole-column "A:C" or whole-row "1:3" ranges, detected before single-token parsing.
  Expr try_line_range(std::optional<SheetQualifier> qual, std::size_t begin) {
    const Token& a = peek();
    const Token& colon = peek(1);
    const Token& b = peek(2);
    if (colon.kind != Tok::colon || colon.space_before || b.space_before) return nullptr;
    bool a_ok = a.kind == Tok::word || a.kind == Tok::number;
    bool b_ok = b.kind == Tok::word || b.kind == Tok::number;
    if (!a_ok || !b_ok) return nullptr;
    auto ca = detail::parse_column_word(a.text);
    auto cb = detail::parse_column_word(b.text);
    if (a.kind == Tok::word && b.kind == Tok::word && ca.ok && cb.ok) {
      Span span{begin, b.span.end};
      pos_ += 3;
      return make(span, RangeRef{std::move(qual), ca.corner, cb.corner, RangeShape::columns});
    }
    auto ra = detail::parse_row_word(a.text);
    auto rb = detail::parse_row_word(b.text);
    if (ra.ok && rb.ok) {
      Span span{begin, b.span.end};
      pos_ += 3;
      return make(span, RangeRef{std::move(qual), ra.corner, rb.corner, RangeShape::rows});
    }
    return nullptr;
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::number: {
        if (Expr r = try_line_range(std::nullopt, t.span.begin)) return r;
        next();
        Literal lit;
        lit.kind = LiteralKind::number;
        lit.lexeme = t.text;
        lit.number = std::strtod(t.text.c_str(), nullptr);
        return make(t.span, std::move(lit));
      }
      case Tok::text: {
        next();
        Literal lit;
        lit.kind = LiteralKind::text;
        lit.text = t.text;
        return make(t.span, std::move(lit));
      }
      case Tok::error: {
        next();
        Literal lit;
        lit.kind = LiteralKind::error;
        lit.error = parse_error_code(t.text).value_or(ErrorCode::value);
        lit.lexeme = t.text;
        return make(t.span, std::move(lit));
      }
      case Tok::word: {
        if (Expr r = try_line_range(std::nullopt, t.span.begin)) return r;
        return word(std::nullopt, t.span.begin);
      }
      case Tok::sheet: {
        next();
        SheetQualifier qual = t.qualifier;
        std::size_t begin = t.span.begin;
        const Token& u = peek();
        if (Expr r = try_line_range(qual, begin)) return r;
        if (u.kind == Tok::word) return word(std::move(qual), begin);
        if (u.kind == Tok::error) {
          next();
          Literal lit;
          lit.kind = LiteralKind::error;
          lit.error = parse_error_code(u.text).value_or(ErrorCode::ref);
          lit.lexeme = u.text;
          return make(Span{begin, u.span.end}, std::move(lit));
        }
        fail({"reference after sheet qualifier"});
      }
      case Tok::structured: {
        next();
        return make(t.span, t.structured);
      }
      case Tok::function: return call();
      case Tok::lparen: {
        std::size_t begin = next().span.begin;
        Expr inner = comparison(true);
        if (peek().kind != Tok::rparen) fail({"')'"});
        Span span{begin, next().span.end};
        return make(span, Paren{std::move(inner)});
      }
      case Tok::lbrace: return array();
      default: fail({"operand"});
    }
  }

  Expr word(std::optional<SheetQualifier> qual, std::size_t begin) {
    const Token& t = next();
    Span span{begin, t.span.end};
    auto cell = detail::parse_cell_word(t.text);
    if (cell.ok) return make(span, CellRef{std::move(qual), cell.corner});
    std::string u = upper(t.text);
    if (!qual && (u == "TRUE" || u == "FALSE")) {
      Literal lit;
      lit.kind = LiteralKind::boolean;
      lit.boolean = u == "TRUE";
      return make(span, std::move(lit));
    }
    if (t.text.find('$') != std::string::npos) {
      throw FormulaError(FormulaError::Kind::unknown_token, t.span.begin, {},
                         "malformed reference '" + t.text + "' at position " + std::to_string(t.span.begin));
    }
    return make(span, NamedRef{std::move(qual), t.text});
  }

  Expr call() {
    const Token& name = next();
    std::size_t begin = name.span.begin;
    next();  // '('
    FuncCall fc;
    fc.name = strip_future_prefix(name.text);
    if (peek().kind == Tok::rparen) {
      Span span{begin, next().span.end};
      return make(span, std::move(fc));
    }
    for (;;) {
      if (peek().kind == Tok::comma || peek().kind == Tok::rparen) {
        Literal missing;
        missing.kind = LiteralKind::missing;
        std::size_t at = peek().span.begin;
        fc.args.push_back(make(Span{at, at}, std::move(missing)));
      } else {
        fc.args.push_back(comparison(false));
      }
      if (peek().kind == Tok::comma) {
        next();
        continue;
      }
      if (peek().kind == Tok::rparen) break;
      fail({"','", "')'"});
    }
    Span span{begin, next().span.end};
    return make(span, std::move(fc));
  }

  Literal array_element() {
    const Token& t = peek();
    Literal lit;
    bool negative = false;
    if (at_op("-") || at_op("+")) {
      negative = next().text == "-";
    }
    const Token& v = peek();
    if (v.kind == Tok::number) {
      next();
      lit.kind = LiteralKind::number;
      lit.lexeme = (negative ? "-" : "") + v.text;
      lit.number = std::strtod(lit.lexeme.c_str(), nullptr);
    } else if (negative) {
      fail({"number"});
    } else if (v.kind == Tok::text) {
      next();
      lit.kind = LiteralKind::text;
      lit.text = v.text;
    } else if (v.kind == Tok::error) {
      next();
      lit.kind = LiteralKind::error;
      lit.error = parse_error_code(v.text).value_or(ErrorCode::value);
      lit.lexeme = v.text;
    } else if (v.kind == Tok::word && (upper(v.text) == "TRUE" || upper(v.text) == "FALSE")) {
      next();
      lit.kind = LiteralKind::boolean;
      lit.boolean = upper(v.text) == "TRUE";
    } else {
      (void)t;
      fail({"array constant"});
    }
    return lit;
  }

  Expr array() {
    std::size_t begin = next().span.begin;
    Literal lit;
    lit.kind = LiteralKind::array;
    lit.rows.emplace_back();
    for (;;) {
      lit.rows.back().push_back(array_element());
      if (peek().kind == Tok::comma) {
        next();
      } else if (peek().kind == Tok::semicolon) {
        next();
        lit.rows.emplace_back();
      } else if (peek().kind == Tok::rbrace) {
        break;
      } else {
        fail({"','", "';'", "'}'"});
      }
    }
    Span span{begin, next().span.end};
    return make(span, std::move(lit));
  }

  std::string_view text_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

bool needs_bracket(std::string_view column) {
  return std::any_of(column.begin(), column.end(), [](unsigned char c) { return !(std::isalnum(c) || c == '_' || c >= 0x80); });
}

std::string escape_column(std::string_view column) {
  std::string out;
  for (char c : column) {
    if (c == '[' || c == ']' || c == '#' || c == '\'') out += '\'';
    out += c;
  }
  return out;
}

std::string region_keyword(TableRegion r) {
  switch (r) {
    case TableRegion::all: return "#All";
    case TableRegion::data: return "#Data";
    case TableRegion::headers: return "#Headers";
    case TableRegion::totals: return "#Totals";
    case TableRegion::this_row: return "#This Row";
  }
  return "#Data";
}

std::string serialize_structured(const StructuredRef& s) {
  std::string out = s.table.value_or("");
  bool this_row_only = s.regions.size() == 1 && s.regions.front() == TableRegion::this_row;
  if (this_row_only && !s.last_column) {
    if (!s.first_column) return out + "[@]";
    if (needs_bracket(*s.first_column)) return out + "[@[" + escape_column(*s.first_column) + "]]";
    return out + "[@" + escape_column(*s.first_column) + "]";
  }
  if (s.regions.empty() && s.first_column && !s.last_column) {
    if (needs_bracket(*s.first_column)) return out + "[[" + escape_column(*s.first_column) + "]]";
    return out + "[" + escape_column(*s.first_column) + "]";
  }
  if (s.regions.size() == 1 && !s.first_column) return out + "[" + region_keyword(s.regions.front()) + "]";
  if (s.regions.empty() && !s.first_column) return out + "[]";
  std::vector<std::string> items;
  for (TableRegion r : s.regions) items.push_back("[" + region_keyword(r) + "]");
  if (s.first_column) {
    std::string cols = "[" + escape_column(*s.first_column) + "]";
    if (s.last_column) cols += ":[" + escape_column(*s.last_column) + "]";
    items.push_back(cols);
  }
  out += "[";
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out + "]";
}

std::string serialize_qualifier(const std::optional<SheetQualifier>& q) {
  if (!q) return "";
  std::string full = (q->workbook ? "[" + *q->workbook + "]" : std::string()) + q->sheet;
  std::string quoted = quote_sheet_name(q->sheet);
  if (quoted == q->sheet) return full + "!";
  std::string out = "'";
  for (char c : full) {
    out += c;
    if (c == '\'') out += '\'';
  }
  return out + "'!";
}

std::string serialize_corner(const RefCorner& c, RangeShape shape) {
  std::string out;
  if (shape != RangeShape::rows) out += (c.col_abs ? "$" : "") + column_letters(c.col);
  if (shape != RangeShape::columns) out += (c.row_abs ? "$" : "") + std::to_string(c.row);
  return out;
}

std::string serialize_literal(const Literal& lit) {
  switch (lit.kind) {
    case LiteralKind::number: return lit.lexeme;
    case LiteralKind::text: {
      std::string out = "\"";
      for (char c : lit.text) {
        out += c;
        if (c == '"') out += '"';
      }
      return out + "\"";
    }
    case LiteralKind::boolean: return lit.boolean ? "TRUE" : "FALSE";
    case LiteralKind::error: return std::string(to_string(lit.error));
    case LiteralKind::missing: return "";
    case LiteralKind::array: {
      std::string out = "{";
      for (std::size_t r = 0; r < lit.rows.size(); ++r) {
        if (r) out += ";";
        for (std::size_t c = 0; c < lit.rows[r].size(); ++c) out += (c ? "," : "") + serialize_literal(lit.rows[r][c]);
      }
      return out + "}";
    }
  }
  return "";
}

void dump(const Node& n, int depth, std::ostringstream& os) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  struct V {
    const Node& n;
    int depth;
    std::ostringstream& os;
    std::string pad;
    void operator()(const Literal& l) const {
      static constexpr const char* kKinds[] = {"number", "text", "boolean", "error", "array", "missing"};
      os << pad << "Literal(" << kKinds[static_cast<int>(l.kind)] << ") " << serialize_literal(l) << "\n";
    }
    void operator()(const CellRef&) const { os << pad << "CellRef " << serialize(n) << "\n"; }
    void operator()(const RangeRef&) const { os << pad << "RangeRef " << serialize(n) << "\n"; }
    void operator()(const NamedRef&) const { os << pad << "NamedRef " << serialize(n) << "\n"; }
    void operator()(const StructuredRef& s) const {
      os << pad << "StructuredRef " << serialize(n) << " region=";
      if (s.regions.empty()) os << "data";
      for (std::size_t i = 0; i < s.regions.size(); ++i) os << (i ? "+" : "") << to_string(s.regions[i]);
      os << "\n";
    }
    void operator()(const FuncCall& f) const {
      os << pad << "FuncCall " << f.name << "\n";
      for (const auto& a : f.args) dump(*a, depth + 1, os);
    }
    void operator()(const BinaryOp& b) const {
      os << pad << "BinaryOp(" << (b.op == " " ? "intersect" : b.op) << ")\n";
      dump(*b.lhs, depth + 1, os);
      dump(*b.rhs, depth + 1, os);
    }
    void operator()(const UnaryOp& u) const {
      os << pad << "UnaryOp(" << u.op << ")\n";
      dump(*u.operand, depth + 1, os);
    }
    void operator()(const PercentOp& p) const {
      os << pad << "PercentOp\n";
      dump(*p.operand, depth + 1, os);
    }
    void operator()(const Paren& p) const {
      os << pad << "Paren\n";
      dump(*p.inner, depth + 1, os);
    }
  };
  std::visit(V{n, depth, os, pad}, n.v);
}

void collect_operands(const Node& n, std::optional<FunctionContext> direct, std::vector<FunctionContext>& enclosing,
                      std::vector<SourceOperand>& out) {
  auto leaf = [&](OperandKind kind) {
    SourceOperand op;
    op.kind = kind;
    op.leaf = &n;
    op.function_context = direct;
    op.enclosing_calls = enclosing;
    op.position = n.span;
    out.push_back(std::move(op));
  };
  if (n.as<Literal>()) return leaf(OperandKind::literal);
  if (n.as<CellRef>() || n.as<RangeRef>()) return leaf(OperandKind::cell_area);
  if (n.as<NamedRef>()) return leaf(OperandKind::named);
  if (n.as<StructuredRef>()) return leaf(OperandKind::structured);
  if (const auto* f = n.as<FuncCall>()) {
    for (std::size_t i = 0; i < f->args.size(); ++i) {
      FunctionContext ctx{f->name, static_cast<int>(i)};
      enclosing.push_back(ctx);
      collect_operands(*f->args[i], ctx, enclosing, out);
      enclosing.pop_back();
    }
    return;
  }
  if (const auto* b = n.as<BinaryOp>()) {
    collect_operands(*b->lhs, std::nullopt, enclosing, out);
    collect_operands(*b->rhs, std::nullopt, enclosing, out);
    return;
  }
  if (const auto* u = n.as<UnaryOp>()) return collect_operands(*u->operand, direct, enclosing, out);
  if (const auto* p = n.as<PercentOp>()) return collect_operands(*p->operand, direct, enclosing, out);
  if (const auto* p = n.as<Paren>()) return collect_operands(*p->inner, direct, enclosing, out);
}

bool is_literal_one(const Node* n) {
  n = unwrap(n);
  const auto* lit = n ? n->as<Literal>() : nullptr;
  return lit && lit->kind == LiteralKind::number && lit->number == 1.0;
}

void collect_indirect(const Node& n, std::vector<IndirectUse>& out) {
  if (const auto* f = n.as<FuncCall>()) {
    if (is_indirect_function(f->name)) {
      IndirectUse use;
      use.function = f->name;
      use.enclosing_span = n.span;
      use.call = &n;
      auto arg = [&](std::size_t i) -> const Node* { return i < f->args.size() ? unwrap(f->args[i].get()) : nullptr; };
      auto is_missing = [](const Node* a) {
        const auto* l = a ? a->as<Literal>() : nullptr;
        return !a || (l && l->kind == LiteralKind::missing);
      };
      if (f->name == "OFFSET") {
        const Node* ref = arg(0);
        if (ref && ref->as<StructuredRef>()) use.evidence.insert(ConstraintEvidence::table_argument);
        if (ref && (ref->as<CellRef>() || ref->as<RangeRef>())) {
          use.evidence.insert(ConstraintEvidence::literal_range_argument);
        }
        bool literal_size = f->args.size() >= 5 && is_literal_one(arg(3)) && is_literal_one(arg(4));
        bool implied_single = ref && ref->as<CellRef>() && is_missing(arg(3)) && is_missing(arg(4));
        if (literal_size || implied_single) use.evidence.insert(ConstraintEvidence::single_cell_offset);
      } else if (f->name == "INDIRECT") {
        const Node* ref = arg(0);
        const auto* lit = ref ? ref->as<Literal>() : nullptr;
        if (lit && lit->kind == LiteralKind::text) use.evidence.insert(ConstraintEvidence::literal_range_argument);
      } else {
        std::vector<std::size_t> range_args;
        if (f->name == "INDEX") range_args = {0};
        else if (f->name == "LOOKUP") range_args = {1};
        else range_args = {1};  // VLOOKUP / HLOOKUP table_array
        for (std::size_t i : range_args) {
          const Node* a = arg(i);
          if (a && (a->as<RangeRef>() || a->as<CellRef>() || a->as<StructuredRef>())) {
            use.evidence.insert(ConstraintEvidence::literal_range_argument);
          }
          if (a && a->as<StructuredRef>()) use.evidence.insert(ConstraintEvidence::table_argument);
        }
      }
      out.push_back(std::move(use));
    }
    for (const auto& a : f->args) collect_indirect(*a, out);
    return;
  }
  if (const auto* b = n.as<BinaryOp>()) {
    collect_indirect(*b->lhs, out);
    collect_indirect(*b->rhs, out);
  } else if (const auto* u = n.as<UnaryOp>()) {
    collect_indirect(*u->operand, out);
  } else if (const auto* p = n.as<PercentOp>()) {
    collect_indirect(*p->operand, out);
  } else if (const auto* p = n.as<Paren>()) {
    collect_indirect(*p->inner, out);
  }
}

}  // namespace

bool Literal::operator==(const Literal& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case LiteralKind::number: return lexeme == o.lexeme;
    case LiteralKind::text: return text == o.text;
    case LiteralKind::boolean: return boolean == o.boolean;
    case LiteralKind::error: return error == o.error;
    case LiteralKind::array: return rows == o.rows;
    case LiteralKind::missing: return true;
  }
  return false;
}

std::string_view to_string(TableRegion r) {
  switch (r) {
    case TableRegion::data: return "data";
    case TableRegion::headers: return "headers";
    case TableRegion::totals: return "totals";
    case TableRegion::this_row: return "this-row";
    case TableRegion::all: return "all";
  }
  return "data";
}

bool Node::is_leaf() const {
  return as<Literal>() || as<CellRef>() || as<RangeRef>() || as<NamedRef>() || as<StructuredRef>();
}

bool Node::is_reference() const {
  if (as<CellRef>() || as<RangeRef>() || as<NamedRef>() || as<StructuredRef>()) return true;
  if (const auto* b = as<BinaryOp>()) return b->op == ":" || b->op == " " || b->op == ",";
  if (const auto* f = as<FuncCall>()) return f->name == "OFFSET" || f->name == "INDIRECT" || f->name == "INDEX";
  return false;
}

FormulaAst parse_formula(std::string_view text) {
  if (text.empty() || text.front() != '=') {
    throw FormulaError(FormulaError::Kind::syntax_error, 0, {"'='"}, "formula must begin with '='");
  }
  Parser p(text, detail::tokenize(text));
  FormulaAst ast;
  ast.source = std::string(text);
  ast.root = p.parse();
  return ast;
}

std::string serialize(const Node& n) {
  struct V {
    const Node& n;
    std::string operator()(const Literal& l) const { return serialize_literal(l); }
    std::string operator()(const CellRef& c) const {
      return serialize_qualifier(c.qualifier) + serialize_corner(c.cell, RangeShape::cells);
    }
    std::string operator()(const RangeRef& r) const {
      return serialize_qualifier(r.qualifier) + serialize_corner(r.first, r.shape) + ":" +
             serialize_corner(r.last, r.shape);
    }
    std::string operator()(const NamedRef& r) const { return serialize_qualifier(r.qualifier) + r.name; }
    std::string operator()(const StructuredRef& s) const { return serialize_structured(s); }
    std::string operator()(const FuncCall& f) const {
      std::string out = f.name + "(";
      for (std::size_t i = 0; i < f.args.size(); ++i) out += (i ? "," : "") + serialize(*f.args[i]);
      return out + ")";
    }
    std::string operator()(const BinaryOp& b) const { return serialize(*b.lhs) + b.op + serialize(*b.rhs); }
    std::string operator()(const UnaryOp& u) const { return std::string(1, u.op) + serialize(*u.operand); }
    std::string operator()(const PercentOp& p) const { return serialize(*p.operand) + "%"; }
    std::string operator()(const Paren& p) const { return "(" + serialize(*p.inner) + ")"; }
  };
  return std::visit(V{n}, n.v);
}

std::string serialize(const FormulaAst& ast) { return "=" + serialize(*ast.root); }

bool structurally_equal(const Node& a, const Node& b) {
  if (a.v.index() != b.v.index()) return false;
  if (const auto* x = a.as<Literal>()) return *x == *b.as<Literal>();
  if (const auto* x = a.as<CellRef>()) return *x == *b.as<CellRef>();
  if (const auto* x = a.as<RangeRef>()) return *x == *b.as<RangeRef>();
  if (const auto* x = a.as<NamedRef>()) return *x == *b.as<NamedRef>();
  if (const auto* x = a.as<StructuredRef>()) return *x == *b.as<StructuredRef>();
  if (const auto* x = a.as<FuncCall>()) {
    const auto* y = b.as<FuncCall>();
    if (x->name != y->name || x->args.size() != y->args.size()) return false;
    for (std::size_t i = 0; i < x->args.size(); ++i) {
      if (!structurally_equal(*x->args[i], *y->args[i])) return false;
    }
    return true;
  }
  if (const auto* x = a.as<BinaryOp>()) {
    const auto* y = b.as<BinaryOp>();
    return x->op == y->op && structurally_equal(*x->lhs, *y->lhs) && structurally_equal(*x->rhs, *y->rhs);
  }
  if (const auto* x = a.as<UnaryOp>()) {
    const auto* y = b.as<UnaryOp>();
    return x->op == y->op && structurally_equal(*x->operand, *y->operand);
  }
  if (const auto* x = a.as<PercentOp>()) return structurally_equal(*x->operand, *b.as<PercentOp>()->operand);
  if (const auto* x = a.as<Paren>()) return structurally_equal(*x->inner, *b.as<Paren>()->inner);
  return false;
}

bool structurally_equal(const FormulaAst& a, const FormulaAst& b) {
  return a.root && b.root && structurally_equal(*a.root, *b.root);
}

std::string dump_ast(const FormulaAst& ast) {
  std::ostringstream os;
  dump(*ast.root, 0, os);
  return os.str();
}

std::string_view to_string(OperandKind k) {
  switch (k) {
    case OperandKind::literal: return "literal";
    case OperandKind::cell_area: return "cell-area";
    case OperandKind::named: return "named";
    case OperandKind::structured: return "structured";
  }
  return "literal";
}

std::vector<SourceOperand> operands(const FormulaAst& ast) {
  std::vector<SourceOperand> out;
  std::vector<FunctionContext> enclosing;
  if (ast.root) collect_operands(*ast.root, std::nullopt, enclosing, out);
  return out;
}

std::string_view to_string(ConstraintEvidence e) {
  switch (e) {
    case ConstraintEvidence::literal_range_argument: return "literal-range-argument";
    case ConstraintEvidence::table_argument: return "table-argument";
    case ConstraintEvidence::validation_constrained_input: return "validation-constrained-input";
    case ConstraintEvidence::single_cell_offset: return "single-cell-offset";
  }
  return "";
}

bool is_indirect_function(std::string_view name) {
  return name == "INDIRECT" || name == "OFFSET" || name == "LOOKUP" || name == "VLOOKUP" || name == "HLOOKUP" ||
         name == "INDEX";
}

std::vector<IndirectUse> indirect_uses(const FormulaAst& ast) {
  std::vector<IndirectUse> out;
  if (ast.root) collect_indirect(*ast.root, out);
  return out;
}

const Node* unwrap(const Node* n) {
  while (n) {
    if (const auto* p = n->as<Paren>()) {
      n = p->inner.get();
    } else if (const auto* u = n->as<UnaryOp>()) {
      n = u->operand.get();
    } else {
      break;
    }
  }
  return n;
}

std::string shift_formula(std::string_view text, int drow, int dcol) {
  auto toks = detail::tokenize(text);
  std::string out;
  std::size_t copied = 0;
  auto shift_corner = [&](RefCorner c, RangeShape shape) -> std::optional<std::string> {
    if (shape != RangeShape::rows && !c.col_abs) c.col += dcol;
    if (shape != RangeShape::columns && !c.row_abs) c.row += drow;
    if (shape != RangeShape::rows && (c.col < 1 || c.col > kMaxCols)) return std::nullopt;
    if (shape != RangeShape::columns && (c.row < 1 || c.row > kMaxRows)) return std::nullopt;
    return serialize_corner(c, shape);
  };
  auto replace = [&](const Span& span, const std::string& with) {
    out += std::string(text.substr(copied, span.begin - copied)) + with;
    copied = span.end;
  };
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Token& t = toks[i];
    bool colon_next = i + 2 < toks.size() && toks[i + 1].kind == Tok::colon;
    bool colon_prev = i >= 2 && toks[i - 1].kind == Tok::colon;
    if (t.kind == Tok::word) {
      if (auto c = detail::parse_cell_word(t.text); c.ok) {
        replace(t.span, shift_corner(c.corner, RangeShape::cells).value_or("#REF!"));
        continue;
      }
      auto col = detail::parse_column_word(t.text);
      bool partner_is_col = (colon_next && detail::parse_column_word(toks[i + 2].text).ok) ||
                            (colon_prev && detail::parse_column_word(toks[i - 2].text).ok);
      if (col.ok && partner_is_col) {
        replace(t.span, shift_corner(col.corner, RangeShape::columns).value_or("#REF!"));
        continue;
      }
    }
    if (t.kind == Tok::word || t.kind == Tok::number) {
      auto row = detail::parse_row_word(t.text);
      bool partner_is_row = (colon_next && detail::parse_row_word(toks[i + 2].text).ok) ||
                            (colon_prev && detail::parse_row_word(toks[i - 2].text).ok);
      if (row.ok && partner_is_row) replace(t.span, shift_corner(row.corner, RangeShape::rows).value_or("#REF!"));
    }
  }
  out += std::string(text.substr(copied));
  return out;
}

}  // namespace clearsheet
