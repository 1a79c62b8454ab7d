#include "clearsheet/workbook.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace clearsheet {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool iequals(std::string_view a, std::string_view b) { return lower(a) == lower(b); }

// Parses "$A$1" / "A1" / "$A" / "1" style pieces. Returns (row, col); 0 means absent.
struct RefPiece {
  int row = 0;
  int col = 0;
};

std::optional<RefPiece> parse_piece(std::string_view s) {
  RefPiece p;
  std::size_t i = 0;
  if (i < s.size() && s[i] == '$') ++i;
  std::size_t letters_begin = i;
  while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
  if (i > letters_begin) {
    auto col = column_number(s.substr(letters_begin, i - letters_begin));
    if (!col) return std::nullopt;
    p.col = *col;
  }
  if (i < s.size() && s[i] == '$') {
    if (p.col == 0) return std::nullopt;
    ++i;
  }
  std::size_t digits_begin = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i != s.size()) return std::nullopt;
  if (i > digits_begin) {
    int row = 0;
    auto [ptr, ec] = std::from_chars(s.data() + digits_begin, s.data() + i, row);
    if (ec != std::errc{} || row < 1 || row > kMaxRows) return std::nullopt;
    p.row = row;
  }
  if (p.row == 0 && p.col == 0) return std::nullopt;
  return p;
}

}  // namespace

bool AreaRef::contains(const CellAddress& a) const {
  return a.sheet == top_left.sheet && a.row >= top_left.row && a.row <= bottom_right.row &&
         a.col >= top_left.col && a.col <= bottom_right.col;
}

std::string_view to_string(ErrorCode e) {
  switch (e) {
    case ErrorCode::div0: return "#DIV/0!";
    case ErrorCode::na: return "#N/A";
    case ErrorCode::ref: return "#REF!";
    case ErrorCode::name: return "#NAME?";
    case ErrorCode::value: return "#VALUE!";
    case ErrorCode::num: return "#NUM!";
    case ErrorCode::null_intersection: return "#NULL!";
  }
  return "#VALUE!";
}

std::optional<ErrorCode> parse_error_code(std::string_view text) {
  static constexpr ErrorCode kAll[] = {ErrorCode::div0, ErrorCode::na,  ErrorCode::ref,
                                       ErrorCode::name, ErrorCode::value, ErrorCode::num,
                                       ErrorCode::null_intersection};
  for (ErrorCode e : kAll) {
    if (iequals(text, to_string(e))) return e;
  }
  return std::nullopt;
}

std::string display_value(const CellValue& v) {
  struct Visitor {
    std::string operator()(const Empty&) const { return ""; }
    std::string operator()(double d) const {
      if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 1e15) {
        return std::to_string(static_cast<long long>(d));
      }
      std::ostringstream os;
      os.precision(15);
      os << d;
      return os.str();
    }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(bool b) const { return b ? "TRUE" : "FALSE"; }
    std::string operator()(ErrorCode e) const { return std::string(to_string(e)); }
  };
  return std::visit(Visitor{}, v);
}

bool CellRecord::is_occupied() const {
  if (formula_text) return true;
  if (std::holds_alternative<Empty>(stored_value)) return false;
  if (const auto* s = std::get_if<std::string>(&stored_value)) return !s->empty();
  return true;
}

bool is_valid_defined_name(std::string_view name) {
  if (name.empty() || name.size() > 255) return false;
  unsigned char first = name.front();
  if (!(std::isalpha(first) || first == '_' || first == '\\')) return false;
  for (unsigned char c : name) {
    if (!(std::isalnum(c) || c == '_' || c == '.' || c == '\\' || c >= 0x80)) return false;
  }
  if (parse_piece(name) && name.find_first_of("0123456789") != std::string_view::npos) {
    return false;  // looks like A1 / XFD100
  }
  std::string l = lower(name);
  if (l == "r" || l == "c") return false;
  // R1C1-style address
  if (l.size() > 1 && l[0] == 'r') {
    std::size_t i = 1;
    while (i < l.size() && std::isdigit(static_cast<unsigned char>(l[i]))) ++i;
    if (i < l.size() && l[i] == 'c') {
      ++i;
      while (i < l.size() && std::isdigit(static_cast<unsigned char>(l[i]))) ++i;
      if (i == l.size()) return false;
    }
  }
  return true;
}

std::string_view to_string(ConnectionKind k) {
  switch (k) {
    case ConnectionKind::ms_query: return "ms-query";
    case ConnectionKind::power_query: return "power-query";
    case ConnectionKind::other: return "other";
  }
  return "other";
}

std::optional<int> TableModel::column_index(std::string_view column_name) const {
  for (std::size_t i = 0; i < header_row.size(); ++i) {
    if (iequals(header_row[i], column_name)) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Visibility v) {
  switch (v) {
    case Visibility::visible: return "visible";
    case Visibility::hidden_row: return "hidden-row";
    case Visibility::hidden_column: return "hidden-column";
    case Visibility::hidden_sheet: return "hidden-sheet";
    case Visibility::very_hidden_sheet: return "very-hidden-sheet";
  }
  return "visible";
}

const CellRecord* Sheet::find(int row, int col) const {
  auto it = cells.find({row, col});
  return it == cells.end() ? nullptr : &it->second;
}

const Sheet* WorkbookModel::sheet(std::string_view name) const {
  auto idx = sheet_index(name);
  return idx ? &sheets_[*idx] : nullptr;
}

std::optional<std::size_t> WorkbookModel::sheet_index(std::string_view name) const {
  for (std::size_t i = 0; i < sheets_.size(); ++i) {
    if (iequals(sheets_[i].name, name)) return i;
  }
  return std::nullopt;
}

const CellRecord* WorkbookModel::cell(const CellAddress& a) const {
  const Sheet* s = sheet(a.sheet);
  return s ? s->find(a.row, a.col) : nullptr;
}

const TableModel* WorkbookModel::table(std::string_view name) const {
  for (const auto& t : tables_) {
    if (iequals(t.name, name)) return &t;
  }
  return nullptr;
}

const TableModel* WorkbookModel::table_at(const CellAddress& a) const {
  for (const auto& t : tables_) {
    if (iequals(t.area.sheet(), a.sheet) && a.row >= t.area.top_left.row && a.row <= t.area.bottom_right.row &&
        a.col >= t.area.top_left.col && a.col <= t.area.bottom_right.col) {
      return &t;
    }
  }
  return nullptr;
}

const DefinedName* WorkbookModel::defined_name(std::string_view name, std::string_view from_sheet) const {
  const DefinedName* global = nullptr;
  for (const auto& n : names_) {
    if (!iequals(n.name, name)) continue;
    if (n.scope_sheet) {
      if (iequals(*n.scope_sheet, from_sheet)) return &n;
    } else {
      global = &n;
    }
  }
  return global;
}

std::vector<const DefinedName*> WorkbookModel::names_covering(const CellAddress& a) const {
  std::vector<const DefinedName*> out;
  for (const auto& n : names_) {
    const auto* area = std::get_if<AreaRef>(&n.refers_to);
    if (!area) continue;
    if (n.scope_sheet && !iequals(*n.scope_sheet, a.sheet)) continue;
    if (iequals(area->sheet(), a.sheet) && a.row >= area->top_left.row && a.row <= area->bottom_right.row &&
        a.col >= area->top_left.col && a.col <= area->bottom_right.col) {
      out.push_back(&n);
    }
  }
  return out;
}

std::vector<const CellRecord*> WorkbookModel::cells_in(const AreaRef& area) const {
  std::vector<const CellRecord*> out;
  const Sheet* s = sheet(area.sheet());
  if (!s) return out;
  for (auto it = s->cells.lower_bound({area.top_left.row, 0}); it != s->cells.end(); ++it) {
    const auto& [key, rec] = *it;
    if (key.first > area.bottom_right.row) break;
    if (key.second < area.top_left.col || key.second > area.bottom_right.col) continue;
    if (rec.is_occupied()) out.push_back(&rec);
  }
  return out;
}

// ---- builder ---------------------------------------------------------------

WorkbookBuilder& WorkbookBuilder::add_sheet(std::string name, SheetState state) {
  if (name.empty()) throw WorkbookError(WorkbookError::Kind::invalid_model, "sheet name must be non-empty");
  if (has_sheet(name)) throw WorkbookError(WorkbookError::Kind::invalid_model, "duplicate sheet '" + name + "'");
  Sheet s;
  s.name = std::move(name);
  s.state = state;
  wb_.sheets_.push_back(std::move(s));
  return *this;
}

bool WorkbookBuilder::has_sheet(std::string_view name) const { return wb_.sheet_index(name).has_value(); }

Sheet& WorkbookBuilder::sheet_ref(std::string_view name) {
  auto idx = wb_.sheet_index(name);
  if (!idx) throw WorkbookError(WorkbookError::Kind::unknown_sheet, "unknown sheet '" + std::string(name) + "'");
  return wb_.sheets_[*idx];
}

CellRecord& WorkbookBuilder::cell_ref(const CellAddress& a) {
  if (a.row < 1 || a.row > kMaxRows || a.col < 1 || a.col > kMaxCols) {
    throw WorkbookError(WorkbookError::Kind::address_out_of_range, "address out of range");
  }
  Sheet& s = sheet_ref(a.sheet);
  auto& rec = s.cells[{a.row, a.col}];
  rec.address = CellAddress{s.name, a.row, a.col};
  return rec;
}

WorkbookBuilder& WorkbookBuilder::set_value(const CellAddress& a, CellValue value, std::string number_format) {
  auto& rec = cell_ref(a);
  rec.stored_value = std::move(value);
  rec.number_format = std::move(number_format);
  return *this;
}

WorkbookBuilder& WorkbookBuilder::set_formula(const CellAddress& a, std::string formula_text, CellValue cached,
                                              std::string number_format) {
  if (formula_text.empty() || formula_text.front() != '=') formula_text.insert(formula_text.begin(), '=');
  auto& rec = cell_ref(a);
  rec.formula_text = std::move(formula_text);
  rec.stored_value = std::move(cached);
  rec.number_format = std::move(number_format);
  return *this;
}

WorkbookBuilder& WorkbookBuilder::set_comment(const CellAddress& a, std::string text) {
  cell_ref(a).comment_text = std::move(text);
  return *this;
}

WorkbookBuilder& WorkbookBuilder::set_validation(const CellAddress& a, std::optional<std::string> message,
                                                 std::optional<std::vector<std::string>> list) {
  auto& rec = cell_ref(a);
  rec.validation_message = std::move(message);
  rec.validation_list = std::move(list);
  return *this;
}

WorkbookBuilder& WorkbookBuilder::set_number_format(const CellAddress& a, std::string number_format) {
  cell_ref(a).number_format = std::move(number_format);
  return *this;
}

WorkbookBuilder& WorkbookBuilder::hide_row(std::string_view sheet, int row) {
  sheet_ref(sheet).hidden_rows.insert(row);
  return *this;
}

WorkbookBuilder& WorkbookBuilder::hide_col(std::string_view sheet, int col) {
  sheet_ref(sheet).hidden_cols.insert(col);
  return *this;
}

WorkbookBuilder& WorkbookBuilder::freeze(std::string_view sheet, int rows, int cols) {
  auto& s = sheet_ref(sheet);
  s.frozen_rows = rows;
  s.frozen_cols = cols;
  return *this;
}

WorkbookBuilder& WorkbookBuilder::protect_sheet(std::string_view sheet) {
  sheet_ref(sheet).is_protected = true;
  return *this;
}

WorkbookBuilder& WorkbookBuilder::lock_structure() {
  wb_.structure_locked_ = true;
  return *this;
}

WorkbookBuilder& WorkbookBuilder::disclose_passwords(bool all) {
  wb_.passwords_disclosed_ = all;
  return *this;
}

WorkbookBuilder& WorkbookBuilder::disclose_sheet_password(std::string sheet) {
  wb_.disclosed_sheets_.insert(lower(sheet));
  return *this;
}

WorkbookBuilder& WorkbookBuilder::add_name(DefinedName name) {
  wb_.names_.push_back(std::move(name));
  return *this;
}

WorkbookBuilder& WorkbookBuilder::add_table(std::string name, AreaRef area, std::vector<std::string> header_row,
                                            std::optional<DataConnection> connection, int header_row_count,
                                            int totals_row_count) {
  TableModel t;
  t.name = std::move(name);
  t.area = std::move(area);
  t.header_row = std::move(header_row);
  t.connection = std::move(connection);
  t.header_row_count = header_row_count;
  t.totals_row_count = totals_row_count;
  wb_.tables_.push_back(std::move(t));
  return *this;
}

WorkbookModel WorkbookBuilder::build() && {
  using K = WorkbookError::Kind;
  for (auto& t : wb_.tables_) {
    const Sheet* s = wb_.sheet(t.area.sheet());
    if (!s) throw WorkbookError(K::invalid_model, "table '" + t.name + "' on unknown sheet");
    if (t.area.top_left.row > t.area.bottom_right.row || t.area.top_left.col > t.area.bottom_right.col) {
      throw WorkbookError(K::invalid_model, "table '" + t.name + "' has an inverted area");
    }
    t.area.top_left.sheet = s->name;
    t.area.bottom_right.sheet = s->name;
    const int width = t.area.cols();
    if (t.header_row.empty()) {
      for (int c = 0; c < width; ++c) {
        const CellRecord* h = t.header_row_count > 0 ? s->find(t.area.top_left.row, t.area.top_left.col + c) : nullptr;
        t.header_row.push_back(h ? display_value(h->stored_value) : "Column" + std::to_string(c + 1));
      }
    }
    if (static_cast<int>(t.header_row.size()) != width) {
      throw WorkbookError(K::invalid_model, "table '" + t.name + "' header length differs from area width");
    }
    std::set<std::string> seen;
    for (const auto& h : t.header_row) {
      if (!seen.insert(lower(h)).second) {
        throw WorkbookError(K::invalid_model, "table '" + t.name + "' repeats column '" + h + "'");
      }
    }
    if (t.connection && t.connection->kind != ConnectionKind::other && t.connection->definition_text.empty()) {
      throw WorkbookError(K::invalid_model, "connection for table '" + t.name + "' lacks a definition");
    }
    // A row directly above the header whose occupied cells are all constant text is the UOM row.
    t.uom_row.reset();
    const int above = t.area.top_left.row - 1;
    if (t.header_row_count > 0 && above >= 1) {
      std::vector<std::string> uom(static_cast<std::size_t>(width));
      bool any = false;
      bool all_text = true;
      for (int c = 0; c < width; ++c) {
        const CellRecord* r = s->find(above, t.area.top_left.col + c);
        if (!r || !r->is_occupied()) continue;
        if (r->has_formula() || !r->is_text()) {
          all_text = false;
          break;
        }
        uom[static_cast<std::size_t>(c)] = std::get<std::string>(r->stored_value);
        any = true;
      }
      if (any && all_text) t.uom_row = std::move(uom);
    }
  }
  for (auto& n : wb_.names_) {
    if (!is_valid_defined_name(n.name)) {
      throw WorkbookError(K::invalid_model, "invalid defined name '" + n.name + "'");
    }
    if (auto* area = std::get_if<AreaRef>(&n.refers_to)) {
      const Sheet* s = wb_.sheet(area->sheet());
      if (!s) throw WorkbookError(K::invalid_model, "name '" + n.name + "' refers to an unknown sheet");
      area->top_left.sheet = s->name;
      area->bottom_right.sheet = s->name;
    }
  }
  return std::move(wb_);
}

// ---- free operations -------------------------------------------------------

std::vector<CellAddress> occupied_cells(const WorkbookModel& wb) {
  std::vector<CellAddress> out;
  for (const auto& s : wb.sheets()) {
    for (const auto& [key, rec] : s.cells) {
      if (rec.is_occupied()) out.push_back(rec.address);
    }
  }
  return out;
}

VisibilityState visibility(const WorkbookModel& wb, const CellAddress& addr) {
  const Sheet* s = wb.sheet(addr.sheet);
  if (!s || addr.row < 1 || addr.row > kMaxRows || addr.col < 1 || addr.col > kMaxCols) {
    throw WorkbookError(WorkbookError::Kind::address_out_of_range,
                        "address out of range: " + format_address(addr));
  }
  VisibilityState v;
  switch (s->state) {
    case SheetState::very_hidden: v.state = Visibility::very_hidden_sheet; break;
    case SheetState::hidden: v.state = Visibility::hidden_sheet; break;
    case SheetState::visible:
      if (s->hidden_rows.contains(addr.row)) {
        v.state = Visibility::hidden_row;
      } else if (s->hidden_cols.contains(addr.col)) {
        v.state = Visibility::hidden_column;
      }
      break;
  }
  if (v.state == Visibility::hidden_row || v.state == Visibility::hidden_column) {
    v.is_protected = s->is_protected;
  } else if (v.state == Visibility::hidden_sheet || v.state == Visibility::very_hidden_sheet) {
    v.is_protected = wb.structure_locked();
  }
  if (v.state != Visibility::visible) {
    v.password_disclosed = wb.passwords_disclosed() || wb.disclosed_sheets_.contains(lower(s->name));
  }
  return v;
}

std::optional<DataConnection> connection_for_table(const WorkbookModel& wb, std::string_view table) {
  const TableModel* t = wb.table(table);
  if (!t) throw WorkbookError(WorkbookError::Kind::unknown_table, "unknown table '" + std::string(table) + "'");
  return t->connection;
}

std::string column_letters(int col) {
  std::string out;
  while (col > 0) {
    int rem = (col - 1) % 26;
    out.insert(out.begin(), static_cast<char>('A' + rem));
    col = (col - 1) / 26;
  }
  return out;
}

std::optional<int> column_number(std::string_view letters) {
  if (letters.empty() || letters.size() > 3) return std::nullopt;
  int col = 0;
  for (unsigned char c : letters) {
    if (!std::isalpha(c)) return std::nullopt;
    col = col * 26 + (std::toupper(c) - 'A' + 1);
  }
  if (col > kMaxCols) return std::nullopt;
  return col;
}

std::string quote_sheet_name(std::string_view sheet) {
  bool plain = !sheet.empty() && (std::isalpha(static_cast<unsigned char>(sheet.front())) || sheet.front() == '_');
  for (unsigned char c : sheet) {
    if (!(std::isalnum(c) || c == '_' || c == '.')) plain = false;
  }
  // Names that read as cell references (A1 or R1C1) must be quoted too.
  if (plain) {
    auto piece = parse_piece(sheet);
    if (piece && piece->row && piece->col) plain = false;
    std::string l = lower(sheet);
    if (l == "r" || l == "c") plain = false;
    std::size_t i = 1;
    if (l.size() > 1 && l[0] == 'r') {
      while (i < l.size() && std::isdigit(static_cast<unsigned char>(l[i]))) ++i;
      if (i < l.size() && l[i] == 'c') {
        ++i;
        while (i < l.size() && std::isdigit(static_cast<unsigned char>(l[i]))) ++i;
        if (i == l.size()) plain = false;
      }
    }
  }
  if (plain) return std::string(sheet);
  std::string out = "'";
  for (char c : sheet) {
    out += c;
    if (c == '\'') out += '\'';
  }
  out += "'";
  return out;
}

std::string format_address(const CellAddress& a, bool with_sheet) {
  std::string out;
  if (with_sheet && !a.sheet.empty()) out = quote_sheet_name(a.sheet) + "!";
  out += column_letters(a.col) + std::to_string(a.row);
  return out;
}

std::string format_area(const AreaRef& a, bool with_sheet) {
  if (a.top_left == a.bottom_right) return format_address(a.top_left, with_sheet);
  return format_address(a.top_left, with_sheet) + ":" + format_address(a.bottom_right, false);
}

std::optional<AreaRef> parse_area(std::string_view text, std::string_view default_sheet) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (!text.empty() && text.front() == '=') text.remove_prefix(1);
  std::string sheet(default_sheet);
  auto bang = text.rfind('!');
  if (bang != std::string_view::npos) {
    std::string_view qual = text.substr(0, bang);
    if (qual.size() >= 2 && qual.front() == '\'' && qual.back() == '\'') {
      sheet.clear();
      for (std::size_t i = 1; i + 1 < qual.size(); ++i) {
        sheet += qual[i];
        if (qual[i] == '\'' && i + 2 < qual.size() && qual[i + 1] == '\'') ++i;
      }
    } else {
      sheet = std::string(qual);
    }
    text = text.substr(bang + 1);
  }
  if (sheet.empty() || sheet.find('[') != std::string::npos) return std::nullopt;
  auto colon = text.find(':');
  auto first = parse_piece(text.substr(0, colon));
  if (!first) return std::nullopt;
  RefPiece second = *first;
  if (colon != std::string_view::npos) {
    auto p = parse_piece(text.substr(colon + 1));
    if (!p) return std::nullopt;
    second = *p;
  }
  bool whole_col = first->row == 0 || second.row == 0;
  bool whole_row = first->col == 0 || second.col == 0;
  if (whole_col && whole_row) return std::nullopt;
  if ((first->row == 0) != (second.row == 0) || (first->col == 0) != (second.col == 0)) return std::nullopt;
  AreaRef area;
  area.top_left = {sheet, whole_col ? 1 : std::min(first->row, second.row),
                   whole_row ? 1 : std::min(first->col, second.col)};
  area.bottom_right = {sheet, whole_col ? kMaxRows : std::max(first->row, second.row),
                       whole_row ? kMaxCols : std::max(first->col, second.col)};
  return area;
}

}  // namespace clearsheet
