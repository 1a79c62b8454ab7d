#include "clearsheet/labeling.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "clearsheet/number_format.hpp"

namespace clearsheet {

std::string_view to_string(ValueType v) {
  switch (v) {
    case ValueType::quantity: return "quantity";
    case ValueType::date_time_duration: return "date-time-duration";
    case ValueType::flag: return "flag";
    case ValueType::identity: return "identity";
    case ValueType::attribute: return "attribute";
    case ValueType::label_text: return "label-text";
    case ValueType::error: return "error";
    case ValueType::empty: return "empty";
  }
  return "?";
}

std::string_view to_string(PartKind k) {
  switch (k) {
    case PartKind::subject: return "subject-type-kind";
    case PartKind::unit: return "unit";
    case PartKind::format: return "format";
    case PartKind::question: return "question";
  }
  return "?";
}

std::string_view to_string(LabelSource s) {
  switch (s) {
    case LabelSource::same_cell_format: return "same-cell-format";
    case LabelSource::vicinity_cell: return "vicinity-cell";
    case LabelSource::comment: return "comment";
    case LabelSource::validation_message: return "validation-message";
    case LabelSource::defined_name: return "defined-name";
    case LabelSource::documentation_cell: return "documentation-cell";
    case LabelSource::function_tooltip: return "function-tooltip";
    case LabelSource::function_help: return "function-help";
  }
  return "?";
}

const LabelPart* LabelResolution::part(PartKind k) const {
  for (const auto& p : parts) {
    if (p.kind == k) return &p;
  }
  return nullptr;
}

int LabelResolution::steps() const {
  const auto& req = required_parts(type);
  std::set<std::pair<LabelSource, std::optional<CellAddress>>> paid;
  int total = 0;
  for (const auto& p : parts) {
    if (!req.count(p.kind) || p.steps == 0) continue;
    if (paid.insert({p.source, p.cell}).second) total += p.steps;
  }
  return total;
}

bool co_visible(const WorkbookModel& wb, const std::vector<CellAddress>& cells, const VicinityConfig& cfg) {
  if (cells.empty()) return true;
  const Sheet* s = wb.sheet(cells.front().sheet);
  if (!s) return false;
  for (const auto& c : cells) {
    if (wb.sheet(c.sheet) != s) return false;
  }
  int fr = cfg.honor_frozen_panes ? s->frozen_rows : 0;
  int fc = cfg.honor_frozen_panes ? s->frozen_cols : 0;
  int rmin = kMaxRows + 1, rmax = 0, cmin = kMaxCols + 1, cmax = 0;
  for (const auto& c : cells) {
    if (c.row > fr) {
      rmin = std::min(rmin, c.row);
      rmax = std::max(rmax, c.row);
    }
    if (c.col > fc) {
      cmin = std::min(cmin, c.col);
      cmax = std::max(cmax, c.col);
    }
  }
  bool rows_ok = rmax == 0 || rmax - rmin + 1 <= cfg.rows_visible;
  bool cols_ok = cmax == 0 || cmax - cmin + 1 <= cfg.cols_visible;
  return rows_ok && cols_ok;
}

namespace {

enum class TableZone { header, uom, data, totals };

struct TableSpot {
  const TableModel* table = nullptr;
  TableZone zone = TableZone::data;
  int index = 0;  // column within the table
};

std::optional<TableSpot> table_spot(const WorkbookModel& wb, const CellAddress& a) {
  const Sheet* s = wb.sheet(a.sheet);
  if (!s) return std::nullopt;
  for (const auto& t : wb.tables()) {
    if (wb.sheet(t.area.sheet()) != s) continue;
    if (a.col < t.area.top_left.col || a.col > t.area.bottom_right.col) continue;
    int idx = a.col - t.area.top_left.col;
    if (t.uom_row && a.row == t.area.top_left.row - 1) return TableSpot{&t, TableZone::uom, idx};
    if (a.row < t.area.top_left.row || a.row > t.area.bottom_right.row) continue;
    if (a.row < t.first_data_row()) return TableSpot{&t, TableZone::header, idx};
    if (a.row > t.last_data_row()) return TableSpot{&t, TableZone::totals, idx};
    return TableSpot{&t, TableZone::data, idx};
  }
  return std::nullopt;
}

bool is_value_cell(const CellRecord* r) { return r && r->is_occupied() && (r->has_formula() || !r->is_text()); }

bool is_flag_text(std::string_view text) {
  std::string t = to_lower(trim(text));
  return t == "yes" || t == "no" || t == "true" || t == "false";
}

std::vector<std::string> words(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string join(const std::vector<std::string>& w, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) out += (i > from ? " " : "") + w[i];
  return out;
}

bool is_identity_header(std::string_view text, const Lexicons& lex) {
  std::string t = trim(text);
  if (t.empty()) return false;
  if (t.back() == '#') return true;
  if (lex.identity.contains(t)) return true;
  auto w = words(t);
  return !w.empty() && lex.identity.contains(w.back());
}

ValueType classify_text_constant(const WorkbookModel& wb, const CellRecord& rec, const Lexicons& lex) {
  const std::string& text = std::get<std::string>(rec.stored_value);
  const CellAddress& a = rec.address;
  auto spot = table_spot(wb, a);
  if (spot && spot->zone != TableZone::data) return ValueType::label_text;
  if (is_flag_text(text)) return ValueType::flag;
  bool identity_like = lex.identity.matches(text) && !lex.identity.contains(text);
  if (rec.validation_list) return identity_like ? ValueType::identity : ValueType::attribute;
  if (lex.units.matches(text) || lex.formats.matches(text)) return ValueType::label_text;
  const CellRecord* right = wb.cell({a.sheet, a.row, a.col + 1});
  const CellRecord* below = wb.cell({a.sheet, a.row + 1, a.col});
  if (is_value_cell(right) || is_value_cell(below)) return ValueType::label_text;
  // A caption beside a drop-down input.
  if (right && right->validation_list) return ValueType::label_text;
  // Text in a table body with no value beside it is data, not a caption.
  if (spot) return identity_like ? ValueType::identity : ValueType::attribute;
  if (identity_like) return ValueType::identity;
  return ValueType::label_text;
}

const CellRecord* upward_label_cell(const WorkbookModel& wb, const CellAddress& a, const VicinityConfig& vic,
                                    const Lexicons& lex);

ValueType classify_numeric(const WorkbookModel& wb, const CellRecord& rec, const Lexicons& lex) {
  FormatTraits traits = analyze_number_format(rec.number_format);
  if (traits.is_flag) return ValueType::flag;
  if (traits.is_date_time) return ValueType::date_time_duration;
  auto spot = table_spot(wb, rec.address);
  if (spot && spot->zone == TableZone::data) {
    if (is_identity_header(spot->table->header_row[static_cast<std::size_t>(spot->index)], lex)) {
      return ValueType::identity;
    }
    return ValueType::quantity;
  }
  if (const CellRecord* up = upward_label_cell(wb, rec.address, VicinityConfig{}, lex)) {
    if (is_identity_header(std::get<std::string>(up->stored_value), lex)) return ValueType::identity;
  }
  return ValueType::quantity;
}

ValueType classify_record(const WorkbookModel& wb, const CellRecord& rec, const Lexicons& lex) {
  if (!rec.is_occupied()) return ValueType::empty;
  if (rec.is_error()) return ValueType::error;
  if (std::holds_alternative<bool>(rec.stored_value)) return ValueType::flag;
  if (const auto* s = std::get_if<std::string>(&rec.stored_value)) {
    if (!rec.has_formula()) return classify_text_constant(wb, rec, lex);
    if (is_flag_text(*s)) return ValueType::flag;
    if (analyze_number_format(rec.number_format).is_date_time) return ValueType::date_time_duration;
    return lex.identity.matches(*s) ? ValueType::identity : ValueType::attribute;
  }
  return classify_numeric(wb, rec, lex);
}

bool row_hidden(const Sheet& s, int row) { return s.hidden_rows.count(row) > 0; }
bool col_hidden(const Sheet& s, int col) { return s.hidden_cols.count(col) > 0; }

const CellRecord* label_at(const WorkbookModel& wb, const CellAddress& a, const Lexicons& lex) {
  const CellRecord* r = wb.cell(a);
  if (!r || !r->is_occupied() || r->has_formula() || !r->is_text()) return nullptr;
  return classify_text_constant(wb, *r, lex) == ValueType::label_text ? r : nullptr;
}

const CellRecord* upward_label_cell(const WorkbookModel& wb, const CellAddress& a, const VicinityConfig& vic,
                                    const Lexicons& lex) {
  const Sheet* s = wb.sheet(a.sheet);
  if (!s) return nullptr;
  int floor = std::max(1, a.row - vic.rows_visible);
  for (int r = a.row - 1; r >= floor; --r) {
    if (row_hidden(*s, r)) continue;
    if (const CellRecord* l = label_at(wb, {a.sheet, r, a.col}, lex)) return l;
  }
  return nullptr;
}

class Resolver {
 public:
  Resolver(const WorkbookModel& wb, const CellAddress& addr, const LabelOptions& opts, const Lexicons& lex)
      : wb_(wb), addr_(addr), opts_(opts), lex_(lex), sheet_(*wb.sheet(addr.sheet)) {}

  LabelResolution run(ValueType vt) {
    res_.type = vt;
    const CellRecord* rec = wb_.cell(addr_);
    table_labels();
    leftward();
    upward();
    rightward();
    names();
    if (!opts_.strict_labels) own_format(*rec);
    if (!complete() && rec->comment_text) add_text(*rec->comment_text, LabelSource::comment, std::nullopt,
                                                   opts_.costs.comment_label);
    if (!complete() && rec->validation_message) {
      add_text(*rec->validation_message, LabelSource::validation_message, std::nullopt, opts_.costs.validation_label);
    }
    if (!complete()) documentation();
    for (PartKind k : required_parts(vt)) {
      if (!res_.part(k)) res_.missing.insert(k);
    }
    return std::move(res_);
  }

 private:
  bool complete() const {
    for (PartKind k : required_parts(res_.type)) {
      if (!res_.part(k)) return false;
    }
    return true;
  }

  void add(PartKind k, std::string text, LabelSource src, std::optional<CellAddress> cell, int steps) {
    if (res_.part(k)) return;
    res_.parts.push_back(LabelPart{k, std::move(text), src, std::move(cell), steps});
  }

  void add_text(std::string_view text, LabelSource src, std::optional<CellAddress> cell, int steps,
                bool qualifiers_only = false) {
    for (auto& [kind, t] : label_text_parts(text, lex_)) {
      if (qualifiers_only && kind == PartKind::subject) continue;
      add(kind, std::move(t), src, cell, steps);
    }
  }

  bool visible_with_host(const CellAddress& a) const { return co_visible(wb_, {addr_, a}, opts_.vicinity); }

  void add_cell(const CellRecord& label, bool qualifiers_only = false) {
    add_text(std::get<std::string>(label.stored_value), LabelSource::vicinity_cell, label.address, 0, qualifiers_only);
  }

  void table_labels() {
    auto spot = table_spot(wb_, addr_);
    if (!spot || (spot->zone != TableZone::data && spot->zone != TableZone::totals)) return;
    const TableModel& t = *spot->table;
    CellAddress header{addr_.sheet, t.area.top_left.row, addr_.col};
    if (t.header_row_count > 0 && !col_hidden(sheet_, addr_.col)) {
      if (visible_with_host(header)) {
        add_text(t.header_row[static_cast<std::size_t>(spot->index)], LabelSource::vicinity_cell, header, 0);
        if (t.uom_row) {
          CellAddress uom{addr_.sheet, header.row - 1, addr_.col};
          const std::string& text = (*t.uom_row)[static_cast<std::size_t>(spot->index)];
          if (!text.empty() && visible_with_host(uom)) add_text(text, LabelSource::vicinity_cell, uom, 0);
        }
      } else {
        res_.beyond_vicinity.push_back(header);
      }
    }
  }

  // Collects the nearest run of label cells along a direction, skipping values on the way.
  void scan(int drow, int dcol, int limit, bool skip_values, bool qualifiers_only) {
    CellAddress a = addr_;
    for (int i = 0; i < limit; ++i) {
      a.row += drow;
      a.col += dcol;
      if (a.row < 1 || a.col < 1 || a.col > kMaxCols) return;
      if (drow != 0 && a.row != addr_.row && row_hidden(sheet_, a.row)) continue;
      if (dcol != 0 && a.col != addr_.col && col_hidden(sheet_, a.col)) continue;
      const CellRecord* r = wb_.cell(a);
      if (!r || !r->is_occupied()) continue;
      const CellRecord* label = label_at(wb_, a, lex_);
      if (!label) {
        if (skip_values) continue;
        return;
      }
      if (!visible_with_host(a)) {
        res_.beyond_vicinity.push_back(a);
        return;
      }
      add_cell(*label, qualifiers_only);
      // Adjacent label cells continue the same label ("Revenue | USD | 100").
      for (CellAddress b = a;;) {
        b.row += drow;
        b.col += dcol;
        if (b.row < 1 || b.col < 1) break;
        const CellRecord* next = label_at(wb_, b, lex_);
        if (!next || !visible_with_host(b)) break;
        add_cell(*next, qualifiers_only);
      }
      return;
    }
  }

  void leftward() { scan(0, -1, addr_.col - 1, true, false); }

  void upward() {
    int span = std::max(opts_.vicinity.rows_visible, 1) * 4;
    scan(-1, 0, std::min(addr_.row - 1, span), true, false);
    // Frozen header rows stay on screen however far down the cell is.
    if (addr_.row - 1 > span && opts_.vicinity.honor_frozen_panes) {
      for (int r = std::min(sheet_.frozen_rows, addr_.row - 1); r >= 1; --r) {
        if (const CellRecord* l = label_at(wb_, {addr_.sheet, r, addr_.col}, lex_)) {
          add_cell(*l);
          break;
        }
      }
    }
  }

  void rightward() { scan(0, 1, opts_.vicinity.cols_visible, false, true); }

  void names() {
    for (const DefinedName* n : wb_.names_covering(addr_)) {
      std::string text = n->name;
      std::replace(text.begin(), text.end(), '_', ' ');
      add_text(text, LabelSource::defined_name, std::nullopt, 0);
    }
  }

  void own_format(const CellRecord& rec) {
    FormatTraits traits = analyze_number_format(rec.number_format);
    if (traits.unit) add(PartKind::unit, *traits.unit, LabelSource::same_cell_format, std::nullopt, 0);
    if (traits.is_percent) add(PartKind::unit, "%", LabelSource::same_cell_format, std::nullopt, 0);
    if (traits.is_date_time) add(PartKind::format, rec.number_format, LabelSource::same_cell_format, std::nullopt, 0);
  }

  void documentation() {
    std::set<std::string> keys{to_lower(format_address(addr_, false)), to_lower(format_address(addr_, true)),
                               to_lower(addr_.sheet + "!" + format_address(addr_, false))};
    for (const DefinedName* n : wb_.names_covering(addr_)) keys.insert(to_lower(n->name));
    for (const Sheet& doc : wb_.sheets()) {
      if (!lex_.documentation_sheets.contains(doc.name) || &doc == &sheet_) continue;
      std::map<int, std::vector<const CellRecord*>> rows;
      for (const auto& [key, rec] : doc.cells) {
        if (rec.is_text() && rec.is_occupied()) rows[key.first].push_back(&rec);
      }
      for (const auto& [row, cells] : rows) {
        bool hit = std::any_of(cells.begin(), cells.end(), [&](const CellRecord* c) {
          std::string t = to_lower(trim(std::get<std::string>(c->stored_value)));
          t.erase(std::remove(t.begin(), t.end(), '$'), t.end());
          return keys.count(t) > 0;
        });
        if (!hit) continue;
        for (const CellRecord* c : cells) {
          std::string t = to_lower(trim(std::get<std::string>(c->stored_value)));
          t.erase(std::remove(t.begin(), t.end(), '$'), t.end());
          if (keys.count(t)) continue;
          add_text(std::get<std::string>(c->stored_value), LabelSource::documentation_cell, c->address,
                   opts_.costs.documentation_label);
        }
        return;
      }
    }
  }

  const WorkbookModel& wb_;
  CellAddress addr_;
  const LabelOptions& opts_;
  const Lexicons& lex_;
  const Sheet& sheet_;
  LabelResolution res_;
};

}  // namespace

ValueType classify_value_type(const WorkbookModel& wb, const CellAddress& addr, const Lexicons& lex) {
  const Sheet* s = wb.sheet(addr.sheet);
  if (!s || addr.row < 1 || addr.col < 1 || addr.row > kMaxRows || addr.col > kMaxCols) {
    throw WorkbookError(WorkbookError::Kind::address_out_of_range, "address out of range: " + format_address(addr));
  }
  const CellRecord* rec = s->find(addr.row, addr.col);
  return rec ? classify_record(wb, *rec, lex) : ValueType::empty;
}

bool is_label_cell(const WorkbookModel& wb, const CellAddress& addr, const Lexicons& lex) {
  return classify_value_type(wb, addr, lex) == ValueType::label_text;
}

const std::set<PartKind>& required_parts(ValueType vt) {
  static const std::set<PartKind> none;
  static const std::set<PartKind> quantity{PartKind::subject, PartKind::unit};
  static const std::set<PartKind> dated{PartKind::subject, PartKind::format};
  static const std::set<PartKind> flag{PartKind::question};
  static const std::set<PartKind> subject{PartKind::subject};
  switch (vt) {
    case ValueType::quantity: return quantity;
    case ValueType::date_time_duration: return dated;
    case ValueType::flag: return flag;
    case ValueType::identity:
    case ValueType::attribute: return subject;
    case ValueType::label_text:
    case ValueType::error:
    case ValueType::empty: return none;
  }
  return none;
}

Sufficiency sufficiency(ValueType vt, const LabelResolution& res) {
  Sufficiency out;
  for (PartKind k : required_parts(vt)) {
    if (!res.part(k)) out.missing.insert(k);
  }
  out.sufficient = vt != ValueType::error && out.missing.empty();
  return out;
}

std::vector<std::pair<PartKind, std::string>> label_text_parts(std::string_view text, const Lexicons& lex) {
  std::vector<std::pair<PartKind, std::string>> out;
  std::string t = trim(text);
  if (t.empty()) return out;
  if (lex.units.contains(t)) return {{PartKind::unit, t}};
  if (lex.formats.matches(t)) return {{PartKind::format, t}};

  std::string body = t;
  bool question = false;
  if (body.back() == '?') {
    question = true;
    body = trim(body.substr(0, body.size() - 1));
  }
  // "Revenue (USD)" / "Start (mm/dd/yyyy)"
  if (!body.empty() && body.back() == ')') {
    auto open = body.rfind('(');
    if (open != std::string::npos) {
      std::string inner = trim(body.substr(open + 1, body.size() - open - 2));
      if (lex.units.matches(inner)) {
        out.emplace_back(PartKind::unit, inner);
        body = trim(body.substr(0, open));
      } else if (lex.formats.matches(inner)) {
        out.emplace_back(PartKind::format, inner);
        body = trim(body.substr(0, open));
      }
    }
  }
  auto w = words(body);
  if (out.empty() && w.size() >= 2) {
    // Longest trailing unit phrase that leaves a subject behind.
    for (std::size_t take = std::min<std::size_t>(3, w.size() - 1); take >= 1; --take) {
      std::string tail = join(w, w.size() - take, w.size());
      if (lex.units.contains(tail)) {
        out.emplace_back(PartKind::unit, tail);
        body = join(w, 0, w.size() - take);
        w = words(body);
        break;
      }
    }
  }
  if (!w.empty() && (lex.interrogatives.contains(w.front()) || lex.interrogatives.contains(body))) question = true;
  if (!body.empty()) out.emplace_back(PartKind::subject, body);
  if (question) out.emplace_back(PartKind::question, t);
  return out;
}

LabelResolution resolve_labels(const WorkbookModel& wb, const CellAddress& addr, const LabelOptions& opts,
                               const Lexicons& lex) {
  ValueType vt = classify_value_type(wb, addr, lex);
  if (vt == ValueType::label_text || vt == ValueType::empty) {
    LabelResolution res;
    res.type = vt;
    return res;
  }
  return Resolver(wb, addr, opts, lex).run(vt);
}

}  // namespace clearsheet
