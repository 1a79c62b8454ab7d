#include "clearsheet/scorer.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace clearsheet {

std::string_view to_string(ChainMode m) { return m == ChainMode::set ? "set" : "per-path"; }

std::string_view to_string(ItemLevel l) { return l == ItemLevel::surface ? "surface" : "source"; }

const BreakdownItem* ScoreBreakdown::first_opaque_item() const {
  for (const auto& i : items) {
    if (i.cost.is_opaque()) return &i;
  }
  return nullptr;
}

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string join_kinds(const std::set<PartKind>& kinds) {
  std::string out;
  for (PartKind k : kinds) out += (out.empty() ? "" : ", ") + std::string(to_string(k));
  return out;
}

// Where an operand points, or why it cannot be followed.
struct RefTarget {
  bool ok = true;
  std::string reason;
  std::vector<AreaRef> areas;
  std::vector<CellAddress> headers;  // label cells that must share the window (table headers, UOM row)
  std::string nav_key;
  std::string nav_text;
  bool constant_name = false;
  bool opaque_name = false;  // reason concerns the name itself
};

struct UseOutcome {
  bool constrained = false;
  std::vector<AreaRef> candidates;
  std::string reason;
  std::set<ConstraintEvidence> evidence;
};

struct Analysis {
  std::optional<FormulaAst> ast;
  std::string parse_error;
  std::vector<SourceOperand> ops;
  std::vector<RefTarget> targets;  // parallel to ops (literal operands get an empty ok target)
  std::vector<IndirectUse> uses;
  std::vector<UseOutcome> outcomes;  // parallel to uses
  std::vector<CellAddress> precedents;
  // (target cell, reference routed through an error-handling call)
  std::vector<std::pair<CellAddress, bool>> reads;
};

}  // namespace

struct Scorer::Impl {
  std::map<CellAddress, ValueType> types;
  std::map<CellAddress, LabelResolution> labels;
  std::map<CellAddress, Analysis> analyses;
  std::map<CellAddress, ScoreBreakdown> surfaces;
  std::map<CellAddress, ScoreBreakdown> sources;
  std::map<CellAddress, ScoreBreakdown> cells;
  std::map<CellAddress, Score> per_path;
  std::optional<std::set<CellAddress>> cyclic;
  std::optional<std::map<CellAddress, std::vector<bool>>> dependents;
};

Scorer::Scorer(const WorkbookModel& wb, ScoringConfig cfg, const FunctionCatalog& catalog, const Lexicons& lex)
    : wb_(wb), cfg_(cfg), catalog_(catalog), lex_(lex), impl_(std::make_unique<Impl>()) {}

Scorer::~Scorer() = default;

ValueType Scorer::value_type(const CellAddress& a) {
  auto it = impl_->types.find(a);
  if (it != impl_->types.end()) return it->second;
  ValueType vt = classify_value_type(wb_, a, lex_);
  impl_->types.emplace(a, vt);
  return vt;
}

const LabelResolution& Scorer::labels(const CellAddress& a) {
  auto it = impl_->labels.find(a);
  if (it != impl_->labels.end()) return it->second;
  return impl_->labels.emplace(a, resolve_labels(wb_, a, cfg_.label_options(), lex_)).first->second;
}

namespace {

class Resolver {
 public:
  Resolver(const WorkbookModel& wb, const CellAddress& host) : wb_(wb), host_(host) {}

  std::optional<std::string> canonical_sheet(std::string_view name) const {
    const Sheet* s = wb_.sheet(name);
    return s ? std::optional<std::string>(s->name) : std::nullopt;
  }

  RefTarget area_target(const std::optional<SheetQualifier>& q, RefCorner a, RefCorner b, RangeShape shape) const {
    RefTarget t;
    std::string sheet = host_.sheet;
    if (q) {
      if (q->workbook) return fail("external workbook reference [" + *q->workbook + "]" + q->sheet);
      auto canon = canonical_sheet(q->sheet);
      if (!canon) return fail("reference to missing sheet '" + q->sheet + "'");
      sheet = *canon;
    }
    int r1 = a.row, r2 = b.row, c1 = a.col, c2 = b.col;
    if (shape == RangeShape::columns) {
      r1 = 1;
      r2 = kMaxRows;
    } else if (shape == RangeShape::rows) {
      c1 = 1;
      c2 = kMaxCols;
    }
    AreaRef area{{sheet, std::min(r1, r2), std::min(c1, c2)}, {sheet, std::max(r1, r2), std::max(c1, c2)}};
    t.areas.push_back(area);
    t.nav_key = "area:" + format_area(area);
    t.nav_text = format_area(area, sheet != host_.sheet);
    return t;
  }

  RefTarget structured_target(const StructuredRef& ref) const {
    const TableModel* t = ref.table ? wb_.table(*ref.table) : wb_.table_at(host_);
    if (!t) return fail(ref.table ? "unknown table '" + *ref.table + "'" : "structured reference outside any table");
    int width = t->area.cols();
    int i1 = 0, i2 = width - 1;
    if (ref.first_column) {
      auto c = t->column_index(*ref.first_column);
      if (!c) return fail("table " + t->name + " has no column '" + *ref.first_column + "'");
      i1 = i2 = *c;
      if (ref.last_column) {
        auto c2 = t->column_index(*ref.last_column);
        if (!c2) return fail("table " + t->name + " has no column '" + *ref.last_column + "'");
        i2 = *c2;
      }
      if (i1 > i2) std::swap(i1, i2);
    }
    std::vector<TableRegion> regions = ref.regions.empty() ? std::vector<TableRegion>{TableRegion::data} : ref.regions;
    int top = t->area.top_left.row, bottom = t->area.bottom_right.row;
    int rmin = kMaxRows + 1, rmax = 0;
    auto take = [&](int lo, int hi) {
      if (lo > hi) return;
      rmin = std::min(rmin, lo);
      rmax = std::max(rmax, hi);
    };
    for (TableRegion r : regions) {
      switch (r) {
        case TableRegion::data: take(t->first_data_row(), t->last_data_row()); break;
        case TableRegion::headers: take(top, t->first_data_row() - 1); break;
        case TableRegion::totals: take(t->last_data_row() + 1, bottom); break;
        case TableRegion::all: take(top, bottom); break;
        case TableRegion::this_row:
          if (wb_.sheet(host_.sheet) != wb_.sheet(t->area.sheet()) || host_.row < t->first_data_row() ||
              host_.row > t->last_data_row()) {
            return fail("this-row reference from outside the data rows of " + t->name);
          }
          take(host_.row, host_.row);
          break;
      }
    }
    RefTarget out;
    const std::string& sheet = t->area.sheet();
    int left = t->area.top_left.col;
    if (rmax > 0) {
      AreaRef area{{sheet, rmin, left + i1}, {sheet, rmax, left + i2}};
      out.areas.push_back(area);
      out.nav_key = "area:" + format_area(area);
      out.nav_text = t->name + " " + format_area(area, sheet != host_.sheet);
    } else {
      out.nav_key = "table:" + upper(t->name);
      out.nav_text = t->name;
    }
    if (t->header_row_count > 0) {
      for (int i = i1; i <= i2; ++i) {
        out.headers.push_back({sheet, top, left + i});
        if (t->uom_row) out.headers.push_back({sheet, top - 1, left + i});
      }
    }
    return out;
  }

  RefTarget named_target(const NamedRef& ref) const {
    std::string scope = host_.sheet;
    if (ref.qualifier) {
      if (ref.qualifier->workbook) return fail("external workbook name [" + *ref.qualifier->workbook + "]" + ref.name);
      scope = ref.qualifier->sheet;
    }
    const DefinedName* dn = wb_.defined_name(ref.name, scope);
    if (!dn) {
      if (const TableModel* t = wb_.table(ref.name)) {
        StructuredRef whole;
        whole.table = t->name;
        return structured_target(whole);
      }
      RefTarget t = fail("name '" + ref.name + "' is not defined");
      t.opaque_name = true;
      return t;
    }
    RefTarget t;
    t.nav_key = "name:" + upper(dn->name);
    t.nav_text = dn->name;
    if (const auto* area = std::get_if<AreaRef>(&dn->refers_to)) {
      auto canon = canonical_sheet(area->sheet());
      if (!canon) return fail("name '" + dn->name + "' refers to a missing sheet");
      AreaRef a = *area;
      a.top_left.sheet = a.bottom_right.sheet = *canon;
      t.areas.push_back(a);
    } else if (std::holds_alternative<NameConstant>(dn->refers_to)) {
      t.constant_name = true;
    } else {
      t = fail("name '" + dn->name + "' refers to an expression (" + std::get<NameExpression>(dn->refers_to).text + ")");
      t.opaque_name = true;
    }
    return t;
  }

  RefTarget operand_target(const SourceOperand& op) const {
    const Node& n = *op.leaf;
    if (const auto* c = n.as<CellRef>()) return area_target(c->qualifier, c->cell, c->cell, RangeShape::cells);
    if (const auto* r = n.as<RangeRef>()) return area_target(r->qualifier, r->first, r->last, r->shape);
    if (const auto* s = n.as<StructuredRef>()) return structured_target(*s);
    if (const auto* nm = n.as<NamedRef>()) return named_target(*nm);
    return {};
  }

  // Resolves reference text the way INDIRECT would: A1 text, a defined name, or a table name.
  std::optional<AreaRef> resolve_ref_text(std::string_view text) const {
    std::string t = trim(text);
    if (t.empty()) return std::nullopt;
    if (auto area = parse_area(t, host_.sheet)) {
      auto canon = canonical_sheet(area->sheet());
      if (!canon) return std::nullopt;
      area->top_left.sheet = area->bottom_right.sheet = *canon;
      return area;
    }
    if (const TableModel* tb = wb_.table(t)) {
      if (tb->last_data_row() < tb->first_data_row()) return std::nullopt;
      return AreaRef{{tb->area.sheet(), tb->first_data_row(), tb->area.top_left.col},
                     {tb->area.sheet(), tb->last_data_row(), tb->area.bottom_right.col}};
    }
    if (const DefinedName* dn = wb_.defined_name(t, host_.sheet)) {
      if (const auto* area = std::get_if<AreaRef>(&dn->refers_to)) {
        auto canon = canonical_sheet(area->sheet());
        if (!canon) return std::nullopt;
        AreaRef a = *area;
        a.top_left.sheet = a.bottom_right.sheet = *canon;
        return a;
      }
    }
    return std::nullopt;
  }

 private:
  static RefTarget fail(std::string reason) {
    RefTarget t;
    t.ok = false;
    t.reason = std::move(reason);
    return t;
  }

  const WorkbookModel& wb_;
  CellAddress host_;
};

std::optional<double> literal_number(const Node* n) {
  int sign = 1;
  while (n) {
    if (const auto* p = n->as<Paren>()) {
      n = p->inner.get();
    } else if (const auto* u = n->as<UnaryOp>()) {
      if (u->op == '-') sign = -sign;
      n = u->operand.get();
    } else {
      break;
    }
  }
  if (!n) return std::nullopt;
  const auto* lit = n->as<Literal>();
  if (!lit || lit->kind != LiteralKind::number) return std::nullopt;
  return sign * lit->number;
}

class UseEvaluator {
 public:
  UseEvaluator(const WorkbookModel& wb, const Resolver& res, const CellAddress& host,
               const std::vector<IndirectUse>& uses)
      : wb_(wb), res_(res), host_(host) {
    for (const auto& u : uses) evidence_[u.call] = u.evidence;
  }

  UseOutcome eval(const Node* call) {
    auto it = memo_.find(call);
    if (it != memo_.end()) return it->second;
    UseOutcome out = compute(call);
    memo_[call] = out;
    return out;
  }

 private:
  UseOutcome compute(const Node* call) {
    const auto& f = *call->as<FuncCall>();
    UseOutcome out;
    out.evidence = evidence_[call];
    auto arg = [&](std::size_t i) -> const Node* { return i < f.args.size() ? unwrap(f.args[i].get()) : nullptr; };
    if (f.name == "OFFSET") return offset(f, out, arg(0), arg(1), arg(2));
    if (f.name == "INDIRECT") return indirect(out, arg(0));
    std::vector<const Node*> ranges;
    if (f.name == "INDEX") ranges = {arg(0)};
    if (f.name == "VLOOKUP" || f.name == "HLOOKUP") ranges = {arg(1)};
    if (f.name == "LOOKUP") {
      ranges = {arg(1)};
      if (f.args.size() > 2) ranges.push_back(arg(2));
    }
    for (const Node* r : ranges) {
      if (!range_constrained(r, out)) {
        out.constrained = false;
        if (out.reason.empty()) out.reason = f.name + " searches a range that is not a fixed, labeled area";
        return out;
      }
    }
    out.constrained = true;
    return out;
  }

  bool range_constrained(const Node* r, UseOutcome& out) {
    if (!r) return false;
    if (r->as<RangeRef>() || r->as<CellRef>() || r->as<StructuredRef>()) {
      out.evidence.insert(ConstraintEvidence::literal_range_argument);
      if (r->as<StructuredRef>()) out.evidence.insert(ConstraintEvidence::table_argument);
      return true;
    }
    if (const auto* n = r->as<NamedRef>()) {
      RefTarget t = res_.named_target(*n);
      if (t.ok && !t.areas.empty()) {
        out.evidence.insert(ConstraintEvidence::literal_range_argument);
        return true;
      }
      return false;
    }
    if (const auto* f = r->as<FuncCall>(); f && is_indirect_function(f->name)) {
      UseOutcome inner = eval(r);
      if (!inner.constrained) {
        out.reason = "its range comes from an unconstrained " + f->name + "()";
        return false;
      }
      out.evidence.insert(inner.evidence.begin(), inner.evidence.end());
      return true;
    }
    return false;
  }

  UseOutcome offset(const FuncCall& f, UseOutcome out, const Node* base, const Node* rows, const Node* cols) {
    if (!out.evidence.count(ConstraintEvidence::single_cell_offset)) {
      out.reason = "OFFSET() height/width are not both the literal 1";
      return out;
    }
    auto dr = literal_number(rows);
    auto dc = literal_number(cols);
    if (!dr || !dc) {
      out.reason = "OFFSET() row/column offsets are not literal numbers";
      return out;
    }
    if (!base || !(base->as<CellRef>() || base->as<RangeRef>() || base->as<StructuredRef>())) {
      out.reason = "OFFSET() base is not a literal or table reference";
      return out;
    }
    RefTarget t;
    if (const auto* c = base->as<CellRef>()) t = res_.area_target(c->qualifier, c->cell, c->cell, RangeShape::cells);
    if (const auto* r = base->as<RangeRef>()) t = res_.area_target(r->qualifier, r->first, r->last, r->shape);
    if (const auto* s = base->as<StructuredRef>()) t = res_.structured_target(*s);
    if (!t.ok || t.areas.empty()) {
      out.reason = "OFFSET() base does not resolve" + (t.reason.empty() ? "" : ": " + t.reason);
      return out;
    }
    const CellAddress& tl = t.areas.front().top_left;
    long long row = tl.row + static_cast<long long>(*dr);
    long long col = tl.col + static_cast<long long>(*dc);
    if (row < 1 || col < 1 || row > kMaxRows || col > kMaxCols) {
      out.reason = "OFFSET() lands outside the sheet";
      return out;
    }
    CellAddress cell{tl.sheet, static_cast<int>(row), static_cast<int>(col)};
    (void)f;
    out.constrained = true;
    out.candidates.push_back(AreaRef::single(cell));
    return out;
  }

  UseOutcome indirect(UseOutcome out, const Node* a) {
    if (!a) {
      out.reason = "INDIRECT() has no reference text";
      return out;
    }
    if (const auto* lit = a->as<Literal>(); lit && lit->kind == LiteralKind::text) {
      if (auto area = res_.resolve_ref_text(lit->text)) {
        out.evidence.insert(ConstraintEvidence::literal_range_argument);
        out.constrained = true;
        out.candidates.push_back(*area);
      } else {
        out.reason = "INDIRECT() text \"" + lit->text + "\" does not name a reference";
      }
      return out;
    }
    std::optional<CellAddress> input;
    if (const auto* c = a->as<CellRef>()) {
      RefTarget t = res_.area_target(c->qualifier, c->cell, c->cell, RangeShape::cells);
      if (t.ok) input = t.areas.front().top_left;
    } else if (const auto* n = a->as<NamedRef>()) {
      RefTarget t = res_.named_target(*n);
      if (t.ok && t.areas.size() == 1 && t.areas.front().rows() == 1 && t.areas.front().cols() == 1) {
        input = t.areas.front().top_left;
      }
    } else if (const auto* f = a->as<FuncCall>(); f && f->name == "OFFSET") {
      UseOutcome inner = eval(a);
      if (inner.constrained && inner.candidates.size() == 1) input = inner.candidates.front().top_left;
    }
    if (!input) {
      out.reason = "INDIRECT() reference text is computed, not read from a single input cell";
      return out;
    }
    const CellRecord* rec = wb_.cell(*input);
    if (!rec || !rec->validation_list || rec->validation_list->empty()) {
      out.reason = "input cell " + format_address(*input, input->sheet != host_.sheet) + " has no validation list";
      return out;
    }
    for (const auto& item : *rec->validation_list) {
      auto area = res_.resolve_ref_text(item);
      if (!area) {
        out.candidates.clear();
        out.reason = "validation item \"" + item + "\" of " + format_address(*input, input->sheet != host_.sheet) +
                     " does not name a reference";
        return out;
      }
      out.candidates.push_back(*area);
    }
    out.evidence.insert(ConstraintEvidence::validation_constrained_input);
    out.constrained = true;
    return out;
  }

  const WorkbookModel& wb_;
  const Resolver& res_;
  CellAddress host_;
  std::map<const Node*, std::set<ConstraintEvidence>> evidence_;
  std::map<const Node*, UseOutcome> memo_;
};

const Analysis& analyze(const WorkbookModel& wb, const FunctionCatalog& cat, std::map<CellAddress, Analysis>& memo,
                        const CellAddress& a) {
  auto it = memo.find(a);
  if (it != memo.end()) return it->second;
  Analysis an;
  const CellRecord* rec = wb.cell(a);
  if (rec && rec->formula_text) {
    try {
      an.ast = parse_formula(*rec->formula_text);
    } catch (const FormulaError& e) {
      an.parse_error = e.what();
    }
  }
  if (an.ast) {
    Resolver res(wb, a);
    an.ops = operands(*an.ast);
    an.uses = indirect_uses(*an.ast);
    std::set<CellAddress> pre;
    auto read_area = [&](const AreaRef& area, bool handled) {
      for (const CellRecord* c : wb.cells_in(area)) {
        pre.insert(c->address);
        an.reads.emplace_back(c->address, handled);
      }
    };
    for (const auto& op : an.ops) {
      RefTarget t = res.operand_target(op);
      bool handled = std::any_of(op.enclosing_calls.begin(), op.enclosing_calls.end(),
                                 [&](const FunctionContext& fc) { return is_error_handling_function(cat, fc.function); });
      for (const auto& area : t.areas) read_area(area, handled);
      an.targets.push_back(std::move(t));
    }
    UseEvaluator ev(wb, res, a, an.uses);
    for (const auto& u : an.uses) {
      UseOutcome o = ev.eval(u.call);
      for (const auto& area : o.candidates) read_area(area, false);
      an.outcomes.push_back(std::move(o));
    }
    an.precedents.assign(pre.begin(), pre.end());
  }
  return memo.emplace(a, std::move(an)).first->second;
}

std::vector<CellAddress> formula_cells(const WorkbookModel& wb) {
  std::vector<CellAddress> out;
  for (const auto& s : wb.sheets()) {
    for (const auto& [key, rec] : s.cells) {
      if (rec.has_formula()) out.push_back(rec.address);
    }
  }
  return out;
}

}  // namespace

const FormulaAst* Scorer::formula(const CellAddress& a) {
  const Analysis& an = analyze(wb_, catalog_, impl_->analyses, a);
  return an.ast ? &*an.ast : nullptr;
}

std::optional<std::string> Scorer::formula_error(const CellAddress& a) {
  const Analysis& an = analyze(wb_, catalog_, impl_->analyses, a);
  if (an.parse_error.empty()) return std::nullopt;
  return an.parse_error;
}

const std::vector<CellAddress>& Scorer::precedents(const CellAddress& a) {
  return analyze(wb_, catalog_, impl_->analyses, a).precedents;
}

bool Scorer::in_cycle(const CellAddress& a) {
  if (!impl_->cyclic) {
    // Tarjan's strongly connected components, iterative.
    std::set<CellAddress> cyclic;
    std::map<CellAddress, int> index, low;
    std::set<CellAddress> on_stack;
    std::vector<CellAddress> stack;
    int counter = 0;
    for (const CellAddress& root : formula_cells(wb_)) {
      if (index.count(root)) continue;
      std::vector<std::pair<CellAddress, std::size_t>> work{{root, 0}};
      while (!work.empty()) {
        auto& [v, next] = work.back();
        if (next == 0 && !index.count(v)) {
          index[v] = low[v] = counter++;
          stack.push_back(v);
          on_stack.insert(v);
        }
        const auto& succ = precedents(v);
        if (next < succ.size()) {
          CellAddress w = succ[next++];
          const CellRecord* wr = wb_.cell(w);
          if (!wr || !wr->has_formula()) continue;
          if (!index.count(w)) {
            work.emplace_back(w, 0);
          } else if (on_stack.count(w)) {
            low[v] = std::min(low[v], index[w]);
          }
          continue;
        }
        CellAddress done = v;
        work.pop_back();
        if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
        if (low[done] == index[done]) {
          std::vector<CellAddress> comp;
          CellAddress w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack.erase(w);
            comp.push_back(w);
          } while (w != done);
          const auto& self = precedents(done);
          bool self_loop = std::find(self.begin(), self.end(), done) != self.end();
          if (comp.size() > 1 || self_loop) cyclic.insert(comp.begin(), comp.end());
        }
      }
    }
    impl_->cyclic = std::move(cyclic);
  }
  return impl_->cyclic->count(a) > 0;
}

bool Scorer::downstream_error_handled(const CellAddress& a) {
  if (!impl_->dependents) {
    std::map<CellAddress, std::vector<bool>> deps;
    for (const CellAddress& f : formula_cells(wb_)) {
      const Analysis& an = analyze(wb_, catalog_, impl_->analyses, f);
      for (const auto& [target, handled] : an.reads) deps[target].push_back(handled);
    }
    impl_->dependents = std::move(deps);
  }
  auto it = impl_->dependents->find(a);
  if (it == impl_->dependents->end() || it->second.empty()) return false;
  return std::all_of(it->second.begin(), it->second.end(), [](bool h) { return h; });
}

namespace {

BreakdownItem make_item(ItemLevel level, std::string kind, std::string description, Score cost,
                        std::string rule = {}) {
  BreakdownItem i;
  i.level = level;
  i.kind = std::move(kind);
  i.description = std::move(description);
  i.cost = cost;
  i.rule = std::move(rule);
  return i;
}

Score sum_items(const std::vector<BreakdownItem>& items, ItemLevel level) {
  Score s;
  for (const auto& i : items) {
    if (i.level == level) s += i.cost;
  }
  return s;
}

// Steps to make a cell's row, column or sheet visible; Opaque when it cannot be revealed.
void reveal_items(const WorkbookModel& wb, const StepCosts& costs, const CellAddress& a, ItemLevel level,
                  const std::string& prefix, std::vector<BreakdownItem>& items) {
  VisibilityState vs = visibility(wb, a);
  std::string where = prefix + format_address(a);
  switch (vs.state) {
    case Visibility::visible: return;
    case Visibility::very_hidden_sheet:
      items.push_back(make_item(level, "hidden", where + " is on a very hidden sheet", Score::opaque(), "L4"));
      return;
    case Visibility::hidden_sheet:
      if (vs.is_protected && !vs.password_disclosed) {
        items.push_back(make_item(level, "hidden", where + " is on a hidden sheet behind workbook protection",
                                  Score::opaque(), "L4"));
      } else {
        items.push_back(make_item(level, "unhide", "unhide sheet of " + where, Score::steps(-costs.unhide_sheet)));
      }
      return;
    case Visibility::hidden_row:
    case Visibility::hidden_column: {
      if (vs.is_protected && !vs.password_disclosed) {
        items.push_back(make_item(level, "hidden", where + " is hidden on a protected sheet", Score::opaque(), "L4"));
        return;
      }
      const Sheet* s = wb.sheet(a.sheet);
      if (s->hidden_rows.count(a.row)) {
        items.push_back(make_item(level, "unhide", "unhide row of " + where, Score::steps(-costs.unhide_row_col)));
      }
      if (s->hidden_cols.count(a.col)) {
        items.push_back(make_item(level, "unhide", "unhide column of " + where, Score::steps(-costs.unhide_row_col)));
      }
      return;
    }
  }
}

std::string literal_text(const Node& n) { return serialize(n); }

}  // namespace

ScoreBreakdown Scorer::surface(const CellAddress& a) {
  auto it = impl_->surfaces.find(a);
  if (it != impl_->surfaces.end()) return it->second;
  ScoreBreakdown b;
  b.address = a;
  b.type = value_type(a);
  const CellRecord* rec = wb_.cell(a);
  b.has_formula = rec && rec->has_formula();
  if (rec && rec->is_occupied()) {
    reveal_items(wb_, cfg_.costs, a, ItemLevel::surface, "", b.items);
    if (b.type == ValueType::error) {
      if (!downstream_error_handled(a)) {
        b.items.push_back(make_item(ItemLevel::surface, "error",
                                    display_value(rec->stored_value) + " error is not handled by the cells using it",
                                    Score::opaque(), "L3"));
      }
    } else if (b.type != ValueType::label_text) {
      b.labels = labels(a);
      Sufficiency suff = sufficiency(b.type, b.labels);
      if (!suff.sufficient) {
        b.items.push_back(make_item(ItemLevel::surface, "label",
                                    std::string(to_string(b.type)) + " value lacks " + join_kinds(suff.missing),
                                    Score::opaque(), "L6"));
      } else {
        const auto& req = required_parts(b.type);
        std::set<std::pair<LabelSource, std::optional<CellAddress>>> paid;
        for (const auto& p : b.labels.parts) {
          if (!req.count(p.kind) || p.steps == 0 || !paid.insert({p.source, p.cell}).second) continue;
          BreakdownItem item = make_item(ItemLevel::surface, "label-access",
                                         std::string(to_string(p.kind)) + " label \"" + p.text + "\" read from " +
                                             std::string(to_string(p.source)),
                                         Score::steps(-p.steps));
          item.label = p;
          item.target = p.cell;
          b.items.push_back(std::move(item));
        }
      }
    }
  }
  b.surface = sum_items(b.items, ItemLevel::surface);
  b.total = b.surface;
  impl_->surfaces.emplace(a, b);
  return b;
}

ScoreBreakdown Scorer::source(const CellAddress& host) {
  auto memo = impl_->sources.find(host);
  if (memo != impl_->sources.end()) return memo->second;
  ScoreBreakdown b;
  b.address = host;
  b.type = value_type(host);
  const CellRecord* rec = wb_.cell(host);
  b.has_formula = rec && rec->has_formula();
  auto push = [&](std::string kind, std::string desc, Score cost, std::string rule = {},
                  std::optional<Span> span = std::nullopt, std::optional<CellAddress> target = std::nullopt) {
    BreakdownItem i = make_item(ItemLevel::source, std::move(kind), std::move(desc), cost, std::move(rule));
    i.span = span;
    i.target = std::move(target);
    b.items.push_back(std::move(i));
  };

  if (b.has_formula) {
    const Analysis& an = analyze(wb_, catalog_, impl_->analyses, host);
    if (!an.ast) {
      push("parse", "formula does not parse: " + an.parse_error, Score::opaque(), "L10");
    } else {
      if (in_cycle(host)) push("cycle", "formula is part of a circular reference", Score::opaque(), "L9");

      bool needs_click = false;
      for (const auto& op : an.ops) {
        if (op.kind == OperandKind::cell_area) needs_click = true;
        if (op.kind == OperandKind::literal && op.function_context &&
            op.leaf->as<Literal>()->kind != LiteralKind::missing) {
          needs_click = true;
        }
      }
      if (needs_click) {
        push("formula-inspection", "click into the formula to expose its references and argument tooltips",
             Score::steps(-cfg_.costs.formula_inspection));
      }

      bool only_literals = std::all_of(an.ops.begin(), an.ops.end(),
                                       [](const SourceOperand& o) { return o.kind == OperandKind::literal; });
      bool any_call = false;
      for (const auto& op : an.ops) any_call = any_call || !op.enclosing_calls.empty();
      bool named_constant_formula = only_literals && !any_call && !wb_.names_covering(host).empty();

      std::set<std::string> navigated;
      std::set<CellAddress> charged;
      std::set<std::tuple<std::string, int, std::string>> helped;

      auto charge_targets = [&](const std::vector<AreaRef>& areas, const std::vector<CellAddress>& headers,
                                const std::string& nav_key, const std::string& nav_text, Span span) {
        std::vector<CellAddress> view{host};
        std::vector<const CellRecord*> occupied;
        for (const auto& area : areas) {
          auto cells = wb_.cells_in(area);
          if (cells.empty()) view.push_back(area.top_left);
          for (const CellRecord* c : cells) {
            view.push_back(c->address);
            occupied.push_back(c);
          }
        }
        for (const auto& h : headers) {
          const CellRecord* hr = wb_.cell(h);
          if (hr && hr->is_occupied()) view.push_back(h);
        }
        if (!co_visible(wb_, view, cfg_.vicinity) && navigated.insert(nav_key).second) {
          push("navigation", "navigate to " + nav_text, Score::steps(-cfg_.costs.navigation), {}, span);
        }
        for (const CellRecord* c : occupied) {
          if (!charged.insert(c->address).second || c->address == host) continue;
          std::string name = format_address(c->address, c->address.sheet != host.sheet);
          if (value_type(c->address) == ValueType::label_text) {
            std::vector<BreakdownItem> rev;
            reveal_items(wb_, cfg_.costs, c->address, ItemLevel::source, "source ", rev);
            for (auto& r : rev) {
              r.span = span;
              r.target = c->address;
              if (r.cost.is_opaque()) r.rule = "L10";
              b.items.push_back(std::move(r));
            }
            continue;
          }
          ScoreBreakdown ts = surface(c->address);
          if (ts.surface.is_opaque()) {
            const BreakdownItem* why = ts.first_opaque_item();
            push("source-surface", "source " + name + " is opaque: " + (why ? why->description : "no reason"),
                 Score::opaque(), "L10", span, c->address);
          } else if (!ts.surface.is_transparent()) {
            push("source-surface", "labels and visibility of source " + name, ts.surface, {}, span, c->address);
          }
        }
      };

      for (std::size_t i = 0; i < an.ops.size(); ++i) {
        const SourceOperand& op = an.ops[i];
        const RefTarget& t = an.targets[i];
        if (op.kind == OperandKind::literal) {
          const Literal& lit = *op.leaf->as<Literal>();
          if (lit.kind == LiteralKind::missing) continue;
          std::string text = literal_text(*op.leaf);
          if (!op.function_context) {
            if (named_constant_formula) continue;
            push("literal", "literal " + text + " has no label", Score::opaque(), "L1", op.position);
            continue;
          }
          const FunctionContext& fc = *op.function_context;
          ParamGrade grade = parameter_grade(catalog_, fc.function, fc.arg_index);
          std::string pname;
          if (const CatalogEntry* e = catalog_.find(fc.function)) {
            if (const CatalogParam* p = e->param(fc.arg_index)) pname = p->name;
          }
          std::string where = fc.function + "() argument " + std::to_string(fc.arg_index + 1) +
                              (pname.empty() ? "" : " (" + pname + ")");
          if (grade == ParamGrade::help_sufficient) {
            if (helped.insert({fc.function, fc.arg_index, text}).second) {
              push("function-help", "open the help for " + where + " to identify literal " + text,
                   Score::steps(-cfg_.costs.function_help), {}, op.position);
            }
          } else if (grade == ParamGrade::insufficient) {
            push("literal", "literal " + text + " in " + where + " has no sufficient label", Score::opaque(), "L1",
                 op.position);
          }
          continue;
        }
        if (!t.ok) {
          push("reference", t.reason, Score::opaque(), "L10", op.position);
          continue;
        }
        if (t.constant_name) {
          if (navigated.insert(t.nav_key).second) {
            push("navigation", "open name " + t.nav_text + " to read its constant",
                 Score::steps(-cfg_.costs.navigation), {}, op.position);
          }
          continue;
        }
        charge_targets(t.areas, t.headers, t.nav_key, t.nav_text, op.position);
      }

      for (std::size_t i = 0; i < an.uses.size(); ++i) {
        const IndirectUse& u = an.uses[i];
        const UseOutcome& o = an.outcomes[i];
        if (!o.constrained) {
          push("indirect", u.function + "() is unconstrained: " + o.reason, Score::opaque(), "L2", u.enclosing_span);
          continue;
        }
        for (const auto& area : o.candidates) {
          charge_targets({area}, {}, "area:" + format_area(area), format_area(area, area.sheet() != host.sheet),
                         u.enclosing_span);
        }
      }
    }
  }
  b.source = sum_items(b.items, ItemLevel::source);
  b.total = b.source;
  impl_->sources.emplace(host, b);
  return b;
}

const ScoreBreakdown& Scorer::cell(const CellAddress& a) {
  auto it = impl_->cells.find(a);
  if (it != impl_->cells.end()) return it->second;
  ScoreBreakdown s = surface(a);
  ScoreBreakdown src = source(a);
  s.source = src.source;
  s.items.insert(s.items.end(), src.items.begin(), src.items.end());
  s.total = score_add(s.surface, s.source);
  return impl_->cells.emplace(a, std::move(s)).first->second;
}

Score Scorer::chain(const CellAddress& root) {
  auto scored = [&](const CellAddress& c) -> Score {
    const CellRecord* r = wb_.cell(c);
    if (!r || !r->is_occupied() || value_type(c) == ValueType::label_text) return Score{};
    return cell(c).total;
  };
  if (cfg_.chain_mode == ChainMode::set) {
    std::set<CellAddress> seen{root};
    std::vector<CellAddress> todo{root};
    Score total;
    while (!todo.empty()) {
      CellAddress c = todo.back();
      todo.pop_back();
      if (in_cycle(c)) return Score::opaque();
      total += scored(c);
      for (const auto& p : precedents(c)) {
        if (seen.insert(p).second) todo.push_back(p);
      }
    }
    return total;
  }
  std::function<Score(const CellAddress&)> walk = [&](const CellAddress& c) -> Score {
    auto it = impl_->per_path.find(c);
    if (it != impl_->per_path.end()) return it->second;
    if (in_cycle(c)) return impl_->per_path[c] = Score::opaque();
    Score total = scored(c);
    for (const auto& p : precedents(c)) total += walk(p);
    return impl_->per_path[c] = total;
  };
  return walk(root);
}

ModelScore Scorer::model() {
  ModelScore m;
  for (const CellAddress& a : occupied_cells(wb_)) {
    ++m.occupied_count;
    if (value_type(a) == ValueType::label_text) {
      ++m.label_count;
      continue;
    }
    const ScoreBreakdown& b = cell(a);
    m.per_cell.emplace(a, b);
    m.total += b.total;
    if (b.total.is_opaque()) {
      const BreakdownItem* why = b.first_opaque_item();
      m.opaque_cells.emplace_back(a, why ? why->description : "opaque");
    } else {
      m.finite_subtotal += *b.total.finite();
    }
  }
  for (const auto& t : wb_.tables()) {
    if (!t.connection) continue;
    TableItem item;
    item.table = t.name;
    item.connection = t.connection;
    if (t.connection->definition_text.empty()) {
      item.cost = Score::opaque();
      item.description = "connection '" + t.connection->name + "' exposes no definition";
    } else {
      item.cost = Score::steps(-cfg_.costs.connection_definition);
      item.description = "open the " + std::string(to_string(t.connection->kind)) + " definition of connection '" +
                         t.connection->name + "'";
    }
    m.total += item.cost;
    if (!item.cost.is_opaque()) m.finite_subtotal += *item.cost.finite();
    m.table_items.push_back(std::move(item));
  }
  return m;
}

ScoreBreakdown surface_score(const WorkbookModel& wb, const CellAddress& a, const ScoringConfig& cfg,
                             const Lexicons& lex) {
  return Scorer(wb, cfg, FunctionCatalog::builtin(), lex).surface(a);
}

ScoreBreakdown source_score(const WorkbookModel& wb, const CellAddress& a, const ScoringConfig& cfg,
                            const Lexicons& lex, const FunctionCatalog& catalog) {
  return Scorer(wb, cfg, catalog, lex).source(a);
}

ScoreBreakdown cell_score(const WorkbookModel& wb, const CellAddress& a, const ScoringConfig& cfg,
                          const Lexicons& lex, const FunctionCatalog& catalog) {
  return Scorer(wb, cfg, catalog, lex).cell(a);
}

bool downstream_error_handled(const WorkbookModel& wb, const CellAddress& a, const FunctionCatalog& catalog) {
  return Scorer(wb, {}, catalog).downstream_error_handled(a);
}

Score chain_score(const WorkbookModel& wb, const CellAddress& a, const ScoringConfig& cfg, const Lexicons& lex,
                  const FunctionCatalog& catalog) {
  return Scorer(wb, cfg, catalog, lex).chain(a);
}

ModelScore model_score(const WorkbookModel& wb, const ScoringConfig& cfg, const Lexicons& lex,
                       const FunctionCatalog& catalog) {
  return Scorer(wb, cfg, catalog, lex).model();
}

}  // namespace clearsheet
