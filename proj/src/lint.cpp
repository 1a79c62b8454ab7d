#include "clearsheet/lint.hpp"

#include <set>
#include <tuple>

namespace clearsheet {

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::error: return "error";
    case Severity::warn: return "warn";
    case Severity::info: return "info";
  }
  return "?";
}

const std::vector<RuleInfo>& lint_rules() {
  static const std::vector<RuleInfo> rules{
      {"L1", "literal-in-formula", "use appropriately named references instead of literals"},
      {"L2", "unconstrained-indirect", "seek alternatives to indirect references"},
      {"L3", "unhandled-error-cell", "fix cells reporting errors that are not handled"},
      {"L4", "hidden-content", "reveal hidden content or disclose the protection password"},
      {"L5", "daisy-chain", "reference remote cells directly instead of forwarding them through local cells"},
      {"L6", "insufficient-label", "label every value with the parts its type requires"},
      {"L7", "freeze-panes", "use freeze panes to keep row and column labels in view"},
      {"L8", "structured-reference", "use structured references when practical"},
      {"L9", "circular-reference", "remove circular references"},
      {"L10", "opaque-source", "make every source of a formula inspectable"},
  };
  return rules;
}

const RuleInfo* find_rule(std::string_view id) {
  for (const auto& r : lint_rules()) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

namespace {

bool inside(const AreaRef& outer, const AreaRef& inner) {
  return outer.contains(inner.top_left) && outer.contains(inner.bottom_right);
}

}  // namespace

std::vector<Finding> lint(Scorer& scorer, const ModelScore& model) {
  const WorkbookModel& wb = scorer.workbook();
  std::vector<Finding> out;
  std::set<std::tuple<std::string, CellAddress, std::string>> seen;
  auto emit = [&](std::string rule, Severity sev, const CellAddress& a, std::string msg) {
    if (!seen.insert({rule, a, msg}).second) return;
    out.push_back(Finding{std::move(rule), sev, a, std::nullopt, std::move(msg)});
  };

  for (const CellAddress& a : occupied_cells(wb)) {
    auto it = model.per_cell.find(a);
    if (it == model.per_cell.end()) continue;
    const ScoreBreakdown& b = it->second;

    for (const auto& item : b.items) {
      if (item.cost.is_opaque()) {
        emit(item.rule.empty() ? "L10" : item.rule, Severity::error, a, item.description);
      } else if (item.kind == "unhide" && item.level == ItemLevel::surface) {
        emit("L4", Severity::warn, a, item.description + " costs " + std::to_string(-*item.cost.finite()) + " steps");
      }
    }

    if (!b.labels.missing.empty() && !b.labels.beyond_vicinity.empty()) {
      std::string where;
      for (const auto& l : b.labels.beyond_vicinity) where += (where.empty() ? "" : ", ") + format_address(l, false);
      emit("L7", Severity::warn, a, "labels at " + where + " are outside the window; freezing panes would keep them in view");
    }

    const FormulaAst* ast = b.has_formula ? scorer.formula(a) : nullptr;
    if (!ast) continue;
    const Node* root = unwrap(ast->root.get());
    if (const auto* ref = root ? root->as<CellRef>() : nullptr) {
      const auto& pre = scorer.precedents(a);
      bool remote = ref->qualifier.has_value();
      if (!remote && !pre.empty()) remote = !co_visible(wb, {a, pre.front()}, scorer.config().vicinity);
      if (remote) {
        emit("L5", Severity::warn, a, "formula only forwards " + serialize(*root) + "; reference it directly where it is used");
      }
    }
    if (const TableModel* t = wb.table_at(a); t && a.row >= t->first_data_row() && a.row <= t->last_data_row()) {
      for (const auto& op : operands(*ast)) {
        if (op.kind != OperandKind::cell_area) continue;
        const auto* c = op.leaf->as<CellRef>();
        const auto* r = op.leaf->as<RangeRef>();
        std::optional<SheetQualifier> q = c ? c->qualifier : r->qualifier;
        if (q && wb.sheet(q->sheet) != wb.sheet(a.sheet)) continue;
        AreaRef target = c ? AreaRef::single({t->area.sheet(), c->cell.row, c->cell.col})
                           : AreaRef{{t->area.sheet(), r->first.row, r->first.col}, {t->area.sheet(), r->last.row, r->last.col}};
        if (inside(t->area, target)) {
          emit("L8", Severity::info, a, serialize(*op.leaf) + " points into table " + t->name + "; a structured reference would name it");
          break;
        }
      }
    }
  }

  for (const auto& item : model.table_items) {
    if (item.cost.is_opaque()) out.push_back(Finding{"L10", Severity::error, std::nullopt, item.table, item.description});
  }
  return out;
}

}  // namespace clearsheet
