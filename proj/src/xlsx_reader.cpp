#include "clearsheet/xlsx.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "clearsheet/formula.hpp"
#include "clearsheet/number_format.hpp"
#include "xml_tree.hpp"
#include "zip_archive.hpp"

namespace clearsheet {

namespace {

using detail::XmlNode;

struct Relationship {
  std::string type;  // last path segment of the relationship type URI
  std::string target;
  bool external = false;
};

using RelMap = std::map<std::string, Relationship>;

std::string dir_of(const std::string& part) {
  auto slash = part.rfind('/');
  return slash == std::string::npos ? "" : part.substr(0, slash + 1);
}

std::string resolve_target(const std::string& base_part, const std::string& target) {
  std::string joined = (!target.empty() && target.front() == '/') ? target.substr(1) : dir_of(base_part) + target;
  std::vector<std::string> segs;
  std::stringstream ss(joined);
  std::string seg;
  while (std::getline(ss, seg, '/')) {
    if (seg.empty() || seg == ".") continue;
    if (seg == "..") {
      if (!segs.empty()) segs.pop_back();
      continue;
    }
    segs.push_back(seg);
  }
  std::string out;
  for (std::size_t i = 0; i < segs.size(); ++i) out += (i ? "/" : "") + segs[i];
  return out;
}

std::string rels_path_for(const std::string& part) {
  auto slash = part.rfind('/');
  std::string dir = slash == std::string::npos ? "" : part.substr(0, slash + 1);
  std::string file = slash == std::string::npos ? part : part.substr(slash + 1);
  return dir + "_rels/" + file + ".rels";
}

int to_int(const std::string& s, int fallback = 0) {
  int v = fallback;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

bool truthy(const std::string* s) { return s && (*s == "1" || *s == "true"); }

// Keeps a copy of every cell write so later passes (shared formulas, list sources) can read them back.
class RecordingBuilder : public WorkbookBuilder {
 public:
  void set_value(const CellAddress& a, CellValue v, std::string fmt) {
    WorkbookBuilder::set_value(a, v, fmt);
    auto& r = cells[a];
    r.address = a;
    r.stored_value = std::move(v);
    r.number_format = std::move(fmt);
  }
  void set_formula(const CellAddress& a, std::string text, CellValue v, std::string fmt) {
    WorkbookBuilder::set_formula(a, text, v, fmt);
    auto& r = cells[a];
    r.address = a;
    r.formula_text = std::move(text);
    r.stored_value = std::move(v);
    r.number_format = std::move(fmt);
  }

  std::map<CellAddress, CellRecord> cells;
};

class PackageReader {
 public:
  PackageReader(std::string bytes, const LoadOptions& options) : options_(options) {
    try {
      zip_ = std::make_unique<detail::ZipArchive>(std::move(bytes));
    } catch (const detail::ZipError& e) {
      throw LoadError(LoadError::Kind::not_ooxml, "", std::string("not an OOXML package: ") + e.what());
    }
    if (!zip_->contains("[Content_Types].xml")) {
      throw LoadError(LoadError::Kind::not_ooxml, "", "not an OOXML package: [Content_Types].xml missing");
    }
  }

  WorkbookModel read() {
    std::string workbook_part = "xl/workbook.xml";
    if (zip_->contains("_rels/.rels")) {
      for (const auto& [id, rel] : rels("_rels/.rels", "")) {
        if (rel.type == "officeDocument") workbook_part = rel.target;
      }
    }
    if (!zip_->contains(workbook_part)) {
      throw LoadError(LoadError::Kind::not_ooxml, "", "not a spreadsheet package: no workbook part");
    }
    auto wb_xml = xml(workbook_part);
    RelMap wb_rels = rels(rels_path_for(workbook_part), workbook_part);

    for (const auto& [id, rel] : wb_rels) {
      if (rel.type == "sharedStrings") read_shared_strings(rel.target);
      if (rel.type == "styles") read_styles(rel.target);
      if (rel.type == "connections") read_connections(rel.target);
    }

    if (const XmlNode* prot = wb_xml->child("workbookProtection"); prot && truthy(prot->attr("lockStructure"))) {
      builder_.lock_structure();
    }
    if (options_.passwords_disclosed) builder_.disclose_passwords(true);
    for (const auto& s : options_.disclosed_sheets) builder_.disclose_sheet_password(s);

    const XmlNode* sheets = wb_xml->child("sheets");
    std::vector<std::pair<std::string, std::string>> sheet_parts;
    if (sheets) {
      for (const XmlNode* s : sheets->children_named("sheet")) {
        std::string name = s->attr_or("name");
        std::string state = s->attr_or("state", "visible");
        SheetState st = state == "veryHidden" ? SheetState::very_hidden
                        : state == "hidden"   ? SheetState::hidden
                                              : SheetState::visible;
        std::string rid = s->attr_or("id");
        auto it = wb_rels.find(rid);
        if (it == wb_rels.end()) {
          throw LoadError(LoadError::Kind::malformed_part, workbook_part, workbook_part + ": sheet '" + name +
                                                                              "' has no relationship target");
        }
        // Chartsheets and dialog sheets carry no cells.
        if (it->second.type != "worksheet") continue;
        try {
          builder_.add_sheet(name, st);
        } catch (const WorkbookError& e) {
          throw LoadError(LoadError::Kind::malformed_part, workbook_part, workbook_part + ": " + e.what());
        }
        sheet_names_.push_back(name);
        sheet_parts.emplace_back(name, it->second.target);
      }
    }
    for (const auto& [name, part] : sheet_parts) read_worksheet(name, part);
    resolve_deferred_validations();
    read_defined_names(*wb_xml);

    try {
      return std::move(builder_).build();
    } catch (const WorkbookError& e) {
      throw LoadError(LoadError::Kind::malformed_part, workbook_part, std::string("inconsistent workbook: ") + e.what());
    }
  }

 private:
  std::unique_ptr<XmlNode> xml(const std::string& member) {
    try {
      return detail::parse_xml(zip_->read(member));
    } catch (const std::exception& e) {
      throw LoadError(LoadError::Kind::malformed_part, member, member + ": " + e.what());
    }
  }

  RelMap rels(const std::string& rels_member, const std::string& source_part) {
    RelMap out;
    if (!zip_->contains(rels_member)) return out;
    auto root = xml(rels_member);
    for (const XmlNode* r : root->children_named("Relationship")) {
      Relationship rel;
      std::string type = r->attr_or("Type");
      rel.type = type.substr(type.rfind('/') + 1);
      rel.external = r->attr_or("TargetMode") == "External";
      rel.target = rel.external ? r->attr_or("Target") : resolve_target(source_part, r->attr_or("Target"));
      out.emplace(r->attr_or("Id"), std::move(rel));
    }
    return out;
  }

  static std::string rich_text(const XmlNode& si) {
    std::string out;
    for (const auto& c : si.children) {
      if (c->name == "t") out += c->text;
      if (c->name == "r") {
        if (const XmlNode* t = c->child("t")) out += t->text;
      }
    }
    return out;
  }

  void read_shared_strings(const std::string& part) {
    auto root = xml(part);
    for (const XmlNode* si : root->children_named("si")) shared_strings_.push_back(rich_text(*si));
  }

  void read_styles(const std::string& part) {
    auto root = xml(part);
    std::map<int, std::string> custom;
    if (const XmlNode* fmts = root->child("numFmts")) {
      for (const XmlNode* f : fmts->children_named("numFmt")) {
        custom[to_int(f->attr_or("numFmtId"))] = f->attr_or("formatCode");
      }
    }
    if (const XmlNode* xfs = root->child("cellXfs")) {
      for (const XmlNode* xf : xfs->children_named("xf")) {
        int id = to_int(xf->attr_or("numFmtId", "0"));
        auto it = custom.find(id);
        std::string code = it != custom.end() ? it->second : builtin_number_format(id);
        xf_formats_.push_back(code.empty() ? "General" : code);
      }
    }
  }

  void read_connections(const std::string& part) {
    auto root = xml(part);
    for (const XmlNode* c : root->children_named("connection")) {
      DataConnection dc;
      dc.name = c->attr_or("name");
      const XmlNode* db = c->child("dbPr");
      std::string conn = db ? db->attr_or("connection") : "";
      std::string command = db ? db->attr_or("command") : "";
      if (conn.find("Microsoft.Mashup") != std::string::npos || dc.name.rfind("Query - ", 0) == 0) {
        dc.kind = ConnectionKind::power_query;
        dc.definition_text = command.empty() ? conn : command;
      } else if (db && !command.empty()) {
        dc.kind = ConnectionKind::ms_query;
        dc.definition_text = command;
      } else {
        dc.kind = ConnectionKind::other;
        if (db) dc.definition_text = conn;
        if (const XmlNode* tp = c->child("textPr")) dc.definition_text = tp->attr_or("sourceFile");
        if (const XmlNode* wp = c->child("webPr")) dc.definition_text = wp->attr_or("url");
      }
      if (dc.kind != ConnectionKind::other && dc.definition_text.empty()) dc.kind = ConnectionKind::other;
      connections_[c->attr_or("id")] = std::move(dc);
    }
  }

  std::string format_for(const XmlNode& c) const {
    int s = to_int(c.attr_or("s", "0"));
    if (s >= 0 && static_cast<std::size_t>(s) < xf_formats_.size()) return xf_formats_[static_cast<std::size_t>(s)];
    return "General";
  }

  CellValue value_for(const XmlNode& c, const std::string& part) const {
    std::string t = c.attr_or("t", "n");
    const XmlNode* v = c.child("v");
    if (t == "inlineStr") {
      const XmlNode* is = c.child("is");
      return is ? CellValue{rich_text(*is)} : CellValue{Empty{}};
    }
    if (!v) return Empty{};
    const std::string& raw = v->text;
    if (t == "s") {
      int idx = to_int(raw, -1);
      if (idx < 0 || static_cast<std::size_t>(idx) >= shared_strings_.size()) {
        throw LoadError(LoadError::Kind::malformed_part, part, part + ": shared string index out of range");
      }
      return shared_strings_[static_cast<std::size_t>(idx)];
    }
    if (t == "str" || t == "d") return raw;
    if (t == "b") return raw == "1" || raw == "true";
    if (t == "e") {
      if (auto e = parse_error_code(raw)) return *e;
      return ErrorCode::value;
    }
    if (raw.empty()) return Empty{};
    char* end = nullptr;
    double d = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str()) throw LoadError(LoadError::Kind::malformed_part, part, part + ": bad numeric value");
    return d;
  }

  struct SharedMaster {
    std::string text;
    int row = 0;
    int col = 0;
  };

  void read_worksheet(const std::string& sheet, const std::string& part) {
    auto root = xml(part);
    const XmlNode* views = root->child("sheetViews");
    if (const XmlNode* view = views ? views->child("sheetView") : nullptr) {
      if (const XmlNode* pane = view->child("pane")) {
        std::string state = pane->attr_or("state");
        if (state == "frozen" || state == "frozenSplit") {
          builder_.freeze(sheet, to_int(pane->attr_or("ySplit", "0")), to_int(pane->attr_or("xSplit", "0")));
        }
      }
    }
    if (const XmlNode* cols = root->child("cols")) {
      for (const XmlNode* col : cols->children_named("col")) {
        if (!truthy(col->attr("hidden"))) continue;
        int lo = to_int(col->attr_or("min", "0"));
        int hi = std::min(to_int(col->attr_or("max", "0")), kMaxCols);
        for (int c = lo; c >= 1 && c <= hi; ++c) builder_.hide_col(sheet, c);
      }
    }
    if (const XmlNode* prot = root->child("sheetProtection"); prot && truthy(prot->attr("sheet"))) {
      builder_.protect_sheet(sheet);
    }

    std::map<std::string, SharedMaster> masters;
    struct PendingShared {
      CellAddress at;
      std::string si;
    };
    std::vector<PendingShared> pending;
    std::vector<std::pair<AreaRef, std::string>> arrays;

    if (const XmlNode* data = root->child("sheetData")) {
      int row_cursor = 0;
      for (const XmlNode* row : data->children_named("row")) {
        row_cursor = row->attr("r") ? to_int(*row->attr("r")) : row_cursor + 1;
        if (truthy(row->attr("hidden"))) builder_.hide_row(sheet, row_cursor);
        int col_cursor = 0;
        for (const XmlNode* c : row->children_named("c")) {
          CellAddress at{sheet, row_cursor, col_cursor + 1};
          if (const std::string* ref = c->attr("r")) {
            auto area = parse_area(*ref, sheet);
            if (!area) throw LoadError(LoadError::Kind::malformed_part, part, part + ": bad cell reference " + *ref);
            at = area->top_left;
          }
          col_cursor = at.col;
          CellValue value = value_for(*c, part);
          std::string fmt = format_for(*c);
          const XmlNode* f = c->child("f");
          std::string ftype = f ? f->attr_or("t", "normal") : "";
          if (f && ftype == "shared") {
            std::string si = f->attr_or("si");
            if (!f->text.empty()) {
              masters[si] = SharedMaster{f->text, at.row, at.col};
              builder_.set_formula(at, "=" + f->text, std::move(value), fmt);
            } else {
              builder_.set_value(at, std::move(value), fmt);
              pending.push_back({at, si});
            }
          } else if (f && ftype == "array") {
            builder_.set_formula(at, "=" + f->text, std::move(value), fmt);
            if (auto area = parse_area(f->attr_or("ref"), sheet)) arrays.emplace_back(*area, "=" + f->text);
          } else if (f && ftype != "dataTable" && !f->text.empty()) {
            builder_.set_formula(at, "=" + f->text, std::move(value), fmt);
          } else {
            builder_.set_value(at, std::move(value), fmt);
          }
        }
      }
    }
    for (const auto& p : pending) {
      auto it = masters.find(p.si);
      if (it == masters.end()) {
        throw LoadError(LoadError::Kind::malformed_part, part, part + ": shared formula " + p.si + " has no master");
      }
      std::string shifted;
      try {
        shifted = shift_formula("=" + it->second.text, p.at.row - it->second.row, p.at.col - it->second.col);
      } catch (const FormulaError&) {
        shifted = "=" + it->second.text;
      }
      const CellRecord* existing = cell_record(p.at);
      builder_.set_formula(p.at, shifted, existing ? existing->stored_value : CellValue{Empty{}},
                           existing ? existing->number_format : "General");
    }
    for (const auto& [area, text] : arrays) {
      for (int r = area.top_left.row; r <= area.bottom_right.row; ++r) {
        for (int c = area.top_left.col; c <= area.bottom_right.col; ++c) {
          CellAddress at{sheet, r, c};
          const CellRecord* existing = cell_record(at);
          if (existing && existing->formula_text) continue;
          builder_.set_formula(at, text, existing ? existing->stored_value : CellValue{Empty{}},
                               existing ? existing->number_format : "General");
        }
      }
    }

    if (const XmlNode* dvs = root->child("dataValidations")) {
      for (const XmlNode* dv : dvs->children_named("dataValidation")) read_validation(sheet, *dv);
    }

    RelMap sheet_rels = rels(rels_path_for(part), part);
    for (const auto& [id, rel] : sheet_rels) {
      if (rel.external) continue;
      if (rel.type == "comments") read_comments(sheet, rel.target);
    }
    if (const XmlNode* parts = root->child("tableParts")) {
      for (const XmlNode* tp : parts->children_named("tablePart")) {
        auto it = sheet_rels.find(tp->attr_or("id"));
        if (it == sheet_rels.end()) {
          throw LoadError(LoadError::Kind::malformed_part, part, part + ": tablePart without relationship");
        }
        read_table(sheet, it->second.target);
      }
    }
  }

  const CellRecord* cell_record(const CellAddress& at) const {
    auto it = shadow_.find(at);
    return it == shadow_.end() ? nullptr : &it->second;
  }

  void read_validation(const std::string& sheet, const XmlNode& dv) {
    std::optional<std::string> message;
    std::string prompt = dv.attr_or("prompt");
    std::string title = dv.attr_or("promptTitle");
    if (!prompt.empty() || !title.empty()) {
      message = title.empty() ? prompt : (prompt.empty() ? title : title + ": " + prompt);
    }
    std::optional<std::vector<std::string>> list;
    std::string deferred_source;
    if (dv.attr_or("type") == "list") {
      const XmlNode* f1 = dv.child("formula1");
      std::string src = f1 ? f1->text : "";
      if (src.size() >= 2 && src.front() == '"' && src.back() == '"') {
        std::vector<std::string> items;
        std::stringstream ss(src.substr(1, src.size() - 2));
        std::string item;
        while (std::getline(ss, item, ',')) {
          while (!item.empty() && item.front() == ' ') item.erase(item.begin());
          while (!item.empty() && item.back() == ' ') item.pop_back();
          items.push_back(item);
        }
        list = std::move(items);
      } else if (!src.empty()) {
        deferred_source = src;
      }
    }
    std::stringstream ss(dv.attr_or("sqref"));
    std::string piece;
    while (ss >> piece) {
      auto area = parse_area(piece, sheet);
      if (!area) continue;
      for (int r = area->top_left.row; r <= std::min(area->bottom_right.row, area->top_left.row + 10000); ++r) {
        for (int c = area->top_left.col; c <= std::min(area->bottom_right.col, area->top_left.col + 200); ++c) {
          CellAddress at{sheet, r, c};
          if (!deferred_source.empty()) {
            deferred_validations_.push_back({at, message, deferred_source});
          } else if (message || list) {
            builder_.set_validation(at, message, list);
          }
        }
      }
    }
  }

  struct DeferredValidation {
    CellAddress at;
    std::optional<std::string> message;
    std::string source;
  };

  void resolve_deferred_validations() {
    for (const auto& d : deferred_validations_) {
      std::vector<std::string> items;
      auto area = parse_area(d.source, d.at.sheet);
      if (area) {
        for (int r = area->top_left.row; r <= std::min(area->bottom_right.row, area->top_left.row + 1000); ++r) {
          for (int c = area->top_left.col; c <= area->bottom_right.col; ++c) {
            auto it = shadow_.find(CellAddress{area->sheet(), r, c});
            if (it != shadow_.end() && it->second.is_occupied()) items.push_back(display_value(it->second.stored_value));
          }
        }
        builder_.set_validation(d.at, d.message, std::move(items));
      } else {
        // Named list sources stay unresolved; the cell keeps only its message.
        builder_.set_validation(d.at, d.message, std::nullopt);
      }
    }
  }

  void read_comments(const std::string& sheet, const std::string& part) {
    auto root = xml(part);
    const XmlNode* list = root->child("commentList");
    if (!list) return;
    for (const XmlNode* c : list->children_named("comment")) {
      auto area = parse_area(c->attr_or("ref"), sheet);
      const XmlNode* text = c->child("text");
      if (!area || !text) continue;
      builder_.set_comment(area->top_left, rich_text(*text));
    }
  }

  void read_table(const std::string& sheet, const std::string& part) {
    auto root = xml(part);
    std::string name = root->attr_or("displayName", root->attr_or("name"));
    auto area = parse_area(root->attr_or("ref"), sheet);
    if (!area) throw LoadError(LoadError::Kind::malformed_part, part, part + ": bad table ref");
    std::vector<std::string> headers;
    if (const XmlNode* cols = root->child("tableColumns")) {
      for (const XmlNode* tc : cols->children_named("tableColumn")) headers.push_back(tc->attr_or("name"));
    }
    std::optional<DataConnection> connection;
    if (root->attr_or("tableType") == "queryTable") {
      for (const auto& [id, rel] : rels(rels_path_for(part), part)) {
        if (rel.type != "queryTable" || rel.external) continue;
        auto qt = xml(rel.target);
        auto it = connections_.find(qt->attr_or("connectionId"));
        if (it != connections_.end()) connection = it->second;
      }
    }
    builder_.add_table(name, *area, std::move(headers), std::move(connection),
                       to_int(root->attr_or("headerRowCount", "1"), 1), to_int(root->attr_or("totalsRowCount", "0")));
  }

  void read_defined_names(const XmlNode& wb_xml) {
    const XmlNode* names = wb_xml.child("definedNames");
    if (!names) return;
    for (const XmlNode* dn : names->children_named("definedName")) {
      std::string name = dn->attr_or("name");
      if (name.rfind("_xlnm.", 0) == 0 || name.rfind("_xlfn.", 0) == 0) continue;
      DefinedName d;
      d.name = name;
      if (const std::string* local = dn->attr("localSheetId")) {
        std::size_t idx = static_cast<std::size_t>(to_int(*local, -1));
        if (idx < sheet_names_.size()) d.scope_sheet = sheet_names_[idx];
      }
      std::string text = dn->text;
      if (!text.empty() && text.front() == '=') text.erase(text.begin());
      bool qualified = text.find('!') != std::string::npos;
      auto area = qualified ? parse_area(text, "") : std::nullopt;
      bool sheet_known = false;
      if (area) {
        for (const auto& s : sheet_names_) {
          if (s == area->sheet()) sheet_known = true;
        }
      }
      if (area && sheet_known) {
        d.refers_to = *area;
      } else if (is_constant(text)) {
        d.refers_to = NameConstant{text};
      } else {
        d.refers_to = NameExpression{text};
      }
      if (!is_valid_defined_name(d.name)) continue;
      builder_.add_name(std::move(d));
    }
  }

  static bool is_constant(const std::string& text) {
    if (text.empty()) return false;
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"') return true;
    if (text == "TRUE" || text == "FALSE") return true;
    char* end = nullptr;
    std::strtod(text.c_str(), &end);
    return end && *end == '\0';
  }

  const LoadOptions& options_;
  std::unique_ptr<detail::ZipArchive> zip_;
  std::vector<std::string> shared_strings_;
  std::vector<std::string> xf_formats_;
  std::map<std::string, DataConnection> connections_;
  std::vector<std::string> sheet_names_;
  std::vector<DeferredValidation> deferred_validations_;
  RecordingBuilder builder_;
  const std::map<CellAddress, CellRecord>& shadow_ = builder_.cells;
};

}  // namespace

WorkbookModel load_workbook_bytes(std::string bytes, const LoadOptions& options) {
  PackageReader reader(std::move(bytes), options);
  return reader.read();
}

WorkbookModel load_workbook(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(LoadError::Kind::file_not_found, "", "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_workbook_bytes(buf.str(), options);
}

}  // namespace clearsheet
