#include "clearsheet/audit.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace clearsheet {

namespace {

using ojson = nlohmann::ordered_json;

bool parse_bool(const std::string& key, const std::string& v) {
  std::string t = to_lower(v);
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  throw ConfigError("config key '" + key + "' expects true or false, got '" + v + "'");
}

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "' expects an integer, got '" + v + "'");
  }
  return out;
}

int parse_positive(const std::string& key, const std::string& v) {
  int n = parse_int(key, v);
  if (n < 1) throw ConfigError("config key '" + key + "' must be positive");
  return n;
}

}  // namespace

VicinityConfig parse_vicinity(std::string_view text, VicinityConfig base) {
  std::string t = to_lower(trim(text));
  auto x = t.find('x');
  if (x == std::string::npos) throw ConfigError("vicinity must look like ROWSxCOLS, got '" + std::string(text) + "'");
  base.rows_visible = parse_positive("vicinity", t.substr(0, x));
  base.cols_visible = parse_positive("vicinity", t.substr(x + 1));
  return base;
}

AuditConfig parse_config(std::string_view text, AuditConfig cfg) {
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(n) + ": expected key=value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    StepCosts& c = cfg.scoring.costs;
    std::map<std::string, int*> steps{{"steps.formula_inspection", &c.formula_inspection},
                                      {"steps.navigation", &c.navigation},
                                      {"steps.function_help", &c.function_help},
                                      {"steps.comment_label", &c.comment_label},
                                      {"steps.validation_label", &c.validation_label},
                                      {"steps.documentation_label", &c.documentation_label},
                                      {"steps.unhide_row_col", &c.unhide_row_col},
                                      {"steps.unhide_sheet", &c.unhide_sheet},
                                      {"steps.connection_definition", &c.connection_definition}};
    if (auto it = steps.find(key); it != steps.end()) {
      *it->second = parse_positive(key, value);
    } else if (key == "vicinity") {
      cfg.scoring.vicinity = parse_vicinity(value, cfg.scoring.vicinity);
    } else if (key == "vicinity.rows") {
      cfg.scoring.vicinity.rows_visible = parse_positive(key, value);
    } else if (key == "vicinity.cols") {
      cfg.scoring.vicinity.cols_visible = parse_positive(key, value);
    } else if (key == "vicinity.honor_frozen_panes") {
      cfg.scoring.vicinity.honor_frozen_panes = parse_bool(key, value);
    } else if (key == "strict_labels") {
      cfg.scoring.strict_labels = parse_bool(key, value);
    } else if (key == "chain_mode") {
      if (value == "set") {
        cfg.scoring.chain_mode = ChainMode::set;
      } else if (value == "per-path") {
        cfg.scoring.chain_mode = ChainMode::per_path;
      } else {
        throw ConfigError("chain_mode must be set or per-path");
      }
    } else if (key == "fail_threshold") {
      int v = parse_int(key, value);
      if (v > 0) throw ConfigError("fail_threshold must be zero or negative");
      cfg.fail_threshold = v;
    } else if (key == "format") {
      if (value == "text") {
        cfg.format = OutputFormat::text;
      } else if (value == "structured") {
        cfg.format = OutputFormat::structured;
      } else {
        throw ConfigError("format must be text or structured");
      }
    } else if (key == "catalog") {
      cfg.catalog_path = value;
    } else if (key.rfind("lexicon.", 0) == 0) {
      std::string cat = key.substr(8);
      static const std::set<std::string> known{"units", "formats", "identity", "interrogatives", "documentation"};
      if (!known.count(cat)) throw ConfigError("unknown lexicon category '" + cat + "'");
      cfg.lexicon_paths[cat] = value;
    } else if (key == "unknown_function_grade") {
      if (value == "insufficient") {
        cfg.unknown_function_grade = ParamGrade::insufficient;
      } else if (value == "help") {
        cfg.unknown_function_grade = ParamGrade::help_sufficient;
      } else {
        throw ConfigError("unknown_function_grade must be insufficient or help");
      }
    } else if (key == "passwords_disclosed") {
      cfg.load.passwords_disclosed = parse_bool(key, value);
    } else if (key == "disclosed_sheets") {
      std::stringstream ss(value);
      std::string s;
      while (std::getline(ss, s, ',')) {
        if (!trim(s).empty()) cfg.load.disclosed_sheets.push_back(trim(s));
      }
    } else if (key == "timing") {
      cfg.timing = parse_bool(key, value);
    } else if (key == "jobs") {
      cfg.jobs = parse_positive(key, value);
    } else {
      throw ConfigError("config line " + std::to_string(n) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

AuditConfig load_config(const std::filesystem::path& path, AuditConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

int worse_exit_code(int a, int b) {
  auto rank = [](int c) {
    switch (c) {
      case kExitLoadFailure: return 3;
      case kExitOpaque: return 2;
      case kExitBelowThreshold: return 1;
      default: return 0;
    }
  };
  return rank(a) >= rank(b) ? a : b;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

AuditResources load_resources(const AuditConfig& cfg) {
  AuditResources res{cfg.catalog_path ? load_catalog(*cfg.catalog_path) : FunctionCatalog::builtin(),
                     Lexicons::builtin()};
  res.catalog.unknown_grade = cfg.unknown_function_grade;
  for (const auto& [cat, path] : cfg.lexicon_paths) {
    TermList list = load_term_list(path);
    if (cat == "units") res.lexicons.units = std::move(list);
    if (cat == "formats") res.lexicons.formats = std::move(list);
    if (cat == "identity") res.lexicons.identity = std::move(list);
    if (cat == "interrogatives") res.lexicons.interrogatives = std::move(list);
    if (cat == "documentation") res.lexicons.documentation_sheets = std::move(list);
  }
  return res;
}

FileReport audit_workbook(const WorkbookModel& wb, const AuditConfig& cfg, const AuditResources& res,
                          std::string label) {
  FileReport fr;
  fr.path = std::move(label);
  Scorer scorer(wb, cfg.scoring, res.catalog, res.lexicons);
  ModelScore m = scorer.model();
  fr.findings = lint(scorer, m);
  for (const auto& s : wb.sheets()) fr.sheet_order.push_back(s.name);
  for (const auto& [a, b] : m.per_cell) {
    if (const CellRecord* r = wb.cell(a); r && r->formula_text) fr.formulas[a] = *r->formula_text;
  }
  if (m.total.is_opaque()) {
    fr.exit_code = kExitOpaque;
  } else if (cfg.fail_threshold && *m.total.finite() < *cfg.fail_threshold) {
    fr.exit_code = kExitBelowThreshold;
  }
  fr.model = std::move(m);
  return fr;
}

FileReport audit_file(const std::filesystem::path& path, const AuditConfig& cfg, const AuditResources& res) {
  auto start = std::chrono::steady_clock::now();
  FileReport fr;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fr.path = path.string();
    fr.load_error = "cannot open '" + path.string() + "'";
    fr.load_error_kind = "file-not-found";
    fr.exit_code = kExitLoadFailure;
    return fr;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string bytes = buf.str();
  std::string digest = "sha256:" + sha256_hex(bytes);
  try {
    WorkbookModel wb = load_workbook_bytes(std::move(bytes), cfg.load);
    fr = audit_workbook(wb, cfg, res, path.string());
  } catch (const LoadError& e) {
    fr.path = path.string();
    fr.load_error = e.what();
    fr.load_error_kind = e.kind() == LoadError::Kind::file_not_found ? "file-not-found"
                         : e.kind() == LoadError::Kind::not_ooxml    ? "not-ooxml"
                                                                     : "malformed-part";
    fr.load_error_member = e.member();
    fr.exit_code = kExitLoadFailure;
  }
  fr.digest = digest;
  if (cfg.timing) {
    fr.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return fr;
}

AuditReport run_audit(const std::vector<std::filesystem::path>& paths, const AuditConfig& cfg,
                      const AuditResources& res) {
  AuditReport report;
  report.config = cfg;
  report.files.resize(paths.size());
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::size_t workers = cfg.jobs > 0 ? static_cast<std::size_t>(cfg.jobs) : hw;
  workers = std::min(workers, paths.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < paths.size(); i = next++) report.files[i] = audit_file(paths[i], cfg, res);
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& f : report.files) report.exit_code = worse_exit_code(report.exit_code, f.exit_code);
  return report;
}

AuditReport run_audit(const std::vector<std::filesystem::path>& paths, const AuditConfig& cfg) {
  return run_audit(paths, cfg, load_resources(cfg));
}

std::string summary_line(Score total) {
  if (total.is_opaque()) return "OPAQUE";
  if (total.is_transparent()) return "TRANSPARENT (0 steps from transparency)";
  return std::to_string(*total.finite()) + " steps from transparency";
}

namespace {

ojson score_json(Score s) { return s.is_opaque() ? ojson("Opaque") : ojson(*s.finite()); }

std::string classification(Score s) {
  if (s.is_opaque()) return "opaque";
  return s.is_transparent() ? "transparent" : "translucent";
}

ojson label_json(const LabelPart& p) {
  ojson j;
  j["kind"] = to_string(p.kind);
  j["text"] = p.text;
  j["source"] = to_string(p.source);
  j["cell"] = p.cell ? ojson(format_address(*p.cell)) : ojson(nullptr);
  j["steps"] = p.steps;
  return j;
}

ojson item_json(const BreakdownItem& i) {
  ojson j;
  j["level"] = to_string(i.level);
  j["kind"] = i.kind;
  j["cost"] = score_json(i.cost);
  j["description"] = i.description;
  j["rule"] = i.rule.empty() ? ojson(nullptr) : ojson(i.rule);
  j["span"] = i.span ? ojson::array({i.span->begin, i.span->end}) : ojson(nullptr);
  j["target"] = i.target ? ojson(format_address(*i.target)) : ojson(nullptr);
  j["label"] = i.label ? label_json(*i.label) : ojson(nullptr);
  return j;
}

ojson config_json(const AuditConfig& c) {
  ojson j;
  j["vicinity"] = {{"rows", c.scoring.vicinity.rows_visible},
                   {"cols", c.scoring.vicinity.cols_visible},
                   {"honor_frozen_panes", c.scoring.vicinity.honor_frozen_panes}};
  j["strict_labels"] = c.scoring.strict_labels;
  j["chain_mode"] = to_string(c.scoring.chain_mode);
  j["fail_threshold"] = c.fail_threshold ? ojson(*c.fail_threshold) : ojson(nullptr);
  j["unknown_function_grade"] = to_string(c.unknown_function_grade);
  const StepCosts& s = c.scoring.costs;
  j["steps"] = {{"formula_inspection", s.formula_inspection}, {"navigation", s.navigation},
                {"function_help", s.function_help},           {"comment_label", s.comment_label},
                {"validation_label", s.validation_label},     {"documentation_label", s.documentation_label},
                {"unhide_row_col", s.unhide_row_col},         {"unhide_sheet", s.unhide_sheet},
                {"connection_definition", s.connection_definition}};
  j["catalog"] = c.catalog_path ? ojson(c.catalog_path->string()) : ojson("builtin");
  return j;
}

ojson finding_json(const Finding& f) {
  ojson j;
  const RuleInfo* r = find_rule(f.rule_id);
  j["rule"] = f.rule_id;
  j["name"] = r ? std::string(r->name) : f.rule_id;
  j["severity"] = to_string(f.severity);
  j["cell"] = f.address ? ojson(format_address(*f.address)) : ojson(nullptr);
  j["table"] = f.table ? ojson(*f.table) : ojson(nullptr);
  j["message"] = f.message;
  j["recommendation"] = r ? std::string(r->recommendation) : "";
  return j;
}

// Scored cells in sheet order, then row-major.
std::vector<const ScoreBreakdown*> ordered_cells(const FileReport& f) {
  std::vector<const ScoreBreakdown*> out;
  for (const auto& [a, b] : f.model->per_cell) out.push_back(&b);
  std::map<std::string, std::size_t> rank;
  for (std::size_t i = 0; i < f.sheet_order.size(); ++i) rank[f.sheet_order[i]] = i;
  std::stable_sort(out.begin(), out.end(), [&](const ScoreBreakdown* x, const ScoreBreakdown* y) {
    auto key = [&](const ScoreBreakdown* b) { return std::tuple(rank[b->address.sheet], b->address.row, b->address.col); };
    return key(x) < key(y);
  });
  return out;
}

ojson file_json(const FileReport& f) {
  ojson j;
  j["path"] = f.path;
  j["digest"] = f.digest.empty() ? ojson(nullptr) : ojson(f.digest);
  j["status"] = f.load_error ? "load-error" : "ok";
  j["exit_code"] = f.exit_code;
  if (f.load_error) {
    j["error"] = {{"kind", f.load_error_kind}, {"member", f.load_error_member}, {"message", *f.load_error}};
  }
  if (f.model) {
    const ModelScore& m = *f.model;
    ojson model;
    model["total"] = score_json(m.total);
    model["classification"] = classification(m.total);
    model["summary"] = summary_line(m.total);
    model["finite_subtotal"] = m.finite_subtotal;
    model["occupied_cells"] = m.occupied_count;
    model["label_cells"] = m.label_count;
    model["scored_cells"] = m.per_cell.size();
    ojson opaque = ojson::array();
    for (const auto& [a, why] : m.opaque_cells) opaque.push_back({{"cell", format_address(a)}, {"reason", why}});
    model["opaque_cells"] = opaque;
    ojson tables = ojson::array();
    for (const auto& t : m.table_items) {
      tables.push_back({{"table", t.table},
                        {"connection", t.connection ? ojson(t.connection->name) : ojson(nullptr)},
                        {"kind", t.connection ? ojson(std::string(to_string(t.connection->kind))) : ojson(nullptr)},
                        {"cost", score_json(t.cost)},
                        {"description", t.description}});
    }
    model["table_items"] = tables;
    ojson cells = ojson::array();
    for (const ScoreBreakdown* b : ordered_cells(f)) {
      ojson c;
      c["cell"] = format_address(b->address);
      c["type"] = to_string(b->type);
      auto ft = f.formulas.find(b->address);
      c["formula"] = ft != f.formulas.end() ? ojson(ft->second) : ojson(nullptr);
      c["surface"] = score_json(b->surface);
      c["source"] = score_json(b->source);
      c["total"] = score_json(b->total);
      ojson items = ojson::array();
      for (const auto& i : b->items) items.push_back(item_json(i));
      c["items"] = items;
      ojson parts = ojson::array();
      for (const auto& p : b->labels.parts) parts.push_back(label_json(p));
      ojson missing = ojson::array();
      for (PartKind k : b->labels.missing) missing.push_back(to_string(k));
      c["labels"] = {{"parts", parts}, {"missing", missing}};
      cells.push_back(std::move(c));
    }
    model["cells"] = cells;
    j["model"] = model;
  } else {
    j["model"] = nullptr;
  }
  ojson findings = ojson::array();
  for (const auto& fi : f.findings) findings.push_back(finding_json(fi));
  j["findings"] = findings;
  if (f.elapsed_ms) j["timing_ms"] = *f.elapsed_ms;
  return j;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

}  // namespace

std::string emit_structured(const AuditReport& report) {
  ojson j;
  j["schema"] = kReportSchema;
  j["tool_version"] = report.tool_version;
  j["config"] = config_json(report.config);
  j["exit_code"] = report.exit_code;
  ojson files = ojson::array();
  for (const auto& f : report.files) files.push_back(file_json(f));
  j["files"] = files;
  return j.dump(2) + "\n";
}

std::string emit_text(const AuditReport& report) {
  std::ostringstream os;
  for (std::size_t fi = 0; fi < report.files.size(); ++fi) {
    const FileReport& f = report.files[fi];
    if (fi) os << "\n";
    os << "== " << f.path << " ==\n";
    if (f.load_error) {
      os << "LOAD ERROR (" << f.load_error_kind << "): " << *f.load_error << "\n";
      continue;
    }
    const ModelScore& m = *f.model;
    os << "Model: " << summary_line(m.total) << "\n";
    if (m.total.is_opaque()) {
      os << "Finite subtotal: " << m.finite_subtotal << " over " << (m.per_cell.size() - m.opaque_cells.size())
         << " finite cells\n";
    }
    os << "Cells: " << m.occupied_count << " occupied, " << m.label_count << " labels, " << m.per_cell.size()
       << " scored\n";
    if (!m.opaque_cells.empty()) {
      os << "\nOpaque cells:\n";
      for (const auto& [a, why] : m.opaque_cells) os << "  " << pad(format_address(a), 14) << " " << why << "\n";
    }
    if (!m.table_items.empty()) {
      os << "\nTables:\n";
      for (const auto& t : m.table_items) os << "  " << pad(t.table, 14) << " " << pad(to_string(t.cost), 7) << " " << t.description << "\n";
    }
    std::string sheet;
    for (const ScoreBreakdown* b : ordered_cells(f)) {
      if (b->address.sheet != sheet) {
        sheet = b->address.sheet;
        os << "\nSheet " << sheet << "\n";
        os << "  " << pad("cell", 8) << pad("surface", 9) << pad("source", 9) << pad("total", 9) << "reasons\n";
      }
      std::string reasons;
      for (const auto& i : b->items) {
        reasons += (reasons.empty() ? "" : "; ") + i.description + " [" + to_string(i.cost) + "]";
      }
      os << "  " << pad(format_address(b->address, false), 8) << pad(to_string(b->surface), 9)
         << pad(to_string(b->source), 9) << pad(to_string(b->total), 9) << reasons << "\n";
    }
    if (!f.findings.empty()) {
      os << "\nFindings:\n";
      for (const auto& fd : f.findings) {
        const RuleInfo* r = find_rule(fd.rule_id);
        os << "  " << pad(std::string(to_string(fd.severity)), 6) << pad(fd.rule_id, 4) << " "
           << (r ? std::string(r->name) : "") << " "
           << (fd.address ? format_address(*fd.address) : "table " + fd.table.value_or("?")) << ": " << fd.message
           << "\n";
      }
    }
    if (f.elapsed_ms) os << "\nElapsed: " << std::fixed << std::setprecision(1) << *f.elapsed_ms << " ms\n";
  }
  return os.str();
}

std::string emit(const AuditReport& report, OutputFormat format) {
  return format == OutputFormat::structured ? emit_structured(report) : emit_text(report);
}

}  // namespace clearsheet
