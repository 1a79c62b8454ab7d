#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "clearsheet/audit.hpp"

namespace testsupport {

using namespace clearsheet;

inline std::filesystem::path fixture_dir() { return CLEARSHEET_FIXTURE_DIR; }
inline std::filesystem::path fixture(const std::string& name) { return fixture_dir() / (name + ".xlsx"); }

inline WorkbookModel load_fixture(const std::string& name, const LoadOptions& opts = {}) {
  return load_workbook(fixture(name), opts);
}

inline CellAddress at(const std::string& text) {
  auto bang = text.rfind('!');
  auto area = parse_area(text.substr(bang + 1), text.substr(0, bang));
  if (!area) throw std::invalid_argument("bad address " + text);
  return area->top_left;
}

inline Score parse_score(const std::string& s) {
  if (s == "Opaque") return Score::opaque();
  return Score::steps(std::stoi(s));
}

// Hand-computed expectations stored beside each fixture workbook.
struct Ledger {
  Score total;
  long long finite_subtotal = 0;
  std::size_t occupied = 0;
  std::size_t labels = 0;
  std::map<std::string, Score> cells;
  std::vector<std::string> opaque;
  std::map<std::string, Score> tables;
};

inline Ledger read_ledger(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  Ledger l;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find(" = ");
    if (eq == std::string::npos) throw std::runtime_error("bad ledger line: " + line);
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 3);
    if (key == "total") {
      l.total = parse_score(value);
    } else if (key == "finite_subtotal") {
      l.finite_subtotal = std::stoll(value);
    } else if (key == "occupied") {
      l.occupied = std::stoul(value);
    } else if (key == "labels") {
      l.labels = std::stoul(value);
    } else if (key == "opaque") {
      l.opaque.push_back(value);
    } else if (key.rfind("cell ", 0) == 0) {
      l.cells[key.substr(5)] = parse_score(value);
    } else if (key.rfind("table ", 0) == 0) {
      l.tables[key.substr(6)] = parse_score(value);
    } else {
      throw std::runtime_error("unknown ledger key: " + key);
    }
  }
  return l;
}

// Empty when the model agrees with the ledger in every recorded figure.
inline std::vector<std::string> ledger_mismatches(const Ledger& l, const ModelScore& m) {
  std::vector<std::string> out;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) out.push_back(what);
  };
  check(m.total == l.total, "total " + to_string(m.total) + " != " + to_string(l.total));
  check(m.finite_subtotal == l.finite_subtotal,
        "finite_subtotal " + std::to_string(m.finite_subtotal) + " != " + std::to_string(l.finite_subtotal));
  check(m.occupied_count == l.occupied,
        "occupied " + std::to_string(m.occupied_count) + " != " + std::to_string(l.occupied));
  check(m.label_count == l.labels, "labels " + std::to_string(m.label_count) + " != " + std::to_string(l.labels));
  std::map<std::string, Score> got;
  for (const auto& [a, b] : m.per_cell) got[format_address(a)] = b.total;
  for (const auto& [cell, want] : l.cells) {
    auto it = got.find(cell);
    if (it == got.end()) {
      out.push_back("cell " + cell + " not scored");
    } else if (it->second != want) {
      out.push_back("cell " + cell + " " + to_string(it->second) + " != " + to_string(want));
    }
  }
  for (const auto& [cell, s] : got) {
    if (!l.cells.count(cell)) out.push_back("unexpected scored cell " + cell + " = " + to_string(s));
  }
  std::vector<std::string> opaque;
  for (const auto& [a, why] : m.opaque_cells) opaque.push_back(format_address(a));
  std::vector<std::string> want_opaque = l.opaque;
  std::sort(opaque.begin(), opaque.end());
  std::sort(want_opaque.begin(), want_opaque.end());
  check(opaque == want_opaque, "opaque cell list differs");
  std::map<std::string, Score> tables;
  for (const auto& t : m.table_items) tables[t.table] = t.cost;
  check(tables == l.tables, "table items differ");
  return out;
}

inline std::vector<std::string> ledger_names() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(fixture_dir())) {
    if (e.path().extension() == ".ledger") out.push_back(e.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

}  // namespace testsupport
