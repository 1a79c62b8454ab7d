#include "clearsheet/catalog.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "clearsheet/lexicon.hpp"

namespace clearsheet {

namespace detail {
std::string_view embedded_data(std::string_view name);
}

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string piece;
  std::istringstream in(s);
  while (std::getline(in, piece, sep)) out.push_back(trim(piece));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::string_view to_string(ParamGrade g) {
  switch (g) {
    case ParamGrade::tooltip_sufficient: return "tooltip-sufficient";
    case ParamGrade::help_sufficient: return "help-sufficient";
    case ParamGrade::insufficient: return "insufficient";
  }
  return "?";
}

const CatalogParam* CatalogEntry::param(int arg_index) const {
  if (arg_index < 0 || arg_index >= max_arity || params.empty()) return nullptr;
  std::size_t i = std::min(static_cast<std::size_t>(arg_index), params.size() - 1);
  return &params[i];
}

const CatalogEntry* FunctionCatalog::find(std::string_view function) const {
  auto it = entries_.find(upper(function));
  return it == entries_.end() ? nullptr : &it->second;
}

FunctionCatalog parse_catalog(std::string_view text, const std::string& origin) {
  FunctionCatalog cat;
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  auto fail = [&](const std::string& msg) {
    throw CatalogError(CatalogError::Kind::parse_error, n, origin + ":" + std::to_string(n) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++n;
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split(t, ';');
    if (fields.size() < 4 || fields.size() > 5) fail("expected FUNCTION;min;max;params;flags");
    CatalogEntry e;
    e.function = upper(fields[0]);
    if (e.function.empty()) fail("missing function name");
    auto parse_int = [&](const std::string& s, int& out) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      if (ec != std::errc() || p != s.data() + s.size() || out < 0) fail("bad arity '" + s + "'");
    };
    parse_int(fields[1], e.min_arity);
    parse_int(fields[2], e.max_arity);
    if (e.min_arity > e.max_arity) fail("min arity exceeds max arity");
    if (!fields[3].empty()) {
      for (const auto& p : split(fields[3], ',')) {
        auto eq = p.find('=');
        if (eq == std::string::npos) fail("parameter '" + p + "' lacks a grade");
        std::string grade = trim(p.substr(eq + 1));
        CatalogParam cp{trim(p.substr(0, eq)), ParamGrade::insufficient};
        if (grade == "tooltip") {
          cp.grade = ParamGrade::tooltip_sufficient;
        } else if (grade == "help") {
          cp.grade = ParamGrade::help_sufficient;
        } else if (grade != "insufficient") {
          fail("unknown grade '" + grade + "'");
        }
        e.params.push_back(std::move(cp));
      }
    }
    if (e.params.size() < static_cast<std::size_t>(e.min_arity)) fail("fewer parameters than the minimum arity");
    if (fields.size() == 5 && !fields[4].empty()) {
      for (const auto& f : split(fields[4], ',')) {
        if (f == "error-handling") {
          e.error_handling = true;
        } else if (f == "indirect") {
          e.indirect_class = true;
        } else if (!f.empty()) {
          fail("unknown flag '" + f + "'");
        }
      }
    }
    std::string key = e.function;
    if (!cat.entries_.emplace(key, std::move(e)).second) {
      throw CatalogError(CatalogError::Kind::duplicate_function, n,
                         origin + ":" + std::to_string(n) + ": duplicate function " + key);
    }
  }
  return cat;
}

FunctionCatalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CatalogError(CatalogError::Kind::unreadable, 0, "cannot open catalog '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_catalog(buf.str(), path.string());
}

const FunctionCatalog& FunctionCatalog::builtin() {
  static const FunctionCatalog cat = parse_catalog(detail::embedded_data("functions.catalog"), "functions.catalog");
  return cat;
}

ParamGrade parameter_grade(const FunctionCatalog& cat, std::string_view function, int arg_index) {
  const CatalogEntry* e = cat.find(function);
  if (!e) return cat.unknown_grade;
  const CatalogParam* p = e->param(arg_index);
  return p ? p->grade : cat.unknown_grade;
}

bool is_error_handling_function(const FunctionCatalog& cat, std::string_view function) {
  const CatalogEntry* e = cat.find(function);
  return e && e->error_handling;
}

}  // namespace clearsheet
