#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clearsheet {

enum class ParamGrade { tooltip_sufficient, help_sufficient, insufficient };

std::string_view to_string(ParamGrade g);

struct CatalogParam {
  std::string name;
  ParamGrade grade = ParamGrade::insufficient;
  bool operator==(const CatalogParam&) const = default;
};

struct CatalogEntry {
  std::string function;  // uppercase
  int min_arity = 0;
  int max_arity = 0;
  std::vector<CatalogParam> params;
  bool error_handling = false;
  bool indirect_class = false;

  // Parameter for a 0-based argument position; the last parameter repeats up to max_arity.
  const CatalogParam* param(int arg_index) const;
  bool operator==(const CatalogEntry&) const = default;
};

class CatalogError : public std::runtime_error {
 public:
  enum class Kind { parse_error, duplicate_function, unreadable };
  CatalogError(Kind kind, int line, const std::string& what) : std::runtime_error(what), kind_(kind), line_(line) {}
  Kind kind() const { return kind_; }
  int line() const { return line_; }

 private:
  Kind kind_;
  int line_;
};

class FunctionCatalog {
 public:
  const CatalogEntry* find(std::string_view function) const;
  const std::map<std::string, CatalogEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // Grade returned for functions or positions the catalog does not know.
  ParamGrade unknown_grade = ParamGrade::insufficient;

  static const FunctionCatalog& builtin();

 private:
  friend FunctionCatalog parse_catalog(std::string_view, const std::string&);
  std::map<std::string, CatalogEntry> entries_;
};

// Line format: FUNCTION;min;max;param=grade,...;flags. Throws CatalogError.
FunctionCatalog parse_catalog(std::string_view text, const std::string& origin = "<memory>");
FunctionCatalog load_catalog(const std::filesystem::path& path);

ParamGrade parameter_grade(const FunctionCatalog& cat, std::string_view function, int arg_index);
bool is_error_handling_function(const FunctionCatalog& cat, std::string_view function);

}  // namespace clearsheet
