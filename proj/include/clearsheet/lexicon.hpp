#pragma once

#include <filesystem>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clearsheet {

// Terms are stored lowercased; patterns are case-insensitive.
struct TermList {
  std::vector<std::string> terms;
  std::vector<std::regex> patterns;

  bool contains(std::string_view text) const;  // exact term, case-insensitive
  bool matches(std::string_view text) const;   // term or pattern
};

struct Lexicons {
  TermList units;
  TermList formats;
  TermList identity;  // terms: identifier column headers; patterns: identifier values
  TermList interrogatives;
  TermList documentation_sheets;

  // The lexicons compiled into the library.
  static const Lexicons& builtin();
};

class LexiconError : public std::runtime_error {
 public:
  LexiconError(std::string file, int line, const std::string& what)
      : std::runtime_error(what), file_(std::move(file)), line_(line) {}
  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

// One term per line, '#' starts a comment line, "re:" prefixes a regular expression.
TermList parse_term_list(std::string_view text, const std::string& origin = "<memory>");
TermList load_term_list(const std::filesystem::path& path);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

}  // namespace clearsheet
