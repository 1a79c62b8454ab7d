#include "clearsheet/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace clearsheet {

namespace detail {
std::string_view embedded_data(std::string_view name);
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool TermList::contains(std::string_view text) const {
  std::string key = to_lower(trim(text));
  return std::find(terms.begin(), terms.end(), key) != terms.end();
}

bool TermList::matches(std::string_view text) const {
  if (contains(text)) return true;
  std::string t = trim(text);
  return std::any_of(patterns.begin(), patterns.end(), [&](const std::regex& re) { return std::regex_match(t, re); });
}

TermList parse_term_list(std::string_view text, const std::string& origin) {
  TermList out;
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t.rfind("re:", 0) == 0) {
      try {
        out.patterns.emplace_back(t.substr(3), std::regex::ECMAScript | std::regex::icase);
      } catch (const std::regex_error& e) {
        throw LexiconError(origin, n, origin + ":" + std::to_string(n) + ": bad pattern: " + e.what());
      }
    } else {
      out.terms.push_back(to_lower(t));
    }
  }
  return out;
}

TermList load_term_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LexiconError(path.string(), 0, "cannot open lexicon '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_term_list(buf.str(), path.string());
}

const Lexicons& Lexicons::builtin() {
  static const Lexicons lex = [] {
    Lexicons l;
    l.units = parse_term_list(detail::embedded_data("units.lex"), "units.lex");
    l.formats = parse_term_list(detail::embedded_data("formats.lex"), "formats.lex");
    l.identity = parse_term_list(detail::embedded_data("identity.lex"), "identity.lex");
    l.interrogatives = parse_term_list(detail::embedded_data("interrogatives.lex"), "interrogatives.lex");
    l.documentation_sheets = parse_term_list(detail::embedded_data("documentation.lex"), "documentation.lex");
    return l;
  }();
  return lex;
}

}  // namespace clearsheet
