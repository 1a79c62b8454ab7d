#include "clearsheet/number_format.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace clearsheet {

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool has_alpha(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isalpha(c) || c >= 0x80; });
}

struct Section {
  std::string literal;  // concatenated quoted/escaped text
  bool has_digit_placeholder = false;
};

}  // namespace

FormatTraits analyze_number_format(std::string_view code) {
  FormatTraits traits;
  std::vector<Section> sections(1);
  std::optional<std::string> bracket_currency;
  bool dollar = false;
  std::string symbol;

  for (std::size_t i = 0; i < code.size(); ++i) {
    char c = code[i];
    unsigned char uc = static_cast<unsigned char>(c);
    Section& sec = sections.back();
    if (c == ';') {
      sections.emplace_back();
    } else if (c == '"') {
      std::size_t end = code.find('"', i + 1);
      if (end == std::string_view::npos) end = code.size();
      sec.literal += std::string(code.substr(i + 1, end - i - 1));
      i = end;
    } else if (c == '\\') {
      if (i + 1 < code.size()) sec.literal += code[++i];
    } else if (c == '_' || c == '*') {
      ++i;
    } else if (c == '[') {
      std::size_t end = code.find(']', i + 1);
      if (end == std::string_view::npos) end = code.size();
      std::string inner(code.substr(i + 1, end - i - 1));
      if (!inner.empty() && inner.front() == '$') {
        std::string cur = inner.substr(1, inner.find('-') == std::string::npos ? std::string::npos : inner.find('-') - 1);
        if (!cur.empty()) bracket_currency = cur;
      } else {
        std::string l = lower(inner);
        if (!l.empty() && std::all_of(l.begin(), l.end(), [](char ch) { return ch == 'h' || ch == 'm' || ch == 's'; })) {
          traits.is_date_time = true;
        }
      }
      i = end;
    } else if (c == '$') {
      dollar = true;
    } else if (uc >= 0x80) {
      // Multibyte currency symbols (EUR, GBP, YEN) pass through as the unit.
      std::size_t len = (uc >= 0xF0) ? 4 : (uc >= 0xE0) ? 3 : (uc >= 0xC0) ? 2 : 1;
      if (symbol.empty()) symbol = std::string(code.substr(i, len));
      i += len - 1;
    } else if (c == '0' || c == '#' || c == '?') {
      sec.has_digit_placeholder = true;
    } else if (c == '%') {
      traits.is_percent = true;
    } else if (c == 'E' || c == 'e') {
      if (i + 1 < code.size() && (code[i + 1] == '+' || code[i + 1] == '-')) {
        ++i;
      } else if (lower(std::string(code.substr(i, 7))) == "general") {
        i += 6;
      }
    } else if (c == 'G' || c == 'g') {
      if (lower(std::string(code.substr(i, 7))) == "general") i += 6;
    } else if (std::isalpha(uc)) {
      char l = static_cast<char>(std::tolower(uc));
      if (l == 'y' || l == 'm' || l == 'd' || l == 'h' || l == 's') traits.is_date_time = true;
      if (l == 'a' && lower(std::string(code.substr(i, 5))) == "am/pm") {
        traits.is_date_time = true;
        i += 4;
      }
    }
  }

  static const std::vector<std::string> kFlagWords = {"yes", "no", "true", "false", "on", "off", "y", "n"};
  bool all_flag = sections.size() >= 2;
  for (const auto& s : sections) {
    std::string lit = lower(trim(s.literal));
    if (s.has_digit_placeholder || std::find(kFlagWords.begin(), kFlagWords.end(), lit) == kFlagWords.end()) {
      all_flag = false;
    }
  }
  traits.is_flag = all_flag;
  if (traits.is_flag) return traits;

  if (bracket_currency) {
    traits.unit = bracket_currency;
  } else if (dollar) {
    traits.unit = "$";
  } else if (!symbol.empty()) {
    traits.unit = symbol;
  } else {
    std::string lit = trim(sections.front().literal);
    if (!traits.is_date_time && has_alpha(lit)) traits.unit = lit;
  }
  return traits;
}

std::string builtin_number_format(int id) {
  switch (id) {
    case 0: return "General";
    case 1: return "0";
    case 2: return "0.00";
    case 3: return "#,##0";
    case 4: return "#,##0.00";
    case 9: return "0%";
    case 10: return "0.00%";
    case 11: return "0.00E+00";
    case 12: return "# ?/?";
    case 13: return "# ?\?/??";
    case 14: return "mm-dd-yy";
    case 15: return "d-mmm-yy";
    case 16: return "d-mmm";
    case 17: return "mmm-yy";
    case 18: return "h:mm AM/PM";
    case 19: return "h:mm:ss AM/PM";
    case 20: return "h:mm";
    case 21: return "h:mm:ss";
    case 22: return "m/d/yy h:mm";
    case 37: return "#,##0 ;(#,##0)";
    case 38: return "#,##0 ;[Red](#,##0)";
    case 39: return "#,##0.00;(#,##0.00)";
    case 40: return "#,##0.00;[Red](#,##0.00)";
    case 45: return "mm:ss";
    case 46: return "[h]:mm:ss";
    case 47: return "mmss.0";
    case 48: return "##0.0E+0";
    case 49: return "@";
    default: return "";
  }
}

}  // namespace clearsheet
