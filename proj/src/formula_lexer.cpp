#include "formula_lexer.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace clearsheet::detail {

namespace {

bool is_word_start(unsigned char c) { return std::isalpha(c) || c == '_' || c == '\\' || c == '$' || c >= 0x80; }
bool is_word_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '\\' || c == '$' || c == '.' || c == '?' || c >= 0x80;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

[[noreturn]] void fail_token(std::size_t pos, const std::string& why) {
  throw FormulaError(FormulaError::Kind::unknown_token, pos, {}, why + " at position " + std::to_string(pos));
}

// Index just past the ']' matching the '[' at `open`, honoring ' escapes.
std::size_t match_bracket(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    char c = s[i];
    if (c == '\'') {
      ++i;
      continue;
    }
    if (c == '[') ++depth;
    if (c == ']' && --depth == 0) return i + 1;
  }
  fail_token(open, "unterminated '['");
}

std::string unescape_column(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\'' && i + 1 < s.size()) ++i;
    out += s[i];
  }
  // Excel tolerates padding spaces inside brackets.
  while (!out.empty() && out.front() == ' ') out.erase(out.begin());
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::optional<TableRegion> region_keyword(std::string_view s) {
  std::string l = lower(s);
  if (l == "#all") return TableRegion::all;
  if (l == "#data") return TableRegion::data;
  if (l == "#headers") return TableRegion::headers;
  if (l == "#totals") return TableRegion::totals;
  if (l == "#this row") return TableRegion::this_row;
  return std::nullopt;
}

// Splits "[a],[b]:[c]" into bracketed items and separators.
StructuredRef parse_structured_body(std::string_view body, std::size_t pos) {
  StructuredRef ref;
  auto trimmed = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
  };
  body = trimmed(body);
  if (body.empty()) return ref;
  if (body.front() == '@') {
    ref.regions = {TableRegion::this_row};
    std::string_view rest = trimmed(body.substr(1));
    if (rest.empty()) return ref;
    if (rest.front() != '[') {
      ref.first_column = unescape_column(rest);
      return ref;
    }
    body = rest;
  }
  if (body.front() == '#') {
    auto r = region_keyword(body);
    if (!r) fail_token(pos, "unknown table region '" + std::string(body) + "'");
    ref.regions = {*r};
    return ref;
  }
  if (body.front() != '[') {
    ref.first_column = unescape_column(body);
    return ref;
  }
  std::size_t i = 0;
  bool range_pending = false;
  while (i < body.size()) {
    if (body[i] == ' ' || body[i] == ',') {
      ++i;
      continue;
    }
    if (body[i] == ':') {
      range_pending = true;
      ++i;
      continue;
    }
    if (body[i] != '[') fail_token(pos + i, "malformed structured reference");
    std::size_t end = match_bracket(body, i);
    std::string_view item = body.substr(i + 1, end - i - 2);
    i = end;
    if (auto r = region_keyword(trimmed(item))) {
      ref.regions.push_back(*r);
    } else if (range_pending && ref.first_column) {
      ref.last_column = unescape_column(item);
      range_pending = false;
    } else {
      if (ref.first_column) fail_token(pos + i, "structured reference names two columns without ':'");
      ref.first_column = unescape_column(item);
    }
  }
  return ref;
}

SheetQualifier split_book(std::string content) {
  SheetQualifier q;
  if (!content.empty() && content.front() == '[') {
    auto close = content.find(']');
    if (close != std::string::npos) {
      q.workbook = content.substr(1, close - 1);
      content = content.substr(close + 1);
    }
  }
  q.sheet = std::move(content);
  return q;
}

}  // namespace

ParsedCorner parse_cell_word(std::string_view w) {
  ParsedCorner out;
  std::size_t i = 0;
  if (i < w.size() && w[i] == '$') {
    out.corner.col_abs = true;
    ++i;
  }
  std::size_t lb = i;
  while (i < w.size() && std::isalpha(static_cast<unsigned char>(w[i]))) ++i;
  if (i == lb || i - lb > 3) return out;
  auto col = column_number(w.substr(lb, i - lb));
  if (!col) return out;
  if (i < w.size() && w[i] == '$') {
    out.corner.row_abs = true;
    ++i;
  }
  std::size_t db = i;
  while (i < w.size() && std::isdigit(static_cast<unsigned char>(w[i]))) ++i;
  if (i == db || i != w.size()) return out;
  int row = 0;
  auto [p, ec] = std::from_chars(w.data() + db, w.data() + i, row);
  if (ec != std::errc{} || row < 1 || row > kMaxRows) return out;
  out.corner.row = row;
  out.corner.col = *col;
  out.ok = true;
  return out;
}

ParsedCorner parse_column_word(std::string_view w) {
  ParsedCorner out;
  if (!w.empty() && w.front() == '$') {
    out.corner.col_abs = true;
    w.remove_prefix(1);
  }
  auto col = column_number(w);
  if (!col) return out;
  out.corner.col = *col;
  out.ok = true;
  return out;
}

ParsedCorner parse_row_word(std::string_view w) {
  ParsedCorner out;
  if (!w.empty() && w.front() == '$') {
    out.corner.row_abs = true;
    w.remove_prefix(1);
  }
  if (w.empty() || !std::all_of(w.begin(), w.end(), [](unsigned char c) { return std::isdigit(c); })) return out;
  int row = 0;
  auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), row);
  if (ec != std::errc{} || row < 1 || row > kMaxRows) return out;
  out.corner.row = row;
  out.ok = true;
  return out;
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> toks;
  std::size_t i = (!s.empty() && s.front() == '=') ? 1 : 0;
  bool space = false;
  auto push = [&](Tok kind, std::size_t b, std::size_t e, std::string text) {
    Token t;
    t.kind = kind;
    t.span = {b, e};
    t.text = std::move(text);
    t.space_before = space;
    space = false;
    toks.push_back(std::move(t));
    return &toks.back();
  };

  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c == ' ' || c == '\n' || c == '\r' || c == '\t') {
      space = true;
      ++i;
      continue;
    }
    std::size_t b = i;
    if (c == '"') {
      std::string content;
      ++i;
      for (;;) {
        if (i >= s.size()) fail_token(b, "unterminated string");
        if (s[i] == '"') {
          if (i + 1 < s.size() && s[i + 1] == '"') {
            content += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        content += s[i++];
      }
      push(Tok::text, b, i, std::move(content));
      continue;
    }
    if (c == '#') {
      static constexpr std::string_view kErrors[] = {"#DIV/0!", "#N/A",  "#REF!", "#NAME?", "#VALUE!",
                                                     "#NUM!",   "#NULL!", "#GETTING_DATA"};
      bool matched = false;
      for (auto e : kErrors) {
        if (lower(s.substr(i, e.size())) == lower(e)) {
          push(Tok::error, b, i + e.size(), std::string(e));
          i += e.size();
          matched = true;
          break;
        }
      }
      if (!matched) fail_token(b, "unknown error literal");
      continue;
    }
    if (std::isdigit(c) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
          i = j;
          while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
      }
      push(Tok::number, b, i, std::string(s.substr(b, i - b)));
      continue;
    }
    if (c == '\'') {
      std::string content;
      ++i;
      for (;;) {
        if (i >= s.size()) fail_token(b, "unterminated sheet name");
        if (s[i] == '\'') {
          if (i + 1 < s.size() && s[i + 1] == '\'') {
            content += '\'';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        content += s[i++];
      }
      if (i >= s.size() || s[i] != '!') fail_token(i, "expected '!' after quoted sheet name");
      ++i;
      Token* t = push(Tok::sheet, b, i, std::string(s.substr(b, i - b)));
      t->qualifier = split_book(std::move(content));
      continue;
    }
    if (c == '[') {
      std::size_t end = match_bracket(s, i);
      // "[Book]Sheet!" is an external qualifier, anything else is a structured reference.
      std::size_t j = end;
      while (j < s.size() && is_word_char(static_cast<unsigned char>(s[j]))) ++j;
      if (j > end && j < s.size() && s[j] == '!') {
        Token* t = push(Tok::sheet, b, j + 1, std::string(s.substr(b, j + 1 - b)));
        t->qualifier = split_book(std::string(s.substr(b, j - b)));
        i = j + 1;
        continue;
      }
      Token* t = push(Tok::structured, b, end, std::string(s.substr(b, end - b)));
      t->structured = parse_structured_body(s.substr(b + 1, end - b - 2), b + 1);
      i = end;
      continue;
    }
    if (is_word_start(c)) {
      while (i < s.size() && is_word_char(static_cast<unsigned char>(s[i]))) ++i;
      std::string word(s.substr(b, i - b));
      if (i < s.size() && s[i] == '!') {
        ++i;
        Token* t = push(Tok::sheet, b, i, std::string(s.substr(b, i - b)));
        t->qualifier = split_book(word);
        continue;
      }
      if (i < s.size() && s[i] == '[') {
        std::size_t end = match_bracket(s, i);
        Token* t = push(Tok::structured, b, end, std::string(s.substr(b, end - b)));
        t->structured = parse_structured_body(s.substr(i + 1, end - i - 2), i + 1);
        t->structured.table = word;
        i = end;
        continue;
      }
      if (i < s.size() && s[i] == '(') {
        push(Tok::function, b, i, std::move(word));
        continue;
      }
      push(Tok::word, b, i, std::move(word));
      continue;
    }
    ++i;
    switch (c) {
      case '(': push(Tok::lparen, b, i, "("); break;
      case ')': push(Tok::rparen, b, i, ")"); break;
      case '{': push(Tok::lbrace, b, i, "{"); break;
      case '}': push(Tok::rbrace, b, i, "}"); break;
      case ',': push(Tok::comma, b, i, ","); break;
      case ';': push(Tok::semicolon, b, i, ";"); break;
      case ':': push(Tok::colon, b, i, ":"); break;
      case '%': push(Tok::percent, b, i, "%"); break;
      case '+': case '-': case '*': case '/': case '^': case '&': case '=':
        push(Tok::op, b, i, std::string(1, static_cast<char>(c)));
        break;
      case '<':
        if (i < s.size() && (s[i] == '>' || s[i] == '=')) {
          ++i;
        }
        push(Tok::op, b, i, std::string(s.substr(b, i - b)));
        break;
      case '>':
        if (i < s.size() && s[i] == '=') ++i;
        push(Tok::op, b, i, std::string(s.substr(b, i - b)));
        break;
      default:
        fail_token(b, std::string("unexpected character '") + static_cast<char>(c) + "'");
    }
  }
  Token end;
  end.kind = Tok::end;
  end.span = {s.size(), s.size()};
  end.space_before = space;
  toks.push_back(end);
  return toks;
}

}  // namespace clearsheet::detail
