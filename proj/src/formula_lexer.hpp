#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "clearsheet/formula.hpp"

namespace clearsheet::detail {

enum class Tok {
  number,
  text,
  error,
  word,        // identifier: cell ref, name, TRUE/FALSE, column letters
  function,    // identifier directly followed by '('
  structured,  // Table[...] or [...]
  sheet,       // qualifier including the trailing '!'
  op,
  lparen,
  rparen,
  lbrace,
  rbrace,
  comma,
  semicolon,
  colon,
  percent,
  end
};

struct Token {
  Tok kind = Tok::end;
  std::string text;  // raw spelling (for text tokens: unescaped content)
  Span span;
  bool space_before = false;
  SheetQualifier qualifier;  // Tok::sheet
  StructuredRef structured;  // Tok::structured
};

// Tokenizes formula text, skipping the leading '=' when present. Throws FormulaError.
std::vector<Token> tokenize(std::string_view text);

struct ParsedCorner {
  RefCorner corner;
  bool ok = false;
};

// "$A$1" style cell reference spelled by a word token.
ParsedCorner parse_cell_word(std::string_view word);
// "$A" column piece / "$3" row piece for whole-column and whole-row ranges.
ParsedCorner parse_column_word(std::string_view word);
ParsedCorner parse_row_word(std::string_view word);

}  // namespace clearsheet::detail
