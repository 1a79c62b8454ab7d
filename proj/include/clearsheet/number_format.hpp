#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace clearsheet {

// What a number-format code conveys to a reader of the formatted value.
struct FormatTraits {
  bool is_date_time = false;           // y/m/d/h/s placeholders outside literals
  bool is_flag = false;                // sections render only yes/no/true/false style text
  bool is_percent = false;
  std::optional<std::string> unit;     // currency symbol, [$XXX] code or quoted literal suffix
};

FormatTraits analyze_number_format(std::string_view code);

// Format code for a built-in numFmtId, or empty when the id is not built in.
std::string builtin_number_format(int id);

}  // namespace clearsheet
