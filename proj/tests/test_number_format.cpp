#include <doctest.h>

#include "clearsheet/number_format.hpp"

using namespace clearsheet;

TEST_CASE("date and time codes") {
  CHECK(analyze_number_format("mm/dd/yyyy").is_date_time);
  CHECK(analyze_number_format("m/d/yy h:mm").is_date_time);
  CHECK(analyze_number_format("[h]:mm:ss").is_date_time);
  CHECK(analyze_number_format("dddd, mmmm d, yyyy").is_date_time);
  CHECK_FALSE(analyze_number_format("General").is_date_time);
  CHECK_FALSE(analyze_number_format("#,##0").is_date_time);
  // Letters inside quotes are literal text, not placeholders.
  CHECK_FALSE(analyze_number_format("0 \"days\"").is_date_time);
  CHECK_FALSE(analyze_number_format("[Red]0.00").is_date_time);
}

TEST_CASE("units conveyed by the format") {
  CHECK(analyze_number_format("$#,##0.00").unit == "$");
  CHECK(analyze_number_format("[$EUR] #,##0").unit == "EUR");
  CHECK(analyze_number_format("#,##0 \"USD\"").unit == "USD");
  CHECK(analyze_number_format("0 \"Months\"").unit == "Months");
  CHECK_FALSE(analyze_number_format("#,##0").unit.has_value());
  CHECK_FALSE(analyze_number_format("mm/dd/yyyy").unit.has_value());
}

TEST_CASE("percent and flag codes") {
  CHECK(analyze_number_format("0.00%").is_percent);
  CHECK(analyze_number_format("0%").is_percent);
  CHECK_FALSE(analyze_number_format("0.00").is_percent);
  CHECK(analyze_number_format("\"Yes\";\"Yes\";\"No\"").is_flag);
  CHECK(analyze_number_format("\"TRUE\";\"TRUE\";\"FALSE\"").is_flag);
  CHECK_FALSE(analyze_number_format("0;-0;\"-\"").is_flag);
}

TEST_CASE("built-in format ids") {
  CHECK(builtin_number_format(0) == "General");
  CHECK(builtin_number_format(9) == "0%");
  CHECK(analyze_number_format(builtin_number_format(14)).is_date_time);
  CHECK(builtin_number_format(300).empty());
}
