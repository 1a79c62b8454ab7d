#pragma once

namespace clearsheet {

// Cost in steps of each user-interface action the metric counts. All positive.
struct StepCosts {
  int formula_inspection = 1;     // select the cell and click into the formula bar; once per formula
  int navigation = 1;             // go to an off-screen area or a name
  int function_help = 1;          // open the function's help or arguments dialog, per literal
  int comment_label = 1;
  int validation_label = 1;
  int documentation_label = 1;
  int unhide_row_col = 2;
  int unhide_sheet = 2;
  int connection_definition = 1;  // open a query table's connection definition
};

}  // namespace clearsheet
