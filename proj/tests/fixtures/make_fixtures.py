#!/usr/bin/env python3
"""Regenerates the golden workbooks in this directory.

Each workbook has a hand-computed .ledger next to it; the ledgers are
written by hand and are not produced by this script.
"""

import sys
from pathlib import Path

from xlsxwriter_min import Book, Connection, Err, F, SharedF, Table

HERE = Path(__file__).resolve().parent

JAN_1_2017 = 42736
JUN_1_2017 = 42887
DATE = "mm/dd/yyyy"
MONEY = "#,##0"
NEG_MONEY = "#,##0;(#,##0)"


def input_grid(sh, top=1):
    sh.row(f"A{top}", "Label", "Value", "UOM/Format")
    sh.row(f"A{top + 1}", "Model Start", JAN_1_2017, DATE, fmts=[None, DATE])
    sh.row(f"A{top + 2}", "Model Duration", 3, "Months")
    sh.row(f"A{top + 3}", "Initial Investment", 100000, "USD", fmts=[None, MONEY])


def grid_inputs():
    b = Book()
    input_grid(b.sheet("Inputs"))
    return b


def literal_in_formula():
    b = Book()
    sh = b.sheet("Inputs")
    input_grid(sh)
    sh.row("A6", "Annual Investment", F("=A11 * 12", 0), "USD", fmts=[None, MONEY])
    return b


def vlookup_grid():
    b = Book()
    sh = b.sheet("Sheet1")
    sh.row("A1", "Initial Investment", F("=VLOOKUP(A1,A3:B5,2,FALSE)", 100000), "USD", fmts=[None, MONEY])
    sh.row("A3", "Model Start", JAN_1_2017, DATE, fmts=[None, DATE])
    sh.row("A4", "Model Duration", 3, "Months")
    sh.row("A5", "Initial Investment", 100000, "USD", fmts=[None, MONEY])
    return b


def loan_inputs(sh, top):
    sh.row(f"A{top}", "Label", "Value", "UOM/Format")
    sh.row(f"A{top + 1}", "Rate", 0.05, "APR", fmts=[None, "0.00%"])
    sh.row(f"A{top + 2}", "Periods", 48, "Months")
    sh.row(f"A{top + 3}", "MPP", 12, "Months Per Year")
    sh.row(f"A{top + 4}", "Loan Amount", 100000, "USD", fmts=[None, MONEY])


def loan_names(b, sheet, top):
    for i, name in enumerate(["Rate", "Periods", "MPP", "Loan_Amount"], start=1):
        b.name(name, f"{sheet}!$B${top + i}")


PMT = "=PMT(Rate/MPP,Periods,Loan_Amount)"
PAYMENT = -2302.93


def pmt_near():
    b = Book()
    sh = b.sheet("Loan")
    sh.row("A1", "Monthly Payment", F(PMT, PAYMENT), "USD", fmts=[None, "#,##0.00"])
    loan_inputs(sh, 3)
    loan_names(b, "Loan", 3)
    return b


def pmt_far():
    b = Book()
    pay = b.sheet("Payment")
    pay.row("A1", "Monthly Payment", F(PMT, PAYMENT), "USD", fmts=[None, "#,##0.00"])
    loan_inputs(b.sheet("Inputs"), 3)
    loan_names(b, "Inputs", 3)
    return b


def structured_net_income():
    b = Book()
    sh = b.sheet("Tax")
    cols = ["EBIT", "CF NOL Added", "CF NOL Used", "Tax", "Net Income"]
    sh.row("A1", *(["USD"] * len(cols)))
    sh.row("A2", *cols)
    rows = [(-50381, None, None, 0), (-18181, 50381, None, 0), (-25362, 18181, None, 0)]
    for i, (ebit, added, used, tax) in enumerate(rows):
        r = 3 + i
        net = F("=[@EBIT]+[@Tax]", ebit + tax, shared=(0, "E3:E5")) if i == 0 else SharedF(0, ebit + tax)
        sh.row(f"A{r}", ebit, added, used, tax, net, fmts=[NEG_MONEY] * 5)
    sh.tables.append(Table("tblTax", "A2:E5", cols))
    return b


def imports(kind):
    b = Book()
    sh = b.sheet("Ledger")
    cols = ["Account #", "Account Name", "Posted", "Debit", "Credit"]
    sh.row("C1", DATE, "USD", "USD")
    sh.row("A2", *cols)
    sh.row("A3", 510, "Estimated Revenues", 42765, 8838, None, fmts=[None, None, DATE, "#,##0.00"])
    sh.row("A4", 515, "Estimated Other Financing Sources", 42760, None, 4767, fmts=[None, None, DATE, None, "#,##0.00"])
    sh.row("A5", 540, "Appropriated Fund Balance", 42754, 7701, None, fmts=[None, None, DATE, "#,##0.00"])
    sh.tables.append(Table("tblLedger", "A2:E5", cols, connection_id=1))
    b.connections.append(Connection(1, "Ledger", kind, "SELECT Account, Name, Posted, Debit, Credit FROM Ledger"))
    return b


def div_zero():
    b = Book()
    sh = b.sheet("Sales")
    sh.row("A1", "Units Sold", 0, "Units")
    sh.row("A2", "Revenue", 5000, "USD", fmts=[None, MONEY])
    sh.row("A3", "Price Per Unit", F("=B2/B1", Err("#DIV/0!")), "USD", fmts=[None, "#,##0.00"])
    return b


def handled_error():
    b = Book()
    sh = b.sheet("Prices")
    sh.row("A1", "Quoted Price", F("=NA()", Err("#N/A")), "USD", fmts=[None, "#,##0.00"])
    sh.row("A2", "Price Or Zero", F("=IFERROR(B1,0)", 0), "USD", fmts=[None, "#,##0.00"])
    return b


def unconstrained_indirect():
    b = Book()
    sh = b.sheet("Lookup")
    sh.row("A1", "Source Address", "B5")
    sh.row("A3", "Selected Amount", F("=INDIRECT(B1)", 250), "USD", fmts=[None, MONEY])
    sh.row("A5", "Amount", 250, "USD", fmts=[None, MONEY])
    return b


def scenario_table(sh, top, title, name, start, investment):
    sh.set(f"A{top}", title)
    sh.row(f"A{top + 2}", "Label", "Value", "UOM/Format")
    sh.row(f"A{top + 3}", "Model Start", start, DATE, fmts=[None, DATE])
    sh.row(f"A{top + 4}", "Model Duration", 3, "Months")
    sh.row(f"A{top + 5}", "Initial Investment", investment, "USD", fmts=[None, MONEY])
    sh.tables.append(Table(name, f"A{top + 2}:C{top + 5}", ["Label", "Value", "UOM/Format"]))


SCENARIO_LOOKUP = "=VLOOKUP([@Label],INDIRECT(OFFSET([#Headers],1,1, 1, 1)),2,FALSE)"


def constrained_indirect():
    b = Book()
    sh = b.sheet("Scenarios")
    scenario_table(sh, 3, "Scenario #1 (tblScenario1)", "tblScenario1", JAN_1_2017, 100000)
    scenario_table(sh, 11, "Scenario #2 (tblScenario2)", "tblScenario2", JUN_1_2017, 75000)
    sh.row("A19", "Label", "Value", "UOM/Format")
    sh.row("A20", "Scenario", "tblScenario1")
    sh.row("A21", "Model Start", F(SCENARIO_LOOKUP, JAN_1_2017), DATE, fmts=[None, DATE])
    sh.row("A22", "Model Duration", F(SCENARIO_LOOKUP, 3), "Months")
    sh.row("A23", "Initial Investment", F(SCENARIO_LOOKUP, 100000), "USD", fmts=[None, MONEY])
    sh.validations.append(("B20", ["tblScenario1", "tblScenario2"], None, None))
    sh.tables.append(Table("tblModel", "A19:C23", ["Label", "Value", "UOM/Format"]))
    return b


def hidden_row():
    b = Book()
    sh = b.sheet("Inputs")
    sh.row("A1", "Initial Investment", 100000, "USD", fmts=[None, MONEY])
    sh.row("A2", "Reserve Amount", 5000, "USD", fmts=[None, MONEY])
    sh.hidden_rows.add(2)
    return b


def hidden_sheets():
    b = Book()
    b.sheet("Model").row("A1", "Initial Investment", 100000, "USD", fmts=[None, MONEY])
    b.sheet("Fees", state="hidden").row("A1", "Filing Fee", 25, "USD")
    b.sheet("Vault", state="veryHidden").row("A1", "Secret Rate", 0.05, "APR", fmts=[None, "0.00%"])
    return b


def comment_unit():
    b = Book()
    sh = b.sheet("Staff")
    sh.row("A1", "Headcount Cost", 120000)
    sh.comments["B1"] = "USD"
    return b


def validation_prompt_unit():
    b = Book()
    sh = b.sheet("Supply")
    sh.row("A1", "Lead Time", 14)
    sh.validations.append(("B1", None, "Days", None))
    return b


def documentation_unit():
    b = Book()
    b.sheet("Model").row("A1", "Shipping Weight", 12.5)
    doc = b.sheet("Documentation")
    doc.row("A1", "Cell", "Meaning")
    doc.row("A2", "Model!B1", "kg")
    return b


def circular():
    b = Book()
    sh = b.sheet("Balances")
    sh.row("A1", "Opening Balance", F("=B2", 0), "USD", fmts=[None, MONEY])
    sh.row("A2", "Closing Balance", F("=B1", 0), "USD", fmts=[None, MONEY])
    return b


def daisy_chain():
    b = Book()
    b.sheet("Summary").row("A1", "Net Revenue", F("=Detail!B7", 250000), "USD", fmts=[None, MONEY])
    b.sheet("Detail").row("A7", "Net Revenue", 250000, "USD", fmts=[None, MONEY])
    return b


def shared_precedent():
    b = Book()
    sh = b.sheet("Costs")
    sh.row("A1", "Base Cost", 100)
    sh.comments["B1"] = "USD"
    sh.row("A2", "Adjusted Cost", F("=B1", 100), "USD")
    sh.row("A3", "Total Cost", F("=B1+B2", 200), "USD")
    return b


def shared_formula():
    b = Book()
    sh = b.sheet("Sales")
    sh.row("A1", "Quantity (Units)", "Price (USD)", "Revenue (USD)")
    for i, (q, p) in enumerate([(10, 4), (20, 5), (30, 6)]):
        r = 2 + i
        rev = F(f"=A{r}*B{r}", q * p, shared=(0, "C2:C4")) if i == 0 else SharedF(0, q * p)
        sh.row(f"A{r}", q, p, rev)
    return b


def header_far(frozen):
    b = Book()
    sh = b.sheet("Freight")
    sh.set("B1", "Freight Cost (USD)")
    sh.set("B100", 1234)
    if frozen:
        sh.frozen = (1, 0)
    return b


def empty():
    b = Book()
    b.sheet("Sheet1")
    return b


FIXTURES = {
    "grid_inputs": grid_inputs,
    "literal_in_formula": literal_in_formula,
    "vlookup_grid": vlookup_grid,
    "pmt_near": pmt_near,
    "pmt_far": pmt_far,
    "structured_net_income": structured_net_income,
    "import_ms_query": lambda: imports("ms-query"),
    "import_power_query": lambda: imports("power-query"),
    "div_zero": div_zero,
    "handled_error": handled_error,
    "unconstrained_indirect": unconstrained_indirect,
    "constrained_indirect": constrained_indirect,
    "hidden_row": hidden_row,
    "hidden_sheets": hidden_sheets,
    "comment_unit": comment_unit,
    "validation_prompt_unit": validation_prompt_unit,
    "documentation_unit": documentation_unit,
    "circular": circular,
    "daisy_chain": daisy_chain,
    "shared_precedent": shared_precedent,
    "shared_formula": shared_formula,
    "header_frozen": lambda: header_far(True),
    "header_unfrozen": lambda: header_far(False),
    "empty": empty,
}


def write_broken(out):
    # A zip whose workbook part is truncated XML, and a file that is not a zip at all.
    import zipfile

    good = out / "grid_inputs.xlsx"
    with zipfile.ZipFile(good) as src, zipfile.ZipFile(out / "broken_workbook_part.xlsx", "w") as dst:
        for item in src.infolist():
            data = src.read(item.filename)
            if item.filename == "xl/workbook.xml":
                data = data[: len(data) // 2]
            info = zipfile.ZipInfo(item.filename, date_time=(2017, 1, 1, 0, 0, 0))
            dst.writestr(info, data)
    (out / "not_a_workbook.xlsx").write_text("Label,Value\nRate,5%\n")


def main(argv):
    out = Path(argv[1]) if len(argv) > 1 else HERE
    out.mkdir(parents=True, exist_ok=True)
    for name, build in FIXTURES.items():
        build().save(out / f"{name}.xlsx")
    write_broken(out)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
