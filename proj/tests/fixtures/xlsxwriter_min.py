"""Minimal SpreadsheetML writer for test fixtures.

Writes just the parts the auditor reads: sheets, shared strings, number
formats, formulas with cached values, comments, validations, hidden
rows/columns/sheets, frozen panes, protection, defined names, tables and
query-table connections. Output is byte-stable for a given input.
"""

import re
import zipfile
from dataclasses import dataclass, field
from xml.sax.saxutils import escape, quoteattr

NS = "http://schemas.openxmlformats.org/spreadsheetml/2006/main"
NS_R = "http://schemas.openxmlformats.org/officeDocument/2006/relationships"
REL = "http://schemas.openxmlformats.org/officeDocument/2006/relationships/"
PKG_REL = "http://schemas.openxmlformats.org/package/2006/relationships"
CT = "application/vnd.openxmlformats-officedocument.spreadsheetml."

BUILTIN_FORMATS = {"General": 0, "0": 1, "0.00": 2, "#,##0": 3, "#,##0.00": 4, "0%": 9, "0.00%": 10}


@dataclass
class Err:
    code: str


@dataclass
class F:
    text: str  # with leading '='
    cached: object = None
    shared: tuple | None = None  # (si, ref) on the anchor cell of a shared formula


@dataclass
class SharedF:
    si: int
    cached: object = None


@dataclass
class Cell:
    value: object = None
    fmt: str = "General"


@dataclass
class Table:
    name: str
    ref: str
    columns: list
    connection_id: int | None = None


@dataclass
class Sheet:
    name: str
    state: str = "visible"
    cells: dict = field(default_factory=dict)
    hidden_rows: set = field(default_factory=set)
    hidden_cols: set = field(default_factory=set)
    frozen: tuple = (0, 0)
    protected: bool = False
    comments: dict = field(default_factory=dict)
    validations: list = field(default_factory=list)  # (sqref, list-or-None, prompt-or-None, source-or-None)
    tables: list = field(default_factory=list)

    def set(self, ref, value, fmt="General"):
        self.cells[parse_ref(ref)] = Cell(value, fmt)
        return self

    def row(self, ref, *values, fmts=None):
        r, c = parse_ref(ref)
        for i, v in enumerate(values):
            if v is None:
                continue
            fmt = fmts[i] if fmts and i < len(fmts) and fmts[i] else "General"
            self.cells[(r, c + i)] = Cell(v, fmt)
        return self


@dataclass
class Connection:
    id: int
    name: str
    kind: str  # "ms-query" | "power-query" | "other"
    command: str


class Book:
    def __init__(self):
        self.sheets = []
        self.names = []  # (name, refers_to, local_sheet_index or None)
        self.connections = []
        self.lock_structure = False

    def sheet(self, name, state="visible"):
        s = Sheet(name, state)
        self.sheets.append(s)
        return s

    def name(self, name, refers_to, local=None):
        self.names.append((name, refers_to, local))

    def save(self, path):
        parts = _render(self)
        with zipfile.ZipFile(path, "w", zipfile.ZIP_DEFLATED) as z:
            for member, data in parts:
                info = zipfile.ZipInfo(member, date_time=(2017, 1, 1, 0, 0, 0))
                info.compress_type = zipfile.ZIP_DEFLATED
                z.writestr(info, data)


def col_letters(c):
    s = ""
    while c:
        c, rem = divmod(c - 1, 26)
        s = chr(65 + rem) + s
    return s


def parse_ref(ref):
    m = re.fullmatch(r"\$?([A-Z]+)\$?(\d+)", ref)
    col = 0
    for ch in m.group(1):
        col = col * 26 + ord(ch) - 64
    return int(m.group(2)), col


def _rels(rels):
    body = "".join(
        f'<Relationship Id="{rid}" Type="{typ}" Target={quoteattr(target)}/>' for rid, typ, target in rels
    )
    return f'<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n<Relationships xmlns="{PKG_REL}">{body}</Relationships>'


def _render(book):
    parts = []
    strings, string_index = [], {}
    formats = ["General"]
    custom = {}

    def sst(text):
        if text not in string_index:
            string_index[text] = len(strings)
            strings.append(text)
        return string_index[text]

    def style(fmt):
        if fmt not in formats:
            formats.append(fmt)
            if fmt not in BUILTIN_FORMATS:
                custom[fmt] = 164 + len(custom)
        return formats.index(fmt)

    overrides = [
        ("/xl/workbook.xml", CT + "sheet.main+xml"),
        ("/xl/styles.xml", CT + "styles+xml"),
        ("/xl/sharedStrings.xml", CT + "sharedStrings+xml"),
    ]
    wb_rels = []
    table_counter = 0
    comment_counter = 0
    sheet_parts = []

    for i, sh in enumerate(book.sheets, start=1):
        rels = []
        xml = [f'<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n<worksheet xmlns="{NS}" xmlns:r="{NS_R}">']
        fr, fc = sh.frozen
        if fr or fc:
            attrs = ""
            if fc:
                attrs += f' xSplit="{fc}"'
            if fr:
                attrs += f' ySplit="{fr}"'
            top_left = col_letters(fc + 1) + str(fr + 1)
            xml.append(
                f'<sheetViews><sheetView workbookViewId="0"><pane{attrs} topLeftCell="{top_left}" '
                f'activePane="bottomRight" state="frozen"/></sheetView></sheetViews>'
            )
        if sh.hidden_cols:
            xml.append("<cols>")
            for c in sorted(sh.hidden_cols):
                xml.append(f'<col min="{c}" max="{c}" width="9" hidden="1" customWidth="1"/>')
            xml.append("</cols>")
        xml.append("<sheetData>")
        rows = sorted({r for r, _ in sh.cells} | set(sh.hidden_rows))
        for r in rows:
            hidden = ' hidden="1"' if r in sh.hidden_rows else ""
            xml.append(f'<row r="{r}"{hidden}>')
            for (rr, c), cell in sorted(sh.cells.items()):
                if rr != r:
                    continue
                xml.append(_cell_xml(col_letters(c) + str(r), cell, sst, style))
            xml.append("</row>")
        xml.append("</sheetData>")
        if sh.protected:
            xml.append('<sheetProtection sheet="1" objects="1" scenarios="1"/>')
        if sh.validations:
            xml.append(f'<dataValidations count="{len(sh.validations)}">')
            for sqref, items, prompt, source in sh.validations:
                attrs = f' sqref="{sqref}" allowBlank="1"'
                inner = ""
                if items is not None or source is not None:
                    attrs = ' type="list"' + attrs
                    formula = source if source is not None else '"' + ",".join(items) + '"'
                    inner = f"<formula1>{escape(formula)}</formula1>"
                if prompt:
                    attrs += f' showInputMessage="1" prompt={quoteattr(prompt)}'
                xml.append(f"<dataValidation{attrs}>{inner}</dataValidation>")
            xml.append("</dataValidations>")
        if sh.comments:
            comment_counter += 1
            rels.append((f"rId{len(rels) + 1}", REL + "comments", f"../comments{comment_counter}.xml"))
            body = "".join(
                f'<comment ref="{ref}" authorId="0"><text><r><t xml:space="preserve">{escape(text)}</t></r></text></comment>'
                for ref, text in sorted(sh.comments.items())
            )
            parts.append(
                (
                    f"xl/comments{comment_counter}.xml",
                    f'<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n<comments xmlns="{NS}">'
                    f"<authors><author>auditor</author></authors><commentList>{body}</commentList></comments>",
                )
            )
            overrides.append((f"/xl/comments{comment_counter}.xml", CT + "comments+xml"))
        if sh.tables:
            ids = []
            for t in sh.tables:
                table_counter += 1
                rid = f"rId{len(rels) + 1}"
                rels.append((rid, REL + "table", f"../tables/table{table_counter}.xml"))
                ids.append(rid)
                parts.extend(_table_parts(t, table_counter))
                overrides.append((f"/xl/tables/table{table_counter}.xml", CT + "table+xml"))
                if t.connection_id is not None:
                    overrides.append((f"/xl/queryTables/queryTable{table_counter}.xml", CT + "queryTable+xml"))
            xml.append(f'<tableParts count="{len(ids)}">')
            xml.extend(f'<tablePart r:id="{rid}"/>' for rid in ids)
            xml.append("</tableParts>")
        xml.append("</worksheet>")
        sheet_parts.append((f"xl/worksheets/sheet{i}.xml", "".join(xml)))
        if rels:
            sheet_parts.append((f"xl/worksheets/_rels/sheet{i}.xml.rels", _rels(rels)))
        overrides.append((f"/xl/worksheets/sheet{i}.xml", CT + "worksheet+xml"))
        wb_rels.append((f"rId{i}", REL + "worksheet", f"worksheets/sheet{i}.xml"))

    n = len(book.sheets)
    wb_rels.append((f"rId{n + 1}", REL + "styles", "styles.xml"))
    wb_rels.append((f"rId{n + 2}", REL + "sharedStrings", "sharedStrings.xml"))
    if book.connections:
        wb_rels.append((f"rId{n + 3}", REL + "connections", "connections.xml"))
        overrides.append(("/xl/connections.xml", CT + "connections+xml"))

    sheets_xml = "".join(
        f'<sheet name={quoteattr(s.name)} sheetId="{i}"'
        + (f' state="{s.state}"' if s.state != "visible" else "")
        + f' r:id="rId{i}"/>'
        for i, s in enumerate(book.sheets, start=1)
    )
    names_xml = ""
    if book.names:
        names_xml = "<definedNames>" + "".join(
            f"<definedName name={quoteattr(nm)}"
            + (f' localSheetId="{local}"' if local is not None else "")
            + f">{escape(ref)}</definedName>"
            for nm, ref, local in book.names
        ) + "</definedNames>"
    protection = '<workbookProtection lockStructure="1"/>' if book.lock_structure else ""
    workbook = (
        f'<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n<workbook xmlns="{NS}" xmlns:r="{NS_R}">'
        f"{protection}<sheets>{sheets_xml}</sheets>{names_xml}</workbook>"
    )

    numfmts = "".join(f'<numFmt numFmtId="{i}" formatCode={quoteattr(code)}/>' for code, i in custom.items())
    xfs = "".join(
        f'<xf numFmtId="{BUILTIN_FORMATS.get(f, custom.get(f))}" fontId="0" fillId="0" borderId="0" xfId="0"'
        + (' applyNumberFormat="1"' if f != "General" else "")
        + "/>"
        for f in formats
    )
    styles = (
        f'<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n<styleSheet xmlns="{NS}">'
        + (f'<numFmts count="{len(custom)}">{numfmts}</numFmts>' if custom else "")
        + '<fonts count="1"><font><sz val="11"/><name val="Calibri"/></font></fonts>'
        + '<fills count="1"><fill><patternFill patternType="none"/></fill></fills>'
        + '<borders count="1"><border/></borders>'
        + '<cellStyleXfs count="1"><xf numFmtId="0" fontId="0" fillId="0" borderId="0"/></cellStyleXfs>'
        + f'<cellXfs count="{len(formats)}">{xfs}</cellXfs></styleSheet>'
    )
    shared = (
        f'<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n<sst xmlns="{NS}" count="{len(strings)}" '
        f'uniqueCount="{len(strings)}">'
        + "".join(f'<si><t xml:space="preserve">{escape(s)}</t></si>' for s in strings)
        + "</sst>"
    )
    content_types = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
        '<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">'
        '<Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/>'
        '<Default Extension="xml" ContentType="application/xml"/>'
        + "".join(f'<Override PartName="{p}" ContentType="{t}"/>' for p, t in overrides)
        + "</Types>"
    )
    out = [
        ("[Content_Types].xml", content_types),
        ("_rels/.rels", _rels([("rId1", REL + "officeDocument", "xl/workbook.xml")])),
        ("xl/workbook.xml", workbook),
        ("xl/_rels/workbook.xml.rels", _rels(wb_rels)),
        ("xl/styles.xml", styles),
        ("xl/sharedStrings.xml", shared),
    ]
    out.extend(sheet_parts)
    out.extend(parts)
    if book.connections:
        out.append(("xl/connections.xml", _connections_xml(book.connections)))
    return out


def _cell_xml(ref, cell, sst, style):
    s = style(cell.fmt)
    sattr = f' s="{s}"' if s else ""
    v = cell.value
    if isinstance(v, (F, SharedF)):
        cached = v.cached
        if isinstance(v, SharedF):
            f = f'<f t="shared" si="{v.si}"/>'
        elif v.shared:
            f = f'<f t="shared" ref="{v.shared[1]}" si="{v.shared[0]}">{escape(v.text[1:])}</f>'
        else:
            f = f"<f>{escape(v.text[1:])}</f>"
        if cached is None:
            return f'<c r="{ref}"{sattr}>{f}</c>'
        if isinstance(cached, bool):
            return f'<c r="{ref}"{sattr} t="b">{f}<v>{int(cached)}</v></c>'
        if isinstance(cached, Err):
            return f'<c r="{ref}"{sattr} t="e">{f}<v>{escape(cached.code)}</v></c>'
        if isinstance(cached, str):
            return f'<c r="{ref}"{sattr} t="str">{f}<v>{escape(cached)}</v></c>'
        return f'<c r="{ref}"{sattr}>{f}<v>{_num(cached)}</v></c>'
    if isinstance(v, bool):
        return f'<c r="{ref}"{sattr} t="b"><v>{int(v)}</v></c>'
    if isinstance(v, Err):
        return f'<c r="{ref}"{sattr} t="e"><v>{escape(v.code)}</v></c>'
    if isinstance(v, str):
        return f'<c r="{ref}"{sattr} t="s"><v>{sst(v)}</v></c>'
    return f'<c r="{ref}"{sattr}><v>{_num(v)}</v></c>'


def _num(x):
    return repr(float(x)) if isinstance(x, float) and not float(x).is_integer() else str(int(x))


def _table_parts(t, n):
    cols = "".join(f'<tableColumn id="{i}" name={quoteattr(c)}/>' for i, c in enumerate(t.columns, start=1))
    qt = ' tableType="queryTable"' if t.connection_id is not None else ""
    xml = (
        f'<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n<table xmlns="{NS}" id="{n}" name="{t.name}" '
        f'displayName="{t.name}" ref="{t.ref}"{qt} totalsRowShown="0"><autoFilter ref="{t.ref}"/>'
        f'<tableColumns count="{len(t.columns)}">{cols}</tableColumns>'
        '<tableStyleInfo name="TableStyleMedium2" showFirstColumn="0" showLastColumn="0" showRowStripes="1" '
        'showColumnStripes="0"/></table>'
    )
    parts = [(f"xl/tables/table{n}.xml", xml)]
    if t.connection_id is not None:
        parts.append(
            (
                f"xl/tables/_rels/table{n}.xml.rels",
                _rels([("rId1", REL + "queryTable", f"../queryTables/queryTable{n}.xml")]),
            )
        )
        parts.append(
            (
                f"xl/queryTables/queryTable{n}.xml",
                f'<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n<queryTable xmlns="{NS}" '
                f'name="{t.name}" connectionId="{t.connection_id}" autoFormatId="16" applyNumberFormats="0" '
                'applyBorderFormats="0" applyFontFormats="0" applyPatternFormats="0" applyAlignmentFormats="0" '
                'applyWidthHeightFormats="0"/>',
            )
        )
    return parts


def _connections_xml(conns):
    body = []
    for c in conns:
        if c.kind == "power-query":
            db = (
                f'<dbPr connection="Provider=Microsoft.Mashup.OleDb.1;Data Source=$Workbook$;Location={escape(c.name)}" '
                f"command={quoteattr(c.command)} commandType=\"2\"/>"
            )
            body.append(f'<connection id="{c.id}" name="Query - {escape(c.name)}" type="5" refreshedVersion="6" '
                        f'background="1" saveData="1">{db}</connection>')
        elif c.kind == "ms-query":
            db = f'<dbPr connection="DSN=Excel Files;DBQ=ledger.xlsx;" command={quoteattr(c.command)}/>'
            body.append(f'<connection id="{c.id}" name="{escape(c.name)}" type="1" refreshedVersion="6" '
                        f'saveData="1">{db}</connection>')
        else:
            body.append(f'<connection id="{c.id}" name="{escape(c.name)}" type="4" refreshedVersion="6"/>')
    return (
        f'<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n<connections xmlns="{NS}">'
        + "".join(body)
        + "</connections>"
    )
