"""Steps-from-transparency audits for spreadsheet workbooks."""

import json
from os import PathLike
from typing import Iterable, Optional, Union

from ._clearsheet import (
    ConfigError,
    FormulaError,
    LoadError,
    __version__,
    audit_json as _audit_json,
    cell_score,
    dump_formula,
    model_score,
    normalize_formula,
    parameter_grade,
    summary_line,
)

__all__ = [
    "ConfigError",
    "FormulaError",
    "LoadError",
    "__version__",
    "audit",
    "cell_score",
    "dump_formula",
    "model_score",
    "normalize_formula",
    "parameter_grade",
    "summary_line",
]

PathArg = Union[str, PathLike]


def audit(paths: Iterable[PathArg], config: Optional[dict] = None) -> dict:
    """Audit workbooks and return the structured report as a dict.

    ``config`` takes the same keys as the command line tool's config file.
    """
    lines = []
    for key, value in (config or {}).items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{key} = {value}")
    text, _ = _audit_json([str(p) for p in paths], "\n".join(lines))
    return json.loads(text)

