"""Reader for the preamble+CSV files written by the robustlab CLI.

File layout: first line a JSON preamble (full generating configuration),
second line a comma-separated header, then one data row per line. Errors
are raised as SchemaError with the offending column or line named, so a
mismatched input fails loudly instead of plotting garbage.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = ["SchemaError", "Table", "read_table"]


class SchemaError(ValueError):
    """Input file does not match the documented schema."""


@dataclass(frozen=True)
class Table:
    preamble: dict
    columns: dict[str, np.ndarray]

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise SchemaError(f"missing column '{name}' "
                              f"(have: {', '.join(self.columns)})")
        return self.columns[name]

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values())))


def read_table(path: str, required: tuple[str, ...] = ()) -> Table:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if len(lines) < 3:
        raise SchemaError(f"{path}: expected preamble, header and at least one data row, "
                          f"got {len(lines)} line(s)")
    try:
        preamble = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: first line is not a JSON preamble: {exc}") from exc

    header = lines[1].split(",")
    raw_rows = [line.split(",") for line in lines[2:]]
    for i, row in enumerate(raw_rows):
        if len(row) != len(header):
            raise SchemaError(f"{path}: row {i + 1} has {len(row)} fields, "
                              f"header has {len(header)}")

    columns: dict[str, np.ndarray] = {}
    for j, name in enumerate(header):
        values = [row[j] for row in raw_rows]
        try:
            columns[name] = np.array([float(v) for v in values])
        except ValueError:
            columns[name] = np.array(values)  # non-numeric column (e.g. method)

    table = Table(preamble=preamble, columns=columns)
    for name in required:
        table.column(name)  # raises SchemaError naming the column
    return table
