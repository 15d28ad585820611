"""Result bundles: per-experiment CSV tables plus a metadata document.

CSV files carry a header line and floats serialized with 12 significant
digits, which makes re-runs of the same config bit-identical.  The
metadata document (INI-style text) is written even when a run fails
mid-way, with the failure recorded under ``[outcome]``.
"""

from __future__ import annotations

import configparser
import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

FLOAT_FMT = "{:.12g}"


def _fmt(value) -> str:
    if isinstance(value, float):
        return FLOAT_FMT.format(value)
    return str(value)


@dataclass
class Table:
    """One CSV table: named columns and row tuples."""

    columns: list[str]
    rows: list[tuple]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    @classmethod
    def from_arrays(cls, columns: list[str], arrays: Iterable) -> "Table":
        cols = [list(a) for a in arrays]
        return cls(columns, list(zip(*cols)))


@dataclass
class ResultBundle:
    """Everything one experiment emits: tables keyed by name plus metadata."""

    name: str
    tables: dict[str, Table] = field(default_factory=dict)
    metadata: dict[str, dict[str, str]] = field(default_factory=dict)

    def meta(self, section: str, **kv) -> None:
        dest = self.metadata.setdefault(section, {})
        for key, value in kv.items():
            dest[key] = _fmt(value)

    def write(self, out_root: str | Path) -> Path:
        out_dir = Path(out_root) / self.name
        out_dir.mkdir(parents=True, exist_ok=True)
        for table_name, table in self.tables.items():
            (out_dir / f"{table_name}.csv").write_text(table.to_csv())
        parser = configparser.ConfigParser()
        parser.optionxform = str  # keep key case
        for section, kv in self.metadata.items():
            parser[section] = kv
        with open(out_dir / "metadata.txt", "w") as fh:
            parser.write(fh)
        return out_dir
