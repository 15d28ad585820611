"""Bundle schemas: which CSV tables each figure needs and their columns.

A bundle is a directory of CSV files plus ``metadata.txt`` as written by
the simulation CLI.  Tables marked optional may be absent (the figure is
rendered partially, with a warning); required tables or columns that are
missing fail with the offending name.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import pandas as pd


class SchemaError(Exception):
    """Bundle does not match the documented table/column layout."""


@dataclass(frozen=True)
class TableSpec:
    name: str
    columns: tuple[str, ...]
    optional: bool = False


FIGURE_TABLES: dict[str, tuple[TableSpec, ...]] = {
    "fig1": (TableSpec("splitting", ("g", "gap_analytic", "gap_numeric", "rel_diff")),),
    "fig3": (TableSpec("trace", ("time", "pop_e0", "pop_g3")),),
    "fig4": (TableSpec("periods", ("r", "t_f_anisotropic", "t_f_isotropic", "ratio")),),
    "fig5": (TableSpec("fidelity_vs_r", ("r", "peak_fidelity", "omega_c", "t_peak")),),
    "fig6": (
        TableSpec("text_set", ("time", "fidelity", "concurrence", "photon_number", "projection_weight")),
        TableSpec("caption_set", ("time", "fidelity", "concurrence", "photon_number", "projection_weight")),
        TableSpec("control_closed", ("time", "fidelity", "concurrence", "photon_number", "projection_weight"), optional=True),
        TableSpec("kappa_doubled", ("time", "fidelity", "concurrence", "photon_number", "projection_weight"), optional=True),
    ),
    "fig7": (
        TableSpec("panel_a", ("time", "pop_e0", "pop_g3", "target_population")),
        TableSpec("panel_b", ("time", "photon_number")),
        TableSpec("panel_c", ("time", "adiabatic_projection")),
        TableSpec("panel_d", ("time", "concurrence")),
        TableSpec("wigner_initial", ("x", "p", "w")),
        TableSpec("wigner_final", ("x", "p", "w")),
    ),
}

FIGURE_IDS = tuple(FIGURE_TABLES)


def load_bundle(bundle_dir: str | Path, fig_id: str) -> dict[str, pd.DataFrame]:
    """Read and validate every table a figure needs.

    Optional tables that are absent are skipped with a warning; anything
    else missing or malformed raises :class:`SchemaError` naming the file
    or column.
    """
    if fig_id not in FIGURE_TABLES:
        raise SchemaError(f"unknown figure id {fig_id!r}; known: {', '.join(FIGURE_IDS)}")
    bundle_dir = Path(bundle_dir)
    if not bundle_dir.is_dir():
        raise SchemaError(f"bundle directory not found: {bundle_dir}")

    tables: dict[str, pd.DataFrame] = {}
    for spec in FIGURE_TABLES[fig_id]:
        path = bundle_dir / f"{spec.name}.csv"
        if not path.exists():
            if spec.optional:
                warnings.warn(f"optional table {spec.name}.csv missing; rendering partially", stacklevel=2)
                continue
            raise SchemaError(f"missing table {spec.name}.csv in {bundle_dir}")
        frame = pd.read_csv(path)
        for column in spec.columns:
            if column not in frame.columns:
                raise SchemaError(f"{path.name}: missing column {column!r}")
        if frame.empty:
            raise SchemaError(f"{path.name}: table is empty")
        tables[spec.name] = frame
    return tables
