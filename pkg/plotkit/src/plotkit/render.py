"""Turn validated bundles into publication-style figures.

One image per figure id.  Line panels share a plain style with time axes
in qubit-frequency units; Wigner panels use a symmetric diverging colour
scale centred at zero so negativity is visible.  Rendering is read-only
over the bundle and deterministic: the same bundle yields byte-identical
images.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from .schema import SchemaError, load_bundle

RC_STYLE = {
    "figure.dpi": 110,
    "savefig.dpi": 150,
    "font.size": 9,
    "axes.labelsize": 10,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "lines.linewidth": 1.4,
    "axes.grid": True,
    "grid.alpha": 0.3,
}

TIME_LABEL = r"$\omega_q t$"


@dataclass(frozen=True)
class FigureSpec:
    """What to render: bundle directory, figure id, output path, style knobs."""

    bundle: Path
    fig_id: str
    out: Path
    dpi: int = 150

    def __post_init__(self) -> None:
        object.__setattr__(self, "bundle", Path(self.bundle))
        object.__setattr__(self, "out", Path(self.out))


def _plot_fig1(tables: dict[str, pd.DataFrame], fig: plt.Figure) -> None:
    data = tables["splitting"]
    ax = fig.subplots()
    ax.plot(data["g"], data["gap_analytic"], color="tab:blue", label="analytic")
    ax.plot(data["g"], data["gap_numeric"], "--", color="tab:red", label="numeric")
    ax.set_xlabel(r"$g/\omega_q$")
    ax.set_ylabel(r"$\Delta E/\omega_q$")
    ax.set_yscale("log")
    ax.set_title("Level splitting at the three-photon crossing")
    ax.legend()


def _plot_fig3(tables: dict[str, pd.DataFrame], fig: plt.Figure) -> None:
    data = tables["trace"]
    ax = fig.subplots()
    ax.plot(data["time"], data["pop_e0"], color="tab:blue", label=r"$|e,0\rangle$")
    ax.plot(data["time"], data["pop_g3"], color="tab:red", label=r"$|g,3\rangle$")
    ax.set_xlabel(TIME_LABEL)
    ax.set_ylabel("population")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title("Three-photon Rabi oscillation")
    ax.legend()


def _plot_fig4(tables: dict[str, pd.DataFrame], fig: plt.Figure) -> None:
    data = tables["periods"]
    ax = fig.subplots()
    ax.plot(data["r"], data["t_f_isotropic"], color="tab:red", label="isotropic")
    ax.plot(data["r"], data["t_f_anisotropic"], color="tab:blue", label="full model")
    ax.set_xlabel(r"$r$")
    ax.set_ylabel(r"$t_f\,\omega_q$")
    ax.set_yscale("log")
    ax.set_title("Oscillation period vs squeezing")
    ax.legend()


def _plot_fig5(tables: dict[str, pd.DataFrame], fig: plt.Figure) -> None:
    data = tables["fidelity_vs_r"]
    ax = fig.subplots()
    ax.plot(data["r"], data["peak_fidelity"], marker="o", ms=3, color="tab:blue")
    ax.set_xlabel(r"$r$")
    ax.set_ylabel("peak three-photon fidelity")
    ax.set_title("Transfer fidelity vs squeezing")


def _plot_fig6(tables: dict[str, pd.DataFrame], fig: plt.Figure) -> None:
    present = [name for name in ("text_set", "caption_set", "control_closed", "kappa_doubled") if name in tables]
    axes = fig.subplots(1, 2)
    for name in present:
        data = tables[name]
        axes[0].plot(data["time"], data["fidelity"], label=name.replace("_", " "))
        axes[1].plot(data["time"], data["concurrence"], label=name.replace("_", " "))
    axes[0].set_ylabel("fidelity")
    axes[1].set_ylabel("concurrence")
    for ax in axes:
        ax.set_xlabel(TIME_LABEL)
        ax.legend()
    fig.suptitle("Dissipative sweep")


def _wigner_panel(ax: plt.Axes, table: pd.DataFrame, title: str) -> None:
    xs = np.sort(table["x"].unique())
    ps = np.sort(table["p"].unique())
    grid = table.pivot(index="p", columns="x", values="w").to_numpy()
    limit = np.abs(grid).max()
    mesh = ax.pcolormesh(xs, ps, grid, cmap="RdBu_r", vmin=-limit, vmax=limit, shading="nearest")
    ax.set_xlabel(r"$x$")
    ax.set_ylabel(r"$p$")
    ax.set_title(title)
    ax.figure.colorbar(mesh, ax=ax, shrink=0.85)


def _plot_fig7(tables: dict[str, pd.DataFrame], fig: plt.Figure) -> None:
    axes = fig.subplots(3, 2).ravel()
    a = tables["panel_a"]
    axes[0].plot(a["time"], a["pop_e0"], color="tab:blue", label=r"$|e,0\rangle$")
    axes[0].plot(a["time"], a["pop_g3"], "--", color="tab:red", label=r"$|g,3\rangle$")
    axes[0].plot(a["time"], a["target_population"], color="tab:green", label="target")
    axes[0].set_ylabel("population")
    axes[0].legend()
    axes[0].set_title("(a) populations")

    b = tables["panel_b"]
    axes[1].plot(b["time"], b["photon_number"], color="tab:blue")
    axes[1].set_ylabel(r"$\langle a^\dagger a\rangle$")
    axes[1].set_title("(b) photon number")

    c = tables["panel_c"]
    axes[2].plot(c["time"], c["adiabatic_projection"], color="tab:blue")
    axes[2].set_ylabel("projection")
    axes[2].set_ylim(0.9, 1.005)
    axes[2].set_title("(c) adiabaticity")

    d = tables["panel_d"]
    axes[3].plot(d["time"], d["concurrence"], color="tab:blue")
    axes[3].set_ylabel("concurrence")
    axes[3].set_title("(d) entanglement")

    for ax in axes[:4]:
        ax.set_xlabel(TIME_LABEL)

    _wigner_panel(axes[4], tables["wigner_initial"], "(e) initial cavity state")
    _wigner_panel(axes[5], tables["wigner_final"], "(f) final cavity state")


PANEL_BUILDERS = {
    "fig1": (_plot_fig1, (5.0, 3.6)),
    "fig3": (_plot_fig3, (5.6, 3.6)),
    "fig4": (_plot_fig4, (5.0, 3.6)),
    "fig5": (_plot_fig5, (5.0, 3.6)),
    "fig6": (_plot_fig6, (8.0, 3.4)),
    "fig7": (_plot_fig7, (8.5, 10.0)),
}


def render(spec: FigureSpec) -> Path:
    """Render one figure from a bundle; returns the written image path."""
    tables = load_bundle(spec.bundle, spec.fig_id)
    builder, size = PANEL_BUILDERS[spec.fig_id]
    with plt.rc_context(RC_STYLE):
        fig = plt.figure(figsize=size)
        try:
            builder(tables, fig)
            fig.tight_layout()
            spec.out.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(spec.out, dpi=spec.dpi)
        finally:
            plt.close(fig)
    return spec.out
