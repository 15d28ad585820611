import numpy as np
import pytest


def write_csv(path, columns, rows):
    lines = [",".join(columns)]
    lines += [",".join(f"{v:.12g}" if isinstance(v, float) else str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def trace_rows(n=60, cols=3):
    t = np.linspace(0.0, 100.0, n)
    out = [t]
    for k in range(cols - 1):
        out.append(0.5 + 0.5 * np.cos(0.1 * t + k))
    return list(zip(*[list(map(float, c)) for c in out]))


def wigner_rows(n=9):
    xs = np.linspace(-2, 2, n)
    rows = []
    for p in xs:
        for x in xs:
            w = float(np.exp(-(x**2 + p**2)) / np.pi * (1 - x))
            rows.append((float(x), float(p), w))
    return rows


@pytest.fixture()
def bundles(tmp_path):
    """Synthetic bundles matching the documented schema for every figure id."""
    root = tmp_path / "bundles"

    fig1 = root / "fig1"
    fig1.mkdir(parents=True)
    gs = np.linspace(0.005, 0.06, 8)
    write_csv(
        fig1 / "splitting.csv",
        ["g", "gap_analytic", "gap_numeric", "rel_diff"],
        [(float(g), float(g**3), float(g**3 * 1.01), 0.01) for g in gs],
    )

    fig3 = root / "fig3"
    fig3.mkdir()
    write_csv(fig3 / "trace.csv", ["time", "pop_e0", "pop_g3"], trace_rows())

    fig4 = root / "fig4"
    fig4.mkdir()
    rs = np.linspace(0.4, 2.0, 9)
    write_csv(
        fig4 / "periods.csv",
        ["r", "t_f_anisotropic", "t_f_isotropic", "ratio"],
        [(float(r), float(1e5 * np.exp(-2 * r)), float(1.1e5 * np.exp(-2 * r)), 0.9) for r in rs],
    )

    fig5 = root / "fig5"
    fig5.mkdir()
    write_csv(
        fig5 / "fidelity_vs_r.csv",
        ["r", "peak_fidelity", "omega_c", "t_peak"],
        [(float(r), float(1 - (r - 0.65) ** 2 / 10), 0.34, 1e5) for r in rs],
    )

    fig6 = root / "fig6"
    fig6.mkdir()
    cols6 = ["time", "fidelity", "concurrence", "photon_number", "projection_weight"]
    t = np.linspace(0, 50, 40)
    rows6 = [(float(tt), float(np.exp(-0.01 * tt)), float(np.exp(-0.02 * tt)), 0.5, 0.9) for tt in t]
    for name in ("text_set", "caption_set", "control_closed", "kappa_doubled"):
        write_csv(fig6 / f"{name}.csv", cols6, rows6)

    fig7 = root / "fig7"
    fig7.mkdir()
    write_csv(fig7 / "panel_a.csv", ["time", "pop_e0", "pop_g3", "target_population"], trace_rows(cols=4))
    write_csv(fig7 / "panel_b.csv", ["time", "photon_number"], trace_rows(cols=2))
    write_csv(fig7 / "panel_c.csv", ["time", "adiabatic_projection"], trace_rows(cols=2))
    write_csv(fig7 / "panel_d.csv", ["time", "concurrence"], trace_rows(cols=2))
    write_csv(fig7 / "wigner_initial.csv", ["x", "p", "w"], wigner_rows())
    write_csv(fig7 / "wigner_final.csv", ["x", "p", "w"], wigner_rows())

    for sub in root.iterdir():
        (sub / "metadata.txt").write_text("[outcome]\nstatus = ok\n")
    return root
