"""Three-photon resonance analytics and their numerical counterparts.

The closed forms live on the {|e,0>, |g,3>} pair: the signed effective
coupling, the cavity frequency at which the pair's diagonal energies
coincide, and the resulting level splitting 2|coupling|.  The numerical
side locates the avoided crossing of the full model by minimising the gap
between the two eigenstates that carry the pair, using golden-section
refinement inside a scan bracket.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import (
    BracketError,
    ContractViolationError,
    DegenerateGapError,
    SingularFrequencyError,
    TrackingError,
)
from .model import SqueezedParams, build_anisotropic_rabi, decompose_rabi
from .qcore import FockSpace

DEFAULT_BRACKET_HALFWIDTH = 0.05
GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ResonanceResult:
    """Location and size of the three-photon avoided crossing."""

    omega_c_star: float
    omega_eff: float
    gap: float
    method: Literal["analytic", "numeric"]

    def __post_init__(self) -> None:
        if self.method == "analytic":
            if abs(self.gap - 2.0 * abs(self.omega_eff)) > 1e-15 * max(self.gap, 1e-300):
                raise ContractViolationError("analytic gap must equal 2|omega_eff|")
        elif self.gap <= 0:
            raise ContractViolationError("numeric gap must be positive")


def effective_rabi_frequency(p: SqueezedParams) -> float:
    """Signed three-photon coupling -sqrt(6) lambda1 lambda2^2 / (4 omega_c^2)."""
    if p.omega_c == 0:
        raise SingularFrequencyError("omega_c = 0 makes the effective coupling singular")
    return -np.sqrt(6.0) * p.lambda1 * p.lambda2**2 / (4.0 * p.omega_c**2)


def resonance_frequency_analytic(g: float, r: float, omega_q: float = 1.0) -> float:
    """Shifted resonance frequency to second order in g/omega_q.

    omega_c'/omega_q = 1/3 + (2 cosh^2 r + sinh^2 r)(g/omega_q)^2.
    """
    if g < 0:
        raise ContractViolationError(f"coupling must be non-negative, got g={g}")
    shift = (2.0 * np.cosh(r) ** 2 + np.sinh(r) ** 2) * (g / omega_q) ** 2
    return omega_q * (1.0 / 3.0 + shift)


def subspace_resonance_frequency(g: float, r: float, omega_q: float = 1.0) -> float:
    """Cavity frequency at which the pair's diagonal energies coincide exactly.

    Positive root of 3 w^2 - omega_q w - (2 lambda2^2 + lambda1^2) = 0; its
    expansion in g reproduces :func:`resonance_frequency_analytic`.
    """
    s = (2.0 * np.cosh(r) ** 2 + np.sinh(r) ** 2) * g**2
    return (omega_q + np.sqrt(omega_q**2 + 12.0 * s)) / 6.0


def transfer_subspace_matrix(p: SqueezedParams) -> np.ndarray:
    """2x2 block of the effective Hamiltonian on {|e,0>, |g,3>} (in that order)."""
    if p.omega_c == 0:
        raise SingularFrequencyError("omega_c = 0 makes the effective couplings singular")
    wc, wq, l1, l2 = p.omega_c, p.omega_q, p.lambda1, p.lambda2
    coupling = -np.sqrt(6.0) * l1 * l2**2 / (4.0 * wc**2)
    return np.array(
        [
            [0.5 * wq + l2**2 / (2 * wc), coupling],
            [coupling, 3 * wc - 0.5 * wq - 3 * l2**2 / (2 * wc) - l1**2 / wc],
        ],
        dtype=complex,
    )


def analytic_resonance(g: float, r: float, omega_q: float = 1.0) -> ResonanceResult:
    """Closed-form crossing location (exact pair-degeneracy root) and splitting."""
    wc = subspace_resonance_frequency(g, r, omega_q)
    p = SqueezedParams.from_coupling(g, r, wc, omega_q)
    omega_eff = effective_rabi_frequency(p)
    return ResonanceResult(wc, omega_eff, 2.0 * abs(omega_eff), "analytic")


ModelKind = Literal["anisotropic", "isotropic"]


def _hamiltonian_builder(p: SqueezedParams, space: FockSpace, model: ModelKind) -> Callable[[float], np.ndarray]:
    if model == "anisotropic":
        return lambda wc: build_anisotropic_rabi(p.with_omega_c(wc), space).entries
    if model == "isotropic":
        return lambda wc: decompose_rabi(p.with_omega_c(wc), space)[0].entries
    raise ContractViolationError(f"unknown model kind {model!r}")


def _pair_gap(h: np.ndarray, idx_e0: int, idx_g3: int) -> float:
    """Splitting between the two eigenstates carrying the {|e,0>, |g,3>} pair.

    Identification is by the joint weight on the two-dimensional bare
    subspace so it stays well defined right at the crossing, where both
    hybridised states hold about half of each bare state.
    """
    w, v = np.linalg.eigh(h)
    weight = np.abs(v[idx_e0, :]) ** 2 + np.abs(v[idx_g3, :]) ** 2
    top2 = np.argpartition(weight, -2)[-2:]
    if weight[top2].sum() < 1.0:
        raise TrackingError(
            f"pair identification ambiguous: joint bare-subspace weight {weight[top2].sum():.3f} < 1"
        )
    return float(abs(w[top2[0]] - w[top2[1]]))


def find_avoided_crossing(
    p: SqueezedParams,
    scan: tuple[float, float] | None,
    space: FockSpace,
    model: ModelKind = "anisotropic",
    rtol: float = 1e-10,
) -> ResonanceResult:
    """Locate the cavity frequency minimising the pair gap of the full model.

    Parameters
    ----------
    p : SqueezedParams
        Template parameters; ``p.omega_c`` is ignored and scanned instead.
    scan : (low, high) or None
        Bracket for the search; defaults to omega_q/3 +- 0.05 omega_q.
    model : {"anisotropic", "isotropic"}
        Full model, or its isotropic Rabi part alone for comparison runs.
    rtol : float
        Relative tolerance of the golden-section refinement in omega_c.

    Returns
    -------
    ResonanceResult
        With ``method="numeric"``; ``omega_eff`` is reported as -gap/2,
        matching the sign convention of the closed form.
    """
    if scan is None:
        third = p.omega_q / 3.0
        scan = (third - DEFAULT_BRACKET_HALFWIDTH * p.omega_q, third + DEFAULT_BRACKET_HALFWIDTH * p.omega_q)
    lo, hi = float(scan[0]), float(scan[1])
    if not lo < p.omega_q / 3.0 < hi:
        raise BracketError(f"scan interval ({lo}, {hi}) does not bracket omega_q/3")

    build = _hamiltonian_builder(p, space, model)
    idx_e0 = space.index(1, 0)
    idx_g3 = space.index(0, 3)
    gap_at = lambda wc: _pair_gap(build(wc), idx_e0, idx_g3)

    # Golden-section search; the gap is V-shaped (then rounded) across the
    # bracket, so unimodality holds without a fine pre-scan.
    tol = rtol * max(abs(lo), abs(hi))
    a, b = lo, hi
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = gap_at(x1), gap_at(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = gap_at(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = gap_at(x2)
    wc_star = 0.5 * (a + b)
    gap = gap_at(wc_star)

    span = hi - lo
    if min(wc_star - lo, hi - wc_star) < 1e-3 * span:
        raise BracketError(
            f"gap minimum sits at the scan edge (omega_c={wc_star:.6f}); widen the interval"
        )
    if gap >= min(gap_at(lo), gap_at(hi)):
        raise BracketError("no interior gap minimum found in the scan interval")
    return ResonanceResult(wc_star, -0.5 * gap, gap, "numeric")


@dataclass(frozen=True)
class SplittingPoint:
    g: float
    gap_analytic: float
    gap_numeric: float
    rel_diff: float


def splitting_curve(
    r: float,
    g_values: list[float] | np.ndarray,
    space: FockSpace,
    omega_q: float = 1.0,
) -> list[SplittingPoint]:
    """Analytic vs numeric level splitting across a coupling scan.

    The analytic column is 2|coupling| evaluated at the second-order
    resonance frequency; the numeric column comes from
    :func:`find_avoided_crossing` at each g.
    """
    g_arr = np.asarray(g_values, dtype=float)
    if g_arr.size == 0:
        raise ContractViolationError("g scan is empty")
    if np.any(g_arr <= 0) or np.any(np.diff(g_arr) <= 0):
        raise ContractViolationError("g values must be positive and strictly ascending")
    rows = []
    for g in g_arr:
        wc_prime = resonance_frequency_analytic(g, r, omega_q)
        p = SqueezedParams.from_coupling(g, r, wc_prime, omega_q)
        gap_analytic = 2.0 * abs(effective_rabi_frequency(p))
        numeric = find_avoided_crossing(p, None, space)
        rel = abs(numeric.gap - gap_analytic) / numeric.gap
        rows.append(SplittingPoint(float(g), gap_analytic, numeric.gap, rel))
    return rows


def oscillation_period_from_gap(res: ResonanceResult | float) -> float:
    """Full population-oscillation period 2 pi / gap (transfer completes at half)."""
    gap = res.gap if isinstance(res, ResonanceResult) else float(res)
    if gap <= 0:
        raise DegenerateGapError(f"gap {gap} is not positive; period undefined")
    return 2.0 * np.pi / gap
