"""Derived quantities: populations, fidelity, concurrence, Wigner functions, peaks.

Conventions
-----------
- Quadratures x = (a + a^dag)/sqrt(2), p = i(a^dag - a)/sqrt(2).
- Wigner normalisation: W(x,p) = (1/pi) Tr[rho D(alpha) P D(-alpha)] with
  alpha = (x + i p)/sqrt(2) and P the photon parity, so the vacuum peaks at
  1/pi and the grid integrates to 1.
- Fidelity of a mixed state is <target|rho|target> (squared-overlap form).
- Concurrence of pure qubit-cavity states is sqrt(2(1 - Tr rho_qubit^2));
  mixed states are projected onto the protocol subspace
  {|g,0>, |g,3>, |e,0>, |e,3>} and scored with the two-qubit formula, with
  the discarded weight reported alongside.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .dynamics import Trajectory
from .errors import ContractViolationError, DimensionMismatchError
from .qcore import (
    DensityMatrix,
    FockSpace,
    PureState,
    cavity_destroy,
    dagger,
    partial_trace,
    squeeze_operator,
)

UNRELIABLE_PROJECTION_WEIGHT = 0.5


def _state_vector(state) -> np.ndarray:
    vec = state.amplitudes if isinstance(state, PureState) else np.asarray(state, dtype=complex)
    if vec.ndim != 1:
        raise DimensionMismatchError("expected a state vector")
    return vec


def _is_pure(state) -> bool:
    if isinstance(state, PureState):
        return True
    if isinstance(state, DensityMatrix):
        return False
    return np.asarray(state).ndim == 1


def bell_target(space: FockSpace) -> PureState:
    """The protocol's target (|e,0> - |g,3>)/sqrt(2) in the squeezed frame."""
    vec = np.zeros(space.dim, dtype=complex)
    vec[space.index(1, 0)] = 1.0 / np.sqrt(2.0)
    vec[space.index(0, 3)] = -1.0 / np.sqrt(2.0)
    return PureState(vec)


def squeezed_population(state, r: float, q: int, n: int, space: FockSpace) -> float:
    """Population |<q,n| S(-r) psi>|^2 of a squeezed-basis level.

    For a state already expressed in the squeezed frame call with ``r=0``;
    nonzero ``r`` un-squeezes a lab-frame state first.
    """
    vec = _state_vector(state)
    if vec.size != space.dim:
        raise DimensionMismatchError(f"state dim {vec.size} != space dim {space.dim}")
    idx = space.index(q, n)  # raises on n > n_max
    if r == 0.0:
        return float(np.abs(vec[idx]) ** 2)
    s_inv = squeeze_operator(-r, space).entries
    return float(np.abs(s_inv[idx, :] @ vec) ** 2)


def fidelity(state, target) -> float:
    """Squared overlap with a pure target: |<t|psi>|^2 or <t|rho|t>."""
    tvec = _state_vector(target)
    if _is_pure(state):
        vec = _state_vector(state)
        if vec.size != tvec.size:
            raise DimensionMismatchError("state/target dimension mismatch")
        return float(np.abs(tvec.conj() @ vec) ** 2)
    mat = state.entries if isinstance(state, DensityMatrix) else np.asarray(state, dtype=complex)
    if mat.shape[0] != tvec.size:
        raise DimensionMismatchError("state/target dimension mismatch")
    return float(np.real(tvec.conj() @ mat @ tvec))


@dataclass(frozen=True)
class ConcurrenceInfo:
    """Projected two-qubit concurrence plus how much weight the projection kept."""

    value: float
    projection_weight: float

    @property
    def discarded_weight(self) -> float:
        return 1.0 - self.projection_weight


def _pure_concurrence(vec: np.ndarray, space: FockSpace) -> float:
    rho_q = partial_trace(np.outer(vec, vec.conj()), "qubit").entries
    purity = float(np.real(np.trace(rho_q @ rho_q)))
    return float(np.sqrt(max(0.0, 2.0 * (1.0 - purity))))


def projected_concurrence(rho, space: FockSpace) -> ConcurrenceInfo:
    """Wootters concurrence of the state projected onto the protocol subspace.

    Basis order (qubit, mode) = (g,0), (g,3), (e,0), (e,3) maps onto the
    two-qubit computational basis; the mode levels {0, 3} act as the second
    qubit.
    """
    mat = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    idx = [space.index(0, 0), space.index(0, 3), space.index(1, 0), space.index(1, 3)]
    sub = mat[np.ix_(idx, idx)]
    weight = float(np.real(np.trace(sub)))
    if weight <= 1e-12:
        return ConcurrenceInfo(0.0, 0.0)
    sub = sub / weight
    sy = np.array([[0, -1j], [1j, 0]])
    yy = np.kron(sy, sy)
    lam = np.linalg.eigvals(sub @ yy @ sub.conj() @ yy)
    lam = np.sqrt(np.clip(np.real(lam), 0.0, None))
    lam.sort()
    value = max(0.0, lam[3] - lam[2] - lam[1] - lam[0])
    return ConcurrenceInfo(float(value), weight)


def concurrence(state, space: FockSpace) -> float:
    """Qubit-cavity entanglement monotone in [0, 1].

    Pure states use the reduced-purity form directly on the full space;
    density matrices go through :func:`projected_concurrence` (a warning is
    attached when the projection keeps less than half the weight).
    """
    if _is_pure(state):
        return _pure_concurrence(_state_vector(state), space)
    info = projected_concurrence(state, space)
    if info.projection_weight < UNRELIABLE_PROJECTION_WEIGHT:
        warnings.warn(
            f"concurrence unreliable: projection kept only {info.projection_weight:.3f} of the state",
            stacklevel=2,
        )
    return info.value


def photon_number(state, space: FockSpace) -> float:
    """Expectation of a^dag a on the composite space."""
    n_diag = np.kron(np.ones(2), np.arange(space.cavity_dim, dtype=float))
    if _is_pure(state):
        vec = _state_vector(state)
        if vec.size != space.dim:
            raise DimensionMismatchError("state/space dimension mismatch")
        return float(np.sum(n_diag * np.abs(vec) ** 2))
    mat = state.entries if isinstance(state, DensityMatrix) else np.asarray(state, dtype=complex)
    return float(np.real(np.sum(n_diag * np.diag(mat))))


@dataclass(frozen=True)
class WignerGridSpec:
    """Rectangular phase-space window and per-axis resolution."""

    x_min: float
    x_max: float
    p_min: float
    p_max: float
    n_points: int = 81

    def __post_init__(self) -> None:
        if self.x_max <= self.x_min or self.p_max <= self.p_min or self.n_points < 4:
            raise ContractViolationError("degenerate Wigner grid spec")

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.linspace(self.x_min, self.x_max, self.n_points),
            np.linspace(self.p_min, self.p_max, self.n_points),
        )


@dataclass
class WignerGrid:
    """Sampled W(x, p); ``values[j, i]`` is W at (xs[i], ps[j])."""

    xs: np.ndarray
    ps: np.ndarray
    values: np.ndarray

    def integral(self) -> float:
        dx = self.xs[1] - self.xs[0]
        dp = self.ps[1] - self.ps[0]
        return float(self.values.sum() * dx * dp)

    def moment(self, fn) -> float:
        """Phase-space average of fn(x, p) under W (Riemann sum)."""
        dx = self.xs[1] - self.xs[0]
        dp = self.ps[1] - self.ps[0]
        xg, pg = np.meshgrid(self.xs, self.ps)
        return float((fn(xg, pg) * self.values).sum() * dx * dp)


def _auto_embed_dim(rho: np.ndarray, beta_max: float) -> int:
    pops = np.real(np.diag(rho))
    tail = np.cumsum(pops[::-1])[::-1]
    sig = np.nonzero(tail > 1e-9)[0]
    n_sig = int(sig[-1]) + 1 if sig.size else 1
    return int(np.ceil((np.sqrt(n_sig) + beta_max) ** 2 + 25))


def wigner(rho_cavity, spec: WignerGridSpec, embed_dim: int | None = None) -> WignerGrid:
    """Displaced-parity Wigner transform of a cavity-only density matrix.

    The displacement is built from matrix exponentials of the quadrature
    generators (each exact through its eigenbasis), combined with the Weyl
    phase; parity conjugation reduces the double displacement to a single
    one, and the grid then factorises into two dense matrix products.

    Parameters
    ----------
    rho_cavity : DensityMatrix or array
        Cavity state (no qubit factor).
    spec : WignerGridSpec
        Phase-space window; a warning fires if the state visibly touches
        the window boundary.
    embed_dim : int, optional
        Fock-space size used internally for the displacement algebra;
        defaults to a heuristic large enough for the requested window.
    """
    rho = rho_cavity.entries if isinstance(rho_cavity, DensityMatrix) else np.asarray(rho_cavity, dtype=complex)
    nc = rho.shape[0]
    xs, ps = spec.axes()
    corner = max(abs(spec.x_min), abs(spec.x_max)) ** 2 + max(abs(spec.p_min), abs(spec.p_max)) ** 2
    beta_max = np.sqrt(2.0 * corner)  # |2 alpha| at the farthest corner
    m = embed_dim or _auto_embed_dim(rho, beta_max)
    m = max(m, nc)

    big = np.zeros((m, m), dtype=complex)
    big[:nc, :nc] = rho
    a = cavity_destroy(m)
    x_op = (a + dagger(a)) / np.sqrt(2.0)
    p_op = 1j * (dagger(a) - a) / np.sqrt(2.0)
    lx, vx = np.linalg.eigh(x_op)
    lp, vp = np.linalg.eigh(p_op)

    # W = (1/pi) sum_{mn} rho_mn (-1)^m <n|D(2 alpha)|m>, with
    # D(beta) = exp(i sqrt2 Im(beta) x) exp(-i sqrt2 Re(beta) p) e^{-i Re Im}.
    parity = (-1.0) ** np.arange(m)
    masked = parity[:, None] * big  # E_{mn} = rho_{mn} (-1)^m, so W ~ Tr[E D(2 alpha)]
    kernel = (dagger(vx) @ vp) * (dagger(vp) @ masked @ vx).T
    # Grid phases: rows over p (x-quadrature factor), columns over x.
    dx_phases = np.exp(2j * np.outer(ps, lx))
    dp_phases = np.exp(-2j * np.outer(xs, lp))
    w_complex = np.exp(-2j * np.outer(ps, xs)) * (dx_phases @ kernel @ dp_phases.T)
    if np.abs(w_complex.imag).max() > 1e-8:
        raise ContractViolationError(
            f"Wigner values came out complex ({np.abs(w_complex.imag).max():.3e}); embed_dim too small"
        )
    values = w_complex.real / np.pi

    peak = np.abs(values).max()
    edge = max(
        np.abs(values[0, :]).max(),
        np.abs(values[-1, :]).max(),
        np.abs(values[:, 0]).max(),
        np.abs(values[:, -1]).max(),
    )
    if peak > 0 and edge > 1e-3 * peak:
        warnings.warn(
            f"Wigner support truncated: boundary amplitude {edge:.2e} vs peak {peak:.2e}",
            stacklevel=2,
        )
    return WignerGrid(xs=xs, ps=ps, values=values)


@dataclass(frozen=True)
class OscillationMetrics:
    """Peak (parabolically refined) and peak-to-peak period of one column."""

    peak_value: float
    t_peak: float
    period: float | None


def _refine_peak(times: np.ndarray, values: np.ndarray, i: int) -> tuple[float, float]:
    if i == 0 or i == len(values) - 1:
        return float(times[i]), float(values[i])
    y0, y1, y2 = values[i - 1], values[i], values[i + 1]
    denom = y0 - 2 * y1 + y2
    if denom == 0:
        return float(times[i]), float(values[i])
    shift = 0.5 * (y0 - y2) / denom
    dt = times[i + 1] - times[i]
    return float(times[i] + shift * dt), float(y1 - 0.25 * (y0 - y2) * shift)


def oscillation_metrics(traj: Trajectory, column: str) -> OscillationMetrics:
    """Extract the maximum and the oscillation period of a trajectory column.

    The period is the mean spacing of prominent maxima (each refined by a
    parabolic fit); with fewer than two usable peaks the period is None and
    only the peak is reported.
    """
    values = np.asarray(traj.column(column), dtype=float)
    times = traj.times
    imax = int(np.argmax(values))
    t_peak, peak_value = _refine_peak(times, values, imax)
    peak_value = max(peak_value, float(values[imax]))

    prominence = 0.1 * (values.max() - values.min())
    peaks, _ = find_peaks(values, prominence=prominence)
    if len(peaks) < 2:
        return OscillationMetrics(peak_value, t_peak, None)
    refined = np.array([_refine_peak(times, values, int(i))[0] for i in peaks])
    period = float(np.mean(np.diff(refined)))
    return OscillationMetrics(peak_value, t_peak, period)
