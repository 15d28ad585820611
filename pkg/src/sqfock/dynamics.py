"""Closed-system propagation, the adiabatic sweep driver, and the Lindblad solver.

Propagation routes
------------------
- Static Hamiltonians: exact eigendecomposition propagation, so arbitrarily
  long times cost one diagonalisation.
- Time-dependent Hamiltonians: fixed-step classical RK4 on the Schroedinger
  equation.  Integration happens in a frame shifted by a constant energy
  reference (default: the initial energy expectation), which only changes
  the global phase but keeps the occupied band's phase steps tiny and the
  norm drift far below contract tolerances.
- Open systems: fixed-step RK4 directly on the density matrix
  (commutator plus dissipators), with Hermitian symmetrisation each step.

Times are in units of 1/omega_q throughout.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ContractViolationError, StepSizeError, TrackingError
from .model import SqueezedParams, build_anisotropic_rabi
from .qcore import FockSpace, PureState, QOperator, build_operators, hermitian_eigs

MAX_STEPS = 10**8
ACCURACY_THETA = 0.2  # dt * |H| guard (warning)
STABILITY_THETA = 2.5  # hard RK4 stability margin
NORM_DRIFT_ERROR = 1e-5
STORED_NORM_TOL = 1e-6
TRACE_DRIFT_TOL = 1e-6
POSITIVITY_TOL = 1e-6


@dataclass(frozen=True)
class TimeGrid:
    """Uniform integration grid with decimated storage.

    ``dt`` is nudged so an integer number of steps lands exactly on
    ``t_end``; stored points are every ``store_every`` steps plus the final
    one.
    """

    t_start: float
    t_end: float
    dt: float
    store_every: int = 1

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ContractViolationError(f"dt must be positive, got {self.dt}")
        if self.t_end <= self.t_start:
            raise ContractViolationError("t_end must exceed t_start")
        if self.store_every < 1:
            raise ContractViolationError("store_every must be >= 1")
        if (self.t_end - self.t_start) / self.dt > MAX_STEPS:
            raise ContractViolationError(f"more than {MAX_STEPS:.0e} steps requested; runaway guard")

    @property
    def n_steps(self) -> int:
        return max(1, round((self.t_end - self.t_start) / self.dt))

    @property
    def dt_eff(self) -> float:
        return (self.t_end - self.t_start) / self.n_steps

    def stored_indices(self) -> np.ndarray:
        idx = np.arange(0, self.n_steps + 1, self.store_every)
        if idx[-1] != self.n_steps:
            idx = np.append(idx, self.n_steps)
        return idx

    def stored_times(self) -> np.ndarray:
        return self.t_start + self.dt_eff * self.stored_indices()


@dataclass(frozen=True)
class SweepProtocol:
    """Linear cavity-frequency ramp omega_c(t) = omega_c_start + v t.

    ``eta = |coupling|^2 / v`` is the adiabaticity parameter; eta >> 1 means
    the crossing is traversed adiabatically.
    """

    omega_c_start: float
    v: float
    t_end: float
    eta: float

    def __post_init__(self) -> None:
        if self.eta <= 0 or self.v == 0 or self.t_end <= 0:
            raise ContractViolationError("sweep requires positive eta, nonzero v, positive duration")

    @classmethod
    def to_resonance(cls, omega_c_start: float, omega_c_end: float, v_factor: float, omega_eff: float) -> "SweepProtocol":
        """Sweep ending exactly at ``omega_c_end`` with rate ``v_factor * omega_eff^2``."""
        v = v_factor * omega_eff**2
        if omega_c_end < omega_c_start:
            v = -v
        t_end = (omega_c_end - omega_c_start) / v
        return cls(omega_c_start, v, t_end, eta=omega_eff**2 / abs(v))

    def omega_c(self, t: float | np.ndarray):
        return self.omega_c_start + self.v * t


@dataclass(frozen=True)
class DissipationParams:
    """Cavity decay rate kappa and qubit relaxation rate gamma (units of omega_q)."""

    kappa: float
    gamma: float

    def __post_init__(self) -> None:
        if self.kappa < 0 or self.gamma < 0:
            raise ContractViolationError("decay rates must be non-negative")


@dataclass
class Trajectory:
    """Stored time grid, states, and named observable columns.

    ``states`` is an array of shape (n_stored, dim) for pure states or
    (n_stored, dim, dim) for density matrices; stored pure states must be
    normalized within 1e-6 and stored density matrices unit-trace within
    1e-6.
    """

    times: np.ndarray
    states: np.ndarray
    kind: str  # "pure" | "density"
    observables: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=complex)
        n = self.times.size
        if self.kind == "pure":
            drift = np.abs(np.linalg.norm(self.states, axis=1) - 1.0).max()
            if drift >= STORED_NORM_TOL:
                raise ContractViolationError(f"stored state norm drift {drift:.3e} beyond 1e-6")
        elif self.kind == "density":
            drift = np.abs(np.einsum("tii->t", self.states).real - 1.0).max()
            if drift >= STORED_NORM_TOL:
                raise ContractViolationError(f"stored trace drift {drift:.3e} beyond 1e-6")
        else:
            raise ContractViolationError(f"unknown trajectory kind {self.kind!r}")
        if self.states.shape[0] != n:
            raise ContractViolationError("states and times length mismatch")
        for name, col in self.observables.items():
            if np.asarray(col).shape[0] != n:
                raise ContractViolationError(f"column {name!r} length mismatch")

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def add_observable(self, name: str, fn: Callable[[np.ndarray], float]) -> np.ndarray:
        col = np.array([fn(s) for s in self.states], dtype=float)
        self.observables[name] = col
        return col

    def column(self, name: str) -> np.ndarray:
        return self.observables[name]


class TimeDependentHamiltonian:
    """Wrap a ``t -> matrix`` callable; subclasses may provide a faster apply."""

    def __init__(self, matrix_fn: Callable[[float], np.ndarray]):
        self._matrix_fn = matrix_fn

    def matrix(self, t: float) -> np.ndarray:
        return self._matrix_fn(t)

    def apply(self, t: float, psi: np.ndarray) -> np.ndarray:
        return self.matrix(t) @ psi


class SweepHamiltonian(TimeDependentHamiltonian):
    """Anisotropic Rabi model with the cavity term ramped: H0 + omega_c(t) n."""

    def __init__(self, p: SqueezedParams, proto: SweepProtocol, space: FockSpace):
        self.params = p
        self.protocol = proto
        self.space = space
        self._h0 = build_anisotropic_rabi(p.with_omega_c(0.0), space).entries
        self._n_diag = np.kron(np.ones(2), np.arange(space.cavity_dim, dtype=float))

    def matrix(self, t: float) -> np.ndarray:
        h = self._h0.copy()
        h[np.diag_indices_from(h)] += self.protocol.omega_c(t) * self._n_diag
        return h

    def apply(self, t: float, psi: np.ndarray) -> np.ndarray:
        return self._h0 @ psi + (self.protocol.omega_c(t) * self._n_diag) * psi


def _as_hamiltonian(h) -> TimeDependentHamiltonian:
    if isinstance(h, TimeDependentHamiltonian):
        return h
    if callable(h):
        return TimeDependentHamiltonian(h)
    mat = h.entries if isinstance(h, QOperator) else np.asarray(h, dtype=complex)
    return TimeDependentHamiltonian(lambda t: mat)


def _as_state(psi) -> np.ndarray:
    if isinstance(psi, PureState):
        return psi.amplitudes.copy()
    vec = np.asarray(psi, dtype=complex).ravel()
    if abs(np.linalg.norm(vec) - 1.0) > 1e-9:
        raise ContractViolationError("initial state not normalized")
    return vec.copy()


def evolve_static(h: QOperator | np.ndarray, psi0, grid: TimeGrid) -> Trajectory:
    """Propagate under a constant Hamiltonian exactly via its eigenbasis."""
    w, v = hermitian_eigs(h)
    psi = _as_state(psi0)
    times = grid.stored_times()
    coeffs = v.conj().T @ psi
    phases = np.exp(-1j * np.outer(times - grid.t_start, w))
    states = (phases * coeffs[None, :]) @ v.T
    drift = np.abs(np.linalg.norm(states, axis=1) - 1.0).max()
    if drift >= 1e-10:
        raise ContractViolationError(f"eigenbasis propagation norm drift {drift:.3e}")
    return Trajectory(times=times, states=states, kind="pure")


def evolve_time_dependent(
    h_of_t,
    psi0,
    grid: TimeGrid,
    energy_shift: float | None = None,
) -> Trajectory:
    """Fixed-step RK4 integration of the Schroedinger equation.

    Parameters
    ----------
    h_of_t : callable, array, QOperator or TimeDependentHamiltonian
        Hamiltonian as a function of time.
    psi0 : PureState or vector
        Normalized initial state.
    energy_shift : float, optional
        Constant subtracted from H during integration (global phase only).
        Defaults to the initial energy expectation; pass 0.0 to disable.

    Raises
    ------
    StepSizeError
        If the norm drifts beyond 1e-5 during the run.
    """
    ham = _as_hamiltonian(h_of_t)
    psi = _as_state(psi0)
    dt = grid.dt_eff

    h0 = ham.matrix(grid.t_start)
    if energy_shift is None:
        energy_shift = float((psi.conj() @ (h0 @ psi)).real)
    w0 = np.linalg.eigvalsh(h0)
    theta = dt * max(abs(w0[0] - energy_shift), abs(w0[-1] - energy_shift))
    if theta > STABILITY_THETA:
        raise StepSizeError(
            f"dt*|H - shift| = {theta:.2f} exceeds the RK4 stability margin; reduce dt"
        )
    if theta > ACCURACY_THETA:
        warnings.warn(
            f"dt*|H - shift| = {theta:.2f} > {ACCURACY_THETA}: accuracy guard exceeded "
            "(high-lying cutoff levels; occupied-band accuracy is still validated by dt halving)",
            stacklevel=2,
        )

    shift = energy_shift

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return -1j * (ham.apply(t, y) - shift * y)

    store_at = set(grid.stored_indices().tolist())
    stored = [psi.copy()]
    t = grid.t_start
    half = 0.5 * dt
    for k in range(1, grid.n_steps + 1):
        k1 = rhs(t, psi)
        k2 = rhs(t + half, psi + half * k1)
        k3 = rhs(t + half, psi + half * k2)
        k4 = rhs(t + dt, psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = grid.t_start + k * dt
        if k in store_at:
            drift = abs(np.linalg.norm(psi) - 1.0)
            if drift > NORM_DRIFT_ERROR:
                raise StepSizeError(f"norm drift {drift:.3e} > 1e-5 at t={t:.4g}; reduce dt")
            stored.append(psi.copy())
    return Trajectory(times=grid.stored_times(), states=np.array(stored), kind="pure")


@dataclass
class TrackedBranch:
    """One instantaneous eigenbranch continued across a time grid."""

    times: np.ndarray
    states: np.ndarray  # (n, dim)
    energies: np.ndarray
    indices: np.ndarray  # position of the branch in the ascending spectrum


def instantaneous_eigenstate_track(
    h_of_t,
    times: Sequence[float] | np.ndarray,
    seed: int | np.ndarray,
) -> TrackedBranch:
    """Follow one instantaneous eigenstate by maximal-overlap continuation.

    ``seed`` selects the branch at the first time: either an index into the
    ascending spectrum or a reference vector whose best-overlap eigenstate
    starts the branch.  The global phase is fixed so consecutive overlaps
    are real and positive.  Continuation with squared overlap below 0.5
    raises :class:`TrackingError`.
    """
    ham = _as_hamiltonian(h_of_t)
    times = np.asarray(times, dtype=float)
    states, energies, indices = [], [], []
    prev: np.ndarray | None = None
    for t in times:
        w, v = np.linalg.eigh(ham.matrix(t))
        if prev is None:
            if isinstance(seed, (int, np.integer)):
                idx = int(seed)
            else:
                ref = np.asarray(seed, dtype=complex).ravel()
                idx = int(np.argmax(np.abs(ref.conj() @ v) ** 2))
        else:
            overlaps = np.abs(prev.conj() @ v) ** 2
            idx = int(np.argmax(overlaps))
            if overlaps[idx] < 0.5:
                raise TrackingError(
                    f"branch continuation ambiguous at t={t:.4g}: best overlap {overlaps[idx]:.3f} < 0.5"
                )
        vec = v[:, idx]
        anchor = prev if prev is not None else vec
        phase = anchor.conj() @ vec
        if abs(phase) > 0:
            vec = vec * (phase.conjugate() / abs(phase))
        states.append(vec)
        energies.append(w[idx])
        indices.append(idx)
        prev = vec
    return TrackedBranch(times, np.array(states), np.array(energies), np.array(indices))


def adiabatic_sweep(
    p: SqueezedParams,
    proto: SweepProtocol,
    space: FockSpace,
    dt: float = 0.02,
    store_every: int | None = None,
) -> Trajectory:
    """Run the frequency sweep from the tracked initial eigenstate.

    The initial state is the instantaneous eigenstate of H(0) with maximal
    overlap onto |e,0>; the run halts at ``proto.t_end`` (by construction
    the resonance point).  The returned trajectory carries bare-pair
    population columns and the adiabatic-projection column
    ``|<psi_inst(t)|psi(t)>|^2`` for the tracked branch.
    """
    if proto.eta < 1.0:
        warnings.warn(f"adiabatic parameter eta = {proto.eta:.3g} < 1: sweep is not adiabatic", stacklevel=2)
    ham = SweepHamiltonian(p, proto, space)
    idx_e0 = space.index(1, 0)
    idx_g3 = space.index(0, 3)

    w0, v0 = np.linalg.eigh(ham.matrix(0.0))
    start_idx = int(np.argmax(np.abs(v0[idx_e0, :]) ** 2))
    psi0 = v0[:, start_idx]
    psi0 = psi0 * np.exp(-1j * np.angle(psi0[idx_e0]))  # <e,0|psi0> real positive
    if abs(psi0[idx_e0]) ** 2 < 0.5:
        raise TrackingError(
            f"initial eigenstate carries only {abs(psi0[idx_e0])**2:.3f} of |e,0>; move the start detuning out"
        )

    if store_every is None:
        grid0 = TimeGrid(0.0, proto.t_end, dt)
        store_every = max(1, grid0.n_steps // 1500)
    grid = TimeGrid(0.0, proto.t_end, dt, store_every)
    traj = evolve_time_dependent(ham, psi0, grid)

    branch = instantaneous_eigenstate_track(ham, traj.times, seed=start_idx)
    projection = np.abs(np.einsum("td,td->t", branch.states.conj(), traj.states)) ** 2
    traj.observables["adiabatic_projection"] = projection
    traj.observables["pop_e0"] = np.abs(traj.states[:, idx_e0]) ** 2
    traj.observables["pop_g3"] = np.abs(traj.states[:, idx_g3]) ** 2
    traj.observables["branch_index"] = branch.indices.astype(float)
    return traj


def _lindblad_rhs(
    h: np.ndarray,
    rho: np.ndarray,
    a: np.ndarray,
    a_dag: np.ndarray,
    n_diag: np.ndarray,
    pe_diag: np.ndarray,
    kappa: float,
    gamma: float,
    nc: int,
) -> np.ndarray:
    out = -1j * (h @ rho - rho @ h)
    if kappa:
        out += kappa * (a @ rho @ a_dag - 0.5 * (n_diag[:, None] * rho + rho * n_diag[None, :]))
    if gamma:
        sm_rho_sp = np.zeros_like(rho)
        sm_rho_sp[:nc, :nc] = rho[nc:, nc:]
        out += gamma * (sm_rho_sp - 0.5 * (pe_diag[:, None] * rho + rho * pe_diag[None, :]))
    return out


def evolve_lindblad(
    h_of_t,
    rho0,
    diss: DissipationParams,
    grid: TimeGrid,
) -> Trajectory:
    """Fixed-step RK4 on the Lindblad master equation with photon loss and qubit decay.

    The density matrix is re-symmetrised (``rho <- (rho + rho^dag)/2``) each
    step. Trace drift beyond 1e-6 or a stored-point eigenvalue below -1e-6
    raises :class:`StepSizeError`.
    """
    ham = _as_hamiltonian(h_of_t)
    rho = rho0.entries.copy() if hasattr(rho0, "entries") else np.asarray(rho0, dtype=complex).copy()
    dim = rho.shape[0]
    nc = dim // 2
    a = np.kron(np.eye(2), np.diag(np.sqrt(np.arange(1, nc, dtype=float)), 1)).astype(complex)
    a_dag = a.conj().T
    n_diag = np.kron(np.ones(2), np.arange(nc, dtype=float))
    pe_diag = np.kron(np.array([0.0, 1.0]), np.ones(nc))

    dt = grid.dt_eff
    half = 0.5 * dt
    store_at = set(grid.stored_indices().tolist())
    stored = [rho.copy()]

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return _lindblad_rhs(ham.matrix(t), y, a, a_dag, n_diag, pe_diag, diss.kappa, diss.gamma, nc)

    t = grid.t_start
    for k in range(1, grid.n_steps + 1):
        k1 = rhs(t, rho)
        k2 = rhs(t + half, rho + half * k1)
        k3 = rhs(t + half, rho + half * k2)
        k4 = rhs(t + dt, rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        t = grid.t_start + k * dt
        if k in store_at:
            drift = abs(rho.trace().real - 1.0)
            if drift > TRACE_DRIFT_TOL:
                raise StepSizeError(f"trace drift {drift:.3e} > 1e-6 at t={t:.4g}; reduce dt")
            low = np.linalg.eigvalsh(rho)[0]
            if low < -POSITIVITY_TOL:
                raise StepSizeError(f"negative eigenvalue {low:.3e} < -1e-6 at t={t:.4g}; reduce dt")
            stored.append(rho.copy())
    return Trajectory(times=grid.stored_times(), states=np.array(stored), kind="density")
