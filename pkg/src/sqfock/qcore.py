"""Truncated Fock-space operator algebra for a qubit coupled to one cavity mode.

Conventions
-----------
- Composite basis ordering is qubit (x) cavity with flat index
  ``k = q*(n_max+1) + n``, where ``q = 0`` is the qubit ground state |g>
  and ``q = 1`` the excited state |e>; ``n`` is the cavity Fock index.
- ``sigma_z = |e><e| - |g><g|``, so |g,n> carries eigenvalue -1.
- Operators are built by truncating exact matrix elements at the cutoff,
  not by re-orthogonalising; the only truncation artifact sits in the last
  Fock row/column (e.g. ``[a, a^dag] = 1`` fails there by design).
- Matrix exponentials of Hermitian generators go through the
  eigendecomposition, which keeps them exactly unitary at any cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContractViolationError,
    CutoffTooSmallError,
    DimensionMismatchError,
    InvalidCutoffError,
)

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
STATE_NORM_TOL = 1e-9
DM_TRACE_TOL = 1e-8
DM_EIG_TOL = 1e-8


@dataclass(frozen=True)
class FockSpace:
    """Truncated composite space: two qubit levels times ``n_max + 1`` Fock levels."""

    n_max: int

    def __post_init__(self) -> None:
        if self.n_max < 3:
            raise InvalidCutoffError(
                f"n_max={self.n_max} < 3: the three-photon target state does not fit"
            )

    @property
    def cavity_dim(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)

    def index(self, q: int, n: int) -> int:
        """Flat composite index of |q, n>."""
        if q not in (0, 1):
            raise DimensionMismatchError(f"qubit level must be 0 (g) or 1 (e), got {q}")
        if not 0 <= n <= self.n_max:
            raise DimensionMismatchError(f"Fock index {n} outside [0, {self.n_max}]")
        return q * self.cavity_dim + n


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


@dataclass
class QOperator:
    """Complex square matrix with optional Hermiticity/unitarity contracts.

    The flags are verified at construction: ``hermitian`` requires
    ``max|A - A^dag| < 1e-12`` and ``unitary`` requires
    ``max|A^dag A - 1| < 1e-10``.
    """

    entries: np.ndarray
    hermitian: bool = False
    unitary: bool = False

    def __post_init__(self) -> None:
        self.entries = np.asarray(self.entries, dtype=complex)
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise DimensionMismatchError(f"operator must be square, got {self.entries.shape}")
        if self.hermitian:
            defect = np.abs(self.entries - dagger(self.entries)).max()
            if defect >= HERMITIAN_TOL:
                raise ContractViolationError(f"hermitian flag set but max|A - A^dag| = {defect:.3e}")
        if self.unitary:
            eye = np.eye(self.dim)
            defect = np.abs(dagger(self.entries) @ self.entries - eye).max()
            if defect >= UNITARY_TOL:
                raise ContractViolationError(f"unitary flag set but max|A^dag A - 1| = {defect:.3e}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass
class PureState:
    """Normalized state vector on the composite (or a factor) space."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).ravel()
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) >= STATE_NORM_TOL:
            raise ContractViolationError(f"state norm {norm!r} deviates from 1 beyond 1e-9")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass
class DensityMatrix:
    """Unit-trace positive-semidefinite matrix (tolerances per contract)."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        self.entries = np.asarray(self.entries, dtype=complex)
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise DimensionMismatchError(f"density matrix must be square, got {self.entries.shape}")
        herm = np.abs(self.entries - dagger(self.entries)).max()
        if herm >= 1e-10:
            raise ContractViolationError(f"density matrix non-Hermitian: max|rho - rho^dag| = {herm:.3e}")
        tr = self.entries.trace().real
        if abs(tr - 1.0) >= DM_TRACE_TOL:
            raise ContractViolationError(f"density matrix trace {tr!r} deviates from 1 beyond 1e-8")
        lo = np.linalg.eigvalsh(self.entries)[0]
        if lo < -DM_EIG_TOL:
            raise ContractViolationError(f"density matrix smallest eigenvalue {lo:.3e} < -1e-8")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class OperatorSet:
    """The composite-space operators every Hamiltonian is assembled from."""

    a: QOperator
    a_dag: QOperator
    n_op: QOperator
    sz: QOperator
    sp: QOperator
    sm: QOperator
    identity: QOperator


def cavity_destroy(dim: int) -> np.ndarray:
    """Annihilation operator on a ``dim``-level Fock ladder: a|n> = sqrt(n)|n-1>."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def basis_state(space: FockSpace, q: int, n: int) -> PureState:
    """Bare composite basis state |q, n>."""
    vec = np.zeros(space.dim, dtype=complex)
    vec[space.index(q, n)] = 1.0
    return PureState(vec)


def build_operators(space: FockSpace) -> OperatorSet:
    """Assemble {a, a_dag, n_op, sz, sp, sm, identity} lifted to the composite space."""
    nc = space.cavity_dim
    a_c = cavity_destroy(nc)
    eye_c = np.eye(nc)
    eye_q = np.eye(2)
    sz_q = np.diag([-1.0, 1.0]).astype(complex)  # (g, e) ordering
    sp_q = np.zeros((2, 2), dtype=complex)
    sp_q[1, 0] = 1.0  # |e><g|
    sm_q = sp_q.conj().T

    a = np.kron(eye_q, a_c)
    return OperatorSet(
        a=QOperator(a),
        a_dag=QOperator(dagger(a)),
        n_op=QOperator(np.kron(eye_q, a_c.conj().T @ a_c), hermitian=True),
        sz=QOperator(np.kron(sz_q, eye_c), hermitian=True),
        sp=QOperator(np.kron(sp_q, eye_c)),
        sm=QOperator(np.kron(sm_q, eye_c)),
        identity=QOperator(np.kron(eye_q, eye_c), hermitian=True, unitary=True),
    )


def cavity_squeeze_matrix(r: float, dim: int) -> np.ndarray:
    """Squeeze operator S(r) = exp[(r/2)(a^dag^2 - a^2)] on a ``dim``-level cavity.

    Built as the exact exponential of the truncated generator, so the result
    is unitary at machine precision for any cutoff; physical accuracy on the
    low Fock levels needs roughly ``dim >= 8 sinh(r)^2 + 12``.
    """
    if abs(r) > 3.0:
        raise CutoffTooSmallError(f"|r| = {abs(r)} > 3: default cutoffs are untrustworthy")
    a = cavity_destroy(dim)
    gen = 0.5 * r * (dagger(a) @ dagger(a) - a @ a)
    # i*gen is Hermitian: exponentiate through its eigenbasis.
    w, v = np.linalg.eigh(1j * gen)
    s = (v * np.exp(-1j * w)) @ dagger(v)
    defect = np.abs(dagger(s) @ s - np.eye(dim)).max()
    if defect > 1e-8:
        raise CutoffTooSmallError(f"squeeze operator lost unitarity ({defect:.3e}) at n_max={dim - 1}")
    return s


def squeeze_operator(r: float, space: FockSpace) -> QOperator:
    """Composite-space squeeze operator 1_qubit (x) S(r)."""
    s = cavity_squeeze_matrix(r, space.cavity_dim)
    return QOperator(np.kron(np.eye(2), s), unitary=True)


def _require_hermitian(h: QOperator | np.ndarray) -> np.ndarray:
    mat = h.entries if isinstance(h, QOperator) else np.asarray(h, dtype=complex)
    defect = np.abs(mat - dagger(mat)).max()
    scale = max(np.abs(mat).max(), 1.0)
    if defect >= 1e-10 * scale:
        raise ContractViolationError(f"operator not Hermitian: max|H - H^dag| = {defect:.3e}")
    return mat


def hermitian_eigs(h: QOperator | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian operator."""
    return np.linalg.eigh(_require_hermitian(h))


def expm_unitary(h: QOperator | np.ndarray, t: float) -> QOperator:
    """exp(-i H t) for Hermitian H, exact through the eigendecomposition."""
    mat = _require_hermitian(h)
    w, v = np.linalg.eigh(mat)
    u = (v * np.exp(-1j * w * t)) @ dagger(v)
    return QOperator(u, unitary=True)


def partial_trace(rho: DensityMatrix | np.ndarray, keep: str) -> DensityMatrix:
    """Trace out one tensor factor of a composite-space density matrix.

    Parameters
    ----------
    rho : DensityMatrix or array
        State on the full qubit (x) cavity space, dimension 2*(n_max+1).
    keep : {"qubit", "cavity"}
        Which factor survives.
    """
    mat = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    dim = mat.shape[0]
    if mat.shape != (dim, dim) or dim % 2 != 0:
        raise DimensionMismatchError(f"expected an even-dimensional square matrix, got {mat.shape}")
    nc = dim // 2
    blocks = mat.reshape(2, nc, 2, nc)
    if keep == "qubit":
        reduced = np.einsum("injn->ij", blocks)
    elif keep == "cavity":
        reduced = np.einsum("inim->nm", blocks)
    else:
        raise DimensionMismatchError(f"keep must be 'qubit' or 'cavity', got {keep!r}")
    return DensityMatrix(reduced)
