"""Parameter frames and Hamiltonian builders.

Two equivalent parameterisations are used throughout:

- ``LabParams``: the driven frame rotating at half the parametric pump
  frequency, with cavity/qubit detunings ``delta_c``/``delta_q``, pump
  amplitude ``lambda_p`` and bare coupling ``g``.
- ``SqueezedParams``: the squeezed frame obtained by the Bogoliubov
  transformation that cancels the pump term.  There the dynamics is an
  anisotropic Rabi model with cavity frequency ``omega_c = delta_c sech(2r)``,
  rotating coupling ``lambda2 = g cosh(r)`` and counter-rotating coupling
  ``lambda1 = g sinh(r)``, where ``tanh(2r) = lambda_p / delta_c``.

``omega_q`` in the squeezed frame is the same number as ``delta_q``: the
squeeze transformation does not touch the qubit term.  All frequencies are
in units of the qubit frequency unless stated otherwise.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InstabilityError, SingularFrequencyError
from .qcore import FockSpace, QOperator, build_operators, dagger

DISPERSIVE_RATIO_WARN = 0.1


@dataclass(frozen=True)
class LabParams:
    """Driven-frame parameters; stability requires |delta_c| > lambda_p."""

    delta_c: float
    delta_q: float
    lambda_p: float
    g: float

    def __post_init__(self) -> None:
        if self.g <= 0:
            raise InstabilityError(f"bare coupling must be positive, got g={self.g}")
        if abs(self.delta_c) <= self.lambda_p:
            raise InstabilityError(
                f"|delta_c|={abs(self.delta_c)} <= lambda_p={self.lambda_p}: outside the stable regime"
            )


@dataclass(frozen=True)
class SqueezedParams:
    """Squeezed-frame parameters of the anisotropic Rabi model."""

    r: float
    omega_c: float
    omega_q: float
    g: float
    lambda1: float
    lambda2: float

    def __post_init__(self) -> None:
        if abs(self.lambda1 - self.g * np.sinh(self.r)) > 1e-12 or abs(
            self.lambda2 - self.g * np.cosh(self.r)
        ) > 1e-12:
            raise InstabilityError("couplings inconsistent with generating (g, r)")

    @classmethod
    def from_coupling(cls, g: float, r: float, omega_c: float, omega_q: float = 1.0) -> "SqueezedParams":
        return cls(
            r=r,
            omega_c=omega_c,
            omega_q=omega_q,
            g=g,
            lambda1=g * np.sinh(r),
            lambda2=g * np.cosh(r),
        )

    def with_omega_c(self, omega_c: float) -> "SqueezedParams":
        return SqueezedParams.from_coupling(self.g, self.r, omega_c, self.omega_q)

    @property
    def detuning_sum(self) -> float:
        """Counter-rotating detuning Delta = omega_q + omega_c."""
        return self.omega_q + self.omega_c

    @property
    def detuning_diff(self) -> float:
        """Rotating detuning delta = omega_q - omega_c."""
        return self.omega_q - self.omega_c


def lab_to_squeezed(p: LabParams) -> SqueezedParams:
    """Map driven-frame parameters onto the squeezed frame.

    The squeezing parameter solves tanh(2r) = lambda_p/delta_c, which kills
    the two-photon pump term; the cavity frequency picks up sech(2r).
    """
    r = 0.5 * np.arctanh(p.lambda_p / p.delta_c)
    omega_c = p.delta_c / np.cosh(2 * r)
    return SqueezedParams.from_coupling(p.g, r, omega_c, p.delta_q)


def squeezed_to_lab(p: SqueezedParams) -> LabParams:
    """Inverse frame map; round trip with :func:`lab_to_squeezed` is identity."""
    delta_c = p.omega_c * np.cosh(2 * p.r)
    lambda_p = delta_c * np.tanh(2 * p.r)
    return LabParams(delta_c=delta_c, delta_q=p.omega_q, lambda_p=lambda_p, g=p.g)


def build_lab_hamiltonian(p: LabParams, space: FockSpace) -> QOperator:
    """Driven-frame Hamiltonian: detuned cavity and qubit, two-photon pump, exchange coupling."""
    ops = build_operators(space)
    a, ad = ops.a.entries, ops.a_dag.entries
    h = (
        p.delta_c * ops.n_op.entries
        + 0.5 * p.delta_q * ops.sz.entries
        - 0.5 * p.lambda_p * (ad @ ad + a @ a)
        + p.g * (ad @ ops.sm.entries + a @ ops.sp.entries)
    )
    return QOperator(h, hermitian=True)


def build_anisotropic_rabi(p: SqueezedParams, space: FockSpace) -> QOperator:
    """Squeezed-frame Hamiltonian with unequal rotating/counter-rotating couplings.

    Same spectrum as the driven-frame model up to the constant
    ``(delta_c - omega_c)/2`` that the frame transformation drops (an
    energy-reference choice with no physical content).
    """
    ops = build_operators(space)
    a, ad, sp, sm = ops.a.entries, ops.a_dag.entries, ops.sp.entries, ops.sm.entries
    h = (
        p.omega_c * ops.n_op.entries
        + 0.5 * p.omega_q * ops.sz.entries
        + p.lambda1 * (ad @ sp + a @ sm)
        + p.lambda2 * (a @ sp + ad @ sm)
    )
    return QOperator(h, hermitian=True)


def build_effective_hamiltonian(p: SqueezedParams, space: FockSpace) -> QOperator:
    """Time-averaged effective Hamiltonian near the three-photon resonance.

    Contains the second-order dispersive shifts and the third-order
    three-photon exchange term; valid in the dispersive regime
    ``lambda2 << omega_q - omega_c`` (a warning is emitted past
    lambda2/delta = 0.1, matching how hard the protocol itself drives it).
    """
    if p.omega_c == 0:
        raise SingularFrequencyError("omega_c = 0 makes the effective couplings singular")
    ratio = abs(p.lambda2 / p.detuning_diff) if p.detuning_diff != 0 else np.inf
    if ratio > DISPERSIVE_RATIO_WARN:
        warnings.warn(
            f"lambda2/delta = {ratio:.3f} > {DISPERSIVE_RATIO_WARN}: "
            "effective Hamiltonian is outside its comfort zone",
            stacklevel=2,
        )
    ops = build_operators(space)
    a, ad, sz, n = ops.a.entries, ops.a_dag.entries, ops.sz.entries, ops.n_op.entries
    proj_e = 0.5 * (ops.identity.entries + sz)  # sigma_+ sigma_-
    proj_g = 0.5 * (ops.identity.entries - sz)  # sigma_- sigma_+
    a3 = a @ a @ a
    h = (
        p.omega_c * n
        + 0.5 * p.omega_q * sz
        + (p.lambda2**2 / (2 * p.omega_c)) * (n @ sz + proj_e)
        + (p.lambda1**2 / (4 * p.omega_c)) * (n @ sz - proj_g)
        - (p.lambda1 * p.lambda2**2 / (4 * p.omega_c**2))
        * (dagger(a3) @ ops.sm.entries + a3 @ ops.sp.entries)
    )
    return QOperator(h, hermitian=True)


def decompose_rabi(p: SqueezedParams, space: FockSpace) -> tuple[QOperator, QOperator]:
    """Split the anisotropic model into an isotropic Rabi part and the remainder.

    The isotropic part carries the exponentially enhanced coupling
    ``(g/2) e^r`` on the full quadrature product; the remainder is suppressed
    by ``e^{-r}``.  The two parts sum to :func:`build_anisotropic_rabi`
    exactly (entrywise), which is asserted in tests.
    """
    ops = build_operators(space)
    a, ad, sp, sm = ops.a.entries, ops.a_dag.entries, ops.sp.entries, ops.sm.entries
    quad_sum = (ad + a) @ (sp + sm)
    quad_diff = (ad - a) @ (sp - sm)
    h_rabi = (
        p.omega_c * ops.n_op.entries
        + 0.5 * p.omega_q * ops.sz.entries
        + 0.5 * p.g * np.exp(p.r) * quad_sum
    )
    h_arabi = -0.5 * p.g * np.exp(-p.r) * quad_diff
    return QOperator(h_rabi, hermitian=True), QOperator(h_arabi, hermitian=True)


def parity_operator(space: FockSpace) -> QOperator:
    """Conserved grading sigma_z (x) (-1)^n of the anisotropic model."""
    ops = build_operators(space)
    signs = np.kron(np.array([-1.0, 1.0]), (-1.0) ** np.arange(space.cavity_dim))
    return QOperator(np.diag(signs).astype(complex), hermitian=True, unitary=True)
