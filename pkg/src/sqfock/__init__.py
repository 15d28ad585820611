"""Simulation toolkit for qubit / squeezed-Fock-state entanglement generation.

Library layers
--------------
- :mod:`sqfock.qcore` -- truncated Fock-space operator algebra.
- :mod:`sqfock.model` -- parameter frames and Hamiltonian builders.
- :mod:`sqfock.spectrum` -- three-photon resonance analytics and numerics.
- :mod:`sqfock.dynamics` -- closed-system, sweep, and Lindblad propagation.
- :mod:`sqfock.observables` -- populations, fidelity, concurrence, Wigner.
- :mod:`sqfock.harness` -- experiment recipes, config handling, CSV bundles.

The ``sqfock`` command line regenerates every experiment dataset; see the
README for usage.
"""

__version__ = "0.1.0"

from .qcore import (
    DensityMatrix,
    FockSpace,
    OperatorSet,
    PureState,
    QOperator,
    basis_state,
    build_operators,
    expm_unitary,
    hermitian_eigs,
    partial_trace,
    squeeze_operator,
)
from .model import (
    LabParams,
    SqueezedParams,
    build_anisotropic_rabi,
    build_effective_hamiltonian,
    build_lab_hamiltonian,
    decompose_rabi,
    lab_to_squeezed,
    parity_operator,
    squeezed_to_lab,
)
from .spectrum import (
    ResonanceResult,
    analytic_resonance,
    effective_rabi_frequency,
    find_avoided_crossing,
    oscillation_period_from_gap,
    resonance_frequency_analytic,
    splitting_curve,
    subspace_resonance_frequency,
    transfer_subspace_matrix,
)
from .dynamics import (
    DissipationParams,
    SweepHamiltonian,
    SweepProtocol,
    TimeGrid,
    TrackedBranch,
    Trajectory,
    adiabatic_sweep,
    evolve_lindblad,
    evolve_static,
    evolve_time_dependent,
    instantaneous_eigenstate_track,
)
from .observables import (
    ConcurrenceInfo,
    OscillationMetrics,
    WignerGrid,
    WignerGridSpec,
    bell_target,
    concurrence,
    fidelity,
    oscillation_metrics,
    photon_number,
    projected_concurrence,
    squeezed_population,
    wigner,
)

__all__ = [name for name in dir() if not name.startswith("_")]
