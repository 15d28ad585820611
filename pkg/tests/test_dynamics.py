import warnings

import numpy as np
import pytest

from sqfock import (
    DissipationParams,
    FockSpace,
    SqueezedParams,
    SweepHamiltonian,
    SweepProtocol,
    TimeGrid,
    adiabatic_sweep,
    basis_state,
    bell_target,
    build_anisotropic_rabi,
    evolve_lindblad,
    evolve_static,
    evolve_time_dependent,
    fidelity,
    find_avoided_crossing,
    instantaneous_eigenstate_track,
    parity_operator,
)
from sqfock.dynamics import Trajectory
from sqfock.errors import ContractViolationError, StepSizeError


def two_level(omega):
    return np.array([[0.0, omega], [omega, 0.0]], dtype=complex)


class TestTimeGrid:
    def test_validation(self):
        with pytest.raises(ContractViolationError):
            TimeGrid(0.0, 1.0, -0.1)
        with pytest.raises(ContractViolationError):
            TimeGrid(1.0, 0.0, 0.1)
        with pytest.raises(ContractViolationError):
            TimeGrid(0.0, 1e9, 1e-3)  # runaway guard

    def test_stored_times_cover_endpoints(self):
        grid = TimeGrid(0.0, 1.0, 0.03, store_every=7)
        times = grid.stored_times()
        assert times[0] == 0.0
        assert times[-1] == pytest.approx(1.0)


class TestEvolveStatic:
    def test_free_state(self):
        grid = TimeGrid(0.0, 5.0, 0.5)
        traj = evolve_static(np.zeros((3, 3), dtype=complex), np.array([0, 1, 0], complex), grid)
        assert np.abs(traj.states - traj.states[0]).max() < 1e-12

    def test_rabi_formula(self):
        omega = 0.3
        grid = TimeGrid(0.0, 30.0, 0.01)
        traj = evolve_static(two_level(omega), np.array([1, 0], complex), grid)
        p2 = np.abs(traj.states[:, 1]) ** 2
        assert np.abs(p2 - np.sin(omega * traj.times) ** 2).max() < 1e-10

    def test_three_photon_peak(self, space40):
        # full-model transfer peak at resonance, weak coupling
        from sqfock import oscillation_period_from_gap, subspace_resonance_frequency, effective_rabi_frequency

        p = SqueezedParams.from_coupling(0.01, 0.9, subspace_resonance_frequency(0.01, 0.9))
        tf = oscillation_period_from_gap(2 * abs(effective_rabi_frequency(p)))
        grid = TimeGrid(0.0, 0.7 * tf, 0.7 * tf / 3000)
        traj = evolve_static(build_anisotropic_rabi(p, space40), basis_state(space40, 1, 0), grid)
        peak = (np.abs(traj.states[:, space40.index(0, 3)]) ** 2).max()
        assert abs(peak - 0.9963) < 0.005

    def test_parity_conserved(self, space20):
        p = SqueezedParams.from_coupling(0.05, 0.9, 0.34)
        h = build_anisotropic_rabi(p, space20)
        parity = parity_operator(space20).entries
        psi0 = np.zeros(space20.dim, complex)
        psi0[space20.index(1, 0)] = np.sqrt(0.5)
        psi0[space20.index(0, 0)] = np.sqrt(0.3)
        psi0[space20.index(0, 2)] = np.sqrt(0.2)
        grid = TimeGrid(0.0, 500.0, 0.5)
        traj = evolve_static(h, psi0, grid)
        expect = np.einsum("td,de,te->t", traj.states.conj(), parity, traj.states).real
        assert np.abs(expect - expect[0]).max() < 1e-8


class TestEvolveTimeDependent:
    def test_matches_static_for_constant_h(self):
        h = two_level(0.4)
        grid = TimeGrid(0.0, 12.0, 0.005, store_every=100)
        psi0 = np.array([1, 0], complex)
        rk = evolve_time_dependent(h, psi0, grid)
        ex = evolve_static(h, psi0, grid)
        defect = 1.0 - abs(np.vdot(ex.final_state, rk.final_state))
        assert defect < 1e-8

    def test_norm_drift_within_contract(self):
        h = two_level(0.4)
        grid = TimeGrid(0.0, 50.0, 0.01, store_every=50)
        traj = evolve_time_dependent(h, np.array([1, 0], complex), grid)
        assert np.abs(np.linalg.norm(traj.states, axis=1) - 1.0).max() < 1e-6

    def test_fourth_order_convergence(self):
        def h(t):
            return np.array([[0.4 * t, 0.5], [0.5, -0.4 * t]], dtype=complex)

        def final(dt):
            grid = TimeGrid(0.0, 6.0, dt, store_every=10**6)
            return evolve_time_dependent(h, np.array([1, 0], complex), grid, energy_shift=0.0).final_state

        ref = final(0.0025)
        err_coarse = np.linalg.norm(final(0.02) - ref)
        err_fine = np.linalg.norm(final(0.01) - ref)
        assert 12.0 < err_coarse / err_fine < 20.0

    def test_halving_dt_stable_final_state(self):
        def h(t):
            return np.array([[0.1 * np.sin(0.05 * t), 0.3], [0.3, -0.1 * np.sin(0.05 * t)]], complex)

        grids = [TimeGrid(0.0, 40.0, dt, store_every=10**6) for dt in (0.02, 0.01)]
        finals = [evolve_time_dependent(h, np.array([1, 0], complex), g).final_state for g in grids]
        assert abs(1.0 - abs(np.vdot(finals[0], finals[1]))) < 1e-6

    def test_step_size_error(self):
        h = two_level(1.0) * 120.0
        with pytest.raises(StepSizeError):
            evolve_time_dependent(h, np.array([1, 0], complex), TimeGrid(0.0, 10.0, 0.05))

    def test_sudden_limit_diabatic_survival(self, space40):
        # fast sweep through resonance keeps the bare state: eta = 0.01
        res = find_avoided_crossing(SqueezedParams.from_coupling(0.06, 0.9, 1 / 3), None, space40)
        p = SqueezedParams.from_coupling(0.06, 0.9, res.omega_c_star)
        proto = SweepProtocol.to_resonance(
            res.omega_c_star - 0.01, res.omega_c_star, 1.0 / 0.01, abs(res.omega_eff)
        )
        psi0 = basis_state(space40, 1, 0)
        grid = TimeGrid(0.0, proto.t_end, 0.02, store_every=10**8)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            traj = evolve_time_dependent(SweepHamiltonian(p, proto, space40), psi0, grid)
        survival = abs(traj.final_state[space40.index(1, 0)])
        assert survival > 0.99


class TestLandauZener:
    """The integrator reproduces the asymptotic crossing formula on the 2x2 toy.

    Diabatic survival is measured in the instantaneous eigenbasis after a
    symmetric passage that starts on the adiabatic branch.  Beyond eta ~ 3
    the asymptotic probability (< 1e-8) drops below the finite-sweep-range
    corrections, so the quantitative check stops there.
    """

    @staticmethod
    def run(eta, d0=40.0):
        omega = 1.0
        v = omega**2 / eta
        t_end = 2 * d0 / v

        def h(t):
            d = -d0 + v * t
            return np.array([[0.5 * d, omega], [omega, -0.5 * d]], dtype=complex)

        w0, v0 = np.linalg.eigh(h(0.0))
        psi0 = v0[:, int(np.argmax(np.abs(v0[0, :]) ** 2))]
        lam = 0.5 * d0
        dt = (1e-7 * 144 / (lam**6 * t_end)) ** 0.2
        grid = TimeGrid(0.0, t_end, dt, store_every=10**9)
        traj = evolve_time_dependent(h, psi0, grid, energy_shift=0.0)
        w_end, v_end = np.linalg.eigh(h(t_end))
        i_end = int(np.argmax(np.abs(v_end[0, :]) ** 2))
        return abs(np.vdot(v_end[:, i_end], traj.final_state)) ** 2, np.exp(-2 * np.pi * omega**2 / v)

    @pytest.mark.parametrize("eta", [0.5, 1.0, 2.0, 3.0])
    def test_matches_asymptotic_formula(self, eta):
        p_num, p_formula = self.run(eta)
        assert abs(p_num - p_formula) / p_formula < 0.10

    def test_deep_adiabatic_floor(self):
        p_num, _ = self.run(5.0)
        assert p_num < 1e-8  # fully adiabatic at the numerical floor


class TestInstantaneousTracking:
    def test_constant_hamiltonian(self):
        h = two_level(0.3)
        branch = instantaneous_eigenstate_track(h, np.linspace(0, 5, 11), seed=0)
        assert np.abs(branch.energies - branch.energies[0]).max() < 1e-14
        assert np.abs(np.abs(branch.states @ branch.states[0].conj()) - 1.0).max() < 1e-12

    def test_two_level_branch_energies(self):
        omega, d0, v = 0.4, 8.0, 0.8

        def h(t):
            d = -d0 + v * t
            return np.array([[0.5 * d, omega], [omega, -0.5 * d]], dtype=complex)

        times = np.linspace(0.0, 2 * d0 / v, 301)
        branch = instantaneous_eigenstate_track(h, times, seed=0)
        deltas = -d0 + v * times
        expected = -0.5 * np.sqrt(deltas**2 + 4 * omega**2)
        assert np.abs(branch.energies - expected).max() < 1e-10

    def test_phase_continuity(self):
        def h(t):
            return two_level(0.3) + t * np.diag([0.05, -0.05]).astype(complex)

        branch = instantaneous_eigenstate_track(h, np.linspace(0, 10, 50), seed=1)
        overlaps = np.einsum("td,td->t", branch.states[:-1].conj(), branch.states[1:])
        assert np.abs(overlaps.imag).max() < 1e-10
        assert overlaps.real.min() > 0.99


class TestAdiabaticSweep:
    @pytest.fixture(scope="class")
    def protocol_pieces(self, space40):
        res = find_avoided_crossing(SqueezedParams.from_coupling(0.06, 0.9, 1 / 3), None, space40)
        p = SqueezedParams.from_coupling(0.06, 0.9, res.omega_c_star)
        return p, res

    def test_short_adiabatic_run(self, space40, protocol_pieces):
        p, res = protocol_pieces
        proto = SweepProtocol.to_resonance(res.omega_c_star - 0.002, res.omega_c_star, 0.1, abs(res.omega_eff))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            traj = adiabatic_sweep(p, proto, space40, dt=0.02)
        assert traj.column("adiabatic_projection").min() > 0.98
        assert set(traj.column("branch_index").astype(int)) == {4}
        assert fidelity(traj.final_state, bell_target(space40)) > 0.95
        # starts in the instantaneous eigenstate, not the bare state
        assert 0.8 < traj.column("pop_e0")[0] < 1.0

    def test_fast_sweep_degrades_fidelity(self, space40, protocol_pieces):
        p, res = protocol_pieces
        proto = SweepProtocol.to_resonance(res.omega_c_star - 0.01, res.omega_c_star, 5.0, abs(res.omega_eff))
        with pytest.warns(UserWarning, match="not adiabatic"):
            traj = adiabatic_sweep(p, proto, space40, dt=0.02)
        assert fidelity(traj.final_state, bell_target(space40)) < 0.9

    def test_protocol_validation(self):
        with pytest.raises(ContractViolationError):
            SweepProtocol(0.3, 0.0, 10.0, 1.0)
        with pytest.raises(ContractViolationError):
            SweepProtocol(0.3, 1e-6, 10.0, -1.0)


class TestEvolveLindblad:
    def test_closed_limit_matches_static(self, space20):
        p = SqueezedParams.from_coupling(0.05, 0.9, 0.34)
        h = build_anisotropic_rabi(p, space20)
        psi0 = basis_state(space20, 1, 0)
        grid = TimeGrid(0.0, 50.0, 0.02, store_every=250)
        pure = evolve_static(h, psi0, grid)
        mixed = evolve_lindblad(h, psi0.density_matrix(), DissipationParams(0.0, 0.0), grid)
        rho_pure = np.outer(pure.final_state, pure.final_state.conj())
        diff = mixed.final_state - rho_pure
        trace_distance = 0.5 * np.abs(np.linalg.eigvalsh(diff)).sum()
        assert trace_distance < 1e-6

    def test_cavity_decay_closed_form(self):
        nmax = 5
        dim = 2 * (nmax + 1)
        rho0 = np.zeros((dim, dim), complex)
        rho0[1, 1] = 1.0  # |g,1>
        kappa = 0.05
        grid = TimeGrid(0.0, 40.0, 0.02, store_every=100)
        traj = evolve_lindblad(np.zeros((dim, dim), complex), rho0, DissipationParams(kappa, 0.0), grid)
        n_diag = np.kron(np.ones(2), np.arange(nmax + 1.0))
        nbar = np.einsum("tii,i->t", traj.states, n_diag).real
        assert np.abs(nbar - np.exp(-kappa * traj.times)).max() < 1e-6

    def test_qubit_decay_closed_form(self):
        nmax = 3
        dim = 2 * (nmax + 1)
        space = FockSpace(nmax)
        rho0 = np.zeros((dim, dim), complex)
        rho0[space.index(1, 0), space.index(1, 0)] = 1.0
        gamma = 0.08
        grid = TimeGrid(0.0, 30.0, 0.02, store_every=100)
        traj = evolve_lindblad(np.zeros((dim, dim), complex), rho0, DissipationParams(0.0, gamma), grid)
        pe = traj.states[:, space.index(1, 0), space.index(1, 0)].real
        assert np.abs(pe - np.exp(-gamma * traj.times)).max() < 1e-6

    def test_trace_and_positivity_monitored(self, space20):
        p = SqueezedParams.from_coupling(0.05, 0.9, 0.34)
        h = build_anisotropic_rabi(p, space20)
        rho0 = basis_state(space20, 1, 0).density_matrix()
        grid = TimeGrid(0.0, 100.0, 0.05, store_every=200)
        traj = evolve_lindblad(h, rho0, DissipationParams(0.01, 0.001), grid)
        traces = np.einsum("tii->t", traj.states).real
        assert np.abs(traces - 1.0).max() < 1e-6
        assert min(np.linalg.eigvalsh(s)[0] for s in traj.states) > -1e-6

    def test_dissipation_params_validated(self):
        with pytest.raises(ContractViolationError):
            DissipationParams(-0.1, 0.0)


class TestTrajectory:
    def test_column_length_mismatch(self):
        with pytest.raises(ContractViolationError):
            Trajectory(
                times=np.array([0.0, 1.0]),
                states=np.array([[1.0, 0.0], [1.0, 0.0]], dtype=complex),
                kind="pure",
                observables={"x": np.array([1.0])},
            )

    def test_norm_contract(self):
        with pytest.raises(ContractViolationError):
            Trajectory(
                times=np.array([0.0]),
                states=np.array([[0.9, 0.0]], dtype=complex),
                kind="pure",
            )

    def test_add_observable(self):
        traj = Trajectory(
            times=np.array([0.0, 1.0]),
            states=np.array([[1.0, 0.0], [0.0, 1.0]], dtype=complex),
            kind="pure",
        )
        col = traj.add_observable("p0", lambda s: abs(s[0]) ** 2)
        assert np.allclose(col, [1.0, 0.0])
        assert np.allclose(traj.column("p0"), [1.0, 0.0])
