"""Tests for the master-equation oracle and the identities it checks."""

import math

import numpy as np
import pytest
from scipy.special import gammaln

from atomlaser.models.records import ProfileKind, SteadyState
from atomlaser.models.schemas import COEFFICIENT_NAMES, RateSet
from atomlaser.services.coeffs import analyze, coefficients
from atomlaser.services.linear_theory import thresholds
from atomlaser.services.oracle import (
    FockOperators,
    coherence_profile,
    continuity_residual,
    cutoff_policy,
    is_heavy,
    moments_exact,
    ode_residual,
    q_from_state,
    solve_converged,
    steady_state,
)
from atomlaser.services.params import from_dimensionless, reduce, reduced
from atomlaser.services.qsolution import (
    asymptotic_profile,
    mass,
    moments,
    q_generating,
    q_thermal,
)
from atomlaser.services.run_manager import table_saturation
from atomlaser.utils.config import settings
from atomlaser.utils.errors import CutoffTooSmallError, DomainError

# Pumps in the middle of the lasing window at I_s = 40, c = 20.
MEAN_PUMPS = [2.0, 6.0, 9.0, 14.0]

# Half-unit steps from r_th + 0.5 to r_q - 0.5 at c = 20.
_WINDOW = thresholds(20.0)
SWEEP_PUMPS = [
    round(float(r), 6) for r in np.arange(_WINDOW.r_th + 0.5, _WINDOW.r_q - 0.5 + 1e-9, 0.5)
]


def rates(pump, decay, cavity, coupling):
    return RateSet(pump_rate=pump, decay_rate=decay, cavity_rate=cavity, coupling=coupling)


def diagonal_state(populations, cutoff):
    """A state with the given photon distribution and the atom in its lower level."""
    block = cutoff + 1
    rho11 = np.zeros((block, block), dtype=complex)
    rho11[np.arange(len(populations)), np.arange(len(populations))] = populations
    zeros = np.zeros((block, block), dtype=complex)
    return SteadyState(
        cutoff=cutoff,
        rates=rates(1.0, 1.0, 1.0, 1.0),
        rho11=rho11,
        rho22=zeros,
        rho12=zeros,
        rho21=zeros,
        residual_norm=0.0,
        tail_mass=0.0,
    )


class TestFockOperators:
    """Test cases for the truncated operators."""

    def test_commutator(self):
        """Test [a, a^+] = 1 below the cutoff."""
        ops = FockOperators.build(6)
        a = ops.a.toarray()
        commutator = a @ a.conj().T - a.conj().T @ a
        diagonal = np.real(np.diag(commutator))
        assert ops.dimension == 14
        assert diagonal[:6] == pytest.approx(np.ones(6))
        assert diagonal[6] == pytest.approx(-6.0)

    def test_atom_lowering(self):
        """Test sigma maps the upper level to the lower one."""
        ops = FockOperators.build(4)
        upper_vacuum = np.zeros(ops.dimension)
        upper_vacuum[5] = 1.0
        assert (ops.sigma @ upper_vacuum)[0] == pytest.approx(1.0)


class TestSteadyState:
    """Test cases for the stationary density matrix."""

    def test_invariants(self, lasing_state):
        """Test trace, hermiticity, positivity, stationarity and tail mass."""
        state = lasing_state
        assert state.trace == pytest.approx(1.0, abs=1e-10)
        assert state.hermiticity_error <= 1e-10
        assert state.min_population >= -1e-12
        assert state.residual_norm <= 1e-10 * state.rates.total
        assert state.tail_mass < settings.tail_mass_limit

    def test_sector_matches_full(self):
        """Test the sector solve agrees with the full Liouvillian."""
        source = from_dimensionless(1.0, 1.0, 10.0)
        sector = steady_state(source, 12, method="sector")
        full = steady_state(source, 12, method="full")
        assert sector.populations == pytest.approx(full.populations, abs=1e-10)
        assert np.max(np.abs(sector.rho12 - full.rho12)) <= 1e-10
        assert np.max(np.abs(full.rho11 - np.diag(np.diag(full.rho11)))) <= 1e-12

    def test_decoupled_atom(self):
        """Test g -> 0 leaves the cavity empty and the atom at its pumped inversion."""
        state = steady_state(rates(2.0, 1.0, 1.0, 1e-9), 4)
        assert state.mean_photon < 1e-12
        assert state.inversion == pytest.approx(1.0 / 3.0, abs=1e-9)
        assert moments_exact(state).mandel_qf is None

    def test_unpumped(self):
        """Test Gamma -> 0 relaxes to vacuum and ground state."""
        state = steady_state(rates(1e-9, 1.0, 1.0, 1.0), 4)
        assert state.rho11[0, 0].real == pytest.approx(1.0, abs=1e-8)

    def test_invalid_arguments(self):
        """Test the cutoff floor and the method name."""
        source = from_dimensionless(1.0, 1.0, 10.0)
        with pytest.raises(DomainError):
            steady_state(source, 3)
        with pytest.raises(DomainError):
            steady_state(source, 10, method="dense")

    def test_cutoff_too_small(self):
        """Test a truncated lasing state reports its tail mass."""
        with pytest.raises(CutoffTooSmallError) as excinfo:
            steady_state(from_dimensionless(9.0, 40.0, 20.0), 20)
        assert excinfo.value.cutoff == 20
        assert excinfo.value.tail_mass >= settings.tail_mass_limit

    def test_cutoff_doubling(self, lasing_state):
        """Test doubling N leaves <n> and Qf unchanged."""
        doubled = moments_exact(steady_state(lasing_state.rates, 160))
        exact = moments_exact(lasing_state)
        assert doubled.mean_photon == pytest.approx(exact.mean_photon, rel=1e-8)
        assert doubled.mandel_qf == pytest.approx(exact.mandel_qf, rel=1e-8, abs=1e-11)


class TestCutoffPolicy:
    """Test cases for cutoff selection and growth."""

    def test_policy(self):
        """Test ceil(I0 + 10 sqrt(I0) + 20) above threshold and 40 below."""
        assert cutoff_policy(from_dimensionless(9.0, 40.0, 20.0)) == 158
        assert cutoff_policy(from_dimensionless(0.5, 40.0, 20.0)) == 40
        table = from_dimensionless(20.0, table_saturation(100.0, 20.0), 100.0)
        assert cutoff_policy(table) == 985
        assert is_heavy(985)
        assert not is_heavy(158)

    def test_growth(self):
        """Test the cutoff grows until the tail is negligible."""
        state = solve_converged(from_dimensionless(9.0, 40.0, 20.0), cutoff=10)
        assert state.cutoff > 10
        assert state.tail_mass < settings.tail_mass_limit

    def test_growth_limit(self, monkeypatch):
        """Test the error surfaces once max_cutoff is reached."""
        monkeypatch.setattr(settings, "max_cutoff", 20)
        with pytest.raises(CutoffTooSmallError):
            solve_converged(from_dimensionless(9.0, 40.0, 20.0), cutoff=10)


class TestOracleProfile:
    """Test cases for Q(I) from the photon distribution."""

    def test_vacuum(self):
        """Test p = delta_0 gives e^-I/pi."""
        profile = q_from_state(diagonal_state([1.0], 4))
        grid = np.linspace(0.0, 10.0, 11)
        assert profile(grid) == pytest.approx(np.exp(-grid) / math.pi, rel=1e-12)
        assert profile.derivative(grid, 0) == pytest.approx(np.exp(-grid) / math.pi)
        assert profile.kind is ProfileKind.ORACLE

    def test_single_photon(self):
        """Test p = delta_1 peaks at I = 1."""
        profile = q_from_state(diagonal_state([0.0, 1.0], 4))
        assert profile.peak == pytest.approx(1.0, abs=1e-4)

    def test_poissonian(self):
        """Test a Poisson distribution of mean 60."""
        n = np.arange(201)
        populations = np.exp(n * math.log(60.0) - 60.0 - gammaln(n + 1.0))
        profile = q_from_state(diagonal_state(populations, 200))
        stats = moments(profile)
        assert stats.mean_i_q == pytest.approx(61.0, rel=1e-6)
        assert stats.mandel_qf == pytest.approx(0.0, abs=1e-5)
        assert profile.peak == pytest.approx(60.0, abs=1.5)

    def test_moment_identities(self, lasing_state):
        """Test Q moments equal the exact antinormally ordered traces."""
        profile = q_from_state(lasing_state)
        from_q = moments(profile)
        exact = moments_exact(lasing_state)
        assert mass(profile) == pytest.approx(1.0, abs=1e-8)
        assert from_q.mean_i_q == pytest.approx(exact.mean_i_q, rel=1e-6)
        assert from_q.second_moment_i_q == pytest.approx(exact.second_moment_i_q, rel=1e-6)
        assert exact.photon_variance >= 0


class TestStationaryIdentities:
    """Test cases for the coherence continuity and the fifth-order equation."""

    def test_continuity(self, lasing_state, weak_state):
        """Test Re rho_sigma = (kappa/g) sqrt(I) (Q + Q')."""
        assert continuity_residual(lasing_state) <= 1e-6
        assert continuity_residual(weak_state) <= 1e-6

    def test_coherence_is_real(self, lasing_state):
        """Test the coherence profile has no imaginary part."""
        profile = coherence_profile(lasing_state)
        assert profile.imag_ratio <= 1e-10
        assert np.max(np.abs(profile.real)) > 0

    @pytest.mark.parametrize("fixture_name", ["lasing_state", "weak_state"])
    def test_ode_residual(self, request, fixture_name):
        """Test the oracle Q satisfies sum f_nu Q^(nu) = 0."""
        state = request.getfixturevalue(fixture_name)
        residual = ode_residual(state, coefficients(reduce(state.rates)))
        assert residual.max_relative <= 1e-6
        assert residual.max_term_relative <= 1e-6
        assert residual.term_peaks.size == len(COEFFICIENT_NAMES)

    @pytest.mark.parametrize("fixture_name", ["lasing_state", "weak_state"])
    @pytest.mark.parametrize("name", COEFFICIENT_NAMES)
    def test_mutation_detected(self, request, fixture_name, name):
        """Test a one-percent change of any coefficient breaks the identity."""
        state = request.getfixturevalue(fixture_name)
        table = coefficients(reduce(state.rates)).mutated(name)
        assert ode_residual(state, table).max_term_relative > 1e-3


class TestAgreement:
    """Test cases comparing the asymptotic profiles with the oracle."""

    @pytest.mark.parametrize(
        ("i_s", "c", "r"),
        [(40.0, 20.0, 0.01254), (2.0, 40.0, 0.01), (1.0, 10.0, 0.005)],
    )
    def test_thermal_branch(self, i_s, c, r):
        """Test <n> of the thermal profile far below threshold."""
        _table, _polys, catalog = analyze(reduced(r, i_s, c))
        n_thermal = moments(q_thermal(None, catalog.thermal_scale)).mean_photon
        n_oracle = moments_exact(solve_converged(from_dimensionless(r, i_s, c))).mean_photon
        assert n_thermal == pytest.approx(n_oracle, abs=max(0.1 * n_oracle, 1e-3))

    @pytest.mark.slow
    @pytest.mark.parametrize("r", MEAN_PUMPS)
    def test_generating_mean(self, r):
        """Test <n> of Q0 against the oracle at I_s = 40, c = 20."""
        params = reduced(r, 40.0, 20.0)
        table, _polys, catalog = analyze(params)
        asym = moments(q_generating(params, catalog, table))
        exact = moments_exact(solve_converged(from_dimensionless(r, 40.0, 20.0)))
        assert asym.mean_photon == pytest.approx(exact.mean_photon, rel=0.02)

    @pytest.mark.slow
    @pytest.mark.parametrize("r", SWEEP_PUMPS)
    def test_generating_sweep(self, r):
        """Test Qf of Q0 against the oracle across the lasing window."""
        params = reduced(r, 40.0, 20.0)
        table, _polys, catalog = analyze(params)
        asym = moments(q_generating(params, catalog, table))
        exact = moments_exact(solve_converged(from_dimensionless(r, 40.0, 20.0)))
        assert asym.mandel_qf == pytest.approx(
            exact.mandel_qf, abs=max(0.05, 0.06 * abs(exact.mandel_qf)),
        )

    @pytest.mark.slow
    def test_threshold_peak(self):
        """Test the oracle and Q0 put the Qf maximum within 0.5 of each other."""
        pumps = np.arange(1.0, 3.0001, 0.05)
        exact = [
            moments_exact(solve_converged(from_dimensionless(r, 40.0, 20.0))).mandel_qf
            for r in pumps
        ]
        asym = [moments(asymptotic_profile(reduced(r, 40.0, 20.0))).mandel_qf for r in pumps]
        exact_peak = pumps[int(np.argmax(exact))]
        assert abs(exact_peak - pumps[int(np.argmax(asym))]) <= 0.5
        assert abs(exact_peak - _WINDOW.r_th) <= 0.5

    @pytest.mark.heavy
    @pytest.mark.parametrize(("c", "r"), [(100.0, 20.0), (1000.0, 200.0), (1e4, 2000.0)])
    def test_table_columns(self, c, r):
        """Test Q0 against table-scale master-equation solves."""
        i_s = table_saturation(c, r)
        params = reduced(r, i_s, c)
        table, _polys, catalog = analyze(params)
        asym = moments(q_generating(params, catalog, table))
        exact = moments_exact(solve_converged(from_dimensionless(r, i_s, c)))
        assert asym.mean_photon == pytest.approx(exact.mean_photon, rel=1e-2)
        assert asym.mandel_qf == pytest.approx(exact.mandel_qf, abs=0.01)
