"""Master-equation ground truth in a truncated Fock basis.

The stationary density matrix of the single-atom laser is found by a sparse
linear solve of L(rho) = 0 with one equation replaced by the trace
condition. With incoherent pumping the stationary state lives in the sector
where the photon number plus the atomic excitation agree on both sides of
rho, so by default only that sector (about 4N unknowns) is assembled.

Basis index of |atom, n> is atom * (N + 1) + n with atom 0 the lower level.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike
from scipy import sparse
from scipy.sparse import linalg as spla

from ..models.records import (
    CoherenceProfile,
    ProfileKind,
    QProfile,
    ResidualProfile,
    SteadyState,
)
from ..models.schemas import CoeffTable, FieldMoments, RateSet
from ..utils.config import settings
from ..utils.errors import CutoffTooSmallError, DomainError, NumericalError
from ..utils.logging import get_logger
from ..utils.numerics import log_poisson_sum, poisson_sum
from .coeffs import polynomials
from .linear_theory import linear_theory
from .params import reduce
from .qsolution import build_profile

logger = get_logger(__name__)

SolveMethod = Literal["sector", "full"]
TAIL_WIDTH = 3
ODE_GRID_DENSITY = 50
ODE_FLOOR = 1e-12
VACUUM_GUARD = 1e-12
_LOG_PI = math.log(math.pi)


@dataclass(frozen=True, eq=False)
class FockOperators:
    """Field and atom operators on C^2 (x) C^(N+1)."""

    cutoff: int
    a: sparse.csr_matrix
    sigma: sparse.csr_matrix
    identity: sparse.csr_matrix

    @classmethod
    def build(cls, cutoff: int) -> FockOperators:
        dim = cutoff + 1
        field_lowering = sparse.diags(
            np.sqrt(np.arange(1, dim, dtype=float)),
            offsets=1,
            shape=(dim, dim),
            dtype=complex,
        )
        atom_lowering = sparse.csr_matrix(np.array([[0, 1], [0, 0]], dtype=complex))
        return cls(
            cutoff=cutoff,
            a=sparse.kron(sparse.identity(2, dtype=complex), field_lowering, format="csr"),
            sigma=sparse.kron(atom_lowering, sparse.identity(dim, dtype=complex), format="csr"),
            identity=sparse.identity(2 * dim, dtype=complex, format="csr"),
        )

    @property
    def dimension(self) -> int:
        return 2 * (self.cutoff + 1)

    def effective_hamiltonian(self, rates: RateSet) -> sparse.csr_matrix:
        """Non-Hermitian part K of the generator.

        K = g (a^+ sigma - sigma^+ a)
            - (kappa a^+a + gamma sigma^+sigma + Gamma sigma sigma^+) / 2
        """
        a, s = self.a, self.sigma
        a_dag, s_dag = a.conj().T.tocsr(), s.conj().T.tocsr()
        exchange = rates.coupling * (a_dag @ s - s_dag @ a)
        damping = (
            rates.cavity_rate * (a_dag @ a)
            + rates.decay_rate * (s_dag @ s)
            + rates.pump_rate * (s @ s_dag)
        )
        k = (exchange - 0.5 * damping).tocsr()
        k.eliminate_zeros()
        return k

    def terms(self, rates: RateSet) -> list[tuple[sparse.spmatrix, sparse.spmatrix]]:
        """Pairs (A, B) with L(rho) = sum A rho B."""
        k = self.effective_hamiltonian(rates)
        jumps = (
            math.sqrt(rates.cavity_rate) * self.a,
            math.sqrt(rates.decay_rate) * self.sigma,
            math.sqrt(rates.pump_rate) * self.sigma.conj().T.tocsr(),
        )
        pairs: list[tuple[sparse.spmatrix, sparse.spmatrix]] = [
            (k, self.identity),
            (self.identity, k.conj().T.tocsr()),
        ]
        pairs.extend((c, c.conj().T.tocsr()) for c in jumps)
        return pairs


def liouvillian(rates: RateSet, cutoff: int) -> sparse.csr_matrix:
    """Full Liouvillian acting on row-major vec(rho); vec(A rho B) = (A kron B^T) vec(rho)."""
    ops = FockOperators.build(cutoff)
    total = sparse.csr_matrix((ops.dimension**2, ops.dimension**2), dtype=complex)
    for left, right in ops.terms(rates):
        total = total + sparse.kron(left, right.T, format="csr")
    return total.tocsr()


def _sector_elements(cutoff: int) -> list[tuple[int, int]]:
    dim = cutoff + 1
    elements: list[tuple[int, int]] = []
    for excitation in range(cutoff + 2):
        states = [
            atom * dim + n
            for atom, n in ((0, excitation), (1, excitation - 1))
            if 0 <= n <= cutoff
        ]
        elements.extend((i, j) for i in states for j in states)
    return elements


def _sector_liouvillian(
    ops: FockOperators,
    rates: RateSet,
    elements: list[tuple[int, int]],
) -> sparse.csr_matrix:
    position = {pair: index for index, pair in enumerate(elements)}
    rows: list[int] = []
    cols: list[int] = []
    values: list[complex] = []
    for left, right in ops.terms(rates):
        left_csc, right_csr = left.tocsc(), right.tocsr()
        for col, (i, j) in enumerate(elements):
            l_lo, l_hi = left_csc.indptr[i], left_csc.indptr[i + 1]
            r_lo, r_hi = right_csr.indptr[j], right_csr.indptr[j + 1]
            for k, a_ki in zip(left_csc.indices[l_lo:l_hi], left_csc.data[l_lo:l_hi]):
                for m, b_jm in zip(right_csr.indices[r_lo:r_hi], right_csr.data[r_lo:r_hi]):
                    value = a_ki * b_jm
                    target = position.get((int(k), int(m)))
                    if target is None:
                        if value != 0:
                            msg = "Liouvillian leaves the excitation sector"
                            raise NumericalError(msg)
                        continue
                    rows.append(target)
                    cols.append(col)
                    values.append(value)
    size = len(elements)
    return sparse.coo_matrix((values, (rows, cols)), shape=(size, size)).tocsr()


def _with_trace_row(
    liouv: sparse.csr_matrix,
    diagonal: np.ndarray,
) -> sparse.csc_matrix:
    """Replace the stationarity equation of element (|1,0>, |1,0>) (index 0) by Tr rho = 1."""
    coo = liouv.tocoo()
    keep = coo.row != 0
    rows = np.concatenate((coo.row[keep], np.zeros(diagonal.size, dtype=int)))
    cols = np.concatenate((coo.col[keep], diagonal))
    values = np.concatenate((coo.data[keep], np.ones(diagonal.size, dtype=complex)))
    return sparse.csc_matrix((values, (rows, cols)), shape=liouv.shape)


def _solve(system: sparse.csc_matrix) -> np.ndarray:
    rhs = np.zeros(system.shape[0], dtype=complex)
    rhs[0] = 1.0
    if system.shape[0] <= settings.iterative_dimension:
        solution = spla.spsolve(system, rhs)
    else:
        logger.debug("iterative_solve", dimension=system.shape[0])
        try:
            factor = spla.spilu(system, drop_tol=1e-12, fill_factor=20)
        except RuntimeError as exc:
            raise NumericalError(f"incomplete factorization failed: {exc}") from exc
        preconditioner = spla.LinearOperator(system.shape, factor.solve, dtype=system.dtype)
        solution, info = spla.lgmres(
            system,
            rhs,
            M=preconditioner,
            rtol=1e-13,
            atol=0.0,
            maxiter=2000,
        )
        if info != 0:
            msg = f"iterative solver did not converge (info={info})"
            raise NumericalError(msg)
    solution = np.asarray(solution)
    if not np.all(np.isfinite(solution)):
        msg = "stationarity system is singular"
        raise NumericalError(msg)
    return solution


def steady_state(
    rates: RateSet,
    cutoff: int,
    method: SolveMethod = "sector",
) -> SteadyState:
    """Stationary density matrix at Fock cutoff N.

    Args:
        rates: Physical rates
        cutoff: Maximum photon number N, at least 4
        method: "sector" solves the excitation-conserving block only; "full"
            assembles the whole Liouvillian (small N cross-check)

    Raises:
        DomainError: If the cutoff is below the minimum or the method unknown
        CutoffTooSmallError: If the population at n >= N - 2 reaches the limit
        NumericalError: If the linear system is singular

    """
    if cutoff < settings.min_cutoff:
        msg = f"cutoff {cutoff} below minimum {settings.min_cutoff}"
        raise DomainError(msg)

    ops = FockOperators.build(cutoff)
    dim = ops.dimension
    if method == "sector":
        elements = _sector_elements(cutoff)
        liouv = _sector_liouvillian(ops, rates, elements)
        diagonal = np.array([k for k, (i, j) in enumerate(elements) if i == j])
    elif method == "full":
        liouv = liouvillian(rates, cutoff)
        diagonal = np.arange(dim) * (dim + 1)
    else:
        msg = f"unknown solve method {method!r}"
        raise DomainError(msg)

    solution = _solve(_with_trace_row(liouv, diagonal))
    residual = float(np.max(np.abs(liouv @ solution)))

    if method == "sector":
        rho = np.zeros((dim, dim), dtype=complex)
        for value, (i, j) in zip(solution, elements):
            rho[i, j] = value
    else:
        rho = solution.reshape(dim, dim)

    block = cutoff + 1
    state = SteadyState(
        cutoff=cutoff,
        rates=rates,
        rho11=rho[:block, :block],
        rho22=rho[block:, block:],
        rho12=rho[:block, block:],
        rho21=rho[block:, :block],
        residual_norm=residual,
        tail_mass=0.0,
        method=method,
    )
    tail = float(np.sum(state.populations[-TAIL_WIDTH:]))
    logger.debug(
        "steady_state_solved",
        cutoff=cutoff,
        method=method,
        unknowns=liouv.shape[0],
        residual=residual,
        tail_mass=tail,
    )
    if tail >= settings.tail_mass_limit:
        raise CutoffTooSmallError(cutoff, tail)
    return replace(state, tail_mass=tail)


def cutoff_policy(rates: RateSet) -> int:
    """Fock cutoff ceil(I0 + 10 sqrt(max(I0, 1)) + 20) above threshold, else 40."""
    lin = linear_theory(reduce(rates))
    if not lin.valid:
        return max(settings.sub_threshold_cutoff, settings.min_cutoff)
    i0 = lin.i0
    return max(math.ceil(i0 + 10.0 * math.sqrt(max(i0, 1.0)) + 20.0), settings.min_cutoff)


def is_heavy(cutoff: int) -> bool:
    """Whether a solve at this cutoff belongs to the table-scale, opt-in class."""
    return cutoff > settings.heavy_cutoff


def solve_converged(
    rates: RateSet,
    cutoff: int | None = None,
    method: SolveMethod = "sector",
) -> SteadyState:
    """Solve, growing the cutoff while the tail mass is too large.

    Raises:
        CutoffTooSmallError: If max_cutoff is reached without convergence

    """
    current = cutoff_policy(rates) if cutoff is None else cutoff
    while True:
        try:
            return steady_state(rates, current, method)
        except CutoffTooSmallError as exc:
            grown = math.ceil(current * settings.cutoff_growth)
            if grown > settings.max_cutoff:
                raise
            logger.debug("cutoff_grown", cutoff=current, new_cutoff=grown, tail_mass=exc.tail_mass)
            current = grown


def _q_derivative(populations: np.ndarray) -> Callable[[ArrayLike, int], np.ndarray]:
    def derivative(intensity: ArrayLike, order: int = 0) -> np.ndarray:
        return np.real(poisson_sum(populations, intensity, order)) / math.pi

    return derivative


def q_from_state(state: SteadyState) -> QProfile:
    """Q(I) = e^{-I}/pi sum_n p_n I^n/n!, normalized by the trace.

    The returned profile's derivative(I, k) gives d^k Q/dI^k for k <= 5 from
    the Poisson-kernel recurrence.
    """
    populations = state.populations
    positive = np.clip(populations, 0.0, None)

    def log_density(intensity: ArrayLike) -> np.ndarray:
        log_abs, _sign = log_poisson_sum(positive, intensity)
        return log_abs

    derivative = _q_derivative(populations)

    profile = build_profile(
        ProfileKind.ORACLE,
        log_density,
        reduce(state.rates),
        descriptor={"cutoff": float(state.cutoff)},
    )
    return replace(profile, log_norm=-_LOG_PI, normalized=True, derivative=derivative)


def _coherence_values(state: SteadyState, grid: np.ndarray) -> np.ndarray:
    weights = 1.0 / np.sqrt(np.arange(1, state.cutoff + 1, dtype=float))
    lower = np.diagonal(state.rho12, offset=-1) * weights
    upper = np.diagonal(state.rho21, offset=1) * weights
    root = np.sqrt(grid) / math.pi
    return root * (poisson_sum(lower, grid) + poisson_sum(upper, grid))


def coherence_profile(state: SteadyState, grid: ArrayLike | None = None) -> CoherenceProfile:
    """rho_Sigma(I) = rho_21(I) + rho_12(I) from the one-off-diagonal elements."""
    points = q_from_state(state).grid if grid is None else np.asarray(grid, dtype=float)
    return CoherenceProfile(grid=points, values=_coherence_values(state, points))


def continuity_residual(state: SteadyState, grid: ArrayLike | None = None) -> float:
    """max |rho_Sigma - (kappa/g) sqrt(I) (Q + Q')| / max |rho_Sigma|."""
    points = q_from_state(state).grid if grid is None else np.asarray(grid, dtype=float)
    derivative = _q_derivative(state.populations)
    lhs = np.real(_coherence_values(state, points))
    ratio = state.rates.cavity_rate / state.rates.coupling
    rhs = ratio * np.sqrt(points) * (derivative(points, 0) + derivative(points, 1))
    scale = float(np.max(np.abs(lhs)))
    deviation = float(np.max(np.abs(lhs - rhs)))
    if scale == 0:
        return deviation
    return deviation / scale


def ode_grid(state: SteadyState) -> np.ndarray:
    return np.linspace(0.0, float(state.cutoff), ODE_GRID_DENSITY * state.cutoff + 1)


def ode_residual(
    state: SteadyState,
    table: CoeffTable,
    grid: ArrayLike | None = None,
) -> ResidualProfile:
    """R(I) = sum_nu f_nu(I) Q^(nu)(I) on the oracle Q, with its term scale.

    Points where Q < 1e-12 max Q are dropped. The peak of every monomial
    b I^j Q^(nu) is kept for the coefficient sensitivity measure.
    """
    polys = polynomials(table)
    derivative = _q_derivative(state.populations)
    points = ode_grid(state) if grid is None else np.asarray(grid, dtype=float)
    q = derivative(points, 0)
    points = points[q >= ODE_FLOOR * float(np.max(q))]

    slopes = [derivative(points, nu) for nu in range(len(polys))]
    terms = np.array([polys.evaluate(nu, points) * slopes[nu] for nu in range(len(polys))])
    peaks = [
        float(np.max(np.abs(coefficient * points**power * slopes[nu]), initial=0.0))
        for nu in range(len(polys))
        for power, coefficient in enumerate(polys[nu])
        if coefficient != 0
    ]
    return ResidualProfile(
        grid=points,
        residual=np.sum(terms, axis=0),
        scale=np.sum(np.abs(terms), axis=0),
        term_peaks=np.array(peaks),
    )


def moments_exact(state: SteadyState) -> FieldMoments:
    """<n>, <n^2> and Q_f from direct traces over the photon distribution."""
    p = state.populations
    n = np.arange(p.size, dtype=float)
    mean = float(np.dot(n, p))
    second = float(np.dot(n * n, p))
    mandel = None if mean < VACUUM_GUARD else (second - mean * mean) / mean - 1.0
    return FieldMoments(
        mean_photon=mean,
        mean_i_q=mean + 1.0,
        second_moment_i_q=second + 3.0 * mean + 2.0,
        mandel_qf=mandel,
    )
