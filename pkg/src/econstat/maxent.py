"""Occupancy multiplicity, entropy and constrained entropy maximization.

The central object is a set of discrete states with energies ``eps_k``.
Placing ``N`` distinguishable agents into those states with occupation
numbers ``N_k`` can be done in ``N! / prod(N_k!)`` ways; maximizing that
count with ``sum(N_k) = N`` and ``sum(eps_k N_k) = E`` fixed gives the
Boltzmann-Gibbs law ``P_k = exp(alpha - beta * eps_k)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateConstraint,
    InfeasibleConstraint,
    NoFeasibleOccupancy,
    TooLarge,
    ZeroTemperature,
)

BRUTE_FORCE_MAX_COUNT = 12
BRUTE_FORCE_MAX_STATES = 4
DEFAULT_ENERGY_TOLERANCE = 1e-9
_EXACT_FACTORIAL_LIMIT = 20


@dataclass(frozen=True)
class OccupancyVector:
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) < 1:
            raise ValueError("occupancy needs at least one state")
        if any(c < 0 for c in counts):
            raise ValueError(f"negative occupation number in {counts}")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class MaxEntProblem:
    energies: tuple[float, ...]
    total_count: int
    total_energy: float

    def __post_init__(self):
        energies = tuple(float(e) for e in self.energies)
        if not energies:
            raise ValueError("energies must be non-empty")
        if int(self.total_count) < 1:
            raise ValueError("total_count must be >= 1")
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "total_count", int(self.total_count))
        object.__setattr__(self, "total_energy", float(self.total_energy))

    @property
    def mean_energy(self) -> float:
        return self.total_energy / self.total_count


@dataclass(frozen=True)
class MaxEntSolution:
    """Boltzmann occupation probabilities and their Lagrange multipliers.

    ``temperature`` is ``inf`` and ``chemical_potential`` is ``nan`` when
    ``beta == 0`` (uniform occupation).
    """

    probabilities: tuple[float, ...]
    beta: float
    alpha: float
    temperature: float
    chemical_potential: float
    residual: float = 0.0


@dataclass(frozen=True)
class PartitionResult:
    value: float
    diverges: bool


def _as_occupancy(occ) -> OccupancyVector:
    return occ if isinstance(occ, OccupancyVector) else OccupancyVector(tuple(occ))


def log_multiplicity(occ) -> float:
    """Natural log of ``N! / prod(N_k!)``.

    Exact (integer arithmetic) for ``N <= 20``; log-gamma otherwise, which
    stays finite for ``N`` in the millions.
    """
    counts = _as_occupancy(occ).counts
    n = sum(counts)
    if n == 0:
        return 0.0
    if n <= _EXACT_FACTORIAL_LIMIT:
        omega = math.factorial(n)
        for c in counts:
            omega //= math.factorial(c)
        return math.log(omega)
    return math.lgamma(n + 1) - math.fsum(math.lgamma(c + 1) for c in counts)


def entropy(occ) -> float:
    """Stirling-form entropy ``-sum N_k ln(N_k / N)`` with ``0 ln 0 = 0``."""
    counts = _as_occupancy(occ).counts
    n = sum(counts)
    if n == 0:
        return 0.0
    return -math.fsum(c * math.log(c / n) for c in counts if c > 0)


def _log_partition(energies: np.ndarray, beta: float) -> float:
    x = -beta * energies
    shift = x.max()
    return float(shift + np.log(np.exp(x - shift).sum()))


def _boltzmann_probabilities(energies: np.ndarray, beta: float) -> tuple[np.ndarray, float]:
    log_z = _log_partition(energies, beta)
    return np.exp(-beta * energies - log_z), -log_z


def _mean_energy(energies: np.ndarray, beta: float) -> float:
    p, _ = _boltzmann_probabilities(energies, beta)
    return float(np.dot(p, energies))


def _check_energy_range(problem: MaxEntProblem) -> None:
    lo, hi = min(problem.energies), max(problem.energies)
    u = problem.mean_energy
    scale = max(1.0, abs(lo), abs(hi))
    if u < lo - 1e-12 * scale or u > hi + 1e-12 * scale:
        raise InfeasibleConstraint(
            f"mean energy {u} outside spectrum range [{lo}, {hi}]"
        )
    if math.isclose(u, lo, rel_tol=1e-12, abs_tol=1e-12 * scale) or math.isclose(
        u, hi, rel_tol=1e-12, abs_tol=1e-12 * scale
    ):
        raise DegenerateConstraint(
            f"mean energy {u} sits on a spectrum edge; all mass on extreme states"
        )


def solve_boltzmann(problem: MaxEntProblem, tol: float = 1e-10) -> MaxEntSolution:
    """Maximize entropy at fixed ``N`` and ``E``.

    ``beta`` is found by bisection on the mean-energy equation, which is
    strictly decreasing in ``beta``; the bracket starts at ``[-1, 1]`` and
    doubles until it contains the root. ``alpha`` then follows from
    normalization. Negative ``beta`` is returned when ``E/N`` exceeds the
    unweighted mean energy.

    Raises
    ------
    InfeasibleConstraint
        ``E`` outside ``[N min(eps), N max(eps)]``.
    DegenerateConstraint
        ``E`` on one of the two edges of that range.
    """
    _check_energy_range(problem)
    energies = np.asarray(problem.energies, dtype=float)
    target = problem.mean_energy

    def excess(beta: float) -> float:
        return _mean_energy(energies, beta) - target

    lo, hi = -1.0, 1.0
    while excess(lo) < 0.0:
        lo *= 2.0
        if lo < -1e300:
            raise DegenerateConstraint("could not bracket beta from below")
    while excess(hi) > 0.0:
        hi *= 2.0
        if hi > 1e300:
            raise DegenerateConstraint("could not bracket beta from above")

    beta = 0.5 * (lo + hi)
    res = excess(beta)
    scale = max(1.0, abs(target))
    for _ in range(2000):
        if abs(res) <= tol * scale:
            break
        if res > 0.0:
            lo = beta
        else:
            hi = beta
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        beta = mid
        res = excess(beta)

    probs, alpha = _boltzmann_probabilities(energies, beta)
    if beta == 0.0:
        temperature, mu = math.inf, math.nan
    else:
        temperature = 1.0 / beta
        mu = alpha * temperature
    return MaxEntSolution(
        probabilities=tuple(float(p) for p in probs),
        beta=float(beta),
        alpha=float(alpha),
        temperature=temperature,
        chemical_potential=mu,
        residual=float(res),
    )


def _feasible_occupancies(problem: MaxEntProblem, energy_tolerance: float):
    n, q = problem.total_count, len(problem.energies)
    for counts in itertools.product(range(n + 1), repeat=q):
        if sum(counts) != n:
            continue
        e = math.fsum(c * eps for c, eps in zip(counts, problem.energies))
        if abs(e - problem.total_energy) <= energy_tolerance:
            yield counts


def brute_force_most_probable(
    problem: MaxEntProblem, energy_tolerance: float = DEFAULT_ENERGY_TOLERANCE
) -> OccupancyVector:
    """Exhaustive argmax of the multiplicity over feasible occupancies.

    Enumeration is in lexicographic order and only strict improvements
    replace the incumbent, so ties resolve to the lexicographically
    smallest vector.
    """
    n, q = problem.total_count, len(problem.energies)
    if n > BRUTE_FORCE_MAX_COUNT or q > BRUTE_FORCE_MAX_STATES:
        raise TooLarge(
            f"enumeration limited to N <= {BRUTE_FORCE_MAX_COUNT}, "
            f"q <= {BRUTE_FORCE_MAX_STATES}; got N={n}, q={q}"
        )
    best, best_omega = None, -1
    for counts in _feasible_occupancies(problem, energy_tolerance):
        omega = math.factorial(n)
        for c in counts:
            omega //= math.factorial(c)
        if omega > best_omega:
            best, best_omega = counts, omega
    if best is None:
        raise NoFeasibleOccupancy(
            f"no occupancy of N={n} over energies {problem.energies} has E={problem.total_energy}"
        )
    return OccupancyVector(best)


def nearest_feasible_occupancy(
    problem: MaxEntProblem,
    probabilities: Sequence[float],
    energy_tolerance: float = DEFAULT_ENERGY_TOLERANCE,
) -> OccupancyVector:
    """Feasible integer occupancy closest (Euclidean) to ``N * probabilities``."""
    target = problem.total_count * np.asarray(probabilities, dtype=float)
    best, best_d = None, math.inf
    for counts in _feasible_occupancies(problem, energy_tolerance):
        d = float(np.sum((np.asarray(counts) - target) ** 2))
        if d < best_d - 1e-12:
            best, best_d = counts, d
    if best is None:
        raise NoFeasibleOccupancy("no feasible occupancy to round to")
    return OccupancyVector(best)


def partition_function(
    energies: Sequence[float], temperature: float, support_bounded_below: bool = True
) -> PartitionResult:
    """``Z = sum_k exp(-eps_k / T)`` over the permitted states.

    When the state space is not bounded below (unlimited negative balances)
    the sum runs over infinitely many states with arbitrarily low energy and
    diverges for either sign of ``T``; ``value`` is then ``inf``.
    """
    if temperature == 0:
        raise ZeroTemperature("partition function needs a non-zero temperature")
    if not support_bounded_below:
        return PartitionResult(value=math.inf, diverges=True)
    e = np.asarray(energies, dtype=float)
    with np.errstate(over="ignore"):
        z = float(np.exp(-e / temperature).sum())
    if not math.isfinite(z):
        return PartitionResult(value=math.inf, diverges=True)
    return PartitionResult(value=z, diverges=False)
