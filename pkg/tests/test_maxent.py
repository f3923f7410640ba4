import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from econstat.errors import DegenerateConstraint, InfeasibleConstraint, NoFeasibleOccupancy, TooLarge, ZeroTemperature
from econstat.maxent import (
    MaxEntProblem,
    OccupancyVector,
    brute_force_most_probable,
    entropy,
    log_multiplicity,
    nearest_feasible_occupancy,
    partition_function,
    solve_boltzmann,
)
from grids import is_symmetric, oracle_grid


def exact_omega(counts):
    # independent oracle: product of binomials instead of factorial quotient
    total, omega = 0, 1
    for c in counts:
        total += c
        omega *= math.comb(total, c)
    return omega


# --- multiplicity and entropy -------------------------------------------------

@pytest.mark.parametrize(
    "counts, expected",
    [((1, 1), math.log(2)), ((2, 0), 0.0), ((3, 3, 3), math.log(1680))],
)
def test_log_multiplicity_examples(counts, expected):
    assert log_multiplicity(counts) == pytest.approx(expected, abs=1e-14)


def test_log_multiplicity_empty_is_zero():
    assert log_multiplicity(OccupancyVector((0, 0))) == 0.0


@given(st.lists(st.integers(0, 12), min_size=1, max_size=5))
def test_log_multiplicity_matches_binomial_product(counts):
    assert log_multiplicity(counts) == pytest.approx(math.log(exact_omega(counts)), abs=1e-12)


@given(st.lists(st.integers(0, 400), min_size=1, max_size=5).filter(lambda c: sum(c) > 20))
def test_lgamma_branch_matches_big_integers(counts):
    assert log_multiplicity(counts) == pytest.approx(math.log(exact_omega(counts)), rel=1e-12)


def test_entropy_examples():
    assert entropy((7, 0, 0)) == 0.0
    assert entropy((4, 4, 4)) == pytest.approx(12 * math.log(3))
    assert entropy((1, 1)) == pytest.approx(2 * math.log(2))
    assert entropy((1, 1)) - log_multiplicity((1, 1)) == pytest.approx(math.log(2))


@settings(max_examples=50)
@given(st.lists(st.integers(10, 60), min_size=2, max_size=4))
def test_stirling_gap_shrinks_under_scaling(counts):
    gaps = []
    for scale in (1, 2, 4):
        c = [scale * k for k in counts]
        s = entropy(c)
        gaps.append(abs(s - log_multiplicity(c)) / s)
    assert gaps[0] > gaps[1] > gaps[2]


@settings(max_examples=50)
@given(st.lists(st.integers(35, 400), min_size=2, max_size=6))
def test_stirling_gap_within_five_percent(counts):
    s = entropy(counts)
    assert abs(s - log_multiplicity(counts)) / s <= 0.05


def test_stirling_gap_at_ten_per_state():
    # two states at ten each is the worst case for counts >= 10: ln(20!/(10!10!)) vs 20 ln 2
    s = entropy((10, 10))
    assert (s - log_multiplicity((10, 10))) / s == pytest.approx(1 - math.log(184756) / (20 * math.log(2)), rel=1e-12)
    assert (s - log_multiplicity((10, 10))) / s == pytest.approx(0.12524, abs=1e-5)


def test_occupancy_rejects_negative():
    with pytest.raises(ValueError):
        OccupancyVector((1, -1))


# --- Boltzmann solver ---------------------------------------------------------------

def test_symmetric_spectrum_is_uniform():
    sol = solve_boltzmann(MaxEntProblem((0, 1, 2), 30, 30))
    assert sol.probabilities == pytest.approx((1 / 3,) * 3, abs=1e-12)
    assert sol.beta == 0.0
    assert math.isinf(sol.temperature)


def test_two_levels_half_filled():
    sol = solve_boltzmann(MaxEntProblem((0, 1), 2, 1))
    assert sol.probabilities == pytest.approx((0.5, 0.5), abs=1e-12)


def test_two_levels_quarter_filled():
    sol = solve_boltzmann(MaxEntProblem((0, 1), 4, 1))
    p0, p1 = sol.probabilities
    assert p1 / p0 == pytest.approx(1 / 3, rel=1e-9)
    assert sol.beta == pytest.approx(math.log(3), rel=1e-9)
    assert sol.temperature == pytest.approx(1 / math.log(3), rel=1e-9)


def test_negative_temperature_above_midpoint():
    sol = solve_boltzmann(MaxEntProblem((0, 1), 4, 3))
    assert sol.beta == pytest.approx(-math.log(3), rel=1e-9)


def test_range_errors():
    with pytest.raises(InfeasibleConstraint):
        solve_boltzmann(MaxEntProblem((0, 1), 2, 5))
    with pytest.raises(DegenerateConstraint):
        solve_boltzmann(MaxEntProblem((0, 1), 2, 0))
    with pytest.raises(DegenerateConstraint):
        solve_boltzmann(MaxEntProblem((0, 1, 2), 3, 6))


@given(
    st.lists(st.floats(-50, 50, allow_nan=False), min_size=2, max_size=8, unique=True),
    st.floats(0.02, 0.98),
    st.integers(1, 10**6),
)
def test_constraints_hold(energies, frac, n):
    lo, hi = min(energies), max(energies)
    if hi - lo < 1e-3:
        return
    u = lo + frac * (hi - lo)
    sol = solve_boltzmann(MaxEntProblem(energies, n, n * u))
    p = np.asarray(sol.probabilities)
    assert abs(p.sum() - 1.0) <= 1e-12
    assert np.all((p >= 0) & (p <= 1))
    assert abs(p @ np.asarray(energies) - u) <= 1e-9 * max(1.0, abs(u))
    # Boltzmann form: log p_k = alpha - beta eps_k
    mask = p > 1e-250
    np.testing.assert_allclose(np.log(p[mask]), sol.alpha - sol.beta * np.asarray(energies)[mask], atol=1e-9)
    if sol.beta != 0:
        assert sol.temperature == pytest.approx(1 / sol.beta)
        assert sol.chemical_potential == pytest.approx(sol.alpha * sol.temperature)


# --- brute-force oracle ------------------------------------------------------------

@pytest.mark.parametrize(
    "energies, n, e, expected",
    [((0, 1), 2, 1, (1, 1)), ((0, 1), 2, 0, (2, 0)), ((0, 1, 2), 4, 4, (1, 2, 1))],
)
def test_brute_force_examples(energies, n, e, expected):
    assert brute_force_most_probable(MaxEntProblem(energies, n, e)).counts == expected


def test_brute_force_tie_is_lexicographically_smallest():
    # (1, 1, 0) and (1, 0, 1) both have Omega = 2
    assert brute_force_most_probable(MaxEntProblem((0, 1, 1), 2, 1)).counts == (1, 0, 1)


def test_brute_force_limits():
    with pytest.raises(TooLarge):
        brute_force_most_probable(MaxEntProblem((0, 1), 13, 5))
    with pytest.raises(TooLarge):
        brute_force_most_probable(MaxEntProblem((0, 1, 2, 3, 4), 4, 4))
    with pytest.raises(NoFeasibleOccupancy):
        brute_force_most_probable(MaxEntProblem((0, 2), 3, 3))


def test_oracle_agreement_on_grid():
    checked = 0
    for problem in oracle_grid():
        best = brute_force_most_probable(problem)
        sol = solve_boltzmann(problem)
        rounded = nearest_feasible_occupancy(problem, sol.probabilities)
        slack = math.log(problem.total_count + 1) * len(problem.energies)
        assert log_multiplicity(best) - log_multiplicity(rounded) <= slack
        assert log_multiplicity(rounded) <= log_multiplicity(best) + 1e-12
        if is_symmetric(problem):
            assert rounded == best, problem
        checked += 1
    assert checked > 150


# --- partition function -------------------------------------------------------------

def test_partition_examples():
    assert partition_function((0, 1, 2), 1.0).value == pytest.approx(1 + math.exp(-1) + math.exp(-2))
    assert partition_function((0,), 123.0).value == 1.0
    assert partition_function((0,), -3.0).value == 1.0
    r = partition_function((0, 1), 1000.0, support_bounded_below=False)
    assert r.diverges and math.isinf(r.value)
    r = partition_function((0, 1), -1000.0, support_bounded_below=False)
    assert r.diverges
    with pytest.raises(ZeroTemperature):
        partition_function((0, 1), 0.0)


@given(
    st.lists(st.floats(0, 5), min_size=1, max_size=6),
    st.integers(0, 5),
    st.floats(0.01, 5),
    st.floats(0.5, 50),
)
def test_partition_monotone(energies, k, bump, t):
    k %= len(energies)
    z = partition_function(energies, t)
    assert not z.diverges and z.value > 0
    raised = list(energies)
    raised[k] += bump
    assert partition_function(raised, t).value < z.value
    if max(energies) > 1e-3:
        assert partition_function(energies, t * 1.5).value > z.value
