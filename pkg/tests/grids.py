"""Fixed problem grids shared by the unit and acceptance suites."""
from __future__ import annotations

import itertools

from econstat.maxent import MaxEntProblem

ENERGY_SETS = (
    (0.0, 1.0),
    (0.0, 2.0),
    (1.0, 3.0),
    (0.0, 1.0, 2.0),
    (0.0, 1.0, 3.0),
    (0.0, 2.0, 3.0),
    (-1.0, 0.0, 1.0),
)


def _feasible(energies, n, e):
    return any(
        sum(c) == n and abs(sum(ci * ei for ci, ei in zip(c, energies)) - e) < 1e-9
        for c in itertools.product(range(n + 1), repeat=len(energies))
    )


def oracle_grid():
    """Interior integer-energy problems with N <= 10, q <= 3 and a feasible occupancy."""
    for energies in ENERGY_SETS:
        lo, hi = min(energies), max(energies)
        for n in range(1, 11):
            for e in range(int(n * lo) + 1, int(n * hi)):
                if _feasible(energies, n, e):
                    yield MaxEntProblem(energies, n, float(e))


def is_symmetric(problem: MaxEntProblem) -> bool:
    """Equally spaced spectrum with the mean energy at its midpoint."""
    e = problem.energies
    gaps = {round(b - a, 12) for a, b in zip(e, e[1:])}
    return len(gaps) == 1 and abs(problem.mean_energy - 0.5 * (e[0] + e[-1])) < 1e-12


def market_grid():
    """Feasible labor-market specs spanning small, large and stiff cases.

    Total capital stays at or below 1e7 so that an absolute residual of 1e-8
    is above the spacing of doubles near W.
    """
    from econstat.market import LaborMarketSpec

    for n_w, n_f in ((10, 1), (1_000, 10), (1_000, 50), (100_000, 1), (100_000, 1_000), (10**6, 10**4)):
        for k_per_worker in (2.0, 50.0, 1e3):
            for w0 in (0.0, 1.0):
                for mu in (1e-3, 1.0, 100.0):
                    k = k_per_worker * n_w / n_f
                    if k * n_f > 1e7:
                        continue
                    if k <= w0 or n_f * 1.0 >= min(n_w, k * n_f / w0 if w0 else n_w):
                        continue
                    yield LaborMarketSpec(n_w, n_f, k, min_wage=w0, unemployment_weight=mu)
