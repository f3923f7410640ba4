"""Statistical equilibrium of a two-commodity labor market.

Workers offer one unit of labor for a wage ``w > w_0`` or stay unemployed
at ``(0, 0)``; firms spend a fixed capital ``K`` on labor ``l > l_0``. A
trade ``x`` occurs with weight ``exp(-pi . x)``, and the two entropic prices
``pi = (pi_w, pi_l)`` are fixed by requiring that, on average, the firms'
total capital ``W = K N_f`` is paid out as wages and the labor hired equals
the number of employed workers.

With exponential offer weights every offer-set integral has a closed form:

* worker, employed:  ``Z_e = exp(pi_l) exp(-pi_w w_0) / pi_w``
* employment probability ``p_e = Z_e / (mu_u + Z_e)``
* ``<w> = w_0 + 1/pi_w`` and ``<l> = l_0 + 1/pi_l``

``mu_u`` is the statistical measure of the unemployed state. It is measured
in money units (the wage line is integrated over ``dw``), so rescaling all
money quantities also rescales ``mu_u``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import InfeasibleSpec, NoConvergence, NonPositivePrices

RESIDUAL_TOL = 1e-8
MAX_NEWTON_ITER = 200
FIRST_PASS_ITER = 50


@dataclass(frozen=True)
class LaborMarketSpec:
    worker_count: int
    firm_count: int
    capital_per_firm: float
    min_wage: float = 0.0
    min_labor: float = 1.0
    unemployment_weight: float = 1.0

    def __post_init__(self):
        if self.worker_count < 1 or self.firm_count < 1:
            raise InfeasibleSpec("worker and firm counts must be >= 1")
        if self.min_wage < 0 or self.min_labor <= 0 or self.unemployment_weight <= 0:
            raise InfeasibleSpec("need w_0 >= 0, l_0 > 0 and mu_u > 0")
        if self.capital_per_firm <= self.min_wage:
            raise InfeasibleSpec("capital per firm must exceed the minimum wage")

    @property
    def total_capital(self) -> float:
        return self.capital_per_firm * self.firm_count


@dataclass(frozen=True)
class EntropicPrices:
    pi_wage: float
    pi_labor: float

    def __post_init__(self):
        if not (self.pi_wage > 0 and self.pi_labor > 0):
            raise NonPositivePrices(f"entropic prices must be positive: {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.pi_wage, self.pi_labor])


@dataclass(frozen=True)
class MarketSolution:
    prices: EntropicPrices
    employed_count: float
    unemployed_count: float
    mean_wage: float
    mean_labor: float
    wage_temperature: float
    clearing_residuals: tuple[float, float]
    min_wage: float = 0.0
    iterations: int = 0
    method: str = "newton"


def trade_probability(trade, prices) -> float:
    """Unnormalized weight ``exp(-pi . x)`` of a trade vector ``x = (wage, labor)``."""
    pi = prices.as_array() if isinstance(prices, EntropicPrices) else np.asarray(prices, float)
    return math.exp(-float(np.dot(pi, np.asarray(trade, dtype=float))))


def _moments(spec: LaborMarketSpec, pi_w: float, pi_l: float):
    # log Z_e, kept in log space so large pi_l does not overflow
    log_ze = pi_l - pi_w * spec.min_wage - math.log(pi_w)
    log_mu = math.log(spec.unemployment_weight)
    p_e = 1.0 / (1.0 + math.exp(log_mu - log_ze)) if log_mu - log_ze < 700 else 0.0
    n_e = p_e * spec.worker_count
    mean_w = spec.min_wage + 1.0 / pi_w
    mean_l = spec.min_labor + 1.0 / pi_l
    return p_e, n_e, mean_w, mean_l


def clearing_residuals(spec: LaborMarketSpec, prices) -> np.ndarray:
    """``(N_e <w> - K N_f, N_f <l> - N_e)`` at the given prices."""
    if not isinstance(prices, EntropicPrices):
        pw, pl = prices
        if not (pw > 0 and pl > 0):
            raise NonPositivePrices(f"entropic prices must be positive: {prices}")
        prices = EntropicPrices(float(pw), float(pl))
    _, n_e, mean_w, mean_l = _moments(spec, prices.pi_wage, prices.pi_labor)
    return np.array([n_e * mean_w - spec.total_capital, spec.firm_count * mean_l - n_e])


def residual_tolerance(spec: LaborMarketSpec) -> np.ndarray:
    """Per-component tolerance: 1e-8, floored at a few ulps of the terms being cancelled."""
    eps = np.finfo(float).eps
    return np.array(
        [max(RESIDUAL_TOL, 16 * eps * spec.total_capital), max(RESIDUAL_TOL, 16 * eps * spec.worker_count)]
    )


def _converged(spec, z) -> bool:
    return bool(np.all(np.abs(clearing_residuals(spec, np.exp(z))) <= residual_tolerance(spec)))


def _scaled_residuals(spec, z):
    pw, pl = math.exp(z[0]), math.exp(z[1])
    r = clearing_residuals(spec, (pw, pl))
    return np.array([r[0] / spec.total_capital, r[1] / spec.firm_count])


def _jacobian(spec, z):
    # d/d(log pi) of the scaled residuals
    pw, pl = math.exp(z[0]), math.exp(z[1])
    p_e, n_e, mean_w, _ = _moments(spec, pw, pl)
    dlogze_dzw = -pw * spec.min_wage - 1.0
    dlogze_dzl = pl
    dne = spec.worker_count * p_e * (1.0 - p_e)
    dne_dzw, dne_dzl = dne * dlogze_dzw, dne * dlogze_dzl
    dmw_dzw = -1.0 / pw
    dml_dzl = -1.0 / pl
    W, nf = spec.total_capital, spec.firm_count
    return np.array(
        [
            [(dne_dzw * mean_w + n_e * dmw_dzw) / W, dne_dzl * mean_w / W],
            [-dne_dzw / nf, (nf * dml_dzl - dne_dzl) / nf],
        ]
    )


def _newton(spec, z0, max_iter=MAX_NEWTON_ITER):
    z = np.array(z0, dtype=float)
    f = _scaled_residuals(spec, z)
    for it in range(1, max_iter + 1):
        if _converged(spec, z):
            return z, it
        try:
            step = np.linalg.solve(_jacobian(spec, z), -f)
        except np.linalg.LinAlgError:
            return None, it
        if not np.all(np.isfinite(step)):
            return None, it
        # damped: halve until the scaled residual norm decreases
        norm0 = np.linalg.norm(f)
        lam = 1.0
        while lam > 1e-8:
            trial = z + lam * np.clip(step, -5.0, 5.0)
            ft = _scaled_residuals(spec, trial)
            if np.all(np.isfinite(ft)) and np.linalg.norm(ft) < norm0:
                break
            lam *= 0.5
        else:
            return (z, it) if _converged(spec, z) else (None, it)
        z, f = trial, ft
    return (z, max_iter) if _converged(spec, z) else (None, max_iter)


def _polish(spec, z, steps=4):
    # plain Newton steps near the root; keep whichever iterate is best
    best = z
    best_res = np.max(np.abs(clearing_residuals(spec, np.exp(z))))
    for _ in range(steps):
        try:
            z = z + np.linalg.solve(_jacobian(spec, z), -_scaled_residuals(spec, z))
            res = np.max(np.abs(clearing_residuals(spec, np.exp(z))))
        except (np.linalg.LinAlgError, OverflowError, ValueError):
            break
        if not np.isfinite(res):
            break
        if res < best_res:
            best, best_res = z, res
    return best


def _employment_bounds(spec):
    # N_e = N_f <l> must stay below N_w and below W / w_0
    cap = float(spec.worker_count)
    if spec.min_wage > 0:
        cap = min(cap, spec.total_capital / spec.min_wage)
    floor = spec.firm_count * spec.min_labor
    return floor, cap


def _bisection_start(spec):
    """Reduce clearing to one equation in ``pi_l`` and bracket its root.

    The labor constraint gives ``N_e = N_f (l_0 + 1/pi_l)``; the wage
    constraint then gives ``pi_w = 1 / (W/N_e - w_0)``; what remains is the
    employment-probability identity, solved by bisection in ``log pi_l``.
    """
    floor, cap = _employment_bounds(spec)
    if floor >= cap:
        raise InfeasibleSpec(
            f"firms need at least {floor} workers but at most {cap} can be employed"
        )
    W, nf, l0 = spec.total_capital, spec.firm_count, spec.min_labor

    def g(log_pl):
        pl = math.exp(log_pl)
        n_e = nf * (l0 + 1.0 / pl)
        p_e = n_e / spec.worker_count
        gap = W / n_e - spec.min_wage
        if p_e >= 1.0 or gap <= 0.0:
            return -math.inf
        pw = 1.0 / gap
        log_ze = pl - pw * spec.min_wage - math.log(pw)
        return log_ze - (math.log(spec.unemployment_weight) + math.log(p_e) - math.log1p(-p_e))

    # g -> -inf as N_e approaches the cap, g ~ pi_l as pi_l -> inf
    edge = math.log(nf / (cap - floor))
    offset = 1e-12
    while not math.isfinite(g(edge + offset)):
        offset *= 10.0
    lo = edge + offset
    hi = lo + 1.0
    while g(hi) <= 0.0:
        hi += 1.0
        if hi > 60:
            raise NoConvergence("could not bracket the labor price")
    if g(lo) >= 0.0:
        raise NoConvergence("clearing equation has no sign change near the employment cap")
    log_pl = optimize.brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    pl = math.exp(log_pl)
    pw = 1.0 / (W / (nf * (l0 + 1.0 / pl)) - spec.min_wage)
    return np.log([pw, pl])


def _initial_guess(spec):
    floor, cap = _employment_bounds(spec)
    n_e = min(0.5 * (floor + cap), max(floor * 2.0, 1.0)) if cap > floor else floor
    n_e = min(max(n_e, floor * 1.01), cap * 0.99)
    pl = spec.firm_count / max(n_e - spec.firm_count * spec.min_labor, 1e-9)
    pw = 1.0 / max(spec.total_capital / n_e - spec.min_wage, 1e-12)
    return np.log([pw, pl])


def solve_equilibrium(spec: LaborMarketSpec) -> MarketSolution:
    """Entropic prices that clear wages and labor statistically.

    Damped Newton in ``(log pi_w, log pi_l)`` from a heuristic start; if it
    stalls, the problem is reduced to a bracketed one-dimensional root
    (bisection/Brent) and Newton polishes from there. Residuals are driven
    to 1e-8, or to a few ulps of ``W`` and ``N_w`` when those are so large
    that 1e-8 is below double-precision resolution.
    """
    floor, cap = _employment_bounds(spec)
    if floor >= cap:
        raise InfeasibleSpec(
            f"firms need at least {floor} workers but at most {cap} can be employed"
        )
    method = "newton"
    z, iters = _newton(spec, _initial_guess(spec), FIRST_PASS_ITER)
    if z is None:
        method = "bisection+newton"
        z, more = _newton(spec, _bisection_start(spec), MAX_NEWTON_ITER - iters)
        iters += more
    if z is None:
        raise NoConvergence(f"no clearing prices after {iters} iterations")
    z = _polish(spec, z)

    prices = EntropicPrices(*np.exp(z))
    res = clearing_residuals(spec, prices)
    if np.any(np.abs(res) > residual_tolerance(spec)):
        raise NoConvergence(f"residuals {res} above {residual_tolerance(spec)}")
    _, n_e, mean_w, mean_l = _moments(spec, prices.pi_wage, prices.pi_labor)
    return MarketSolution(
        prices=prices,
        employed_count=n_e,
        unemployed_count=spec.worker_count - n_e,
        mean_wage=mean_w,
        mean_labor=mean_l,
        wage_temperature=1.0 / prices.pi_wage,
        clearing_residuals=(float(res[0]), float(res[1])),
        min_wage=spec.min_wage,
        iterations=iters,
        method=method,
    )


def sample_wages(solution: MarketSolution, count: int, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. wages ``w_0 - T_w ln(1 - U)`` for employed workers."""
    if count < 1:
        raise ValueError("count must be >= 1")
    u = rng.random(count)
    return solution.min_wage - solution.wage_temperature * np.log1p(-u)
