"""Fitting and inequality measures for money, income and energy samples.

Exponential and Pareto fits are maximum likelihood on raw values. Lorenz
curves and Gini coefficients accept optional per-row weights (e.g. country
populations), in which case each row stands for ``weight`` identical people.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from .errors import (
    AllZeroValues,
    DegenerateTail,
    DomainError,
    EmptySample,
    TooFewValues,
)

MIN_EXPONENTIAL_VALUES = 10
MIN_TWO_CLASS_VALUES = 1000
MIN_TAIL_VALUES = 50


@dataclass(frozen=True)
class Sample:
    values: np.ndarray
    weights: np.ndarray | None = None
    unit: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "values", values)
        if self.weights is not None:
            weights = np.asarray(self.weights, dtype=float)
            if weights.shape != values.shape:
                raise ValueError("weights must have the same length as values")
            if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
                raise ValueError("weights must be positive and finite")
            object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.values.size

    def mean(self) -> float:
        if self.weights is None:
            return float(self.values.mean())
        return float(np.average(self.values, weights=self.weights))


def _as_sample(sample) -> Sample:
    return sample if isinstance(sample, Sample) else Sample(np.asarray(sample, dtype=float))


@dataclass(frozen=True)
class ExponentialFit:
    temperature: float
    lower_bound: float
    ks_distance: float
    sample_size: int
    degenerate: bool = False

    def cdf(self, x):
        return exponential_cdf(x, self.temperature, self.lower_bound)


@dataclass(frozen=True)
class TwoClassFit:
    temperature: float
    pareto_exponent: float
    boundary: float
    upper_fraction_population: float
    income_fraction: float
    mean: float
    ks_lower: float = math.nan
    ks_upper: float = math.nan
    ks_distance: float = math.nan


@dataclass(frozen=True)
class LorenzCurve:
    x: np.ndarray
    y: np.ndarray
    gini: float

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist()))

    def __call__(self, x):
        return np.interp(x, self.x, self.y)


# --- goodness of fit ----------------------------------------------------------

def ks_distance(sample, cdf: Callable, weights=None) -> float:
    """Sup-norm distance between the (weighted) empirical CDF and ``cdf``."""
    if isinstance(sample, Sample):
        values, weights = sample.values, sample.weights if weights is None else weights
    else:
        values = np.asarray(sample, dtype=float)
    if values.size == 0:
        raise EmptySample("KS distance of an empty sample")
    order = np.argsort(values, kind="stable")
    w = None if weights is None else np.asarray(weights, dtype=float)[order]
    return _ks_sorted(values[order], cdf, w)


def _ks_sorted(x: np.ndarray, cdf: Callable, w=None) -> float:
    if w is None:
        n = x.size
        upper = np.arange(1, n + 1) / n
        lower = np.arange(0, n) / n
    else:
        c = np.cumsum(w)
        upper = c / c[-1]
        lower = np.concatenate(([0.0], upper[:-1]))
    f = np.asarray(cdf(x), dtype=float)
    return float(max(np.max(upper - f), np.max(f - lower), 0.0))


def exponential_cdf(x, temperature: float, lower_bound: float = 0.0):
    x = np.asarray(x, dtype=float)
    if temperature <= 0:
        return (x >= lower_bound).astype(float)
    return np.where(x < lower_bound, 0.0, -np.expm1(-(x - lower_bound) / temperature))


# --- exponential ------------------------------------------------------------------

def fit_exponential(sample, lower_bound: float = 0.0) -> ExponentialFit:
    """Shifted-exponential MLE on values at or above ``lower_bound``.

    ``T = mean(values) - lower_bound``. A zero temperature (all retained
    values equal to the bound) is returned with ``degenerate=True``.
    """
    s = _as_sample(sample)
    keep = s.values >= lower_bound
    x = s.values[keep]
    if x.size < MIN_EXPONENTIAL_VALUES:
        raise TooFewValues(
            f"{x.size} values >= {lower_bound}; need at least {MIN_EXPONENTIAL_VALUES}"
        )
    w = None if s.weights is None else s.weights[keep]
    mean = float(np.average(x, weights=w))
    temperature = max(mean - lower_bound, 0.0)
    degenerate = temperature <= 1e-12 * max(1.0, abs(lower_bound))
    if degenerate:
        temperature = 0.0
    ks = ks_distance(x, lambda v: exponential_cdf(v, temperature, lower_bound), weights=w)
    return ExponentialFit(temperature, lower_bound, ks, int(x.size), degenerate)


# --- two-class decomposition -----------------------------------------------------

def _truncated_exponential_mean(temperature: float, cut: float) -> float:
    z = cut / temperature
    if z > 700:
        return temperature
    return temperature - cut / math.expm1(z)


def fit_truncated_exponential(values: np.ndarray, cut: float) -> float:
    """MLE temperature of an exponential observed only on ``[0, cut)``.

    Solves ``T - cut / (exp(cut/T) - 1) = mean(values)``; the left side
    rises monotonically from 0 to ``cut/2`` as ``T`` goes from 0 to infinity.
    """
    m = float(np.mean(values))
    if not 0.0 < m < cut / 2.0:
        raise DegenerateTail(f"segment mean {m} incompatible with truncation at {cut}")

    def g(log_t):
        return _truncated_exponential_mean(math.exp(log_t), cut) - m

    lo, hi = math.log(m) - 1.0, math.log(m) + 1.0
    while g(hi) < 0.0:
        hi += 1.0
    while g(lo) > 0.0:
        lo -= 1.0
    return math.exp(optimize.brentq(g, lo, hi, xtol=1e-14, rtol=1e-14))


def _truncated_exponential_cdf(x, temperature, cut):
    return np.clip(np.expm1(-np.asarray(x) / temperature) / math.expm1(-cut / temperature), 0.0, 1.0)


def fit_pareto(values: np.ndarray, boundary: float) -> float:
    """Hill/MLE exponent of ``C(r) = (r / boundary)^-alpha`` for ``r >= boundary``."""
    logs = np.log(np.asarray(values) / boundary)
    total = float(logs.sum())
    if total <= 0.0:
        raise DegenerateTail("all tail values equal the boundary")
    return values.size / total


def _two_class_cdf(v, temperature, alpha, boundary, tail_share):
    body = (1.0 - tail_share) * _truncated_exponential_cdf(np.minimum(v, boundary), temperature, boundary)
    tail = (1.0 - tail_share) + tail_share * (1.0 - (np.maximum(v, boundary) / boundary) ** -alpha)
    return np.where(v < boundary, body, tail)


def fit_two_class(sample, percentiles=None) -> TwoClassFit:
    """Exponential bulk plus Pareto tail.

    Candidate class boundaries are sample percentiles from the 80th to the
    99.9th. Below a candidate the temperature is the MLE of an exponential
    truncated at the candidate; above it the Pareto exponent is the Hill
    estimate. The spliced CDF (body and tail weighted by their sample
    shares) is compared with the whole sample, and the candidate with the
    smallest KS distance wins. The upper-class income fraction is
    ``f = (<r> - T_r) / <r>`` with ``<r>`` the full-sample mean.
    """
    s = _as_sample(sample)
    r = np.sort(s.values)
    n = r.size
    if n < MIN_TWO_CLASS_VALUES:
        raise TooFewValues(f"two-class fit needs >= {MIN_TWO_CLASS_VALUES} values, got {n}")
    if percentiles is None:
        percentiles = np.linspace(80.0, 99.9, 200)
    candidates = np.unique(np.percentile(r, percentiles))

    best = None
    for rb in candidates:
        if rb <= 0.0:
            continue
        split = int(np.searchsorted(r, rb, side="left"))
        body, tail = r[:split], r[split:]
        if tail.size < MIN_TAIL_VALUES or body.size < MIN_EXPONENTIAL_VALUES:
            continue
        try:
            t_r = fit_truncated_exponential(body, rb)
            alpha = fit_pareto(tail, rb)
        except DegenerateTail:
            continue
        share = tail.size / n
        score = _ks_sorted(r, lambda v: _two_class_cdf(v, t_r, alpha, rb, share))
        if best is None or score < best[0]:
            best = (score, rb, t_r, alpha, split)
    if best is None:
        raise DegenerateTail(f"fewer than {MIN_TAIL_VALUES} tail points at every candidate boundary")

    score, rb, t_r, alpha, split = best
    body, tail = r[:split], r[split:]
    mean = float(r.mean())
    return TwoClassFit(
        temperature=t_r,
        pareto_exponent=alpha,
        boundary=float(rb),
        upper_fraction_population=tail.size / n,
        income_fraction=income_fraction(mean, t_r),
        mean=mean,
        ks_lower=_ks_sorted(body, lambda v: _truncated_exponential_cdf(v, t_r, rb)),
        ks_upper=_ks_sorted(tail, lambda v: 1.0 - (v / rb) ** -alpha),
        ks_distance=score,
    )


def income_fraction(mean: float, temperature: float) -> float:
    """Share of total income above the exponential bulk, ``(<r> - T_r) / <r>``."""
    return (mean - temperature) / mean


# --- Lorenz / Gini ------------------------------------------------------------------

def lorenz_empirical(sample) -> LorenzCurve:
    """Lorenz curve with ``(0, 0)`` prepended; Gini from the trapezoidal area.

    Each row contributes its weight to the population axis and
    ``weight * value`` to the income axis.
    """
    s = _as_sample(sample)
    if len(s) == 0:
        raise EmptySample("Lorenz curve of an empty sample")
    order = np.argsort(s.values, kind="stable")
    v = s.values[order]
    w = np.ones_like(v) if s.weights is None else s.weights[order]
    if np.any(v < 0):
        raise DomainError("Lorenz curve needs non-negative values")
    mass = np.cumsum(w * v)
    if mass[-1] <= 0.0:
        raise AllZeroValues("all values are zero; Gini is taken as 0")
    pop = np.cumsum(w)
    x = np.concatenate(([0.0], pop / pop[-1]))
    y = np.concatenate(([0.0], mass / mass[-1]))
    x[-1] = y[-1] = 1.0
    area = float(np.sum(np.diff(x) * (y[1:] + y[:-1])) / 2.0)
    return LorenzCurve(x=x, y=y, gini=1.0 - 2.0 * area)


def gini(sample) -> float:
    """Gini coefficient of a sample; 0 when every value is zero."""
    try:
        return lorenz_empirical(sample).gini
    except AllZeroValues:
        return 0.0


def lorenz_closed_form(x, f: float = 0.0):
    """Lorenz curve of an exponential bulk plus a vanishing-population tail.

    ``y = (1 - f) [x + (1 - x) ln(1 - x)] + f * step(x - 1)`` with the step
    equal to 1 at ``x = 1``, so the curve ends at ``(1, 1)`` after a jump of
    height ``f``. ``f = 0`` is the pure exponential curve.
    """
    if not 0.0 <= f < 1.0:
        raise DomainError(f"f must lie in [0, 1), got {f}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0) or np.any(xa > 1.0) or np.any(np.isnan(xa)):
        raise DomainError("x must lie in [0, 1]")
    one_minus = 1.0 - xa
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = np.where(one_minus > 0.0, one_minus * np.log(np.where(one_minus > 0.0, one_minus, 1.0)), 0.0)
    y = (1.0 - f) * (xa + tail) + f * (xa >= 1.0)
    return float(y) if np.ndim(y) == 0 else y


def gini_two_class(f: float) -> float:
    """Gini coefficient ``(1 + f) / 2`` of the closed-form two-class Lorenz curve."""
    if not 0.0 <= f < 1.0:
        raise DomainError(f"f must lie in [0, 1), got {f}")
    return (1.0 + f) / 2.0


def family_income_density(r, temperature: float):
    """Density of the sum of two i.i.d. exponential incomes: ``r e^{-r/T} / T^2``."""
    if temperature <= 0:
        raise DomainError(f"temperature must be positive, got {temperature}")
    ra = np.asarray(r, dtype=float)
    if np.any(ra < 0):
        raise DomainError("income must be non-negative")
    d = ra / temperature**2 * np.exp(-ra / temperature)
    return float(d) if np.ndim(d) == 0 else d


def exponential_density(r, temperature: float):
    ra = np.asarray(r, dtype=float)
    d = np.exp(-ra / temperature) / temperature
    return float(d) if np.ndim(d) == 0 else d


def histogram(values, bin_width: float, origin: float | None = None):
    """Counts and densities over ``[origin + k w, origin + (k+1) w)`` bins."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise EmptySample("histogram of an empty sample")
    if origin is None:
        origin = math.floor(v.min() / bin_width) * bin_width
    k = np.floor((v - origin) / bin_width).astype(np.int64)
    counts = np.bincount(k)
    left = origin + bin_width * np.arange(counts.size)
    density = counts / (v.size * bin_width)
    return left, left + bin_width, counts, density
