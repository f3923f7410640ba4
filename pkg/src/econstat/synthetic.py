"""Synthetic samples with known ground truth, for recovery checks and demos."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .analytics import Sample, income_fraction


@dataclass(frozen=True)
class TwoClassTruth:
    """Exponential bulk truncated at ``boundary`` spliced to a Pareto tail.

    The boundary is where the two densities meet, so the mixture density is
    continuous.
    """

    temperature: float
    pareto_exponent: float
    upper_share: float
    boundary: float
    mean: float

    @property
    def income_fraction(self) -> float:
        return income_fraction(self.mean, self.temperature)


def two_class_truth(temperature: float, pareto_exponent: float, upper_share: float) -> TwoClassTruth:
    if not 0.0 < upper_share < 1.0 or pareto_exponent <= 1.0:
        raise ValueError("need 0 < upper_share < 1 and pareto_exponent > 1")
    lower = 1.0 - upper_share
    c = lower / (upper_share * pareto_exponent)
    if c <= 1.0:
        raise ValueError("no continuous splice for these parameters")
    # density continuity at r_b = x T: expm1(x) = c x
    x = optimize.brentq(lambda z: math.expm1(z) - c * z, 1e-9, 10.0 * math.log(c) + 10.0, xtol=1e-15)
    rb = x * temperature
    body_mean = temperature - rb / math.expm1(x)
    tail_mean = pareto_exponent * rb / (pareto_exponent - 1.0)
    mean = lower * body_mean + upper_share * tail_mean
    return TwoClassTruth(temperature, pareto_exponent, upper_share, rb, mean)


def two_class_sample(truth: TwoClassTruth, n: int, rng: np.random.Generator) -> np.ndarray:
    n_tail = int(round(truth.upper_share * n))
    u = rng.random(n - n_tail)
    # inverse CDF of the exponential truncated to [0, r_b)
    body = -truth.temperature * np.log1p(-u * -math.expm1(-truth.boundary / truth.temperature))
    tail = truth.boundary * (1.0 - rng.random(n_tail)) ** (-1.0 / truth.pareto_exponent)
    out = np.concatenate([body, tail])
    rng.shuffle(out)
    return out


def family_sample(temperature: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Sums of two independent exponential incomes."""
    return rng.exponential(temperature, n) + rng.exponential(temperature, n)


def weighted_exponential_sample(
    temperature: float, rows: int, rng: np.random.Generator, max_weight: float = 1e3
) -> Sample:
    """Per-capita values with log-uniform population weights.

    Values are drawn so that the population-weighted distribution is
    exponential: each row's value is an independent exponential draw, and the
    weights are independent of the values.
    """
    values = rng.exponential(temperature, rows)
    weights = np.exp(rng.uniform(0.0, math.log(max_weight), rows))
    return Sample(values, weights, unit="kw_per_capita")
