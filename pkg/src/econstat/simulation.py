"""Kinetic money-exchange simulation.

``N`` agents hold integer balances in minor units (1 unit = 0.01 money).
Each transaction picks an ordered pair (payer, payee) uniformly, computes a
transfer from the exchange rule, and applies it only if the boundary
condition (no debt, per-agent debt limit, reserve-ratio debt cap, or no
limit) allows it. One sweep is ``N`` attempted transactions.

Random numbers come from numpy's PCG64 generator, consumed inside the
compiled kernel. Replica ``r`` of an ensemble is seeded with ``seed ^ r``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy import stats

from . import _kernels as K
from .errors import InvalidConfig, TooFewSnapshots

RNG_NAME = "numpy.PCG64"
MINOR_PER_UNIT = 100


# --- exchange rules -------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    delta: int  # minor units

    time_reversal_symmetric = True

    def __post_init__(self):
        if self.delta <= 0:
            raise InvalidConfig(f"constant transfer must be positive, got {self.delta}")


@dataclass(frozen=True)
class UniformRandom:
    """Transfer drawn uniformly from (0, delta_max], rounded to minor units."""

    delta_max: int

    time_reversal_symmetric = True

    def __post_init__(self):
        if self.delta_max <= 0:
            raise InvalidConfig(f"delta_max must be positive, got {self.delta_max}")


@dataclass(frozen=True)
class Proportional:
    """Payer hands over ``gamma`` times its own (positive) balance."""

    gamma: float

    time_reversal_symmetric = False

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise InvalidConfig(f"gamma must lie in (0, 1), got {self.gamma}")


@dataclass(frozen=True)
class SavingPropensity:
    """Pooled-surplus exchange with saving propensity ``lam``.

    Each agent keeps ``lam_i m_i``; the rest of both balances is pooled and
    split with a uniform fraction ``eps``::

        m_i' = lam_i m_i + eps * [(1 - lam_i) m_i + (1 - lam_j) m_j]
        m_j' = m_i + m_j - m_i'

    ``lam`` may be a scalar or one value per agent. The rounding residual
    lands on the payee.
    """

    lam: float | tuple[float, ...]

    time_reversal_symmetric = False

    def __post_init__(self):
        lams = np.atleast_1d(np.asarray(self.lam, dtype=float))
        if np.any(lams < 0.0) or np.any(lams >= 1.0):
            raise InvalidConfig(f"saving propensity must lie in [0, 1), got {self.lam}")
        if lams.size > 1:
            object.__setattr__(self, "lam", tuple(float(x) for x in lams))


ExchangeRule = Constant | UniformRandom | Proportional | SavingPropensity


# --- boundary conditions --------------------------------------------------

@dataclass(frozen=True)
class NoDebt:
    pass


@dataclass(frozen=True)
class DebtLimit:
    limit: int  # minor units, >= 0

    def __post_init__(self):
        if self.limit < 0:
            raise InvalidConfig(f"debt limit must be >= 0, got {self.limit}")


@dataclass(frozen=True)
class ReserveBank:
    """Total debt capped at ``M_b (1 - R) / R``.

    A payer short of funds borrows the shortfall if the global headroom
    covers it; income received while in debt repays the debt first (both
    are automatic with signed balances).
    """

    ratio: float

    def __post_init__(self):
        if not 0.0 < self.ratio <= 1.0:
            raise InvalidConfig(f"reserve ratio must lie in (0, 1], got {self.ratio}")

    def max_debt(self, money_base: int) -> int:
        return int(math.floor(money_base * (1.0 - self.ratio) / self.ratio))


@dataclass(frozen=True)
class UnlimitedDebt:
    pass


BoundaryCondition = NoDebt | DebtLimit | ReserveBank | UnlimitedDebt


@dataclass(frozen=True)
class InterestPolicy:
    deposit_rate_per_sweep: float = 0.0
    loan_rate_per_sweep: float = 0.0
    enabled: bool = False

    def __post_init__(self):
        for name in ("deposit_rate_per_sweep", "loan_rate_per_sweep"):
            r = getattr(self, name)
            if not 0.0 <= r < 0.01:
                raise InvalidConfig(f"{name} must lie in [0, 0.01), got {r}")


@dataclass(frozen=True)
class SimConfig:
    agent_count: int = 500
    initial_balance: int = 100_000
    rule: ExchangeRule = Constant(100)
    boundary: BoundaryCondition = NoDebt()
    interest: InterestPolicy = InterestPolicy()
    seed: int = 0
    sweeps: int = 20_000
    snapshot_every: int = 100
    entropy_bin_width: int | None = None

    def validate(self) -> None:
        if self.agent_count < 2:
            raise InvalidConfig(f"need at least 2 agents, got {self.agent_count}")
        if self.sweeps < 1:
            raise InvalidConfig("sweeps must be >= 1")
        if self.snapshot_every < 1:
            raise InvalidConfig("snapshot_every must be >= 1")
        if self.initial_balance < 0 and isinstance(self.boundary, NoDebt):
            raise InvalidConfig("negative initial balance under the no-debt boundary")
        if isinstance(self.boundary, DebtLimit) and self.initial_balance < -self.boundary.limit:
            raise InvalidConfig("initial balance below the debt limit")
        if self.entropy_bin_width is not None and self.entropy_bin_width <= 0:
            raise InvalidConfig("entropy_bin_width must be positive")
        lam = getattr(self.rule, "lam", None)
        if isinstance(lam, tuple) and len(lam) != self.agent_count:
            raise InvalidConfig(
                f"{len(lam)} saving propensities for {self.agent_count} agents"
            )

    @property
    def bin_width(self) -> int:
        if self.entropy_bin_width is not None:
            return self.entropy_bin_width
        return max(abs(self.initial_balance) // 20, MINOR_PER_UNIT)

    def replica(self, r: int) -> "SimConfig":
        return replace(self, seed=self.seed ^ r)


# --- ledger ---------------------------------------------------------------

@dataclass
class AgentLedger:
    balances: np.ndarray  # int64 minor units
    total_initial: int
    time_sweeps: int = 0
    rejections: int = 0

    @property
    def total(self) -> int:
        return int(self.balances.sum())

    @property
    def debt(self) -> int:
        return int(-self.balances[self.balances < 0].sum())


def init_ledger(config: SimConfig) -> AgentLedger:
    config.validate()
    balances = np.full(config.agent_count, config.initial_balance, dtype=np.int64)
    return AgentLedger(balances=balances, total_initial=int(balances.sum()))


def _rule_args(rule, n_agents: int):
    if isinstance(rule, Constant):
        return K.RULE_CONSTANT, float(rule.delta), _NO_LAMBDAS
    if isinstance(rule, UniformRandom):
        return K.RULE_UNIFORM, float(rule.delta_max), _NO_LAMBDAS
    if isinstance(rule, Proportional):
        return K.RULE_PROPORTIONAL, float(rule.gamma), _NO_LAMBDAS
    if isinstance(rule, SavingPropensity):
        lams = np.broadcast_to(np.asarray(rule.lam, dtype=float), (n_agents,))
        return K.RULE_SAVING, 0.0, np.ascontiguousarray(lams)
    raise InvalidConfig(f"unknown exchange rule {rule!r}")


_NO_LAMBDAS = np.zeros(1)


def _boundary_args(boundary, total_initial: int):
    if isinstance(boundary, NoDebt):
        return K.BOUND_NODEBT, 0
    if isinstance(boundary, DebtLimit):
        return K.BOUND_LIMIT, int(boundary.limit)
    if isinstance(boundary, ReserveBank):
        return K.BOUND_RESERVE, boundary.max_debt(total_initial)
    if isinstance(boundary, UnlimitedDebt):
        return K.BOUND_UNLIMITED, 0
    raise InvalidConfig(f"unknown boundary condition {boundary!r}")


def transfer(ledger: AgentLedger, payer: int, payee: int, rule, boundary, rng=None) -> str:
    """Attempt one transfer between a given pair. Returns ``"applied"`` or ``"rejected"``."""
    if payer == payee:
        raise ValueError("payer and payee must differ")
    kind, param, lams = _rule_args(rule, len(ledger.balances))
    bkind, bparam = _boundary_args(boundary, ledger.total_initial)
    u = rng.random() if (rng is not None and K.needs_uniform(kind)) else 0.0
    ok, _ = K.attempt(
        ledger.balances, payer, payee, u, kind, param, lams, bkind, np.int64(bparam), np.int64(ledger.debt)
    )
    if not ok:
        ledger.rejections += 1
        return "rejected"
    return "applied"


def step_transaction(ledger: AgentLedger, rule, boundary, rng: np.random.Generator) -> str:
    """One transaction on a uniformly drawn ordered pair (same draws as the kernel)."""
    n = len(ledger.balances)
    i = int(rng.random() * n)
    j = int(rng.random() * (n - 1))
    if j >= i:
        j += 1
    return transfer(ledger, i, j, rule, boundary, rng)


def apply_interest(ledger: AgentLedger, policy: InterestPolicy) -> AgentLedger:
    """Grow deposits by ``1 + r_d`` and debts by ``1 + r_l``, rounded to minor units.

    The bank sits outside the agent system, so the total is not conserved.
    """
    if not policy.enabled:
        return ledger
    b = ledger.balances.astype(float)
    factor = np.where(b > 0, 1.0 + policy.deposit_rate_per_sweep, 1.0 + policy.loan_rate_per_sweep)
    ledger.balances[:] = np.floor(b * factor + 0.5).astype(np.int64)
    return ledger


def ledger_entropy(balances, bin_width) -> float:
    """``-sum P_k ln P_k`` over bins ``[k w, (k+1) w)``; negative bins included."""
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    b = np.asarray(balances)
    if b.size == 0:
        return 0.0
    if np.issubdtype(b.dtype, np.integer) and float(bin_width).is_integer():
        k = np.floor_divide(b, int(bin_width))
    else:
        k = np.floor(b / bin_width)
    _, counts = np.unique(k, return_counts=True)
    p = counts / b.size
    return float(-(p * np.log(p)).sum()) + 0.0


# --- traces ---------------------------------------------------------------

TRACE_FIELDS = ("sweep", "entropy", "mean", "variance", "min", "max", "total", "debt", "rejections")


@dataclass
class SimTrace:
    """Per-snapshot statistics; money fields in minor units.

    ``rejections`` counts rejected attempts since the previous snapshot.
    """

    sweep: list[int] = field(default_factory=list)
    entropy: list[float] = field(default_factory=list)
    mean: list[float] = field(default_factory=list)
    variance: list[float] = field(default_factory=list)
    min: list[int] = field(default_factory=list)
    max: list[int] = field(default_factory=list)
    total: list[int] = field(default_factory=list)
    debt: list[int] = field(default_factory=list)
    rejections: list[int] = field(default_factory=list)

    def record(self, ledger: AgentLedger, bin_width: int, rejections: int) -> None:
        b = ledger.balances
        self.sweep.append(ledger.time_sweeps)
        self.entropy.append(ledger_entropy(b, bin_width))
        self.mean.append(float(b.mean()))
        self.variance.append(float(b.astype(float).var()))
        self.min.append(int(b.min()))
        self.max.append(int(b.max()))
        self.total.append(ledger.total)
        self.debt.append(ledger.debt)
        self.rejections.append(int(rejections))

    def __len__(self):
        return len(self.sweep)

    def column(self, name: str) -> np.ndarray:
        return np.asarray(getattr(self, name))


def run_sweeps(config: SimConfig) -> tuple[AgentLedger, SimTrace]:
    """Run ``config.sweeps`` sweeps; snapshot at sweep 0 and every ``snapshot_every``.

    Interest, when enabled, is applied once after each sweep's ``N`` attempts.
    """
    ledger = init_ledger(config)
    rng = np.random.default_rng(config.seed)
    n = config.agent_count
    kind, param, lams = _rule_args(config.rule, n)
    bkind, bparam = _boundary_args(config.boundary, ledger.total_initial)
    bparam = np.int64(bparam)
    trace = SimTrace()
    trace.record(ledger, config.bin_width, 0)

    debt = np.int64(ledger.debt)
    pending = 0
    chunk = 1 if config.interest.enabled else config.snapshot_every
    while ledger.time_sweeps < config.sweeps:
        todo = min(chunk, config.sweeps - ledger.time_sweeps,
                   config.snapshot_every - ledger.time_sweeps % config.snapshot_every)
        rej, debt = K.run_attempts(ledger.balances, rng, todo * n, kind, param, lams, bkind, bparam, debt)
        ledger.time_sweeps += todo
        ledger.rejections += int(rej)
        pending += int(rej)
        if config.interest.enabled:
            apply_interest(ledger, config.interest)
            debt = np.int64(ledger.debt)
        if ledger.time_sweeps % config.snapshot_every == 0 or ledger.time_sweeps == config.sweeps:
            trace.record(ledger, config.bin_width, pending)
            pending = 0
    return ledger, trace


def run_replicas(config: SimConfig, replicas: int, workers: int = 1):
    """Independent runs with seeds ``seed ^ r``; results in replica order."""
    configs = [config.replica(r) for r in range(replicas)]
    if workers <= 1:
        return [run_sweeps(c) for c in configs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_sweeps, configs))


# --- stationarity -----------------------------------------------------------

MIN_SNAPSHOTS = 20


def detect_stationarity(trace: SimTrace) -> str:
    """Classify a trace as ``"stationary"``, ``"non_stationary"`` or ``"undetermined"``.

    Stationary: last-quarter entropy mean within 0.5% of the third quarter's,
    and the variance over the last half has no linear trend (|t| < 2, with
    the slope's standard error corrected for lag-1 autocorrelation).
    Non-stationary: variance grows linearly over the whole trace (R^2 > 0.9,
    positive slope).
    """
    n = len(trace)
    if n < MIN_SNAPSHOTS:
        raise TooFewSnapshots(f"need at least {MIN_SNAPSHOTS} snapshots, got {n}")
    s = trace.column("entropy")
    var = trace.column("variance")
    t = trace.column("sweep").astype(float)

    q = n // 4
    third, last = s[n - 2 * q : n - q].mean(), s[n - q :].mean()
    entropy_flat = abs(last - third) <= 0.005 * max(abs(third), 1e-300)

    half = slice(n - n // 2, n)
    trend_flat = abs(_trend_t(t[half], var[half])) < 2.0
    if entropy_flat and trend_flat:
        return "stationary"

    if np.ptp(var) > 0.0:
        fit = stats.linregress(t, var)
        if fit.slope > 0.0 and fit.rvalue**2 > 0.9:
            return "non_stationary"
    return "undetermined"


def _trend_t(t: np.ndarray, y: np.ndarray) -> float:
    """OLS slope t-statistic with the standard error widened for AR(1) residuals.

    Snapshots a few sweeps apart are strongly correlated, which makes the
    plain OLS standard error far too small.
    """
    if np.ptp(y) == 0.0:
        return 0.0
    fit = stats.linregress(t, y)
    resid = y - (fit.intercept + fit.slope * t)
    rho = 0.0
    if np.dot(resid, resid) > 0.0:
        rho = float(np.dot(resid[:-1], resid[1:]) / np.dot(resid, resid))
    rho = min(max(rho, 0.0), 0.99)
    se = fit.stderr * math.sqrt((1.0 + rho) / (1.0 - rho))
    if se == 0.0:
        return math.inf
    return fit.slope / se


def quarter_entropy_means(trace: SimTrace) -> np.ndarray:
    s = trace.column("entropy")
    return np.array([chunk.mean() for chunk in np.array_split(s, 4)])


def money(minor) -> float:
    return minor / MINOR_PER_UNIT


def to_minor(amount: float) -> int:
    return int(math.floor(amount * MINOR_PER_UNIT + 0.5))
