"""Flat ``key = value`` configuration with per-subcommand schemas.

Every subcommand declares its keys; anything else is an error. Values from
``overrides`` (``--set key=value`` and friends) replace file values. Errors
carry the offending key and, for file values, the line number.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import ConfigTypeError, InvalidConfig, MissingRequired, UnknownKey
from . import simulation as sim
from .market import LaborMarketSpec
from .maxent import MaxEntProblem

COMMANDS = ("simulate", "analyze", "market", "maxent", "theory")


# --- value parsers ----------------------------------------------------------

def _int(text: str) -> int:
    return int(text)


def _float(text: str) -> float:
    x = float(text)
    if not math.isfinite(x):
        raise ValueError(f"not a finite number: {text}")
    return x


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text}")


def _str(text: str) -> str:
    if not text:
        raise ValueError("empty value")
    return text


def _float_list(text: str) -> tuple[float, ...]:
    items = [t for t in text.replace(" ", ",").split(",") if t]
    if not items:
        raise ValueError("empty list")
    return tuple(_float(t) for t in items)


RULE_NAMES = ("constant", "uniform", "proportional", "saving")
BOUNDARY_NAMES = ("nodebt", "debt_limit", "reserve", "unlimited")


def _rule(text: str) -> tuple[str, float]:
    name, _, arg = text.partition(":")
    name = name.strip().lower()
    if name not in RULE_NAMES:
        raise ValueError(f"rule must be one of {', '.join(RULE_NAMES)}")
    value = _float(arg) if arg.strip() else math.nan
    if name in ("constant", "uniform") and not (value > 0 or math.isnan(value)):
        raise ValueError("transfer amount must be positive")
    if name == "proportional" and not 0 < value < 1:
        raise ValueError("proportional rule needs gamma in (0, 1)")
    if name == "saving" and not 0 <= value < 1:
        raise ValueError("saving rule needs lambda in [0, 1)")
    return name, value


def _boundary(text: str) -> str:
    t = text.strip().lower()
    if t not in BOUNDARY_NAMES:
        raise ValueError(f"boundary must be one of {', '.join(BOUNDARY_NAMES)}")
    return t


def _check(pred: Callable[[Any], bool], what: str):
    def validate(v):
        if not pred(v):
            raise ValueError(what)
    return validate


@dataclass(frozen=True)
class Key:
    parse: Callable[[str], Any]
    required: bool = False
    default: Any = None
    validate: Callable[[Any], None] | None = None
    help: str = ""


_positive = _check(lambda v: v > 0, "must be positive")
_non_negative = _check(lambda v: v >= 0, "must be >= 0")
_at_least_one = _check(lambda v: v >= 1, "must be >= 1")
_at_least_two = _check(lambda v: v >= 2, "must be >= 2")
_rate = _check(lambda v: 0 <= v < 0.01, "must lie in [0, 0.01) per sweep")
_unit_open = _check(lambda v: 0 < v <= 1, "must lie in (0, 1]")
_fraction = _check(lambda v: 0 <= v < 1, "must lie in [0, 1)")

SCHEMAS: dict[str, dict[str, Key]] = {
    "simulate": {
        "agents": Key(_int, required=True, validate=_at_least_two),
        "mean_money": Key(_float, required=True, validate=_non_negative),
        "rule": Key(_rule, required=True),
        "boundary": Key(_boundary),
        "debt_limit": Key(_float, validate=_non_negative),
        "reserve_ratio": Key(_float, validate=_unit_open),
        "interest": Key(_bool, default=False),
        "deposit_rate": Key(_float, default=0.0, validate=_rate),
        "loan_rate": Key(_float, default=0.0, validate=_rate),
        "sweeps": Key(_int, default=20_000, validate=_at_least_one),
        "snapshot_every": Key(_int, validate=_at_least_one),
        "entropy_bin": Key(_float, validate=_positive),
        "histogram_bin": Key(_float, validate=_positive),
        "replicas": Key(_int, default=1, validate=_at_least_one),
        "workers": Key(_int, default=1, validate=_at_least_one),
        "seed": Key(_int, default=0, validate=_non_negative),
    },
    "analyze": {
        "input": Key(_str, required=True),
        "column": Key(_str, required=True),
        "weight_column": Key(_str),
        "lower_bound": Key(_float, default=0.0),
        "two_class": Key(_bool, default=False),
        "lorenz_points": Key(_int, default=101, validate=_at_least_two),
        "histogram_bin": Key(_float, validate=_positive),
    },
    "market": {
        "workers": Key(_int, required=True, validate=_at_least_one),
        "firms": Key(_int, required=True, validate=_at_least_one),
        "capital": Key(_float, required=True, validate=_positive),
        "min_wage": Key(_float, default=0.0, validate=_non_negative),
        "min_labor": Key(_float, default=1.0, validate=_positive),
        "unemployment_weight": Key(_float, default=1.0, validate=_positive),
        "wage_samples": Key(_int, default=0, validate=_non_negative),
        "seed": Key(_int, default=0, validate=_non_negative),
    },
    "maxent": {
        "energies": Key(_float_list, required=True),
        "total_count": Key(_int, required=True, validate=_at_least_one),
        "total_energy": Key(_float, required=True),
    },
    "theory": {
        "f": Key(_float, default=0.0, validate=_fraction),
        "step": Key(_float, default=0.01, validate=_check(lambda v: 0 < v <= 1, "must lie in (0, 1]")),
        "temperature": Key(_float, default=1.0, validate=_positive),
        "r_max": Key(_float, validate=_positive),
        "r_points": Key(_int, default=201, validate=_at_least_two),
    },
}


@dataclass
class ResolvedConfig:
    command: str
    values: dict[str, Any]
    raw: dict[str, str] = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        v = self.values.get(key)
        return default if v is None else v

    def canonical_lines(self) -> list[str]:
        """``key = value`` for every resolved key (defaults included), sorted."""
        lines = []
        for k in sorted(self.values):
            if k in self.raw:
                text = self.raw[k]
            elif self.values[k] is None:
                continue
            elif isinstance(self.values[k], bool):
                text = "true" if self.values[k] else "false"
            else:
                text = str(self.values[k])
            lines.append(f"{k} = {text}")
        return lines


def _split_lines(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        key, sep, value = body.partition("=")
        if not sep:
            raise ConfigTypeError(f"expected 'key = value', got {line.strip()!r}", line=lineno)
        yield lineno, key.strip(), value.strip()


def parse_config(text: str, overrides: dict[str, str] | None = None, command: str = "simulate") -> ResolvedConfig:
    """Parse, type and validate config text for ``command``; overrides win."""
    if command not in SCHEMAS:
        raise UnknownKey(f"unknown command {command!r}", key=command)
    schema = SCHEMAS[command]
    entries: dict[str, tuple[str, int | None]] = {}
    for lineno, key, value in _split_lines(text or ""):
        if key not in schema:
            raise UnknownKey(f"unknown key {key!r} for {command}", key=key, line=lineno)
        entries[key] = (value, lineno)
    for key, value in (overrides or {}).items():
        if key not in schema:
            raise UnknownKey(f"unknown key {key!r} for {command}", key=key)
        entries[key] = (str(value).strip(), None)

    values: dict[str, Any] = {}
    raw: dict[str, str] = {}
    for key, (text_value, lineno) in entries.items():
        spec = schema[key]
        try:
            v = spec.parse(text_value)
            if spec.validate is not None:
                spec.validate(v)
        except ValueError as exc:
            raise ConfigTypeError(f"bad value {text_value!r} for {key!r}: {exc}", key=key, line=lineno) from None
        values[key] = v
        raw[key] = text_value
    for key, spec in schema.items():
        if key in values:
            continue
        if spec.required:
            raise MissingRequired(f"missing required key {key!r} for {command}", key=key)
        values[key] = spec.default
    resolved = ResolvedConfig(command, values, raw)
    if command == "simulate":
        _check_simulate(resolved, entries)
    return resolved


def _line_of(entries, key):
    return entries.get(key, (None, None))[1]


def _check_simulate(cfg: ResolvedConfig, entries) -> None:
    boundary = cfg.values["boundary"]
    if boundary is None:
        if cfg.values["reserve_ratio"] is not None:
            boundary = "reserve"
        elif cfg.values["debt_limit"] is not None:
            boundary = "debt_limit"
        else:
            boundary = "nodebt"
        cfg.values["boundary"] = boundary
    if boundary == "debt_limit" and cfg.values["debt_limit"] is None:
        raise MissingRequired("boundary 'debt_limit' needs key 'debt_limit'", key="debt_limit")
    if boundary == "reserve" and cfg.values["reserve_ratio"] is None:
        raise MissingRequired("boundary 'reserve' needs key 'reserve_ratio'", key="reserve_ratio")
    name, value = cfg.values["rule"]
    if math.isnan(value) and name in ("proportional", "saving"):
        raise ConfigTypeError(f"rule {name!r} needs a parameter", key="rule", line=_line_of(entries, "rule"))


# --- builders -----------------------------------------------------------------

def sim_config(cfg: ResolvedConfig) -> sim.SimConfig:
    v = cfg.values
    initial = sim.to_minor(v["mean_money"])
    name, arg = v["rule"]
    if name == "constant":
        rule = sim.Constant(sim.to_minor(1.0 if math.isnan(arg) else arg))
    elif name == "uniform":
        rule = sim.UniformRandom(sim.to_minor(arg) if not math.isnan(arg) else max(initial // 10, 1))
    elif name == "proportional":
        rule = sim.Proportional(arg)
    else:
        rule = sim.SavingPropensity(arg)

    b = v["boundary"]
    if b == "nodebt":
        boundary = sim.NoDebt()
    elif b == "debt_limit":
        boundary = sim.DebtLimit(sim.to_minor(v["debt_limit"]))
    elif b == "reserve":
        boundary = sim.ReserveBank(v["reserve_ratio"])
    else:
        boundary = sim.UnlimitedDebt()

    interest = sim.InterestPolicy(v["deposit_rate"], v["loan_rate"], bool(v["interest"]))
    snapshot_every = v["snapshot_every"] or max(1, v["sweeps"] // 100)
    bin_width = sim.to_minor(v["entropy_bin"]) if v["entropy_bin"] is not None else None
    try:
        config = sim.SimConfig(
            agent_count=v["agents"],
            initial_balance=initial,
            rule=rule,
            boundary=boundary,
            interest=interest,
            seed=v["seed"],
            sweeps=v["sweeps"],
            snapshot_every=snapshot_every,
            entropy_bin_width=bin_width if bin_width else None,
        )
        config.validate()
    except InvalidConfig as exc:
        raise ConfigTypeError(str(exc)) from None
    return config


def market_spec(cfg: ResolvedConfig) -> LaborMarketSpec:
    v = cfg.values
    return LaborMarketSpec(
        worker_count=v["workers"],
        firm_count=v["firms"],
        capital_per_firm=v["capital"],
        min_wage=v["min_wage"],
        min_labor=v["min_labor"],
        unemployment_weight=v["unemployment_weight"],
    )


def maxent_problem(cfg: ResolvedConfig) -> MaxEntProblem:
    v = cfg.values
    return MaxEntProblem(v["energies"], v["total_count"], v["total_energy"])
