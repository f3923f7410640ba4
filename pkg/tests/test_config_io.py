import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from econstat import config as cf
from econstat.errors import ConfigTypeError, EmptyData, MalformedRow, MissingColumn, MissingRequired, UnknownKey
from econstat.io import fmt_float, fmt_money, ingest_csv, read_csv, read_manifest, write_csv, write_manifest
from econstat.simulation import Constant, DebtLimit, NoDebt, ReserveBank, UniformRandom


BASE = "agents = 500\nmean_money = 1000\nrule = constant:1\n"


def test_minimal_simulate_config():
    cfg = cf.parse_config(BASE)
    sc = cf.sim_config(cfg)
    assert sc.agent_count == 500
    assert sc.initial_balance == 100_000
    assert sc.rule == Constant(100)
    assert sc.boundary == NoDebt()
    assert sc.sweeps == 20_000


def test_comments_and_blank_lines():
    cfg = cf.parse_config("# header\n\n" + BASE + "seed = 4  # trailing\n")
    assert cfg["seed"] == 4


def test_bad_reserve_ratio_names_key_and_line():
    with pytest.raises(ConfigTypeError) as info:
        cf.parse_config("reserve_ratio = 1.7")
    assert info.value.key == "reserve_ratio" and info.value.line == 1
    assert isinstance(info.value, TypeError)


def test_flags_alone_suffice():
    cfg = cf.parse_config("", {"agents": "10", "mean_money": "5", "rule": "uniform:0.5", "debt_limit": "3"})
    sc = cf.sim_config(cfg)
    assert sc.rule == UniformRandom(50)
    assert sc.boundary == DebtLimit(300)


def test_overrides_win():
    cfg = cf.parse_config(BASE + "seed = 1\n", {"seed": "2"})
    assert cfg["seed"] == 2


def test_unknown_key():
    with pytest.raises(UnknownKey) as info:
        cf.parse_config(BASE + "agnets = 3\n")
    assert info.value.key == "agnets" and info.value.line == 4


def test_missing_required():
    with pytest.raises(MissingRequired) as info:
        cf.parse_config("agents = 5\nrule = constant\n")
    assert info.value.key == "mean_money"


def test_missing_reserve_ratio_for_reserve_boundary():
    with pytest.raises(MissingRequired) as info:
        cf.parse_config(BASE + "boundary = reserve\n")
    assert info.value.key == "reserve_ratio"


@pytest.mark.parametrize(
    "line, key",
    [("agents = many", "agents"), ("rule = gift:3", "rule"), ("rule = proportional:1.5", "rule"),
     ("interest = maybe", "interest"), ("loan_rate = 0.5", "loan_rate"), ("agents = 1", "agents")],
)
def test_type_errors_name_key(line, key):
    with pytest.raises(ConfigTypeError) as info:
        cf.parse_config(BASE + line + "\n")
    assert info.value.key == key
    assert info.value.line == 4


def test_line_without_equals():
    with pytest.raises(ConfigTypeError) as info:
        cf.parse_config(BASE + "oops\n")
    assert info.value.line == 4


def test_reserve_and_builders():
    sc = cf.sim_config(cf.parse_config(BASE + "reserve_ratio = 0.8\n"))
    assert sc.boundary == ReserveBank(0.8)
    spec = cf.market_spec(cf.parse_config("workers = 100\nfirms = 2\ncapital = 50", command="market"))
    assert spec.total_capital == 100.0
    prob = cf.maxent_problem(cf.parse_config("energies = 0, 1, 2\ntotal_count = 4\ntotal_energy = 4", command="maxent"))
    assert prob.energies == (0.0, 1.0, 2.0)


def test_canonical_lines_reparse_identically():
    cfg = cf.parse_config(BASE + "debt_limit = 800\n")
    again = cf.parse_config("\n".join(cfg.canonical_lines()))
    assert again.values == cfg.values


# --- CSV --------------------------------------------------------------------------

def test_ingest_plain():
    s = ingest_csv(io.StringIO("income\n10\n20\n30\n"), "income")
    assert s.values.tolist() == [10, 20, 30] and s.weights is None and s.unit == "income"


def test_ingest_weighted_energy():
    text = "country,population,kw_per_capita\nA,1000,2.5\nB,50,11.0\nC,300,0.4\n"
    s = ingest_csv(io.StringIO(text), "kw_per_capita", "population")
    assert s.weights.tolist() == [1000, 50, 300]
    assert s.mean() == pytest.approx((2500 + 550 + 120) / 1350)


@pytest.mark.parametrize(
    "text, exc, line",
    [("income\n", EmptyData, None), ("", EmptyData, None), ("wage\n1\n", MissingColumn, None),
     ("income\n1\nabc\n", MalformedRow, 3), ("income\n1\n2\n-4\n", MalformedRow, 4),
     ("income,x\n1,2\n3\n", MalformedRow, 3), ("income\nnan\n", MalformedRow, 2)],
)
def test_ingest_errors(text, exc, line):
    with pytest.raises(exc) as info:
        ingest_csv(io.StringIO(text), "income")
    if line is not None:
        assert info.value.line == line
        assert f"line {line}" in str(info.value)


def test_money_format():
    assert fmt_money(123456) == "1234.56"
    assert fmt_money(-5) == "-0.05"
    assert fmt_money(0) == "0.00"


@given(st.integers(-10**15, 10**15))
def test_money_round_trip(minor):
    assert round(float(fmt_money(minor)) * 100) == minor


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip(x):
    assert float(fmt_float(x)) == x


def test_csv_and_manifest_round_trip(tmp_path):
    rows = [(1, fmt_float(0.1), fmt_money(-1234)), (2, fmt_float(1 / 3), fmt_money(7))]
    p = write_csv(tmp_path / "a.csv", ("id", "x", "m"), rows)
    header, back = read_csv(p)
    assert header == ["id", "x", "m"]
    assert [[int(a), float(b), float(c)] for a, b, c in back] == [[1, 0.1, -12.34], [2, 1 / 3, 0.07]]
    m = write_manifest(tmp_path / "manifest.txt", {"command": "simulate", "rng": "x"}, ["agents = 3"], [p])
    meta, text, digests = read_manifest(m)
    assert meta == {"command": "simulate", "rng": "x"}
    assert text.strip() == "agents = 3"
    assert list(digests) == ["a.csv"] and len(digests["a.csv"]) == 64
