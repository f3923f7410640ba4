"""Variance growth without a debt floor, and the effect of interest.

Prints the stationarity verdict and the variance trend for unlimited debt,
and for a debt-limited economy with and without a deposit/loan spread.

    python3 scripts/debt_instability.py
"""
import argparse
from pathlib import Path

from scipy import stats

from econstat.io import fmt_float, write_csv
from econstat.simulation import Constant, DebtLimit, InterestPolicy, SimConfig, UnlimitedDebt, detect_stationarity, run_sweeps


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sweeps", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("runs/debt"))
    args = p.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    cases = {
        "unlimited": dict(boundary=UnlimitedDebt()),
        "limit_800": dict(boundary=DebtLimit(80_000), rule=Constant(1_000)),
        "limit_800_interest": dict(boundary=DebtLimit(80_000), rule=Constant(1_000),
                                   interest=InterestPolicy(1e-4, 2e-4, enabled=True)),
    }
    for name, kw in cases.items():
        cfg = SimConfig(**{**dict(agent_count=500, initial_balance=100_000, rule=Constant(100), seed=args.seed,
                                  sweeps=args.sweeps, snapshot_every=args.sweeps // 100), **kw})
        _, trace = run_sweeps(cfg)
        fit = stats.linregress(trace.column("sweep"), trace.column("variance") / 1e4)
        print(f"{name:20s} verdict={detect_stationarity(trace):15s} variance slope={fit.slope:9.3f} $^2/sweep "
              f"R^2={fit.rvalue**2:.3f}  final total={trace.total[-1] / 100:.2f}")
        write_csv(args.out / f"{name}_trace.csv", ("sweep", "variance", "total", "entropy"),
                  ((s, fmt_float(v / 1e4), fmt_float(t / 100), fmt_float(e))
                   for s, v, t, e in zip(trace.sweep, trace.variance, trace.total, trace.entropy)))


if __name__ == "__main__":
    main()
