"""Wage temperature and employment as total capital varies.

    python3 scripts/labor_market.py --workers 1000 --firms 20
"""
import argparse
from pathlib import Path

import numpy as np

from econstat.io import fmt_float, write_csv
from econstat.market import LaborMarketSpec, solve_equilibrium


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--workers", type=int, default=1000)
    p.add_argument("--firms", type=int, default=20)
    p.add_argument("--min-wage", type=float, default=1.0)
    p.add_argument("--unemployment-weight", type=float, default=10.0)
    p.add_argument("--out", type=Path, default=Path("runs/market"))
    args = p.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    rows = []
    for k in np.geomspace(2 * args.min_wage + 1, 1e4, 25):
        spec = LaborMarketSpec(args.workers, args.firms, float(k), args.min_wage,
                               unemployment_weight=args.unemployment_weight)
        sol = solve_equilibrium(spec)
        rows.append((spec.total_capital, sol.wage_temperature, sol.mean_wage, sol.employed_count,
                     sol.prices.pi_wage, sol.prices.pi_labor))
        print(f"W={spec.total_capital:11.1f}  T_w={sol.wage_temperature:9.3f}  <w>={sol.mean_wage:9.3f}  "
              f"N_e={sol.employed_count:8.2f}  ({sol.method}, {sol.iterations} it)")
    write_csv(args.out / "capital_sweep.csv",
              ("total_capital", "wage_temperature", "mean_wage", "employed", "pi_wage", "pi_labor"),
              ([fmt_float(v) for v in row] for row in rows))


if __name__ == "__main__":
    main()
