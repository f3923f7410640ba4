"""Money and debt under a required reserve ratio.

For each ratio R the total debt saturates at M_b (1 - R) / R. The script
reports per-agent positive money and debt next to the exponential scales
fitted separately to positive balances and to debts, and to the scales of
the maximum-entropy law with separate money and debt constraints
(an asymmetric Laplace density continuous at zero).

    python3 scripts/reserve_ratio.py --ratios 0.5 0.8 0.9
"""
import argparse
import math
from pathlib import Path

import numpy as np

from econstat.analytics import fit_exponential
from econstat.io import fmt_float, write_csv
from econstat.simulation import Constant, ReserveBank, SimConfig, run_replicas


def laplace_scales(money, debt):
    # c T+^2 = M/N, c T-^2 = D/N, c (T+ + T-) = 1
    ratio = math.sqrt(money / debt)
    t_plus = money * (1 + 1 / ratio)
    return t_plus, t_plus / ratio


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--ratios", type=float, nargs="+", default=[0.5, 0.8, 0.9])
    p.add_argument("--agents", type=int, default=500)
    p.add_argument("--mean-money", type=float, default=1000.0)
    p.add_argument("--transfer", type=float, default=10.0)
    p.add_argument("--sweeps", type=int, default=60_000)
    p.add_argument("--replicas", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("runs/reserve"))
    args = p.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    rows = []
    for r in args.ratios:
        cfg = SimConfig(agent_count=args.agents, initial_balance=round(args.mean_money * 100),
                        rule=Constant(round(args.transfer * 100)), boundary=ReserveBank(r),
                        seed=args.seed, sweeps=args.sweeps, snapshot_every=args.sweeps // 100)
        b = np.concatenate([led.balances for led, _ in run_replicas(cfg, args.replicas)]) / 100.0
        n = b.size
        money, debt = b[b > 0].sum() / n, -b[b < 0].sum() / n
        t_pos = fit_exponential(b[b > 0]).temperature
        t_neg = fit_exponential(-b[b < 0]).temperature
        lp, lm = laplace_scales(money, debt)
        print(f"R={r:.2f}  M/N={money:8.2f} (M_b/RN={args.mean_money / r:8.2f})  D/N={debt:7.2f} "
              f"(M_b(1-R)/RN={args.mean_money * (1 - r) / r:7.2f})  fitted T+={t_pos:8.2f} T-={t_neg:8.2f}  "
              f"Laplace T+={lp:8.2f} T-={lm:8.2f}")
        rows.append((r, money, debt, t_pos, t_neg, lp, lm))
        np.savetxt(args.out / f"balances_R{r:g}.csv", b, fmt="%.2f", header="balance", comments="")
    write_csv(args.out / "summary.csv",
              ("ratio", "money_per_agent", "debt_per_agent", "fit_t_plus", "fit_t_minus", "laplace_t_plus", "laplace_t_minus"),
              ([fmt_float(v) for v in row] for row in rows))


if __name__ == "__main__":
    main()
