"""Command-line front end: ``econstat <subcommand> [--config FILE] [--set k=v ...] [--seed N] [--out DIR]``."""
from __future__ import annotations

import argparse
import datetime as _dt
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import analytics as an
from . import config as cf
from . import market as mk
from . import maxent as me
from . import simulation as sim
from .errors import ConfigError, EconStatError
from .io import fmt_float, fmt_money, ingest_csv, read_manifest, sha256_file, write_csv, write_manifest


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


# --- simulate -----------------------------------------------------------------

def _write_trace(path, trace: sim.SimTrace):
    rows = (
        (
            trace.sweep[k],
            fmt_float(trace.entropy[k]),
            f"{trace.mean[k] / sim.MINOR_PER_UNIT:.2f}",
            fmt_float(trace.variance[k] / sim.MINOR_PER_UNIT**2),
            fmt_money(trace.min[k]),
            fmt_money(trace.max[k]),
            fmt_money(trace.total[k]),
            fmt_money(trace.debt[k]),
            trace.rejections[k],
        )
        for k in range(len(trace))
    )
    return write_csv(path, sim.TRACE_FIELDS, rows)


def _write_balances(path, balances):
    return write_csv(path, ("agent_id", "balance"), ((i, fmt_money(b)) for i, b in enumerate(balances)))


def _write_histogram(path, balances, bin_width: int):
    b = np.asarray(balances, dtype=np.int64)
    k = np.floor_divide(b, bin_width)
    lo = int(k.min())
    counts = np.bincount(k - lo)
    width_money = bin_width / sim.MINOR_PER_UNIT
    rows = (
        (
            fmt_money((lo + i) * bin_width),
            fmt_money((lo + i + 1) * bin_width),
            int(c),
            fmt_float(c / (b.size * width_money)),
        )
        for i, c in enumerate(counts)
    )
    return write_csv(path, ("bin_left", "bin_right", "count", "density"), rows)


def run_simulate(cfg: cf.ResolvedConfig, out: Path) -> list[Path]:
    config = cf.sim_config(cfg)
    replicas = cfg["replicas"]
    hist_bin = sim.to_minor(cfg["histogram_bin"]) if cfg.get("histogram_bin") else config.bin_width
    results = sim.run_replicas(config, replicas, workers=cfg["workers"])
    outputs = []
    for r, (ledger, trace) in enumerate(results):
        suffix = "" if replicas == 1 else f"_r{r}"
        outputs.append(_write_trace(out / f"trace{suffix}.csv", trace))
        outputs.append(_write_balances(out / f"balances{suffix}.csv", ledger.balances))
        outputs.append(_write_histogram(out / f"histogram{suffix}.csv", ledger.balances, max(hist_bin, 1)))
        summary = _simulation_summary(config, ledger, trace)
        print(f"replica {r} seed {config.seed ^ r}: " + ", ".join(f"{k}={v}" for k, v in summary.items()))
    return outputs


def _simulation_summary(config, ledger, trace) -> dict:
    b = ledger.balances
    out = {
        "mean": fmt_float(b.mean() / sim.MINOR_PER_UNIT),
        "min": fmt_money(b.min()),
        "rejections": ledger.rejections,
        "entropy": fmt_float(trace.entropy[-1]),
    }
    if isinstance(config.boundary, (sim.NoDebt, sim.DebtLimit)):
        lb = 0 if isinstance(config.boundary, sim.NoDebt) else -config.boundary.limit
        fit = an.fit_exponential(b / sim.MINOR_PER_UNIT, lb / sim.MINOR_PER_UNIT)
        out["fitted_T"] = fmt_float(fit.temperature)
        out["ks"] = fmt_float(fit.ks_distance)
    if len(trace) >= sim.MIN_SNAPSHOTS:
        out["verdict"] = sim.detect_stationarity(trace)
    return out


# --- analyze --------------------------------------------------------------------

def run_analyze(cfg: cf.ResolvedConfig, out: Path) -> list[Path]:
    sample = ingest_csv(cfg["input"], cfg["column"], cfg.get("weight_column"))
    fit = an.fit_exponential(sample, cfg["lower_bound"])
    report = {
        "column": sample.unit,
        "rows": len(sample),
        "weighted": sample.weights is not None,
        "mean": fmt_float(sample.mean()),
        "exp_temperature": fmt_float(fit.temperature),
        "exp_lower_bound": fmt_float(fit.lower_bound),
        "exp_ks_distance": fmt_float(fit.ks_distance),
        "exp_sample_size": fit.sample_size,
        "exp_degenerate": fit.degenerate,
    }
    two = None
    if cfg["two_class"]:
        two = an.fit_two_class(sample)
        report.update(
            two_class_temperature=fmt_float(two.temperature),
            two_class_pareto_exponent=fmt_float(two.pareto_exponent),
            two_class_boundary=fmt_float(two.boundary),
            two_class_upper_population=fmt_float(two.upper_fraction_population),
            two_class_income_fraction=fmt_float(two.income_fraction),
        )
    outputs = []
    try:
        lorenz = an.lorenz_empirical(sample)
    except EconStatError:
        lorenz = None
    if lorenz is not None:
        report["gini"] = fmt_float(lorenz.gini)
        report["gini_exponential"] = fmt_float(an.gini_two_class(0.0))
        grid = np.linspace(0.0, 1.0, cfg["lorenz_points"])
        y_emp = lorenz(grid)
        outputs.append(write_csv(out / "lorenz.csv", ("x", "y"), ((fmt_float(x), fmt_float(y)) for x, y in zip(grid, y_emp))))
        header = ["x", "empirical", "exponential"]
        cols = [grid, y_emp, an.lorenz_closed_form(grid, 0.0)]
        if two is not None and 0.0 <= two.income_fraction < 1.0:
            header.append("two_class")
            cols.append(an.lorenz_closed_form(grid, two.income_fraction))
        outputs.append(write_csv(out / "overlay.csv", header, ([fmt_float(c[i]) for c in cols] for i in range(grid.size))))

    width = cfg.get("histogram_bin") or max(fit.temperature / 10.0, 1e-12)
    left, right, counts, density = an.histogram(sample.values, width)
    fitted = np.diff(an.exponential_cdf(np.append(left, right[-1]), fit.temperature, fit.lower_bound)) / width
    outputs.append(
        write_csv(
            out / "histogram.csv",
            ("bin_left", "bin_right", "count", "density", "fitted_density"),
            ((fmt_float(a), fmt_float(b), int(c), fmt_float(d), fmt_float(f)) for a, b, c, d, f in zip(left, right, counts, density, fitted)),
        )
    )
    outputs.append(write_csv(out / "fit.csv", ("key", "value"), report.items()))
    _write_report(out / "report.txt", "analyze", report)
    return outputs


# --- market / maxent / theory ------------------------------------------------------

def run_market(cfg: cf.ResolvedConfig, out: Path) -> list[Path]:
    spec = cf.market_spec(cfg)
    sol = mk.solve_equilibrium(spec)
    report = {
        "pi_wage": fmt_float(sol.prices.pi_wage),
        "pi_labor": fmt_float(sol.prices.pi_labor),
        "employed": fmt_float(sol.employed_count),
        "unemployed": fmt_float(sol.unemployed_count),
        "mean_wage": fmt_float(sol.mean_wage),
        "mean_labor": fmt_float(sol.mean_labor),
        "wage_temperature": fmt_float(sol.wage_temperature),
        "wage_residual": fmt_float(sol.clearing_residuals[0]),
        "labor_residual": fmt_float(sol.clearing_residuals[1]),
        "method": sol.method,
        "iterations": sol.iterations,
    }
    outputs = [write_csv(out / "solution.csv", ("key", "value"), report.items())]
    if cfg["wage_samples"] > 0:
        wages = mk.sample_wages(sol, cfg["wage_samples"], np.random.default_rng(cfg["seed"]))
        outputs.append(write_csv(out / "wages.csv", ("wage",), ((fmt_float(w),) for w in wages)))
    _write_report(out / "report.txt", "market", report)
    return outputs


def run_maxent(cfg: cf.ResolvedConfig, out: Path) -> list[Path]:
    problem = cf.maxent_problem(cfg)
    sol = me.solve_boltzmann(problem)
    rows = (
        (k, fmt_float(e), fmt_float(p), fmt_float(p * problem.total_count))
        for k, (e, p) in enumerate(zip(problem.energies, sol.probabilities))
    )
    outputs = [write_csv(out / "maxent.csv", ("state", "energy", "probability", "occupancy"), rows)]
    report = {
        "beta": fmt_float(sol.beta),
        "alpha": fmt_float(sol.alpha),
        "temperature": fmt_float(sol.temperature),
        "chemical_potential": fmt_float(sol.chemical_potential),
        "mean_energy_residual": fmt_float(sol.residual),
    }
    outputs.append(write_csv(out / "multipliers.csv", ("key", "value"), report.items()))
    _write_report(out / "report.txt", "maxent", report)
    return outputs


def run_theory(cfg: cf.ResolvedConfig, out: Path) -> list[Path]:
    f, step, t = cfg["f"], cfg["step"], cfg["temperature"]
    n = int(round(1.0 / step))
    x = np.minimum(np.arange(n + 1) * step, 1.0)
    if x[-1] < 1.0:
        x = np.append(x, 1.0)
    y = an.lorenz_closed_form(x, f)
    outputs = [write_csv(out / "lorenz.csv", ("x", "y"), ((fmt_float(a), fmt_float(b)) for a, b in zip(x, y)))]
    r_max = cfg.get("r_max") or 10.0 * t
    r = np.linspace(0.0, r_max, cfg["r_points"])
    rows = ((fmt_float(a), fmt_float(b), fmt_float(c)) for a, b, c in zip(r, an.exponential_density(r, t), an.family_income_density(r, t)))
    outputs.append(write_csv(out / "densities.csv", ("r", "individual", "family"), rows))
    report = {"f": fmt_float(f), "gini_two_class": fmt_float(an.gini_two_class(f)), "gini_family": fmt_float(3.0 / 8.0)}
    _write_report(out / "report.txt", "theory", report)
    return outputs


def _write_report(path: Path, title: str, report: dict) -> None:
    width = max(len(k) for k in report)
    lines = [f"econstat {title}"] + [f"  {k.ljust(width)}  {v}" for k, v in report.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print("\n".join(lines))


RUNNERS = {
    "simulate": run_simulate,
    "analyze": run_analyze,
    "market": run_market,
    "maxent": run_maxent,
    "theory": run_theory,
}


def dispatch(command: str, cfg: cf.ResolvedConfig, out: Path) -> list[Path]:
    """Run ``command``, write its CSVs and a manifest into ``out``; return the data files."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    started = _now()
    outputs = RUNNERS[command](cfg, out)
    meta = {
        "tool_version": __version__,
        "command": command,
        "rng": sim.RNG_NAME,
        "started": started,
        "finished": _now(),
    }
    write_manifest(out / "manifest.txt", meta, cfg.canonical_lines(), outputs)
    return outputs


def replay(manifest_path, out) -> dict[str, bool]:
    """Re-run a manifest's command and config; report which output digests match."""
    meta, text, digests = read_manifest(manifest_path)
    cfg = cf.parse_config(text, command=meta["command"])
    outputs = dispatch(meta["command"], cfg, out)
    return {p.name: digests.get(p.name) == sha256_file(p) for p in outputs}


# --- argparse -------------------------------------------------------------------------

def _parse_set(items):
    overrides = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise cf.ConfigTypeError(f"--set expects key=value, got {item!r}", key=item)
        overrides[key.strip()] = value.strip()
    return overrides


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="econstat", description=__doc__)
    p.add_argument("--version", action="version", version=f"econstat {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in cf.COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="flat key = value file")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", type=Path, default=Path("."))
    rp = sub.add_parser("replay", help="re-run a manifest and compare output digests")
    rp.add_argument("manifest", type=Path)
    rp.add_argument("--out", type=Path, default=Path("."))
    return p


def _error_line(command, exc) -> str:
    parts = [f"error command={command}", f"kind={type(exc).__name__}"]
    key = getattr(exc, "key", None)
    line = getattr(exc, "line", None)
    if key is not None:
        parts.append(f"key={key}")
    if line is not None:
        parts.append(f"line={line}")
    msg = str(exc).replace('"', "'")
    parts.append(f'message="{msg}"')
    return " ".join(parts)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "replay":
            matches = replay(args.manifest, args.out)
            for name, ok in matches.items():
                print(f"{'match' if ok else 'DIFFER'} {name}")
            return 0 if all(matches.values()) else 3
        text = args.config.read_text(encoding="utf-8") if args.config else ""
        overrides = _parse_set(args.set)
        if args.seed is not None:
            overrides["seed"] = str(args.seed)
        cfg = cf.parse_config(text, overrides, command=args.command)
        dispatch(args.command, cfg, args.out)
    except ConfigError as exc:
        print(_error_line(args.command, exc), file=sys.stderr)
        return 2
    except (EconStatError, OSError) as exc:
        print(_error_line(args.command, exc), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
