"""Command-line experiments: analytic curves, bounds, simulation and sweeps.

    eeot sweep --config fig3.cfg --out fig3.csv --workers 2
"""

import argparse
import contextlib
import csv
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from eeot.bounds import BoundConfig, best_bound, brute_force_beta, savings_lower_bound
from eeot.config import ExperimentConfig, parse_config
from eeot.detection import (
    AttackModel,
    SensorModel,
    decision_probs,
    fc_performance,
    optimal_threshold,
)
from eeot.errors import ConfigError, DegenerateChannelError
from eeot.montecarlo import TrialConfig, estimate

log = logging.getLogger("eeot")

COLUMNS = (
    "sweep_param",
    "sweep_value",
    "T_used",
    "pf_analytic",
    "pd_analytic",
    "pm_analytic",
    "pe_analytic",
    "beta_star",
    "savings_lb_beta_star",
    "ub_frac_beta_star",
    "ub_frac_beta0",
    "pe_mc",
    "pe_mc_ci",
    "pf_mc",
    "pm_mc",
    "mean_tx_mc",
    "frac_tx_mc",
    "frac_tx_mc_ci",
)
BETA_TABLE_COLUMNS = ("sweep_value", "beta", "f1", "f2", "savings_lb")

COMPONENTS = {
    "analyze": ("analytic",),
    "bounds": ("bounds",),
    "simulate": ("mc",),
    "sweep": ("analytic", "bounds", "mc"),
}

# optimal thresholds this close to an integer are treated as that integer
_SNAP = 1e-9


def resolve_threshold(point: ExperimentConfig) -> float:
    """Fixed threshold, or the Bayes-optimal one for this point's parameters."""
    if point.T is not None:
        return float(point.T)
    sensor = SensorModel(point.s, point.sigma, point.pi1)
    probs = decision_probs(sensor, AttackModel(point.alpha, point.p))
    try:
        t = optimal_threshold(point.N, probs, sensor)
    except DegenerateChannelError as exc:
        raise ConfigError(f"T = optimal is undefined here: {exc}", key="T") from None
    if abs(t - round(t)) < _SNAP:
        t = float(round(t))
    if not 0 < t < point.N:
        raise ConfigError(f"optimal threshold {t} falls outside (0, N={point.N})", key="T")
    return t


def bound_config(point: ExperimentConfig, T: float) -> BoundConfig:
    if point.mode == "assumption1":
        return BoundConfig.assumption1(point.N, T, point.pi1, point.alpha * point.p)
    sensor = SensorModel(point.s, point.sigma, point.pi1)
    probs = decision_probs(sensor, AttackModel(point.alpha, point.p))
    return BoundConfig(point.N, T, point.pi1, probs, "exact")


def _nan_row(param, value, T):
    row = dict.fromkeys(COLUMNS, math.nan)
    row.update(sweep_param=param, sweep_value=value, T_used=T)
    return row


def _sweep_rows(cfg, components, executor, beta_table):
    param = cfg.sweep.param if cfg.sweep else "none"
    rows = []
    for value, point in cfg.points():
        T = resolve_threshold(point)
        if "bounds" in components and T == math.floor(T):
            log.warning("integer threshold T=%s: the bound's H0 term uses the integer-T branch", T)
        row = _nan_row(param, value, T)
        sensor = SensorModel(point.s, point.sigma, point.pi1)
        attack = AttackModel(point.alpha, point.p)

        if "analytic" in components:
            perf = fc_performance(point.N, T, decision_probs(sensor, attack), sensor)
            row.update(
                pf_analytic=perf.pf, pd_analytic=perf.pd, pm_analytic=perf.pm, pe_analytic=perf.pe
            )

        if "bounds" in components:
            bcfg = bound_config(point, T)
            result = best_bound(bcfg)
            row.update(
                beta_star=result.beta_star,
                savings_lb_beta_star=result.savings_lb,
                ub_frac_beta_star=result.fraction_ub,
                ub_frac_beta0=(point.N - savings_lower_bound(0, bcfg)) / point.N,
            )
            if beta_table is not None:
                for beta, a, b in brute_force_beta(bcfg).per_beta:
                    beta_table.append(
                        {"sweep_value": value, "beta": beta, "f1": a, "f2": b, "savings_lb": a + b}
                    )

        if "mc" in components:
            tcfg = TrialConfig(point.N, sensor, attack, T, point.trials, point.seed)
            est = estimate(tcfg, executor=executor)
            row.update(
                pe_mc=est.pe_hat,
                pe_mc_ci=est.pe_ci,
                pf_mc=est.pf_hat,
                pm_mc=est.pm_hat,
                mean_tx_mc=est.mean_transmissions,
                frac_tx_mc=est.fraction_transmissions,
                frac_tx_mc_ci=est.fraction_ci,
            )
        rows.append(row)
    return rows


def run_sweep(cfg: ExperimentConfig, components=COMPONENTS["sweep"], workers: int = 1, beta_table=None):
    """One CSV row (a dict keyed by :data:`COLUMNS`) per sweep point, in sweep order.

    Columns a subcommand does not compute are NaN. ``beta_table``, when a
    list, collects the full per-slack bound table of every point.
    """
    cfg = cfg.validate()
    if cfg.sweep is not None and cfg.line_of(cfg.sweep.param) is not None:
        log.warning(
            "%s is swept; the fixed value on line %s is ignored",
            cfg.sweep.param,
            cfg.line_of(cfg.sweep.param),
        )
    if workers > 1 and "mc" in components:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return _sweep_rows(cfg, components, pool, beta_table)
    return _sweep_rows(cfg, components, None, beta_table)


def format_value(value) -> str:
    """Shortest decimal that parses back to the identical float."""
    if value is None:
        return "nan"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows, stream, columns=COLUMNS):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[c]) for c in columns])


def read_csv(stream):
    """Parse CSV written by :func:`write_csv` back into typed rows."""
    rows = []
    for raw in csv.DictReader(stream):
        row = {}
        for key, text in raw.items():
            try:
                row[key] = int(text)
            except ValueError:
                try:
                    row[key] = float(text)
                except ValueError:
                    row[key] = text
        rows.append(row)
    return rows


def build_parser():
    parser = argparse.ArgumentParser(
        prog="eeot",
        description="Ordered-transmission detection under data falsification attacks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "analyze": "analytic error probabilities only",
        "bounds": "transmission bounds (optionally the full per-beta table)",
        "simulate": "Monte Carlo estimates only",
        "sweep": "analytic, bounds and Monte Carlo for every sweep point",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", type=Path, help="flat key = value configuration file")
        p.add_argument("--out", help="CSV output path (default: output_path, else stdout)")
        p.add_argument("--seed", type=int, help="master seed, overrides the config")
        p.add_argument("--trials", type=int, help="Monte Carlo trials, overrides the config")
        p.add_argument("--workers", type=int, default=1, help="worker processes for Monte Carlo")
        if name == "bounds":
            p.add_argument("--beta-table", help="also write the per-beta table to this CSV")
    return parser


def load_config(args) -> ExperimentConfig:
    text = args.config.read_text() if args.config else ""
    cfg = parse_config(text)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.out is not None:
        overrides["output_path"] = args.out
    return replace(cfg, **overrides).validate()


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
    except (ConfigError, OSError) as exc:
        print(f"eeot: {exc}", file=sys.stderr)
        return 2

    beta_table = [] if getattr(args, "beta_table", None) else None
    with contextlib.ExitStack() as stack:
        # open outputs first so a bad path fails before any computation
        try:
            if cfg.output_path:
                out = stack.enter_context(open(cfg.output_path, "w", newline=""))
            else:
                out = sys.stdout
            table_out = None
            if beta_table is not None:
                table_out = stack.enter_context(open(args.beta_table, "w", newline=""))
        except OSError as exc:
            print(f"eeot: cannot write output: {exc}", file=sys.stderr)
            return 2
        try:
            rows = run_sweep(cfg, COMPONENTS[args.command], args.workers, beta_table)
        except ConfigError as exc:
            print(f"eeot: {exc}", file=sys.stderr)
            return 2
        write_csv(rows, out)
        if table_out is not None:
            write_csv(beta_table, table_out, BETA_TABLE_COLUMNS)
    return 0


if __name__ == "__main__":
    sys.exit(main())
