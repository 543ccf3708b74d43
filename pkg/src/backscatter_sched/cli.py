"""Command-line front end.

Every command writes one CSV table (to ``--out`` or stdout). With
``--plot`` a PNG with the same stem is rendered next to the CSV.

Exit statuses: 0 success, 2 infeasible scenario, 3 numerical failure,
64 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import plots
from .calibration import baseline_of
from .channel import SnrMapping, dbm_to_watts, path_loss, snr_of_power, watts_to_dbm
from .errors import DomainError, NumericalError
from .outage import (
    invert_threshold,
    outage_monte_carlo,
    outage_probability,
    transmit_power_threshold,
)
from .power_model import causality_satisfied
from .scenario import Scenario, ScenarioError, default_scenario, load_scenario
from .scheduler import (
    GridSpec,
    narrow_surface,
    solve_narrow_grid,
    solve_wide_grid,
    wide_surface,
)
from .sensing import detect, measure_bank, synthetic_bank

log = logging.getLogger("backscatter_sched")

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class Infeasible(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    # 12 significant digits hides last-ulp noise such as 0.7799999999999999
    return f"{x:.12g}"


class Table:
    def __init__(self, header):
        self.header = list(header)
        self.rows = []

    def add(self, *values):
        if len(values) != len(self.header):
            raise ValueError("row width does not match header")
        self.rows.append([fmt(v) for v in values])

    def render(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        w.writerows(self.rows)
        return buf.getvalue()


def _emit(table: Table, args):
    text = table.render()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _plot_path(args):
    if not args.plot:
        return None
    if not args.out:
        raise UsageError("--plot needs --out to place the figure")
    return Path(args.out).with_suffix(".png")


def _scenario(args) -> Scenario:
    sc = load_scenario(args.scenario) if args.scenario else default_scenario()
    if args.grid is not None:
        sc = replace(sc, grid=GridSpec(args.grid, sc.grid.refine_levels))
    return sc


# -- optimisation commands -------------------------------------------------

def _narrow_params(sc, with_sensing):
    p = sc.params
    return p if with_sensing else baseline_of(p, sc.baseline_eta, sc.baseline_beta)


def _wide_params(sc, with_cs):
    p = sc.params
    return p if with_cs else baseline_of(p, sc.baseline_eta, sc.baseline_beta)


def cmd_optimize_narrow(args):
    sc = _scenario(args)
    variant = args.variant or sc.variant
    p = _narrow_params(sc, not args.no_sensing)
    surf = narrow_surface(p, sc.grid, variant)
    res = solve_narrow_grid(p, sc.grid, variant)
    table = Table(["is_optimum", "kappa", "mu", "tau", "rate_bits", "rate_bps", "margin_j"])
    for i in np.flatnonzero(surf.feasible):
        table.add(0, surf.kappa[i], surf.mu[i], surf.tau[i], surf.rate[i], surf.rate[i] / p.T,
                  surf.margin[i])
    if not res.feasible:
        _emit(table, args)
        raise Infeasible("no feasible narrowband schedule")
    if not causality_satisfied(res.budget):
        raise NumericalError("optimum violates energy causality")
    s = res.schedule
    table.add(1, s.kappa, s.mu, s.tau, res.rate, res.rate / p.T, res.budget.margin)
    _emit(table, args)
    log.info("narrowband optimum kappa=%.4g mu=%.4g tau=%.4g rate=%.6g bits/block",
             s.kappa, s.mu, s.tau, res.rate)
    if (path := _plot_path(args)):
        f = surf.feasible
        plots.rate_surface(path, surf.kappa[f], surf.mu[f], surf.rate[f], (s.kappa, s.mu),
                           "sensing fraction kappa", "harvest fraction mu",
                           "with sensing" if not args.no_sensing else "without sensing")


def cmd_optimize_wide(args):
    sc = _scenario(args)
    p = _wide_params(sc, not args.no_cs)
    surf = wide_surface(p, sc.grid)
    res = solve_wide_grid(p, sc.grid)
    table = Table(["is_optimum", "alpha", "gamma", "rate_bits", "rate_bps", "margin_j"])
    for i in np.flatnonzero(surf.feasible):
        table.add(0, surf.alpha[i], surf.gamma[i], surf.rate[i], surf.rate[i] / p.T, surf.margin[i])
    if not res.feasible:
        _emit(table, args)
        raise Infeasible("no feasible wideband schedule")
    if not causality_satisfied(res.budget):
        raise NumericalError("optimum violates energy causality")
    s = res.schedule
    table.add(1, s.alpha, s.gamma, res.rate, res.rate / p.T, res.budget.margin)
    _emit(table, args)
    log.info("wideband optimum alpha=%.4g gamma=%.4g rate=%.6g bits/block", s.alpha, s.gamma, res.rate)
    if (path := _plot_path(args)):
        f = surf.feasible
        plots.rate_surface(path, surf.alpha[f], surf.gamma[f], surf.rate[f], (s.alpha, s.gamma),
                           "sensing fraction alpha", "power split gamma",
                           "with compressive sensing" if not args.no_cs else "without compressive sensing")


def sweep_time_rates(sc: Scenario, T_values):
    """Optimal rate of the four schemes for each block length."""
    out = []
    for T in T_values:
        if not T > 0:
            raise UsageError("block lengths must be positive")
        row = []
        for solve, params in (
            (lambda q: solve_narrow_grid(q, sc.grid, sc.variant), _narrow_params(sc, True)),
            (lambda q: solve_narrow_grid(q, sc.grid, sc.variant), _narrow_params(sc, False)),
            (lambda q: solve_wide_grid(q, sc.grid), _wide_params(sc, True)),
            (lambda q: solve_wide_grid(q, sc.grid), _wide_params(sc, False)),
        ):
            res = solve(params.replace(T=float(T)))
            if not res.feasible:
                raise Infeasible(f"no feasible schedule at T={T}")
            if not causality_satisfied(res.budget):
                raise NumericalError("optimum violates energy causality")
            row.append(res.rate)
        out.append(row)
    return np.array(out)


def cmd_sweep_time(args):
    sc = _scenario(args)
    T_values = [float(t) for t in args.T]
    rates = sweep_time_rates(sc, T_values)
    table = Table(["T", "narrow_sensing_bits", "narrow_baseline_bits", "wide_cs_bits",
                   "wide_baseline_bits", "gap_narrow_bits", "gap_wide_bits"])
    for T, (ns, nb, wc, wb) in zip(T_values, rates):
        table.add(T, ns, nb, wc, wb, ns - nb, wc - wb)
    _emit(table, args)
    if (path := _plot_path(args)):
        labels = ["narrowband, sensing", "narrowband, no sensing",
                  "wideband, compressive sensing", "wideband, no compressive sensing"]
        plots.sweep_time(path, T_values, dict(zip(labels, rates.T)))


# -- outage commands -------------------------------------------------------

def _axis_values(args):
    if args.num < 1:
        raise UsageError("--num must be >= 1")
    if args.log:
        if args.start <= 0 or args.stop <= 0:
            raise UsageError("--log needs positive bounds")
        return np.geomspace(args.start, args.stop, args.num)
    return np.linspace(args.start, args.stop, args.num)


def _safe_outage(gamma_th, f, q):
    try:
        return outage_probability(gamma_th, f, q), True
    except NumericalError as exc:
        log.error("quadrature failed at gamma_th=%g, m=%g: %s", gamma_th, f.m, exc)
        return float("nan"), False


def cmd_outage_curve(args):
    sc = _scenario(args)
    p = sc.params
    N = p.noise_rx
    x = _axis_values(args)
    fadings = sc.fadings()
    samples = args.samples or sc.mc_samples
    ok = True

    if args.axis == "d":
        target = args.target if args.target is not None else sc.target_pout
        table = Table(["d_m", "m", "target_pout", "p_th_w", "p_t_w", "p_t_dbm"])
        curves = {f.m: [] for f in fadings}
        p_th = {}
        for f in fadings:
            p_th[f.m] = invert_threshold(target, f, N, sc.quadrature)
        for d in x:
            if d <= 0:
                raise UsageError("distances must be positive")
            for f in fadings:
                pt = transmit_power_threshold(p_th[f.m], p.pathloss_up.with_distance(float(d)))
                table.add(d, f.m, target, p_th[f.m], pt, watts_to_dbm(pt))
                curves[f.m].append(watts_to_dbm(pt))
        _emit(table, args)
        if (path := _plot_path(args)):
            plots.required_power(path, x, curves)
        return

    mapping = {
        "gamma": ("gamma_th", lambda v, f: v),
        "pth": ("p_th_dbm", lambda v, f: snr_of_power(dbm_to_watts(v), SnrMapping(f.alpha_fade, N))),
        "pt": ("p_t_dbm", lambda v, f: snr_of_power(dbm_to_watts(v) * path_loss(p.pathloss_up),
                                                     SnrMapping(f.alpha_fade, N))),
    }
    xname, to_snr = mapping[args.axis]
    if args.axis == "gamma" and np.any(x < 0):
        raise UsageError("SNR thresholds must be >= 0")
    snr_col = [] if args.axis == "gamma" else ["gamma_th"]
    table = Table([xname, "m", *snr_col, "pout_quad", "pout_mc", "abs_diff"])
    curves = {}
    for f in fadings:
        th = np.array([to_snr(float(v), f) for v in x])
        quad = []
        for g in th:
            val, good = _safe_outage(float(g), f, sc.quadrature)
            ok &= good
            quad.append(val)
        mc = outage_monte_carlo(th, f, samples, args.seed) if samples > 0 else np.full(th.size, np.nan)
        curves[f.m] = (np.array(quad), mc, th)
    for i, v in enumerate(x):
        for f in fadings:
            quad, mc, th = curves[f.m]
            snr = [] if args.axis == "gamma" else [th[i]]
            table.add(v, f.m, *snr, quad[i], mc[i], abs(quad[i] - mc[i]))
    _emit(table, args)
    if (path := _plot_path(args)):
        labels = {"gamma": "SNR threshold", "pth": "received power threshold [dBm]",
                  "pt": "transmit power [dBm]"}
        plots.outage_curves(path, x, {m: c[:2] for m, c in curves.items()}, labels[args.axis],
                            logx=args.log and args.axis == "gamma")
    if not ok:
        raise NumericalError("one or more quadrature evaluations failed")


def threshold_report(sc: Scenario, target: float):
    """Rows of ``(m, lower, upper, p_t_min)`` for every configured m."""
    upper = float("nan")
    if sc.bank is not None:
        det = detect(sc.bank, sc.lambda_h, sc.lambda_h)
        if det.harvest_set:
            upper = max(sc.bank.per_channel_power[i] for i in det.harvest_set)
    rows = []
    for f in sc.fadings():
        lower = invert_threshold(target, f, sc.params.noise_rx, sc.quadrature)
        rows.append((f.m, lower, upper, transmit_power_threshold(lower, sc.params.pathloss_up)))
    return rows


def cmd_threshold(args):
    sc = _scenario(args)
    target = args.target if args.target is not None else sc.target_pout
    if not 0 < target < 1:
        raise UsageError("--target must lie in (0, 1)")
    rows = threshold_report(sc, target)
    table = Table(["m", "target_pout", "lambda_b_lower_w", "lambda_b_lower_dbm",
                   "lambda_b_upper_w", "p_t_min_w", "p_t_min_dbm", "admissible"])
    for m, lower, upper, pt in rows:
        admissible = float("nan") if math.isnan(upper) else float(lower <= upper)
        table.add(m, target, lower, watts_to_dbm(lower), upper, pt, watts_to_dbm(pt), admissible)
        if math.isnan(upper):
            log.warning("m=%g: no detected channel bank, upper bound of lambda_b undefined", m)
        elif lower > upper:
            log.warning("m=%g: lower bound %.3g W exceeds upper bound %.3g W; no admissible "
                        "backscatter threshold", m, lower, upper)
    _emit(table, args)


def cmd_detect(args):
    sc = _scenario(args)
    p = sc.params
    if args.synthetic or sc.bank is None:
        bank = synthetic_bank(p.M_w, args.sparsity if args.sparsity is not None else 0.75,
                              args.mean_power_dbm, args.seed)
    else:
        bank = sc.bank
    if args.sense_noise_dbm is not None:
        bank = measure_bank(bank, dbm_to_watts(args.sense_noise_dbm), args.samples or p.N_s,
                            args.seed)
    lambda_h = sc.lambda_h if args.lambda_h_dbm is None else dbm_to_watts(args.lambda_h_dbm)
    if args.lambda_b_dbm is not None:
        lambda_b = dbm_to_watts(args.lambda_b_dbm)
    else:
        lambda_b = invert_threshold(sc.target_pout, sc.fading, p.noise_rx, sc.quadrature)
    out = detect(bank, lambda_h, lambda_b)
    table = Table(["index", "frequency_hz", "power_w", "power_dbm", "harvest", "backscatter"])
    dbm = []
    for i, (fq, pw) in enumerate(zip(bank.frequencies, bank.per_channel_power)):
        table.add(i, fq, pw, watts_to_dbm(pw), i in out.harvest_set, i in out.backscatter_set)
        dbm.append(watts_to_dbm(pw))
    _emit(table, args)
    log.info("harvest %d channels, backscatter %d channels, aggregate %.6g W",
             len(out.harvest_set), len(out.backscatter_set), out.aggregate_power)
    if (path := _plot_path(args)):
        plots.channel_bank(path, bank.frequencies, dbm,
                           watts_to_dbm(lambda_h) if lambda_h > 0 else -np.inf, watts_to_dbm(lambda_b))


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--scenario", help="scenario INI file (defaults apply when omitted)")
    common.add_argument("--out", help="CSV output path (stdout when omitted)")
    common.add_argument("--seed", type=int, default=0, help="random seed for Monte-Carlo runs")
    common.add_argument("--grid", type=float, help="override the grid resolution")
    common.add_argument("--plot", action="store_true", help="also render a PNG next to --out")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="backscatter-sched", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("optimize-narrow", parents=[common], help="narrowband time scheduling")
    p.add_argument("--no-sensing", action="store_true", help="baseline without threshold filtering")
    p.add_argument("--variant", choices=["single", "double"])
    p.set_defaults(func=cmd_optimize_narrow)

    p = sub.add_parser("optimize-wide", parents=[common], help="wideband scheduling and power split")
    p.add_argument("--no-cs", action="store_true", help="baseline without compressive sensing")
    p.set_defaults(func=cmd_optimize_wide)

    p = sub.add_parser("sweep-time", parents=[common], help="optimal rates versus block length")
    p.add_argument("--T", type=float, nargs="+", default=[10, 20, 30, 40, 50, 60, 70, 80, 90, 100])
    p.set_defaults(func=cmd_sweep_time)

    p = sub.add_parser("outage-curve", parents=[common], help="outage probability sweeps")
    p.add_argument("--axis", choices=["gamma", "pth", "pt", "d"], default="gamma")
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=1.0)
    p.add_argument("--num", type=int, default=21)
    p.add_argument("--log", action="store_true", help="logarithmic spacing")
    p.add_argument("--samples", type=int, help="Monte-Carlo samples (0 disables)")
    p.add_argument("--target", type=float, help="target outage for the distance axis")
    p.set_defaults(func=cmd_outage_curve)

    p = sub.add_parser("threshold", parents=[common], help="bounds of the backscatter threshold")
    p.add_argument("--target", type=float, help="target outage probability")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("detect", parents=[common], help="energy detection over a channel bank")
    p.add_argument("--lambda-h-dbm", type=float)
    p.add_argument("--lambda-b-dbm", type=float)
    p.add_argument("--synthetic", action="store_true", help="use a random bank")
    p.add_argument("--sparsity", type=float)
    p.add_argument("--mean-power-dbm", type=float, default=-20.0)
    p.add_argument("--sense-noise-dbm", type=float, help="simulate the detector at this noise level")
    p.add_argument("--samples", type=int, help="samples per detection")
    p.set_defaults(func=cmd_detect)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except (UsageError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
