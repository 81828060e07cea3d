"""Command line surface: one subcommand per reproducible artifact.

Every run prints or writes CSV with a `#` comment header carrying the
library version and the fully resolved configuration, and no
timestamps, so identical flags give byte-identical output.  Numeric
fields are printed with 10 significant digits.

Exit codes: 0 success, 2 validation or input problems, 3 when the
statistic is undefined for the requested configuration.
"""

from __future__ import annotations

import argparse
import csv
import math
import re
import sys
from dataclasses import dataclass

import numpy as np

from .cfb_engine import (
    MatchedBenefitDistribution,
    cfb_linear_gaussian,
    cfb_two_group,
    pair_table,
)
from .counterfactual_screen import screen_improper_set
from .errors import CfbError, UndefinedCfb
from .improper_search import (
    HIST_BINS,
    HIST_RANGE,
    GridTriple,
    ImproperRecord,
    continuous_improper_eval,
    grid_search,
)
from .matched_pairs import matching_experiment
from .population_model import LinearGaussianPopulation, ProbTriple

__all__ = ["RunConfig", "run", "main",
           "IMPROPER_COLUMNS", "REALIZABLE_COLUMNS", "MATCH_COLUMNS"]

IMPROPER_COLUMNS = ("p_minus", "p_zero", "p_plus",
                    "q_minus", "q_zero", "q_plus", "cfb_star")
REALIZABLE_COLUMNS = IMPROPER_COLUMNS + ("y0_x0", "y1_x0", "y0_x1", "y1_x1")
MATCH_COLUMNS = ("a", "b", "beta0", "betax", "betat", "betaxt",
                 "cfb_x", "cfb_h", "abs_diff", "undefined_flag")

_DEFAULT_SEED = 20230516


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration of one CLI run, as it appears in headers."""

    subcommand: str
    options: tuple  # ((name, value-string), ...) in declaration order

    def header_lines(self) -> list:
        from . import __version__
        opts = " ".join(f"{k}={v}" for k, v in self.options)
        line = f"# {self.subcommand} {opts}" if opts else f"# {self.subcommand}"
        return [f"# cfb {__version__}", line]


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return "%.10g" % float(x)


def _emit(path, config, lines):
    """Write header plus lines to path, or stdout when path is None."""
    text = "\n".join(config.header_lines() + list(lines)) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as f:
            f.write(text)


class _TripleArg:
    """Parsed --p/--q value that remembers its raw spelling for headers."""

    def __init__(self, text: str):
        self.raw = text
        parts = text.split(",")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(
                f"expected three comma-separated decimals, got {text!r}")
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"expected three comma-separated decimals, got {text!r}") from None
        total = vals[0] + vals[1] + vals[2]
        if abs(total - 1.0) > 1e-9:
            raise argparse.ArgumentTypeError(
                f"triple {text!r} sums to {total!r}, not 1")
        if total != 1.0:
            vals = [v / total for v in vals]
        try:
            self.triple = ProbTriple(*vals)
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e)) from None


class _RhoRangeArg:
    """Parsed --rho start:stop:step value."""

    def __init__(self, text: str):
        self.raw = text
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(
                f"expected start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"expected start:stop:step, got {text!r}") from None
        if step <= 0.0 or stop < start:
            raise argparse.ArgumentTypeError("need stop >= start and step > 0")
        count = round((stop - start) / step) + 1
        if abs(start + (count - 1) * step - stop) > 1e-9:
            raise argparse.ArgumentTypeError(
                f"step {step} does not evenly divide [{start}, {stop}]")
        self.start = start
        self.stop = stop
        self.count = count

    def values(self):
        return np.linspace(self.start, self.stop, self.count)


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_eval_discrete(args) -> int:
    cfg = RunConfig("eval-discrete", (
        ("c", _fmt(args.c)),
        ("p", args.p.raw),
        ("q", args.q.raw),
    ))
    dist = MatchedBenefitDistribution((
        (0.0, 1.0 - args.c, args.p.triple),
        (1.0, args.c, args.q.triple),
    ))
    table = pair_table(dist)
    res = cfb_two_group(args.c, args.p.triple, args.q.triple)
    lines = ["h_rel,b_lt,b_eq,b_gt"]
    for rel in ("<", "=", ">"):
        cells = [table.entry(rel, b) for b in ("<", "=", ">")]
        lines.append(",".join([rel] + [_fmt(v) for v in cells]))
    lines.append(f"cfb_star,{_fmt(res.value)}")
    lines.append(f"numerator,{_fmt(res.numerator)}")
    lines.append(f"denominator,{_fmt(res.denominator)}")
    _emit(None, cfg, lines)
    return 0


def _cmd_search(args) -> int:
    cfg = RunConfig("search", (
        ("step", _fmt(args.step)),
        ("c", _fmt(args.c)),
        ("out", args.out),
        ("hist-out", args.hist_out),
    ))
    result = grid_search(args.step, args.c)

    rows = []
    for rec in result.records:
        pd = rec.triple_p.decimals()
        qd = rec.triple_q.decimals()
        rows.append(",".join(_fmt(v) for v in (*pd, *qd, rec.cfb_star)))
    _emit(args.out, cfg, [",".join(IMPROPER_COLUMNS)] + rows)

    s = result.summary
    hist_lines = ["bin_left,bin_right,count"]
    for k in range(len(s.hist_counts)):
        hist_lines.append(
            f"{_fmt(s.hist_edges[k])},{_fmt(s.hist_edges[k + 1])},{s.hist_counts[k]}")
    _emit(args.hist_out, cfg, hist_lines)

    lines = [f"count,{s.count}",
             f"cfb_min,{_fmt(s.cfb_min)}",
             f"cfb_median,{_fmt(s.cfb_median)}",
             f"cfb_max,{_fmt(s.cfb_max)}"]
    if s.argmin is not None:
        pd = s.argmin.triple_p.decimals()
        qd = s.argmin.triple_q.decimals()
        lines.append("argmin_p," + ",".join(_fmt(v) for v in pd))
        lines.append("argmin_q," + ",".join(_fmt(v) for v in qd))
    _emit(None, cfg, lines)
    return 0


def _read_improper_csv(path):
    with open(path) as f:
        reader = csv.reader(line for line in f if not line.startswith("#"))
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty input") from None
        if tuple(header) != IMPROPER_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {header!r}")
        records = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(IMPROPER_COLUMNS):
                raise ValueError(f"{path}: malformed row {row!r}")
            vals = [float(v) for v in row]
            hund = []
            for v in vals[:6]:
                n = round(v * 100)
                if abs(v * 100 - n) > 1e-6:
                    raise ValueError(f"{path}: {v!r} is not a hundredth")
                hund.append(n)
            records.append(ImproperRecord(
                GridTriple(hund[0], hund[1], hund[2]),
                GridTriple(hund[3], hund[4], hund[5]),
                vals[6],
                vals[6] - 0.5,
            ))
    return records


def _cmd_screen_cf(args) -> int:
    cfg = RunConfig("screen-cf", (
        ("in", args.inp),
        ("out", args.out),
        ("hist-out", args.hist_out),
    ))
    records = _read_improper_csv(args.inp)
    res = screen_improper_set(records)

    rows = []
    for rec, ev in zip(res.records, res.realizability):
        pd = rec.triple_p.decimals()
        qd = rec.triple_q.decimals()
        y0_lo, y1_lo = ev.roots_low[0]
        y0_hi, y1_hi = ev.roots_high[0]
        rows.append(",".join(
            _fmt(v) for v in (*pd, *qd, rec.cfb_star, y0_lo, y1_lo, y0_hi, y1_hi)))
    _emit(args.out, cfg, [",".join(REALIZABLE_COLUMNS)] + rows)

    all_vals = np.array([r.cfb_star for r in records])
    kept_vals = np.array([r.cfb_star for r in res.records])
    c_all, edges = np.histogram(all_vals, bins=HIST_BINS, range=HIST_RANGE)
    c_kept, _ = np.histogram(kept_vals, bins=HIST_BINS, range=HIST_RANGE)
    hist_lines = ["bin,count_all,count_realizable"]
    for k in range(HIST_BINS):
        hist_lines.append(f"{_fmt(edges[k])},{int(c_all[k])},{int(c_kept[k])}")
    _emit(args.hist_out, cfg, hist_lines)

    s = res.summary
    _emit(None, cfg, [
        f"count,{s.count}",
        f"cfb_min,{_fmt(s.cfb_min)}",
        f"cfb_mean,{_fmt(s.cfb_mean)}",
        f"cfb_median,{_fmt(s.cfb_median)}",
        f"cfb_max,{_fmt(s.cfb_max)}",
    ])
    return 0


def _cmd_beta_mc(args) -> int:
    cfg = RunConfig("beta-mc", (
        ("alpha", _fmt(args.alpha)),
        ("beta", _fmt(args.beta)),
        ("p", args.p.raw),
        ("q", args.q.raw),
        ("n", str(args.n)),
        ("seed", str(args.seed)),
    ))
    est, se = continuous_improper_eval(
        args.alpha, args.beta, args.p.triple, args.q.triple, args.n, args.seed)
    _emit(None, cfg, [
        f"estimate,{_fmt(est)}",
        f"std_error,{_fmt(se)}",
        f"pairs,{args.n}",
    ])
    return 0


def _cmd_rho_sweep(args) -> int:
    cfg = RunConfig("rho-sweep", (
        ("beta-xt", _fmt(args.beta_xt)),
        ("sigma", _fmt(args.sigma)),
        ("rho", args.rho.raw),
        ("out", args.out if args.out else "-"),
    ))
    lines = ["rho,cfb_star"]
    for rho in args.rho.values():
        pop = LinearGaussianPopulation(0.0, 0.0, 0.0, args.beta_xt, args.sigma, float(rho))
        res = cfb_linear_gaussian(pop)
        lines.append(f"{_fmt(rho)},{_fmt(res.value)}")
    _emit(args.out, cfg, lines)
    return 0


def _cmd_match_compare(args) -> int:
    cfg = RunConfig("match-compare", (
        ("step", _fmt(args.step)),
        ("coeff-min", _fmt(args.coeff_min)),
        ("coeff-max", _fmt(args.coeff_max)),
        ("seed", str(args.seed)),
        ("out", args.out),
        ("hist-out", args.hist_out),
    ))
    result = matching_experiment(args.step, (args.coeff_min, args.coeff_max), args.seed)

    rows = []
    for k in range(len(result)):
        rows.append(",".join((
            _fmt(result.a[k]), _fmt(result.b[k]),
            _fmt(result.beta0[k]), _fmt(result.betax[k]),
            _fmt(result.betat[k]), _fmt(result.betaxt[k]),
            _fmt(result.cfb_covariate[k]), _fmt(result.cfb_prediction[k]),
            _fmt(result.abs_diff[k]), str(int(result.undefined[k])),
        )))
    _emit(args.out, cfg, [",".join(MATCH_COLUMNS)] + rows)

    hist_lines = ["bin_left,bin_right,count"]
    for k in range(len(result.hist_counts)):
        hist_lines.append(
            f"{_fmt(result.hist_edges[k])},{_fmt(result.hist_edges[k + 1])},{result.hist_counts[k]}")
    _emit(args.hist_out, cfg, hist_lines)

    defined = ~result.undefined
    n_def = int(defined.sum())
    if n_def:
        diffs = result.abs_diff[defined]
        share = float((diffs < 0.05).sum()) / n_def
        dmax = float(diffs.max())
    else:
        share = dmax = float("nan")
    _emit(None, cfg, [
        f"cells,{len(result)}",
        f"defined,{n_def}",
        f"share_below_0.05,{_fmt(share)}",
        f"max_abs_diff,{_fmt(dmax)}",
    ])
    return 0


def _cmd_hist(args) -> int:
    cfg = RunConfig("hist", (
        ("in", args.inp),
        ("col", args.col),
        ("bins", str(args.bins)),
        ("lo", _fmt(args.lo) if args.lo is not None else "auto"),
        ("hi", _fmt(args.hi) if args.hi is not None else "auto"),
        ("out", args.out if args.out else "-"),
    ))
    with open(args.inp) as f:
        reader = csv.reader(line for line in f if not line.startswith("#"))
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{args.inp}: empty input") from None
        if args.col not in header:
            raise ValueError(f"{args.inp}: no column named {args.col!r}")
        idx = header.index(args.col)
        vals = []
        for row in reader:
            if not row:
                continue
            v = float(row[idx])
            if not math.isnan(v):
                vals.append(v)
    if not vals:
        raise ValueError(f"{args.inp}: column {args.col!r} has no usable values")
    lo = args.lo if args.lo is not None else min(vals)
    hi = args.hi if args.hi is not None else max(vals)
    if not lo < hi:
        raise ValueError("need lo < hi for the histogram range")
    counts, edges = np.histogram(np.array(vals), bins=args.bins, range=(lo, hi))
    lines = ["bin_left,bin_right,count"]
    for k in range(args.bins):
        lines.append(f"{_fmt(edges[k])},{_fmt(edges[k + 1])},{int(counts[k])}")
    _emit(args.out, cfg, lines)
    return 0


# ---------------------------------------------------------------------------
# parser assembly and entry points
# ---------------------------------------------------------------------------


def _add_triple_args(sp):
    sp.add_argument("--p", dest="p", type=_TripleArg, required=True,
                    help="low-level benefit triple: minus,zero,plus")
    sp.add_argument("--q", dest="q", type=_TripleArg, required=True,
                    help="high-level benefit triple: minus,zero,plus")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfb",
        description="concordance-for-benefit computations and reports",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sp = sub.add_parser("eval-discrete",
                        help="pair table and statistic for two covariate levels")
    sp.add_argument("--c", type=float, default=0.5,
                    help="mass of the high-h level (default 0.5)")
    _add_triple_args(sp)
    sp.set_defaults(func=_cmd_eval_discrete)

    sp = sub.add_parser("search", help="exhaustive below-chance grid search")
    sp.add_argument("--step", type=float, default=0.01)
    sp.add_argument("--c", type=float, default=0.5)
    sp.add_argument("--out", default="improper.csv")
    sp.add_argument("--hist-out", dest="hist_out", default="fig1_hist.csv")
    sp.set_defaults(func=_cmd_search)

    sp = sub.add_parser("screen-cf",
                        help="keep findings realizable from independent responses")
    sp.add_argument("--in", dest="inp", default="improper.csv")
    sp.add_argument("--out", default="realizable.csv")
    sp.add_argument("--hist-out", dest="hist_out", default="fig6_hist.csv")
    sp.set_defaults(func=_cmd_screen_cf)

    sp = sub.add_parser("beta-mc",
                        help="Monte Carlo statistic for a Beta-mixed pair")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    _add_triple_args(sp)
    sp.add_argument("--n", type=int, default=1_000_000, help="sampled pairs")
    sp.add_argument("--seed", type=int, default=_DEFAULT_SEED)
    sp.set_defaults(func=_cmd_beta_mc)

    sp = sub.add_parser("rho-sweep",
                        help="closed-form statistic over a response-correlation range")
    sp.add_argument("--beta-xt", dest="beta_xt", type=float, required=True)
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--rho", type=_RhoRangeArg, default=_RhoRangeArg("-1:1:0.1"),
                    help="start:stop:step (default -1:1:0.1)")
    sp.add_argument("--out", default=None, help="CSV path (default stdout)")
    # lets --rho -1:1:0.1 parse; tokens starting -<digit> are values here
    sp._negative_number_matcher = re.compile(r"^-\d")
    sp.set_defaults(func=_cmd_rho_sweep)

    sp = sub.add_parser("match-compare",
                        help="matching-factor comparison over the mass grid")
    sp.add_argument("--step", type=float, default=0.001)
    sp.add_argument("--coeff-min", dest="coeff_min", type=float, default=-5.0)
    sp.add_argument("--coeff-max", dest="coeff_max", type=float, default=5.0)
    sp.add_argument("--seed", type=int, default=_DEFAULT_SEED)
    sp.add_argument("--out", default="match_diffs.csv")
    sp.add_argument("--hist-out", dest="hist_out", default="fig2_hist.csv")
    sp.set_defaults(func=_cmd_match_compare)

    sp = sub.add_parser("hist", help="histogram a column of an emitted CSV")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--col", required=True)
    sp.add_argument("--bins", type=int, default=50)
    sp.add_argument("--lo", type=float, default=None)
    sp.add_argument("--hi", type=float, default=None)
    sp.add_argument("--out", default=None, help="CSV path (default stdout)")
    sp.set_defaults(func=_cmd_hist)

    return parser


def run(argv) -> int:
    """Parse argv (no program name) and execute; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0
    try:
        return args.func(args)
    except UndefinedCfb as e:
        print(f"cfb: undefined statistic: {e}", file=sys.stderr)
        return 3
    except CfbError as e:
        print(f"cfb: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"cfb: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))
