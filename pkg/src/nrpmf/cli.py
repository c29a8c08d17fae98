"""Command-line front end.

    nrpmf coverage  --p-c 0.01 --p-c 0.05 --p-c 0.1
    nrpmf snr-cdf   --p-c 0.1 --branch blocked --out cdf.csv
    nrpmf pmf       --rate 5e6 --convention include-outage-as-zero
    nrpmf validate  --reference-radii --p-c 0.01 --rate 5e6 --samples 1000000
    nrpmf sweep     --p-c 0.01 --p-c 0.1 --rate 2e6 --rate 5e6

Every command reads one scenario file (the bundled 28 GHz scenario by
default) and applies flag overrides on top.  Output is a single table,
either comma-separated with ``# header``/``# footer`` JSON comment lines or
JSON records (one object per line).  Exit status: 0 success, 1 a binding
validation check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .linkbudget import InfeasibleCoverageError, link_budget, solve_coverage
from .mathcore import DomainError, Grid, IntegrationError, ks_distance, ks_sample
from .pipeline import Analysis
from .reference import (
    PRB_MEAN_REL_TOL,
    RADII,
    RATE_BPS,
    SNR_TOL_DB,
    SUMMARY,
)
from .resources import Conditioning
from .scenario import Scenario, ScenarioError, load_scenario, bundled_scenario_path
from .simulator import SimConfig, simulate
from .snrmodel import NormalMixtureCdf

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

KS_TOL = 0.005
BLOCKAGE_FREQ_TOL = 0.002
MEAN_EQUALITY_TOL_DB = 0.01
APPROX_STD_TOL_DB = 0.01
FULL_SAMPLES = 1_000_000


class InputError(Exception):
    """Bad command-line input; maps to exit status 2."""


# ---------------------------------------------------------------- output


def _fmt_number(v) -> str:
    """At least 6 significant digits, never lossy."""
    if isinstance(v, (bool, np.bool_)):
        raise TypeError("booleans are not table values")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if not math.isfinite(v):
        return repr(v)
    short = format(v, "#.6g")
    return short if float(short) == v else repr(v)


def _to_json(v) -> str:
    """JSON text with numbers formatted like table cells."""
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, float, np.integer, np.floating)):
        s = _fmt_number(v)
        return s if math.isfinite(float(v)) else json.dumps(float(v))
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_to_json(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_to_json(x) for x in v) + "]"
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _parse_cell(text: str):
    if text == "":
        return None
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


@dataclass
class OutputTable:
    """Rectangular table with free-form header/footer metadata.

    Cells are ints, floats, strings or ``None`` (missing).  Strings that look
    like numbers are not supported; they would parse back as numbers.
    """

    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    header: dict[str, Any] = field(default_factory=dict)
    footer: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        self.rows = [tuple(r) for r in self.rows]
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError(f"row has {len(r)} cells, expected {len(self.columns)}")

    def add(self, *cells) -> None:
        if len(cells) != len(self.columns):
            raise ValueError(f"row has {len(cells)} cells, expected {len(self.columns)}")
        self.rows.append(tuple(cells))

    def column(self, name: str) -> list:
        k = self.columns.index(name)
        return [r[k] for r in self.rows]

    def render(self, fmt: str = "csv") -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "records":
            return self.to_records()
        raise ValueError(f"unknown format {fmt!r}")

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# header {_to_json(self.header)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow(["" if c is None else c if isinstance(c, str) else _fmt_number(c) for c in r])
        buf.write(f"# footer {_to_json(self.footer)}\n")
        return buf.getvalue()

    def to_records(self) -> str:
        lines = [
            '{"header": ' + _to_json(self.header) + "}",
            '{"columns": ' + _to_json(list(self.columns)) + "}",
        ]
        for r in self.rows:
            lines.append(_to_json(dict(zip(self.columns, r))))
        lines.append('{"footer": ' + _to_json(self.footer) + "}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str, fmt: str = "csv") -> "OutputTable":
        if fmt == "records":
            objs = [json.loads(line) for line in text.splitlines() if line.strip()]
            header, cols, *body, footer = objs
            columns = tuple(cols["columns"])
            rows = [tuple(o[c] for c in columns) for o in body]
            return cls(columns, rows, header["header"], footer["footer"])
        if fmt != "csv":
            raise ValueError(f"unknown format {fmt!r}")
        header: dict = {}
        footer: dict = {}
        body = []
        for line in text.splitlines():
            if line.startswith("# header "):
                header = json.loads(line[len("# header "):])
            elif line.startswith("# footer "):
                footer = json.loads(line[len("# footer "):])
            elif line:
                body.append(line)
        reader = csv.reader(body)
        columns = tuple(next(reader))
        rows = [tuple(_parse_cell(c) for c in r) for r in reader]
        return cls(columns, rows, header, footer)


def _emit(table: OutputTable, args, path: str | None = None) -> None:
    text = table.render(args.format)
    path = path or args.out
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- inputs


@dataclass(frozen=True)
class Case:
    """One scenario variant to evaluate."""

    scenario: Scenario
    anchored: bool

    @property
    def mode(self) -> str:
        return "radius-anchored" if self.anchored else "link-budget"


def _load(args) -> Scenario:
    path = Path(args.scenario) if args.scenario else bundled_scenario_path()
    try:
        return load_scenario(path)
    except FileNotFoundError:
        raise InputError(f"{path}: no such scenario file") from None
    except IsADirectoryError:
        raise InputError(f"{path}: is a directory") from None
    except ScenarioError as exc:
        raise InputError(f"{path}: {exc}") from None


def _cases(args, base: Scenario) -> list[Case]:
    p_cs = args.p_c or [base.p_c]
    radii = args.radius or []
    if radii and args.reference_radii:
        raise InputError("--radius and --reference-radii are mutually exclusive")
    if radii and len(radii) not in (1, len(p_cs)):
        raise InputError(f"{len(radii)} --radius values for {len(p_cs)} --p-c values")
    if len(radii) == 1:
        radii = radii * len(p_cs)
    out = []
    for k, p_c in enumerate(p_cs):
        r_a = base.r_a_m
        if radii:
            r_a = radii[k]
        elif args.reference_radii:
            if p_c not in RADII:
                raise InputError(f"no tabulated radius for p_C={p_c}; known: {sorted(RADII)}")
            r_a = RADII[p_c]
        try:
            s = base.replace(p_c=p_c, r_a_m=r_a)
        except ScenarioError as exc:
            raise InputError(str(exc)) from None
        out.append(Case(s, s.r_a_m is not None))
    return out


def _rates(args, base: Scenario) -> list[float]:
    rates = getattr(args, "rate", None) or [base.rate_bps]
    for r in rates:
        if not (math.isfinite(r) and r > 0):
            raise InputError(f"R: rate must be positive, got {r}")
    return rates


def _header(args, **extra) -> dict:
    h = {
        "command": args.command,
        "scenario": str(args.scenario) if args.scenario else "bundled:mmwave28.toml",
        "version": __version__,
    }
    h.update(extra)
    return h


def _variant(args) -> str:
    approx = getattr(args, "approx", False)
    if approx:
        return "approx-no-fading" if args.no_fading else "approx"
    return "no-fading" if args.no_fading else "fading"


# ---------------------------------------------------------------- commands


def cmd_coverage(args) -> int:
    base = _load(args)
    cases = _cases(args, base)
    t = OutputTable(
        ("p_c", "m_sb_db", "d3_max_m", "d_e_m", "a_b_db", "a_nb_db", "offset_db", "mode"),
        header=_header(args),
    )
    for c in cases:
        a = Analysis(c.scenario)
        t.add(c.scenario.p_c, a.coverage.m_sb_db, a.coverage.d3_max, a.coverage.d_e,
              a.lb.a_b_db, a.lb.a_nb_db, a.lb.offset_db, c.mode)
        if c.anchored:
            # what the unmodified budget would give, for comparison
            budget = solve_coverage(c.scenario, link_budget(c.scenario))
            t.footer.setdefault("budget_d_e_m", {})[_fmt_number(c.scenario.p_c)] = budget.d_e
    _emit(t, args)
    return EXIT_OK


def _selected_cdf(a: Analysis, args):
    """The CDF requested by the flags and its two-Normal counterpart (or the exact one)."""
    variant = _variant(args)
    fading = not args.no_fading
    if args.branch == "mixture":
        exact = a.cdf("no-fading" if args.no_fading else "fading")
        approx = a.cdf("approx-no-fading" if args.no_fading else "approx")
    else:
        k = 0 if args.branch == "blocked" else 1
        exact = a.branches(fading)[k]
        nm = a.cdf("approx-no-fading" if args.no_fading else "approx")
        approx = NormalMixtureCdf((1.0,), (nm.means[k],), (nm.stds[k],))
    if variant.startswith("approx"):
        return approx, exact
    return exact, approx


def _split_path(out: str, p_c: float) -> str:
    p = Path(out)
    return str(p.with_name(f"{p.stem}_pc{p_c:g}{p.suffix}"))


def cmd_snr_cdf(args) -> int:
    base = _load(args)
    cases = _cases(args, base)
    if args.grid_n < 2:
        raise InputError("--grid-n must be >= 2")
    tables = []
    for c in cases:
        a = Analysis(c.scenario, method=args.method)
        cdf, other = _selected_cdf(a, args)
        lo = cdf.support_lo if args.grid_lo is None else args.grid_lo
        hi = cdf.support_hi if args.grid_hi is None else args.grid_hi
        if not hi > lo:
            raise InputError(f"empty grid [{lo}, {hi}]")
        grid = Grid.linspace(lo, hi, args.grid_n)
        values = np.asarray(cdf(grid.points), dtype=float)
        ks = ks_distance(cdf, other)
        t = OutputTable(
            ("p_c", "x_db", "cdf"),
            [(c.scenario.p_c, float(x), float(v)) for x, v in zip(grid.points, values)],
            header=_header(
                args, p_c=c.scenario.p_c, mode=c.mode, branch=args.branch,
                fading=not args.no_fading, approximation=bool(args.approx),
                method=args.method, kind=cdf.kind, ks_exact_vs_approx=ks,
            ),
        )
        tables.append(t)
    if args.out and len(tables) > 1:
        for c, t in zip(cases, tables):
            _emit(t, args, _split_path(args.out, c.scenario.p_c))
    else:
        merged = OutputTable(tables[0].columns, header=tables[0].header)
        if len(tables) > 1:
            merged.header = _header(args, blocks=[t.header for t in tables])
        for t in tables:
            merged.rows.extend(t.rows)
        _emit(merged, args)
    return EXIT_OK


def cmd_approx(args) -> int:
    args.approx = True
    return cmd_snr_cdf(args)


def _pmf_summary(pmf) -> dict:
    out = {"outage": pmf.outage}
    for conv in Conditioning:
        try:
            m, sd = pmf.mean(conv), pmf.std(conv)
        except DomainError:
            m = sd = None
        out[f"mean[{conv.value}]"] = m
        out[f"std[{conv.value}]"] = sd
        out[f"variance[{conv.value}]"] = None if sd is None else sd * sd
    return out


def cmd_pmf(args) -> int:
    base = _load(args)
    cases = _cases(args, base)
    rates = _rates(args, base)
    variant = _variant(args)
    conv = Conditioning(args.convention)
    t = OutputTable(
        ("p_c", "rate_bps", "prbs", "state", "probability"),
        header=_header(args, variant=variant, convention=conv.value),
    )
    summary = []
    for c in cases:
        a = Analysis(c.scenario, method=args.method)
        for rate in rates:
            pmf = a.pmf(variant, rate)
            t.add(c.scenario.p_c, rate, 0, "outage", pmf.outage)
            for i, p in pmf.probs.items():
                t.add(c.scenario.p_c, rate, i, "served", p)
            row = {"p_c": c.scenario.p_c, "rate_bps": rate, "mode": c.mode}
            s = _pmf_summary(pmf)
            row["mean"] = s[f"mean[{conv.value}]"]
            row["std"] = s[f"std[{conv.value}]"]
            row.update(s)
            summary.append(row)
    t.footer["summary"] = summary
    _emit(t, args)
    return EXIT_OK


def cmd_sweep(args) -> int:
    base = _load(args)
    cases = _cases(args, base)
    rates = _rates(args, base)
    variant = _variant(args)
    t = OutputTable(
        ("p_c", "rate_bps", "d_e_m", "snr_mean_db", "snr_std_db", "outage",
         "prb_mean_served", "prb_std_served", "prb_mean_zero", "prb_std_zero"),
        header=_header(args, variant=variant),
    )
    for c in cases:
        a = Analysis(c.scenario, method=args.method)
        mom = a.moments(variant)
        for rate in rates:
            s = _pmf_summary(a.pmf(variant, rate))
            t.add(c.scenario.p_c, rate, a.coverage.d_e, mom.mean, mom.std, s["outage"],
                  s["mean[condition-on-served]"], s["std[condition-on-served]"],
                  s["mean[include-outage-as-zero]"], s["std[include-outage-as-zero]"])
    _emit(t, args)
    return EXIT_OK


# ---------------------------------------------------------------- validate


def _matches_bundled(s: Scenario) -> bool:
    ref = load_scenario(bundled_scenario_path())
    return s.replace(p_c=ref.p_c, r_a_m=None, rate_bps=ref.rate_bps) == ref


class _Checks:
    COLUMNS = ("p_c", "check", "variant", "computed", "target", "tolerance", "binding", "status")

    def __init__(self, table: OutputTable):
        self.t = table
        self.failed = False

    def add(self, p_c, check, variant, computed, target, tol, binding, ok=None, judge=True):
        if not judge:
            ok = None
        elif ok is None and tol is not None and target is not None:
            ok = abs(computed - target) <= tol
        status = "INFO" if ok is None else ("PASS" if ok else "FAIL")
        self.t.add(p_c, check, variant, computed, target, tol, "yes" if binding else "no", status)
        if binding and ok is False:
            self.failed = True


_SIM_VARIANTS = (
    # name, fading, state
    ("fading", True, "mixture"),
    ("no-fading", False, "mixture"),
    ("blocked", True, "blocked"),
    ("nonblocked", True, "nonblocked"),
    ("blocked-no-fading", False, "blocked"),
    ("nonblocked-no-fading", False, "nonblocked"),
)


def cmd_validate(args) -> int:
    base = _load(args)
    cases = _cases(args, base)
    rate = _rates(args, base)[0]
    if args.samples < 1:
        raise InputError("--samples must be >= 1")
    if args.workers < 1:
        raise InputError("--workers must be >= 1")
    wide = args.samples < FULL_SAMPLES
    t = OutputTable(_Checks.COLUMNS)
    checks = _Checks(t)
    dkw = None
    for c in cases:
        s = c.scenario.replace(rate_bps=rate)
        p_c = s.p_c
        a = Analysis(s, method=args.method)

        # Monte Carlo oracle
        for name, fading, state in _SIM_VARIANTS:
            rep = simulate(s, a.lb, a.geometry, SimConfig(
                args.samples, args.seed, fading=fading, state=state,
                blockage_sampling="independent", workers=args.workers,
            ))
            dkw = rep.dkw_bound()
            if state == "mixture":
                analytic = a.cdf(name)
            else:
                analytic = a.branches(fading)[0 if state == "blocked" else 1]
            ks = ks_sample(rep.snr_db, analytic)
            # below the full sample size only the DKW band is reported
            checks.add(p_c, "ks_oracle", name, ks, 0.0, dkw if wide else KS_TOL, not wide,
                       judge=not wide)
            if name == "fading":
                checks.add(p_c, "blockage_frequency", name, rep.blockage_frequency, a.p_b,
                           BLOCKAGE_FREQ_TOL, not wide, judge=not wide)
                sim_pmf_mean = float(np.mean(rep.prbs))
                checks.add(p_c, "prb_mean_oracle[include-outage-as-zero]", name, sim_pmf_mean,
                           a.pmf(name).mean(Conditioning.ZERO), None, False)
        for name, fading in (("fading", True), ("no-fading", False)):
            rep = simulate(s, a.lb, a.geometry, SimConfig(
                args.samples, args.seed, fading=fading, blockage_sampling="location",
                workers=args.workers,
            ))
            checks.add(p_c, "ks_oracle_location_blockage", name,
                       ks_sample(rep.snr_db, a.cdf(name)), None, None, False)

        # analytic-only checks
        ks = ks_distance(a.cdf("fading"), a.cdf("approx"))
        checks.add(p_c, "ks_approx", "fading", ks, 0.0, 0.05, True, ks <= 0.05)
        m_f, m_nf, m_ap = a.moments("fading"), a.moments("no-fading"), a.moments("approx")
        checks.add(p_c, "snr_mean_fading_vs_no_fading", "fading", m_f.mean, m_nf.mean,
                   MEAN_EQUALITY_TOL_DB, True)
        checks.add(p_c, "snr_std_approx_vs_exact", "approx", m_ap.std, m_f.std,
                   APPROX_STD_TOL_DB, True)

        # reference values
        ref = SUMMARY.get(p_c) if rate == RATE_BPS and _matches_bundled(s) else None
        variants = (("fading", ""), ("no-fading", "_no_fading"), ("approx", "_approx"))
        for name, suffix in variants:
            mom = a.moments(name)
            pmf = a.pmf(name)
            summ = _pmf_summary(pmf)
            r = ref or {}
            checks.add(p_c, "snr_mean_db", name, mom.mean, r.get("snr_mean" + suffix),
                       SNR_TOL_DB if ref else None, ref is not None)
            checks.add(p_c, "snr_std_db", name, mom.std, r.get("snr_std" + suffix),
                       SNR_TOL_DB if ref else None, ref is not None)
            target = r.get("prb_mean" + suffix)
            best = None
            for conv in Conditioning:
                m = summ[f"mean[{conv.value}]"]
                rel = None if target is None or m is None else abs(m - target) / target
                checks.add(p_c, f"prb_mean[{conv.value}]", name, m, target,
                           None if target is None else PRB_MEAN_REL_TOL * target, False)
                if rel is not None and (best is None or rel < best[0]):
                    best = (rel, conv.value, m)
            if ref is not None:
                checks.add(p_c, f"prb_mean[best:{best[1]}]", name, best[2], target,
                           PRB_MEAN_REL_TOL * target, True, best[0] <= PRB_MEAN_REL_TOL)
            spread = r.get("prb_spread" + suffix)
            for conv in Conditioning:
                checks.add(p_c, f"prb_std[{conv.value}]", name, summ[f"std[{conv.value}]"],
                           spread, None, False)
                checks.add(p_c, f"prb_variance[{conv.value}]", name,
                           summ[f"variance[{conv.value}]"], spread, None, False)
    t.header = _header(
        args, seed=args.seed, samples=args.samples, rate_bps=rate,
        wide_tolerance=wide, dkw_bound=dkw,
        modes={_fmt_number(c.scenario.p_c): c.mode for c in cases},
        blockage_sampling="independent",
    )
    t.footer = {"result": "FAIL" if checks.failed else "PASS"}
    _emit(t, args)
    return EXIT_FAIL if checks.failed else EXIT_OK


# ---------------------------------------------------------------- parser


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _common(p: argparse.ArgumentParser, *, rates: bool = True) -> None:
    p.add_argument("--scenario", metavar="PATH", help="scenario TOML (default: bundled 28 GHz scenario)")
    p.add_argument("--p-c", dest="p_c", type=float, action="append", metavar="X",
                   help="cell-edge outage probability; repeat to evaluate several")
    p.add_argument("--radius", type=float, action="append", metavar="M",
                   help="pin the 2-D cell radius (one per --p-c, or one for all)")
    p.add_argument("--reference-radii", action="store_true",
                   help="pin the radius listed for each p_C (0.01/0.05/0.1: 65/119/165 m)")
    if rates:
        p.add_argument("--rate", type=float, action="append", metavar="BPS",
                       help="session bit rate; repeatable")
    p.add_argument("--method", choices=("closed-form", "quadrature"), default="closed-form",
                   help="shadow-fading convolution")
    p.add_argument("--format", choices=("csv", "records"), default="csv")
    p.add_argument("--out", metavar="PATH")


def _cdf_flags(p: argparse.ArgumentParser, *, approx_flag: bool = True) -> None:
    p.add_argument("--no-fading", action="store_true")
    p.add_argument("--branch", choices=("mixture", "blocked", "nonblocked"), default="mixture")
    if approx_flag:
        p.add_argument("--approx", action="store_true", help="two-Normal approximation")
    p.add_argument("--grid-lo", type=float)
    p.add_argument("--grid-hi", type=float)
    p.add_argument("--grid-n", type=int, default=2001)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nrpmf", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coverage", help="fading margin and coverage radius per p_C")
    _common(p, rates=False)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("snr-cdf", help="SNR CDF on a grid")
    _common(p, rates=False)
    _cdf_flags(p)
    p.set_defaults(func=cmd_snr_cdf)

    p = sub.add_parser("approx", help="same as snr-cdf --approx")
    _common(p, rates=False)
    _cdf_flags(p, approx_flag=False)
    p.set_defaults(func=cmd_approx, approx=True)

    for name, func, help_ in (
        ("pmf", cmd_pmf, "PRB-demand pmf"),
        ("sweep", cmd_sweep, "summary over the p_C x rate cross product"),
    ):
        p = sub.add_parser(name, help=help_)
        _common(p)
        p.add_argument("--no-fading", action="store_true")
        p.add_argument("--approx", action="store_true")
        if name == "pmf":
            p.add_argument("--convention", choices=[c.value for c in Conditioning],
                           default=Conditioning.SERVED.value)
        p.set_defaults(func=func)

    p = sub.add_parser("validate", help="analytic pipeline vs Monte Carlo and reference values")
    _common(p)
    p.add_argument("--samples", type=int, default=FULL_SAMPLES, metavar="N")
    p.add_argument("--seed", type=_u64, default=0, metavar="U64")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"nrpmf: error: {exc}", file=sys.stderr)
    except (ScenarioError, InfeasibleCoverageError, DomainError, IntegrationError) as exc:
        print(f"nrpmf: error: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"nrpmf: error: {exc.filename or ''}: {exc.strerror}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
