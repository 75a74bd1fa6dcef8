"""Command-line interface: ``mondrian-stit {sample,theory,moments,kfun,compare}``.

Options may also come from a JSON file given with ``--config``; its keys are
the long option names with dashes replaced by underscores.  Flags override the
file, which overrides the built-in defaults.

Exit codes: 0 success, 1 a comparison exceeded the z threshold, 2 invalid
arguments, 3 runtime failure (I/O, resource limits, quadrature).
"""

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from . import io
from .estimation import K_KINDS, MOMENT_STATS, McConfig, k_cross, k_edge, k_vertex, mc_moments
from .functionals import sigma_one
from .geometry import Rect
from .sampler import ResourceLimitError, SimParams, sample
from .theory.formulas import (
    BASELINE_KINDS,
    MONDRIAN_KINDS,
    ModelParams,
    k_from_pcf,
    moments_rect,
    pcf,
    variance_asymptotics,
)
from .theory.quadrature import QuadratureError

log = logging.getLogger("mondrian_stit")

EXIT_OK = 0
EXIT_STAT_FAIL = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3

DEFAULTS = {
    "window": "0,1,0,1",
    "p": "0.5",
    "t": 1.0,
    "seed": 0,
    "n": 100,
    "r_grid": None,
    "delta": None,
    "kind": "vertex",
    "format": None,
    "out": None,
    "z_threshold": 3.0,
    "threads": None,
    "bootstrap": 1000,
    "table": "pcf",
    "a": 0.5,
    "b": 0.5,
    "what": "all",
    "svg": None,
    "json": None,
    "color_births": False,
    "as_printed": False,
}

# Per-subcommand defaults that differ from the shared ones.
COMMAND_DEFAULTS = {"compare": {"kind": ",".join(K_KINDS)}}

_K_FUNCS = {"vertex": k_vertex, "edge": k_edge, "cross": k_cross}
_KFUN_GRID = "0.5,1,2"


class UsageError(ValueError):
    pass


# --- parsing helpers ---------------------------------------------------------

def parse_window(value) -> Rect:
    if isinstance(value, str):
        parts = value.split(",")
    else:
        parts = list(value)
    if len(parts) != 4:
        raise UsageError(f"--window needs x0,x1,y0,y1, got {value!r}")
    try:
        return Rect(*(float(v) for v in parts))
    except ValueError as exc:
        raise UsageError(f"--window {value!r}: {exc}") from None


def parse_grid(value) -> np.ndarray:
    """``start:stop:step`` (stop included when hit) or a comma list."""
    if isinstance(value, (list, tuple)):
        grid = np.array([float(v) for v in value])
    elif ":" in value:
        try:
            start, stop, step = (float(v) for v in value.split(":"))
        except ValueError:
            raise UsageError(f"--r-grid needs start:stop:step, got {value!r}") from None
        if not step > 0 or stop < start:
            raise UsageError(f"--r-grid {value!r}: need step > 0 and stop >= start")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        grid = start + step * np.arange(n)
    else:
        try:
            grid = np.array([float(v) for v in value.split(",")])
        except ValueError:
            raise UsageError(f"--r-grid: cannot parse {value!r}") from None
    if grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise UsageError(f"--r-grid must be positive and strictly increasing, got {value!r}")
    return grid


def parse_ps(value) -> list:
    items = value.split(",") if isinstance(value, str) else (list(value) if isinstance(value, (list, tuple)) else [value])
    try:
        ps = [float(v) for v in items]
    except ValueError:
        raise UsageError(f"--p: cannot parse {value!r}") from None
    for p in ps:
        if not 0.0 < p < 1.0:
            raise UsageError(f"--p must lie in (0, 1), got {p}")
    return ps


def _single_p(value) -> float:
    ps = parse_ps(value)
    if len(ps) != 1:
        raise UsageError("this subcommand takes a single --p value")
    return ps[0]


def _positive(name, value, integer=False):
    try:
        v = int(value) if integer else float(value)
    except (TypeError, ValueError):
        raise UsageError(f"--{name} must be a number, got {value!r}") from None
    if not v > 0 or (not integer and not math.isfinite(v)):
        raise UsageError(f"--{name} must be positive, got {value!r}")
    return v


# --- parser ------------------------------------------------------------------

def _common(sp, *names):
    opts = {
        "window": dict(help="window as x0,x1,y0,y1"),
        "p": dict(help="direction weight in (0, 1); theory accepts a comma list"),
        "t": dict(type=float, help="time threshold"),
        "seed": dict(type=int, help="64-bit master seed"),
        "n": dict(type=int, help="number of replicates"),
        "r_grid": dict(help="radii as start:stop:step or a comma list"),
        "delta": dict(type=float, help="skeleton discretization length"),
        "kind": dict(help="vertex|edge|cross (comma list for compare)"),
        "format": dict(choices=["json", "csv", "svg"], help="output format"),
        "out": dict(help="output path (stdout when omitted)"),
        "z_threshold": dict(type=float, help="largest acceptable |z| (default 3)"),
        "threads": dict(type=int, help="worker threads (default: MONDRIAN_THREADS or CPU count)"),
        "bootstrap": dict(type=int, help="bootstrap resamples for moment SEs"),
    }
    for name in names:
        flag = "--" + name.replace("_", "-")
        sp.add_argument(flag, dest=name, default=None, **opts[name])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mondrian-stit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sample", help="draw one tessellation")
    _common(sp, "window", "p", "t", "seed", "format", "out")
    sp.add_argument("--svg", default=None, help="also write an SVG drawing here")
    sp.add_argument("--json", default=None, help="also write the JSON edge list here")
    sp.add_argument("--color-births", dest="color_births", action="store_true", default=None,
                    help="colour edges by birth time")

    sp = sub.add_parser("theory", help="tables of closed-form quantities")
    _common(sp, "p", "t", "r_grid", "format", "out")
    sp.add_argument("--table", choices=["pcf", "k", "moments", "asymptotics"], default=None)
    sp.add_argument("--a", type=float, default=None, help="half width for the moments table")
    sp.add_argument("--b", type=float, default=None, help="half height for the moments table")
    sp.add_argument("--as-printed", dest="as_printed", action="store_true", default=None,
                    help="also tabulate the printed variance and vertex/cross forms")

    sp = sub.add_parser("moments", help="Monte Carlo moments of edge count and weighted length")
    _common(sp, "window", "p", "t", "seed", "n", "format", "out", "threads", "bootstrap")

    sp = sub.add_parser("kfun", help="empirical K-function against theory")
    _common(sp, "window", "p", "t", "seed", "n", "r_grid", "delta", "kind", "format", "out", "threads")

    sp = sub.add_parser("compare", help="simulation vs theory with a z-score gate")
    _common(sp, "window", "p", "t", "seed", "n", "r_grid", "delta", "kind", "out", "z_threshold",
            "threads", "bootstrap")
    sp.add_argument("--what", choices=["moments", "kfun", "all"], default=None)
    sp.add_argument("--csv", default=None, help="CSV copy of the report (default: OUT with .csv)")

    for p in sub.choices.values():
        p.add_argument("--config", default=None, help="JSON file of option values")
    return parser


def resolve(args) -> dict:
    """Merge flags over the config file over the defaults."""
    values = dict(DEFAULTS)
    values.update(COMMAND_DEFAULTS.get(args.command, {}))
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config} is not valid JSON: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError(f"config {args.config} must hold a JSON object")
        unknown = set(cfg) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(cfg)
    for key, val in vars(args).items():
        if key in DEFAULTS and val is not None:
            values[key] = val
    values["command"] = args.command
    return values


# --- output ------------------------------------------------------------------

def _emit(text: str, path):
    if path is None:
        sys.stdout.write(text)
    else:
        io.atomic_write(path, text)


def _sim_config(v, grid_default=None) -> McConfig:
    window = parse_window(v["window"])
    p = _single_p(v["p"])
    t = _positive("t", v["t"])
    n = _positive("n", v["n"], integer=True)
    grid = parse_grid(v["r_grid"] if v["r_grid"] is not None else (grid_default or _KFUN_GRID))
    try:
        return McConfig(
            window=window,
            params=SimParams(p, t, v["seed"]),
            n_replicates=n,
            r_grid=tuple(grid),
            delta=v["delta"],
            master_seed=v["seed"],
            n_bootstrap=int(v["bootstrap"]),
            threads=v["threads"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# --- subcommands -------------------------------------------------------------

def cmd_sample(v) -> int:
    window = parse_window(v["window"])
    try:
        params = SimParams(_single_p(v["p"]), v["t"], v["seed"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    tess = sample(window, params)
    log.info("sampled %d edges", sigma_one(tess))
    fmt = v["format"] or "json"
    if fmt == "csv":
        raise UsageError("sample writes json or svg")
    wrote = False
    if v["svg"]:
        io.atomic_write(v["svg"], io.tessellation_svg(tess, bool(v["color_births"])))
        wrote = True
    if v["json"]:
        io.save_tessellation(tess, v["json"])
        wrote = True
    if v["out"] is not None or not wrote:
        text = io.tessellation_svg(tess, bool(v["color_births"])) if fmt == "svg" else io.dumps(
            io.tessellation_to_dict(tess))
        _emit(text, v["out"])
    return EXIT_OK


def _theory_rows(v):
    ps = parse_ps(v["p"])
    t = _positive("t", v["t"])
    table = v["table"]
    printed = bool(v["as_printed"])
    if table in ("pcf", "k"):
        grid = parse_grid(v["r_grid"] or "0.05:5:0.05")
        kinds = list(MONDRIAN_KINDS) + (list(BASELINE_KINDS) if table == "pcf" else [])
        extra = ["cross_printed", "vertex_printed"] if printed else []
        header = ["p", "t", "r"] + kinds + extra + ["error"]
        rows = []
        for p in ps:
            mp = ModelParams(p, t)
            for r in grid:
                r = float(r)
                try:
                    if table == "pcf":
                        vals = [pcf(mp, k, r) for k in kinds]
                        vals += [pcf(mp, k, r, as_printed=True) for k in ("cross", "vertex")] if printed else []
                    else:
                        vals = [k_from_pcf(mp, k, r) for k in kinds]
                        vals += [k_from_pcf(mp, k, r, as_printed=True) for k in ("cross", "vertex")] if printed else []
                    rows.append([p, t, r] + vals + [""])
                except (ValueError, QuadratureError) as exc:
                    rows.append([p, t, r] + [math.nan] * (len(kinds) + len(extra)) + [str(exc)])
        return header, rows
    if table == "moments":
        a = _positive("a", v["a"])
        b = _positive("b", v["b"])
        header = ["p", "t", "a", "b"] + list(MOMENT_STATS)
        if printed:
            header += [k + "_printed" for k in MOMENT_STATS if k.startswith(("var", "cov"))]
        header.append("error")
        rows = []
        for p in ps:
            mp = ModelParams(p, t)
            try:
                m = moments_rect(mp, a, b).as_dict()
                row = [p, t, a, b] + [m[k] for k in MOMENT_STATS]
                if printed:
                    mp_ = moments_rect(mp, a, b, as_printed=True).as_dict()
                    row += [mp_[k] for k in MOMENT_STATS if k.startswith(("var", "cov"))]
                rows.append(row + [""])
            except (ValueError, QuadratureError) as exc:
                rows.append([p, t, a, b] + [math.nan] * (len(header) - 5) + [str(exc)])
        return header, rows
    # asymptotics: closed-form value over leading term on [-r, r]^2
    grid = parse_grid(v["r_grid"] or "1e2,1e4,1e6")
    header = ["p", "t", "r", "ratio_var_sigma_lambda", "ratio_var_sigma_one", "ratio_cov"]
    if printed:
        header += ["ratio_var_sigma_lambda_printed", "ratio_var_sigma_one_printed", "ratio_cov_printed"]
    header.append("error")
    rows = []
    for p in ps:
        mp = ModelParams(p, t)
        for r in grid:
            r = float(r)
            try:
                m = moments_rect(mp, r, r)
                lead = variance_asymptotics(mp, r)
                row = [p, t, r, m.var_sigma_lambda / lead[0], m.var_sigma_one / lead[1], m.cov / lead[2]]
                if printed:
                    mp_ = moments_rect(mp, r, r, as_printed=True)
                    lp = variance_asymptotics(mp, r, as_printed=True)
                    row += [mp_.var_sigma_lambda / lp[0], mp_.var_sigma_one / lp[1], mp_.cov / lp[2]]
                rows.append(row + [""])
            except (ValueError, QuadratureError) as exc:
                rows.append([p, t, r] + [math.nan] * (len(header) - 4) + [str(exc)])
    return header, rows


def cmd_theory(v) -> int:
    header, rows = _theory_rows(v)
    if (v["format"] or "csv") == "json":
        text = io.dumps({"version": io.SCHEMA_VERSION, "table": v["table"],
                         "columns": header, "rows": rows})
    else:
        text = io.csv_text(header, rows)
    _emit(text, v["out"])
    return EXIT_OK


def _moment_rows(rep):
    return [
        {"statistic": k, "r": None, "estimate": rep.estimate[k], "se": rep.se[k],
         "theory": rep.theory[k], "z": rep.z[k]}
        for k in MOMENT_STATS
    ]


def _k_rows(rep):
    return [
        {"statistic": f"K_{rep.kind}", "r": float(r), "estimate": float(k), "se": float(s),
         "theory": float(th), "z": float(z)}
        for r, k, s, th, z in zip(rep.r_grid, rep.k, rep.se, rep.theory, rep.z)
    ]


_ROW_KEYS = ("statistic", "r", "estimate", "se", "theory", "z")


def _rows_csv(rows):
    return io.csv_text(list(_ROW_KEYS), [["" if row[k] is None else row[k] for k in _ROW_KEYS] for row in rows])


def cmd_moments(v) -> int:
    cfg = _sim_config(v)
    rep = mc_moments(cfg)
    if (v["format"] or "json") == "csv":
        text = _rows_csv(_moment_rows(rep))
    else:
        text = io.dumps({"version": io.SCHEMA_VERSION, **rep.as_dict()})
    _emit(text, v["out"])
    return EXIT_OK


def _kinds(value):
    kinds = [k.strip() for k in value.split(",")] if isinstance(value, str) else list(value)
    for k in kinds:
        if k not in K_KINDS:
            raise UsageError(f"--kind must be among {K_KINDS}, got {k!r}")
    return kinds


def cmd_kfun(v) -> int:
    cfg = _sim_config(v)
    kinds = _kinds(v["kind"])
    reports = [_K_FUNCS[k](cfg) for k in kinds]
    if (v["format"] or "csv") == "json":
        text = io.dumps({"version": io.SCHEMA_VERSION, "kfun": [r.as_dict() for r in reports]})
    else:
        text = _rows_csv([row for r in reports for row in _k_rows(r)])
    _emit(text, v["out"])
    return EXIT_OK


def run_compare(v) -> dict:
    cfg = _sim_config(v)
    what = v["what"]
    threshold = float(v["z_threshold"])
    if not threshold >= 0:
        raise UsageError(f"--z-threshold must be non-negative, got {threshold}")
    doc = {
        "version": io.SCHEMA_VERSION,
        "config": {
            "window": cfg.window.as_list(), "p": cfg.params.p, "t": cfg.params.t,
            "seed": cfg.master_seed, "n": cfg.n_replicates, "r_grid": list(cfg.r_grid),
            "delta": cfg.delta, "bootstrap": cfg.n_bootstrap, "what": what,
        },
        "threshold": threshold,
    }
    rows = []
    if what in ("moments", "all"):
        rep = mc_moments(cfg)
        doc["moments"] = rep.as_dict()
        rows += _moment_rows(rep)
    if what in ("kfun", "all"):
        kinds = _kinds(v["kind"])
        doc["config"]["kinds"] = kinds
        reports = [_K_FUNCS[k](cfg) for k in kinds]
        doc["kfun"] = [r.as_dict() for r in reports]
        for r in reports:
            rows += _k_rows(r)
    zs = [abs(row["z"]) for row in rows if row["z"] is not None and math.isfinite(row["z"])]
    finite = len(zs) == len(rows)
    doc["rows"] = rows
    doc["max_abs_z"] = max(zs) if zs else None
    doc["passed"] = bool(finite and zs and max(zs) <= threshold)
    return doc


def cmd_compare(v) -> int:
    doc = run_compare(v)
    io.validate_report(doc)
    _emit(io.dumps(doc), v["out"])
    csv_path = v.get("csv")
    if csv_path is None and v["out"] is not None:
        csv_path = os.path.splitext(v["out"])[0] + ".csv"
    if csv_path is not None:
        io.atomic_write(csv_path, _rows_csv(doc["rows"]))
    status = "PASS" if doc["passed"] else "FAIL"
    sys.stderr.write(f"{status}: max |z| = {doc['max_abs_z']} (threshold {doc['threshold']})\n")
    return EXIT_OK if doc["passed"] else EXIT_STAT_FAIL


_COMMANDS = {
    "sample": cmd_sample,
    "theory": cmd_theory,
    "moments": cmd_moments,
    "kfun": cmd_kfun,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        values = resolve(args)
        if args.command == "compare":
            values["csv"] = args.csv
        return _COMMANDS[args.command](values)
    except UsageError as exc:
        sys.stderr.write(f"mondrian-stit {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except (OSError, ResourceLimitError, QuadratureError, RuntimeError, ValueError) as exc:
        sys.stderr.write(f"mondrian-stit {args.command}: runtime error: {exc}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
