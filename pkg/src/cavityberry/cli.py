"""Command-line front end.

Subcommands ``phase``, ``surface``, ``converge`` and ``oracle`` write CSV or
JSON files; stdout carries a one-line summary and diagnostics go to stderr.
Exit codes: 0 success, 2 validation failure, 3 numerical guard trip.
"""
import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import berry
from .berry import JCBand, mod2pi_distance, number_expectation_phase, parse_band
from .errors import DegenerateParameters, NumericalGuardError
from .hamiltonians import JCParams, LambdaParams, RabiParams
from .surfaces import Grid, detect_degeneracy, jc_surfaces, lambda_surfaces, rabi_surfaces

log = logging.getLogger("cavityberry")

EXIT_OK, EXIT_VALIDATION, EXIT_GUARD = 0, 2, 3

PHASE_COLUMNS = ["param", "gamma_wilson", "gamma_analytic", "gamma_oracle_2pi_n",
                 "min_overlap", "K", "n_trunc"]
CONVERGE_COLUMNS = ["K", "N", "gamma", "error_vs_finest", "gamma_analytic", "error_vs_analytic"]
ORACLE_COLUMNS = ["gamma_wilson", "gamma_oracle_2pi_n", "distance", "tol", "pass", "K", "n_trunc"]


class ValidationError(ValueError):
    pass


# -- formatting ---------------------------------------------------------------

def fmt(value):
    """17 significant digits for floats, empty cell for missing values."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return format(value, ".17g")


def to_json(obj):
    """Serialize with floats at 17 significant digits; non-finite -> null."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_table(path, columns, rows, fmt_name, extra=None):
    path = Path(path)
    if fmt_name == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for row in rows:
                w.writerow([fmt(row.get(c)) for c in columns])
    else:
        doc = {"columns": columns, "rows": [[row.get(c) for c in columns] for row in rows]}
        if extra:
            doc.update(extra)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(to_json(doc) + "\n")


# -- argument handling -----------------------------------------------------------

def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _physics_parent():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="key=value file; explicit flags take precedence")
    p.add_argument("--omega", type=float, default=1.0, help="mode frequency")
    p.add_argument("--nu", type=float, default=1.0, help="atomic transition frequency")
    p.add_argument("--g", type=float, default=0.1, help="atom-field coupling")
    p.add_argument("--delta", type=float, default=None,
                   help="JC detuning nu - omega (overrides --nu when given)")
    p.add_argument("--output", "-o", default=None, help="output file")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--verbose", "-v", action="store_true")
    return p


def _loop_parent():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--model", choices=("jc", "rabi"), required=True)
    p.add_argument("--band", default="ground",
                   help="'ground', an eigenvalue ordinal, or a JC label like '0+'")
    p.add_argument("--steps", "-K", type=int, default=1024, help="loop discretization K")
    p.add_argument("--n-trunc", "-N", type=int, default=60, help="Fock levels kept")
    p.add_argument("--workers", type=int, default=None,
                   help="threads for per-angle diagonalizations")
    return p


def build_parser():
    physics, loop = _physics_parent(), _loop_parent()
    parser = argparse.ArgumentParser(prog="cavityberry", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    ph = sub.add_parser("phase", parents=[physics, loop], help="Wilson-loop phase sweep")
    ph.add_argument("--sweep", choices=("g", "nu", "omega", "delta"), default=None,
                    help="parameter to sweep")
    ph.add_argument("--values", type=_float_list, default=None, help="sweep values a,b,c")

    sf = sub.add_parser("surface", parents=[physics], help="semiclassical energy surfaces")
    sf.add_argument("--model", choices=("jc", "rabi", "lambda"), required=True)
    sf.add_argument("--grid", default="-2:2:101,-2:2:101", help="xmin:xmax:nx,pmin:pmax:np")
    sf.add_argument("--kappa", type=float, default=1.0, help="Lambda drive coupling")
    sf.add_argument("--chi", type=float, default=0.0, help="Lambda drive phase")
    sf.add_argument("--delta3", type=float, default=1.0, help="Lambda E3 - E1 (E1 = E2 = 0)")
    sf.add_argument("--pair", default="E_minus,E_plus", help="sheets compared for degeneracy")
    sf.add_argument("--tol", type=float, default=None, help="gap tolerance")

    cv = sub.add_parser("converge", parents=[physics, loop], help="K/N convergence ladder")
    cv.add_argument("--k-values", type=_int_list, default=[256, 512, 1024, 2048, 4096])
    cv.add_argument("--n-values", type=_int_list, default=None)

    orc = sub.add_parser("oracle", parents=[physics, loop], help="Wilson loop vs 2 pi <n>")
    orc.add_argument("--tol", type=float, default=1e-4)
    return parser


def _read_config(path):
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key.lstrip("-").replace("-", "_")] = val
    return values


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def parse_args(argv):
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        cmd = next((a for a in argv if not a.startswith("-")), None)
        if cmd is None:
            parser.error("--config needs a subcommand")
        sp = _subparser(parser, cmd)
        try:
            raw = _read_config(known.config)
        except OSError as exc:
            raise ValidationError(f"cannot read config: {exc}")
        by_dest = {a.dest: a for a in sp._actions}
        defaults = {}
        for key, val in raw.items():
            action = by_dest.get(key)
            if action is None or key == "config":
                raise ValidationError(f"unknown config key {key!r}")
            try:
                defaults[key] = action.type(val) if action.type else val
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ValidationError(f"config key {key!r}: {exc}")
            if action.choices is not None and defaults[key] not in action.choices:
                raise ValidationError(f"config key {key!r}: {val!r} not in {list(action.choices)}")
            if action.required:
                action.required = False
        sp.set_defaults(**defaults)
    return parser.parse_args(argv)


# -- commands --------------------------------------------------------------

def _params(args, model, overrides=None):
    vals = {"omega": args.omega, "nu": args.nu, "g": args.g, "delta": args.delta}
    vals.update(overrides or {})
    if vals["delta"] is not None:
        vals["nu"] = vals["omega"] + vals["delta"]
    for key in ("omega", "nu", "g"):
        if not math.isfinite(vals[key]):
            raise ValidationError(f"{key} must be finite")
    if vals["g"] < 0:
        raise ValidationError("g must be >= 0")
    if model == "jc":
        p = JCParams(vals["omega"], vals["nu"], vals["g"])
        if p.delta == 0 and p.g == 0:
            raise ValidationError("JC with delta = 0 and g = 0 is fully degenerate")
        return p
    if vals["omega"] <= 0:
        raise ValidationError("omega must be > 0")
    return RabiParams(vals["omega"], vals["nu"], vals["g"])


def _band(args):
    try:
        band = parse_band(args.band)
    except ValueError as exc:
        raise ValidationError(str(exc))
    if isinstance(band, JCBand):
        if args.model != "jc":
            raise ValidationError("JC band labels need --model jc")
        if band.n + 2 > args.n_trunc:
            raise ValidationError(f"band {band} needs --n-trunc >= {band.n + 2}")
    return band


def _loop_checks(args, steps=None):
    for k in steps or [args.steps]:
        if k < 8:
            raise ValidationError("--steps must be >= 8")
    if args.n_trunc < 2:
        raise ValidationError("--n-trunc must be >= 2")


def _analytic(params, band):
    if isinstance(band, JCBand):
        return berry.jc_analytic_phase(params.delta, params.g, band.n, band.branch)
    return None


def _run_loop(model, params, band, n_max, steps, args):
    res, fam = berry.loop_phase(model, params, band, n_max, steps, workers=args.workers)
    return res, fam


def cmd_phase(args):
    band = _band(args)
    _loop_checks(args)
    if (args.sweep is None) != (args.values is None):
        raise ValidationError("--sweep and --values go together")
    sweep = [(args.sweep, v) for v in args.values] if args.sweep else [(None, args.g)]
    jobs = [(v, _params(args, args.model, {name: v} if name else None)) for name, v in sweep]
    rows = []
    for value, params in jobs:
        res, fam = _run_loop(args.model, params, band, args.n_trunc, args.steps, args)
        rows.append({
            "param": value,
            "gamma_wilson": res.gamma,
            "gamma_analytic": _analytic(params, band),
            "gamma_oracle_2pi_n": number_expectation_phase(fam.states[0]),
            "min_overlap": res.min_overlap,
            "K": args.steps,
            "n_trunc": args.n_trunc,
        })
        log.info("param=%s gamma=%.17g min_overlap=%.6f", fmt(value), res.gamma, res.min_overlap)
    out = args.output or f"phase.{args.format}"
    write_table(out, PHASE_COLUMNS, rows, args.format)
    last = rows[-1]
    print(f"phase: {len(rows)} row(s) -> {out}; gamma_wilson={fmt(last['gamma_wilson'])}")
    return EXIT_OK


def _surface(args, grid):
    if args.model == "jc":
        delta = args.delta if args.delta is not None else args.nu - args.omega
        return jc_surfaces(delta, args.g, grid), {"delta": delta, "g": args.g}
    if args.model == "rabi":
        return (rabi_surfaces(args.omega, args.nu, args.g, grid),
                {"omega": args.omega, "nu": args.nu, "g": args.g})
    params = LambdaParams(E1=0.0, E2=0.0, E3=args.delta3, kappa=args.kappa, g=args.g,
                          chi=args.chi, omega=args.omega)
    return lambda_surfaces(params, grid), {"omega": args.omega, "delta": args.delta3,
                                           "kappa": args.kappa, "g": args.g, "chi": args.chi}


def cmd_surface(args):
    try:
        grid = Grid.parse(args.grid)
    except ValueError as exc:
        raise ValidationError(str(exc))
    surf, params = _surface(args, grid)
    pair = tuple(s.strip() for s in args.pair.split(","))
    if len(pair) != 2 or any(p not in surf.sheets for p in pair):
        raise ValidationError(f"--pair must name two of {surf.names}")
    if args.tol is not None and not args.tol > 0:
        raise ValidationError("--tol must be > 0")
    report = detect_degeneracy(surf, pair, args.tol)
    columns = ["x", "p"] + surf.names
    table = surf.rows()
    rows = [dict(zip(columns, r)) for r in table]
    sidecar = {"model": args.model, "parameters": params,
               "grid": {"x_min": grid.x_min, "x_max": grid.x_max, "nx": grid.nx,
                        "p_min": grid.p_min, "p_max": grid.p_max, "np": grid.np},
               "degeneracy": report.to_dict()}
    out = Path(args.output or f"surface.{args.format}")
    if args.format == "csv":
        write_table(out, columns, rows, "csv")
        side = out.with_suffix(".json") if out.suffix != ".json" else out.with_suffix(".report.json")
        with open(side, "w", encoding="utf-8", newline="") as fh:
            fh.write(to_json(sidecar) + "\n")
    else:
        side = out
        write_table(out, columns, rows, "json", extra=sidecar)
    print(f"surface: {args.model} {len(rows)} nodes -> {out}; "
          f"classification={report.classification} report={side}")
    return EXIT_OK


def cmd_converge(args):
    band = _band(args)
    ks = sorted(set(args.k_values))
    ns = sorted(set(args.n_values or [args.n_trunc]))
    _loop_checks(args, ks)
    if min(ns) < 2:
        raise ValidationError("--n-values must be >= 2")
    if isinstance(band, JCBand) and band.n + 2 > min(ns):
        raise ValidationError(f"band {band} needs N >= {band.n + 2}")
    params = _params(args, args.model)
    analytic = _analytic(params, band)
    results = []
    for n_max in ns:
        for k in ks:
            res, _ = _run_loop(args.model, params, band, n_max, k, args)
            results.append((k, n_max, res.gamma))
            log.info("K=%d N=%d gamma=%.17g", k, n_max, res.gamma)
    finest = next(g for k, n, g in results if k == ks[-1] and n == ns[-1])
    rows = [{"K": k, "N": n, "gamma": g,
             "error_vs_finest": mod2pi_distance(g, finest),
             "gamma_analytic": analytic,
             "error_vs_analytic": None if analytic is None else mod2pi_distance(g, analytic)}
            for k, n, g in results]
    out = args.output or f"converge.{args.format}"
    write_table(out, CONVERGE_COLUMNS, rows, args.format)
    print(f"converge: {len(rows)} row(s) -> {out}; finest gamma={fmt(finest)}")
    return EXIT_OK


def cmd_oracle(args):
    band = _band(args)
    _loop_checks(args)
    params = _params(args, args.model)
    res, fam = _run_loop(args.model, params, band, args.n_trunc, args.steps, args)
    oracle = number_expectation_phase(fam.states[0])
    dist = mod2pi_distance(res.gamma, oracle)
    ok = dist <= args.tol
    row = {"gamma_wilson": res.gamma, "gamma_oracle_2pi_n": oracle, "distance": dist,
           "tol": args.tol, "pass": ok, "K": args.steps, "n_trunc": args.n_trunc}
    out = args.output or f"oracle.{args.format}"
    write_table(out, ORACLE_COLUMNS, [row], args.format)
    print(f"oracle: {'PASS' if ok else 'FAIL'} distance={fmt(dist)} tol={fmt(args.tol)} -> {out}")
    if not ok:
        print(f"oracle mismatch: |wilson - 2pi<n>| = {dist:.3e} > {args.tol:.1e}", file=sys.stderr)
        return EXIT_GUARD
    return EXIT_OK


COMMANDS = {"phase": cmd_phase, "surface": cmd_surface,
            "converge": cmd_converge, "oracle": cmd_oracle}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SystemExit as exc:  # argparse: 0 for --help, 2 for usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except NumericalGuardError as exc:
        where = "" if exc.phi is None else f" at phi={fmt(exc.phi)}"
        print(f"numerical guard tripped{where}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ValueError, DegenerateParameters, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
