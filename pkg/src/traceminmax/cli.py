"""Command line interface.

Subcommands: verify, monotone, convex, hankel, represent, xi.  Every flag can
also be supplied through ``--config file`` holding ``key = value`` lines
(keys match the long flag names with dashes replaced by underscores); flags
given on the command line win.  Exit codes: 0 pass, 1 violation found,
2 usage or domain error, 3 inconclusive (error-bar verdicts only).
"""

from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from . import __version__
from .funcalc import DomainError, resolve_function
from .harness import (CampaignConfig, make_report, margins_to_csv, run_convex,
                      run_monotone, run_verify, write_json_report)
from .inequality import trace_minmax_margin
from .pickrep import (MomentProblemError, represent, representation_to_dict,
                      roundtrip_residual)
from .series import (HankelSpec, first_passing_shift, hankel_psd_test,
                     series_from_csv, weighted_to_unweighted_check)
from .xi import (XiEvaluator, cross_validate, find_first_root, load_zero_table,
                 product_log_series, rh_hankel_report, rh_matrix_checks)

EXIT_PASS = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3


def _parse_interval(text: str):
    try:
        lo_s, hi_s = text.split(",")
        lo = float(lo_s)
        hi = float(hi_s)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"interval must be 'a,b' with numbers (inf allowed): {text!r}")
    return lo, hi


def _parse_dims(text: str):
    dims = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part.lstrip("-"):
            lo_s, hi_s = part.split("-")
            dims.extend(range(int(lo_s), int(hi_s) + 1))
        elif part:
            dims.append(int(part))
    if not dims:
        raise argparse.ArgumentTypeError(f"no dimensions in {text!r}")
    return tuple(dims)


def _load_config_file(path) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            key, sep, val = text.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _apply_config_defaults(args, parser_defaults: dict):
    """Fill argparse None slots from the config file, then builtin defaults."""
    cfg = _load_config_file(args.config) if args.config else {}
    converters = {
        "interval": _parse_interval,
        "dims": _parse_dims,
        "trials": int,
        "seed": int,
        "workers": int,
        "t_samples": int,
        "size": int,
        "shift": int,
        "order": int,
        "atoms": int,
        "coeffs": int,
        "m": int,
        "k": int,
        "nodes": int,
        "dim": int,
        "tol": float,
        "center": float,
        "r": float,
        "cutoff": float,
        "grid_radius": float,
    }
    for key, default in parser_defaults.items():
        if getattr(args, key, None) is not None:
            continue
        if key in cfg:
            conv = converters.get(key, str)
            setattr(args, key, conv(cfg[key]))
        else:
            setattr(args, key, default)
    return args


def _emit(args, report: dict, margins=None) -> None:
    if getattr(args, "json", None):
        write_json_report(report, args.json)
    if getattr(args, "csv", None) and margins is not None:
        margins_to_csv(margins, args.csv)


def _print_result_lines(results: dict, indent: str = "  ") -> None:
    for key, value in results.items():
        if key in ("witness",) or isinstance(value, (dict, list)):
            continue
        print(f"{indent}{key}: {value}")


# -- subcommand runners ----------------------------------------------------------


_VERIFY_DEFAULTS = dict(function="x2", check="traceminmax", interval=(-1.0, 1.0),
                        dims=tuple(range(1, 9)), trials=1000, seed=0,
                        tol=1e-10, workers=1, t_samples=10)


def _cmd_verify(args) -> int:
    _apply_config_defaults(args, _VERIFY_DEFAULTS)
    if args.replay:
        return _cmd_replay(args)
    cfg = CampaignConfig(function=args.function, check=args.check,
                         interval=args.interval, dims=args.dims,
                         trials=args.trials, seed=args.seed, tol=args.tol,
                         workers=args.workers, t_samples=args.t_samples)
    results = run_verify(cfg)
    margins = results.get("all_margins")
    report = make_report("verify", cfg.as_dict(), results)
    _emit(args, report, margins)
    status = EXIT_VIOLATION if results["violations"] else EXIT_PASS
    print(f"verify {cfg.check} {cfg.function}: "
          f"{'FAIL' if status else 'PASS'} ({results['violations']} violations "
          f"in {cfg.trials} trials)")
    if "margins" in results:
        s = results["margins"]
        print(f"  margins: min {s['min']:.6e}  mean {s['mean']:.6e}  "
              f"max {s['max']:.6e}")
    _print_result_lines({k: v for k, v in results.items()
                         if not isinstance(v, np.ndarray)})
    if results.get("witness") and args.witness:
        with open(args.witness, "w") as fh:
            json.dump(results["witness"], fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"  witness written to {args.witness}")
    return status


def _cmd_replay(args) -> int:
    with open(args.replay) as fh:
        payload = json.load(fh)
    qdict = payload.get("quadruple", payload)
    from .inequality import quadruple_from_dict

    q = quadruple_from_dict(qdict)
    f = resolve_function(args.function)
    margin = trace_minmax_margin(f, q)
    print(f"replayed margin: {margin!r}")
    if "margin" in payload:
        stored = float(payload["margin"])
        print(f"stored margin:   {stored!r}  (|diff| = {abs(margin - stored):.3e})")
    return EXIT_VIOLATION if margin < -args.tol else EXIT_PASS


def _cmd_monotone(args) -> int:
    defaults = dict(_VERIFY_DEFAULTS)
    defaults.update(function="x", interval=(-1.0, 1.0), trials=200)
    _apply_config_defaults(args, defaults)
    cfg = CampaignConfig(function=args.function, interval=args.interval,
                         dims=args.dims, trials=args.trials, seed=args.seed,
                         tol=args.tol, workers=args.workers)
    results = run_monotone(cfg)
    report = make_report("monotone", cfg.as_dict(), results)
    _emit(args, report, results.get("all_margins"))
    status = EXIT_VIOLATION if results["violations"] else EXIT_PASS
    print(f"monotone {cfg.function}: {'FAIL' if status else 'PASS'} "
          f"(min margin {results['margins']['min']:.3e})")
    return status


def _cmd_convex(args) -> int:
    defaults = dict(_VERIFY_DEFAULTS)
    defaults.update(function="x2", trials=200)
    _apply_config_defaults(args, defaults)
    cfg = CampaignConfig(function=args.function, interval=args.interval,
                         dims=args.dims, trials=args.trials, seed=args.seed,
                         tol=args.tol, workers=args.workers)
    results = run_convex(cfg)
    report = make_report("convex", cfg.as_dict(), results)
    _emit(args, report, results.get("all_margins"))
    status = EXIT_VIOLATION if results["violations"] else EXIT_PASS
    print(f"convex {cfg.function}: {'FAIL' if status else 'PASS'} "
          f"(min margin {results['margins']['min']:.3e})")
    return status


_HANKEL_DEFAULTS = dict(function=None, center=0.0, order=None, size=4, shift=2,
                        tol=1e-9, scan=False)


def _cmd_hankel(args) -> int:
    _apply_config_defaults(args, _HANKEL_DEFAULTS)
    if bool(args.function) == bool(args.csv_in):
        print("hankel: exactly one of --function or --csv-in is required",
              file=sys.stderr)
        return EXIT_USAGE
    order = args.order
    if order is None:
        order = max(args.shift + 2 * (args.size - 1), 2 * args.size + 2)
    if args.csv_in:
        series = series_from_csv(args.csv_in, center=args.center)
    else:
        f = resolve_function(args.function)
        series = f.taylor(args.center, order + 1)
    spec = HankelSpec(args.shift, args.size, weighted=not args.unweighted)
    ok, min_eig = hankel_psd_test(series, spec, tol=args.tol,
                                  extended=args.extended)
    schur = None
    if series.order >= args.shift + 2 * (args.size - 1):
        schur = weighted_to_unweighted_check(series, args.shift, args.size)
    results = {
        "min_eig": min_eig,
        "psd": bool(ok),
        "shift": args.shift,
        "size": args.size,
        "weighted": not args.unweighted,
        "schur_identity_residual": schur,
    }
    if args.scan:
        results["first_passing_shift"] = first_passing_shift(
            series, args.size, tol=args.tol, weighted=not args.unweighted)
    report = make_report("hankel", {k: getattr(args, k) for k in
                                    ("function", "csv_in", "center", "size",
                                     "shift", "tol")}, results)
    _emit(args, report)
    print(f"hankel shift={args.shift} size={args.size} "
          f"{'weighted' if not args.unweighted else 'unweighted'}: "
          f"{'PASS' if ok else 'FAIL'} (min eig {min_eig:.6e})")
    return EXIT_PASS if ok else EXIT_VIOLATION


_REPRESENT_DEFAULTS = dict(function="neglog1mx", center=0.0, atoms=1,
                           order=None, grid_radius=None)


def _cmd_represent(args) -> int:
    _apply_config_defaults(args, _REPRESENT_DEFAULTS)
    f = resolve_function(args.function)
    try:
        rep = represent(f, args.center, args.atoms, order=args.order)
        residual = roundtrip_residual(f, args.center, args.atoms,
                                      radius=args.grid_radius)
    except MomentProblemError as exc:
        print(f"represent {args.function}: not trace minmax at center "
              f"{args.center} ({exc})")
        return EXIT_VIOLATION
    results = {
        "representation": representation_to_dict(rep),
        "roundtrip_residual": residual,
    }
    report = make_report("represent", {"function": args.function,
                                       "center": args.center,
                                       "atoms": args.atoms}, results)
    _emit(args, report)
    print(f"represent {args.function} at c={args.center}: "
          f"alpha={rep.alpha!r} beta={rep.beta!r}")
    for t, w in rep.atoms:
        print(f"  atom t={t!r} weight={w!r}")
    print(f"  roundtrip residual {residual:.3e}")
    return EXIT_PASS


_XI_DEFAULTS = dict(r=0.0, coeffs=None, m=4, k=2, nodes=400, cutoff=2.5,
                    trials=1000, dim=4, seed=0, zeros=None, tol=1e-7)


def _cmd_xi(args) -> int:
    _apply_config_defaults(args, _XI_DEFAULTS)
    table = None
    if args.zeros:
        table = load_zero_table(args.zeros)
    elif args.cross_validate or args.first_root:
        table = load_zero_table()
    ev = XiEvaluator(nodes=args.nodes, cutoff=args.cutoff, zero_table=table)
    results = {}
    status = EXIT_PASS
    csv_rows = None
    if args.coeffs is not None:
        series, errors = ev.taylor(args.r, args.coeffs, with_errors=True)
        results["coefficients"] = series.coeffs.tolist()
        results["coefficient_errors"] = errors.tolist()
        csv_rows = np.column_stack([series.coeffs, errors])
        print(f"xi coefficients about r={args.r}:")
        for i, (c, e) in enumerate(zip(series.coeffs, errors)):
            print(f"  c_{i} = {c:+.15e}  +- {e:.1e}")
    if args.hankel:
        if args.defect is not None:
            series = product_log_series(load_zero_table(args.zeros), 2 * args.k + 2 * args.m,
                                        defect_angle=args.defect)
            errors = np.abs(series.coeffs) * 1e-14 + 1e-18
            rep = rh_hankel_report(ev, args.r, m_max=args.m, k_max=args.k,
                                   series=series, series_errors=errors)
        else:
            rep = rh_hankel_report(ev, args.r, m_max=args.m, k_max=args.k)
        results["hankel"] = rep
        print(f"xi hankel shadows at r={args.r}: {rep['verdict']}")
        for cell in rep["cells"]:
            print(f"  shift={cell['shift']} size={cell['size']} "
                  f"{'w' if cell['weighted'] else 'u'} "
                  f"min={cell['min_eig']:+.3e} bar={cell['error_bar']:.1e} "
                  f"{cell['status']}")
        status = {"PASS": EXIT_PASS, "INCONCLUSIVE": EXIT_INCONCLUSIVE,
                  "FAIL": EXIT_VIOLATION}[rep["verdict"]]
    if args.cross_validate:
        cv = cross_validate(ev)
        results["cross_validation"] = cv
        print(f"xi cross validation over {cv['zeros_used']} zeros: "
              f"{'PASS' if cv['all_within_bound'] else 'FAIL'}")
        if not cv["all_within_bound"]:
            status = EXIT_VIOLATION
        csv_rows = np.asarray([[row["x"], row["quadrature"], row["product"],
                                row["log_diff"], row["log_bound"]]
                               for row in cv["rows"]])
    if args.first_root:
        root = find_first_root(ev)
        results["first_root"] = root
        print(f"first positive root: {root!r} "
              f"(table: {float(ev.zero_table[0])!r})")
    if args.checks:
        mc = rh_matrix_checks(ev, n=args.dim, trials=args.trials, seed=args.seed)
        results["matrix_checks"] = mc
        print(f"xi matrix checks ({mc['trials']} trials, n <= {args.dim}): "
              f"min trace-minmax margin {mc['trace_minmax_min']:.3e}, "
              f"monotone min {mc['monotone_min']:.3e}")
        if mc["trace_minmax_min"] < -args.tol or mc["monotone_min"] < -args.tol:
            status = EXIT_VIOLATION
    if not results:
        print("xi: nothing to do (pass --coeffs/--hankel/--cross-validate/"
              "--first-root/--checks)", file=sys.stderr)
        return EXIT_USAGE
    report = make_report("xi", {"r": args.r, "nodes": args.nodes,
                                "cutoff": args.cutoff, "seed": args.seed},
                         results)
    _emit(args, report, csv_rows)
    return status


# -- parser ----------------------------------------------------------------------


# lets values like "-1,1" or "-inf,13" follow an option without being read
# as a flag
_VALUE_MATCHER = re.compile(r"^-\d|^-\.\d|^-inf")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="traceminmax",
        description="Randomized verification of trace minmax matrix "
                    "inequalities and their Hankel/representation criteria.")
    parser._negative_number_matcher = _VALUE_MATCHER
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p._negative_number_matcher = _VALUE_MATCHER
        p.add_argument("--config", help="key = value config file; flags win")
        p.add_argument("--json", help="write a JSON report here")
        p.add_argument("--csv", help="write margins/coefficients CSV here")

    p = sub.add_parser("verify", help="inequality campaigns over random quadruples")
    p.add_argument("--function", help="registry spec, e.g. x2, exp, pow:t=1.5")
    p.add_argument("--check", choices=("traceminmax", "det", "lamecor",
                                       "isoperimetric"))
    p.add_argument("--interval", type=_parse_interval, help="a,b (inf allowed)")
    p.add_argument("--dims", type=_parse_dims, help="e.g. 1-8 or 2,4")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--t-samples", dest="t_samples", type=int)
    p.add_argument("--witness", help="write the worst violating quadruple here")
    p.add_argument("--replay", help="recompute the margin of a stored witness")
    common(p)
    p.set_defaults(runner=_cmd_verify)

    p = sub.add_parser("monotone", help="matrix monotonicity margins")
    p.add_argument("--function")
    p.add_argument("--interval", type=_parse_interval)
    p.add_argument("--dims", type=_parse_dims)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--workers", type=int)
    common(p)
    p.set_defaults(runner=_cmd_monotone)

    p = sub.add_parser("convex", help="matrix convexity margins")
    p.add_argument("--function")
    p.add_argument("--interval", type=_parse_interval)
    p.add_argument("--dims", type=_parse_dims)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--workers", type=int)
    common(p)
    p.set_defaults(runner=_cmd_convex)

    p = sub.add_parser("hankel", help="Hankel positivity test of a series")
    p.add_argument("--function")
    p.add_argument("--csv-in", dest="csv_in", help="coefficients, one per line")
    p.add_argument("--center", type=float)
    p.add_argument("--order", type=int)
    p.add_argument("--size", type=int)
    p.add_argument("--shift", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--unweighted", action="store_true")
    p.add_argument("--extended", action="store_true",
                   help="extended precision for sizes up to 20")
    p.add_argument("--scan", action="store_true",
                   help="also search for the first passing shift")
    common(p)
    p.set_defaults(runner=_cmd_hankel)

    p = sub.add_parser("represent", help="recover the integral representation")
    p.add_argument("--function")
    p.add_argument("--center", type=float)
    p.add_argument("--atoms", type=int)
    p.add_argument("--order", type=int)
    p.add_argument("--grid-radius", dest="grid_radius", type=float)
    common(p)
    p.set_defaults(runner=_cmd_represent)

    p = sub.add_parser("xi", help="Riemann Xi evaluation and its shadows")
    p.add_argument("--r", type=float, help="expansion center")
    p.add_argument("--coeffs", type=int, help="emit this many series orders")
    p.add_argument("--hankel", action="store_true")
    p.add_argument("--m", type=int, help="max Hankel size")
    p.add_argument("--k", type=int, help="max shift index (shift = 2k)")
    p.add_argument("--defect", type=float,
                   help="inject a complex zero pair at this angle (control)")
    p.add_argument("--cross-validate", dest="cross_validate", action="store_true")
    p.add_argument("--first-root", dest="first_root", action="store_true")
    p.add_argument("--checks", action="store_true",
                   help="matrix inequality campaign with f = -log Xi")
    p.add_argument("--trials", type=int)
    p.add_argument("--dim", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--nodes", type=int)
    p.add_argument("--cutoff", type=float)
    p.add_argument("--zeros", help="zero ordinate table (one per line)")
    common(p)
    p.set_defaults(runner=_cmd_xi)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.runner(args)
    except (DomainError, MomentProblemError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
