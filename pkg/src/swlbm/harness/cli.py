"""Command-line entry point.

Exit codes: 0 success, 1 invalid input or configuration, 2 solver abort.
The output directory is taken from ``--out``, else from the
``SWLBM_OUTPUT_DIR`` environment variable, else from the configuration.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from ..reference import VacuumError, exact_riemann
from ..sw_core import PhysParams
from .cases import DESCRIPTIONS, builtin_config, builtin_dict, builtin_names
from .config import ConfigError, load_config
from .metrics import l1_error
from .runner import run_case

EXIT_OK, EXIT_INVALID, EXIT_ABORT = 0, 1, 2


def _load(ref):
    """A config file path, or the name of a built-in case."""
    if os.path.exists(ref):
        return load_config(ref)
    if ref in builtin_names():
        return builtin_config(ref)
    raise ConfigError("<file>", f"no such file or built-in case: {ref}")


def _pair(text):
    try:
        rho, u = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'rho,u', got {text!r}") from None
    return rho, u


def _dump(obj):
    print(json.dumps(obj, indent=2, default=float))


def cmd_run(args):
    cfg = _load(args.config)
    report = run_case(cfg, out_dir=args.out)
    _dump(report.to_dict())
    if not report.ok:
        print(f"error: {report.error}", file=sys.stderr)
        return EXIT_ABORT
    return EXIT_OK


def cmd_exact(args):
    if not (args.left[0] > 0 and args.right[0] > 0):
        print("error: densities must be positive", file=sys.stderr)
        return EXIT_INVALID
    if not args.time > 0:
        print("error: --time must be positive", file=sys.stderr)
        return EXIT_INVALID
    params = PhysParams(rho0=args.rho0, p0=args.p0)
    try:
        sol = exact_riemann(args.left, args.right, params)
    except VacuumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ABORT
    out = {
        "rho_star": sol.rho_star,
        "u_star": sol.u_star,
        "left_wave": sol.left_wave,
        "left_speeds": sol.left_speeds,
        "right_wave": sol.right_wave,
        "right_speeds": sol.right_speeds,
        "time": args.time,
    }
    if args.csv:
        from .io import write_csv_1d
        from ..sw_core import pressure

        lo, hi = args.domain
        x = lo + (np.arange(args.n) + 0.5) * (hi - lo) / args.n
        rho, u = sol.sample((x - args.diaphragm) / args.time)
        out["file"] = write_csv_1d(args.csv, x, rho, u, pressure(rho, params))
    _dump(out)
    return EXIT_OK


def cmd_compare(args):
    a, b = _load(args.config_a), _load(args.config_b)
    ra = run_case(a, out_dir=args.out)
    rb = run_case(b, out_dir=args.out)
    for r in (ra, rb):
        if not r.ok:
            print(f"error: {r.name} ({r.solver}) aborted: {r.error}", file=sys.stderr)
            return EXIT_ABORT
    fa, fb = ra.fields["rho"], rb.fields["rho"]
    if fa.shape != fb.shape:
        print(f"error: meshes differ: {fa.shape} vs {fb.shape}", file=sys.stderr)
        return EXIT_INVALID
    mask = ra.fields.get("fluid")
    out = {
        "a": f"{ra.name} ({ra.solver})",
        "b": f"{rb.name} ({rb.solver})",
        "l1_rho": l1_error(fa, fb, mask=mask),
        "mean_rho": float(np.mean(fa if mask is None else fa[mask])),
    }
    out["l1_rho_relative"] = out["l1_rho"] / out["mean_rho"]
    _dump(out)
    return EXIT_OK


def cmd_cases(args):
    if args.action == "list":
        width = max(map(len, builtin_names()))
        for name in builtin_names():
            print(f"{name:<{width}}  {DESCRIPTIONS.get(name, '')}")
        return EXIT_OK
    if args.name not in builtin_names():
        print(f"error: unknown case {args.name!r}", file=sys.stderr)
        return EXIT_INVALID
    _dump(builtin_dict(args.name))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="swlbm", description="Lattice Boltzmann shallow water cases and references.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a case from a JSON config or a built-in name")
    r.add_argument("config")
    r.add_argument("--out", help="output directory")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("exact-riemann", help="solve a Riemann problem exactly")
    e.add_argument("--left", type=_pair, required=True, metavar="RHO,U")
    e.add_argument("--right", type=_pair, required=True, metavar="RHO,U")
    e.add_argument("--time", type=float, required=True)
    e.add_argument("--rho0", type=float, default=1.0)
    e.add_argument("--p0", type=float, default=0.5)
    e.add_argument("--csv", help="also sample the solution into this csv file")
    e.add_argument("--n", type=int, default=80, help="cells for --csv")
    e.add_argument("--domain", type=float, nargs=2, default=(0.0, 1.0), metavar=("X0", "X1"))
    e.add_argument("--diaphragm", type=float, default=0.5)
    e.set_defaults(func=cmd_exact)

    c = sub.add_parser("compare", help="run two cases and report the L1 density difference")
    c.add_argument("config_a")
    c.add_argument("config_b")
    c.add_argument("--out", help="output directory")
    c.set_defaults(func=cmd_compare)

    k = sub.add_parser("cases", help="list or show built-in cases")
    k.add_argument("action", choices=("list", "show"))
    k.add_argument("name", nargs="?")
    k.set_defaults(func=cmd_cases)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; report those as invalid input
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    if getattr(args, "action", None) == "show" and not args.name:
        print("error: 'cases show' needs a case name", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
