"""Command line entry point: ``cdpolar sweep | decompose | selftest``.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 every sweep point failed.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .algebra import CdElement
from .factor import SolverConfig, solve
from .hahn_snopek import DegenerateComponents, hs_angles, hs_components, hs_error
from .polar import to_basic_polar
from .quaternion import euler_decompose
from .sphere import gaussian_unit
from .sweep import EXPERIMENTS, SweepSpec, run_sweep

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_ALL_FAILED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _coords(text: str) -> np.ndarray:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad coordinate list: {exc}") from None
    if len(values) != 8:
        raise argparse.ArgumentTypeError(f"expected 8 coordinates, got {len(values)}")
    return np.array(values)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cdpolar", description="Octonion polar-form experiments.")
    p.add_argument("--version", action="version", version=f"cdpolar {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", help="run a single-angle sweep and write CSV")
    sw.add_argument("--experiment", choices=EXPERIMENTS, required=True)
    sw.add_argument("--vary", type=int, choices=range(1, 8), required=True, metavar="K")
    sw.add_argument("--grid", type=int, default=181, metavar="N")
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--out", required=True, metavar="PATH")
    sw.add_argument("--parallel", action="store_true", help="solve points independently in worker processes")

    dc = sub.add_parser("decompose", help="report every polar form of one octonion")
    target = dc.add_mutually_exclusive_group(required=True)
    target.add_argument("--coords", type=_coords, metavar="x0,...,x7")
    target.add_argument(
        "--random", type=int, metavar="SEED", help="use a unit octonion drawn uniformly on the sphere (Gaussian, normalized)"
    )
    dc.add_argument("--tol", type=float, default=1e-10)
    dc.add_argument("--starts", type=int, default=20)
    dc.add_argument("--seed", type=int, default=0)
    dc.add_argument("--csv", action="store_true", help="emit one CSV row instead of text")

    st = sub.add_parser("selftest", help="run the invariant checks")
    st.add_argument("--quick", action="store_true", help="smaller sample sizes")
    return p


def _cmd_sweep(args: argparse.Namespace) -> int:
    if args.grid < 2:
        print("cdpolar: --grid must be at least 2", file=sys.stderr)
        return EXIT_USAGE
    spec = SweepSpec(args.experiment, args.vary, args.grid, args.seed, args.out, args.parallel)
    try:
        records = run_sweep(spec)
    except OSError as exc:
        print(f"cdpolar: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    if spec.experiment == "hs-recon":
        ok = sum(r.hs_error is not None for r in records)
    else:
        ok = sum(r.converged for r in records)
    print(f"wrote {len(records)} rows to {args.out} ({ok} ok)")
    return EXIT_OK if ok else EXIT_ALL_FAILED


def _fmt_vec(v: Sequence[float]) -> str:
    return "[" + ", ".join(f"{x: .10f}" for x in v) + "]"


def _cmd_decompose(args: argparse.Namespace) -> int:
    x = args.coords if args.random is None else gaussian_unit(np.random.default_rng(args.random))
    modulus = float(np.linalg.norm(x))
    if modulus == 0.0:
        print("cdpolar: the zero octonion has no polar form", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = SolverConfig(tol=args.tol, n_starts=args.starts, rng_seed=args.seed)
    except ValueError as exc:
        print(f"cdpolar: {exc}", file=sys.stderr)
        return EXIT_USAGE
    o = CdElement(x)
    bp = to_basic_polar(o)
    try:
        hs = hs_angles(hs_components(o))
        err = hs_error(o)
    except DegenerateComponents:
        hs, err = None, math.nan
    sol = solve(CdElement(x / modulus), cfg)
    q = euler_decompose(CdElement(sol.y)) if np.any(sol.y) else None

    if args.csv:
        hs_vals = [getattr(hs, f"psi{k}") for k in range(1, 8)] if hs else [math.nan] * 7
        q_vals = [q.phi, q.psi, q.theta] if q else [math.nan] * 3
        header = (
            ["modulus", "theta"] + [f"mu{k}" for k in range(1, 8)]
            + [f"hs_psi{k}" for k in range(1, 8)] + ["hs_error"]
            + ["y0", "y1", "y2", "y3", "phi4", "phi5", "phi6", "phi7"]
            + ["q_phi", "q_psi", "q_theta", "residual_norm", "converged"]
        )
        row = (
            [modulus, bp.theta] + bp.axis.coeffs[1:].tolist() + hs_vals + [err]
            + sol.params.tolist() + q_vals + [sol.residual_norm]
        )
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerow([repr(float(v)) for v in row] + ["1" if sol.converged else "0"])
        return EXIT_OK

    print(f"octonion       {_fmt_vec(x)}")
    print(f"modulus        {modulus:.12g}")
    print(f"basic polar    theta = {bp.theta:.12f}")
    print(f"               mu    = {_fmt_vec(bp.axis.coeffs[1:])}")
    if hs is None:
        print("seven-angle    degenerate (vanishing modulus quotient)")
    else:
        angles = [getattr(hs, f"psi{k}") for k in range(1, 8)]
        print(f"seven-angle    psi   = {_fmt_vec(angles)}")
        print(f"               error = {err:.3e}")
    status = "converged" if sol.converged else "FAILED"
    print(f"factored form  y     = {_fmt_vec(sol.y)}")
    print(f"               phi   = {_fmt_vec(sol.phi)}")
    print(f"               residual = {sol.residual_norm:.3e} ({status}, start {sol.start_index}, {sol.iterations} iterations)")
    if q is not None:
        print(f"quaternion q   (phi, psi, theta) = ({q.phi:.10f}, {q.psi:.10f}, {q.theta:.10f})")
    return EXIT_OK if sol.converged else EXIT_ALL_FAILED


def _cmd_selftest(args: argparse.Namespace) -> int:
    from .selftest import run_all

    results = run_all(quick=args.quick)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_USAGE


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"sweep": _cmd_sweep, "decompose": _cmd_decompose, "selftest": _cmd_selftest}
    return handler[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
