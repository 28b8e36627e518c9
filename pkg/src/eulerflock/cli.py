"""Command-line entry point: ``eulerflock {simulate,sweep,validate,oracle}``.

Exit codes: 0 clean finish, 1 configuration or runtime error, 2 detected
blow-up (an experimental outcome, not a failure).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .runner import EXIT_BLOWUP, EXIT_ERROR, EXIT_OK, OUTPUT_ENV, run_scenario, run_sweep
from .scenario import ScenarioError, eval_number, load_scenario, serialize_scenario


def _number_list(text: str) -> list[float]:
    try:
        return [eval_number(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _number(text: str) -> float:
    try:
        return float(eval_number(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eulerflock",
        description="Spectral simulator and diagnostics for 1D Euler alignment dynamics.",
        epilog=f"The output directory may be overridden by the {OUTPUT_ENV} environment variable.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario file")
    p.add_argument("scenario")
    p.add_argument("-o", "--output-dir", help="output directory (overrides the scenario and environment)")
    p.add_argument("-q", "--quiet", action="store_true", help="do not print the summary")

    p = sub.add_parser("sweep", help="run a scenario over the values of one parameter")
    p.add_argument("scenario")
    p.add_argument("--axis", required=True, help="parameter as section.key, e.g. initial_data.mass")
    p.add_argument("--values", required=True, type=_number_list, help="comma-separated values")
    p.add_argument("-o", "--output-dir")

    p = sub.add_parser("validate", help="check a scenario file and print its canonical form")
    p.add_argument("scenario")

    p = sub.add_parser("oracle", help="evaluate a slow reference computation")
    osub = p.add_subparsers(dest="operator", required=True)
    o = osub.add_parser("c_alpha", help="fractional constant by quadrature and closed form")
    o.add_argument("--alpha", type=_number, required=True)
    o = osub.add_parser("kernel", help="periodized kernel: fast, brute-force and Hurwitz zeta")
    o.add_argument("--alpha", type=_number, required=True)
    o.add_argument("--x", type=_number, required=True)
    o.add_argument("--terms", type=int, default=10 ** 6)
    o = osub.add_parser("fractional", help="spectral vs direct fractional Laplacian of a random trig polynomial")
    o.add_argument("--alpha", type=_number, required=True)
    o.add_argument("--degree", type=int, default=8)
    o.add_argument("--n", type=int, default=64)
    o.add_argument("--seed", type=int, default=0)
    o = osub.add_parser("dissipation", help="pointwise dissipation of cos at x = 0")
    o.add_argument("--alpha", type=_number, default=1.0)
    o.add_argument("--n", type=int, default=512)
    o = osub.add_parser("commutator", help="spectral vs direct double-sum alignment force")
    o.add_argument("--variant", choices=("bounded", "mt"), default="bounded")
    o.add_argument("--profile", default="raised_cosine")
    o.add_argument("--n", type=int, default=256)
    return parser


def _oracle(args) -> dict:
    from . import oracles
    from .kernels import KernelSpec, commutator_force, mt_normalized_force, periodized_kernel_eval
    from .spectral import PeriodicGrid, dissipation_pointwise, fractional_constant, fractional_laplacian_apply

    if args.operator == "c_alpha":
        return {"alpha": args.alpha, "quadrature": fractional_constant(args.alpha),
                "closed_form": oracles.fractional_constant_closed(args.alpha)}
    if args.operator == "kernel":
        return {"alpha": args.alpha, "x": args.x,
                "fast": periodized_kernel_eval(args.alpha, args.x),
                "bruteforce": oracles.periodized_kernel_bruteforce(args.alpha, args.x, args.terms),
                "hurwitz_zeta": oracles.periodized_kernel_zeta(args.alpha, args.x)}
    if args.operator == "fractional":
        grid = PeriodicGrid(args.n)
        c = oracles.random_trig_coeffs(np.random.default_rng(args.seed), args.degree)
        spec = fractional_laplacian_apply(grid, oracles.trig_eval(c, grid.x), args.alpha)
        direct = oracles.fractional_laplacian_direct(c, grid.x, args.alpha)
        return {"alpha": args.alpha, "n": args.n, "sup_difference": float(np.max(np.abs(spec - direct))),
                "sup_value": float(np.max(np.abs(spec)))}
    if args.operator == "dissipation":
        grid = PeriodicGrid(args.n)
        return {"alpha": args.alpha, "grid": dissipation_pointwise(grid, np.cos(grid.x), 0, args.alpha),
                "quadrature": oracles.dissipation_quad(np.cos, 0.0, args.alpha, 0.0),
                "closed_form": oracles.dissipation_cos_closed(args.alpha)}
    if args.operator == "commutator":
        grid = PeriodicGrid(args.n)
        ctor = KernelSpec.mt if args.variant == "mt" else KernelSpec.bounded
        kern = ctor(args.profile)
        rho, u = 1.0 + 0.5 * np.cos(grid.x), np.sin(grid.x)
        if args.variant == "mt":
            fast, slow = mt_normalized_force(grid, kern, rho, u), oracles.mt_force_direct(grid, kern, rho, u)
        else:
            fast, slow = commutator_force(grid, kern, rho, u), oracles.commutator_direct(grid, kern, rho, u)
        return {"variant": args.variant, "profile": args.profile, "n": args.n,
                "sup_difference": float(np.max(np.abs(fast - slow)))}
    raise ValueError(args.operator)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            s = load_scenario(args.scenario)
            sys.stdout.write(serialize_scenario(s))
            return EXIT_OK
        if args.command == "simulate":
            res = run_scenario(load_scenario(args.scenario), args.output_dir)
            if not args.quiet:
                info = {"status": res.summary["status"], "t_final": res.summary["t_final"],
                        "directory": str(res.directory), "blowup": res.summary["blowup"]}
                print(json.dumps(info, indent=2))
            return res.exit_code
        if args.command == "sweep":
            path, rows = run_sweep(load_scenario(args.scenario), args.axis, args.values, args.output_dir)
            print(path)
            return EXIT_BLOWUP if any(r["exit_code"] == EXIT_BLOWUP for r in rows) else EXIT_OK
        if args.command == "oracle":
            out = _oracle(args)
            print(json.dumps({k: (v if not isinstance(v, float) or math.isfinite(v) else str(v))
                              for k, v in out.items()}, indent=2))
            return EXIT_OK
    except ScenarioError as exc:
        print(f"error: {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
