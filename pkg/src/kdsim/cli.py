"""Command-line front end.

Subcommands:
  kd run --preset fig2 --out DIR [--svg] [--tail-tol X]
  kd run --config FILE --out DIR [--svg] [--tail-tol X]
  kd preset-list
  kd verify

Exit codes: 0 success, 2 config error, 3 physics-domain error,
4 numeric or oracle-mismatch error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import identical, multimode, single_mode
from .errors import ConfigError, ConvergenceError, DomainError, NumericsError
from .grating import GratingConfig
from .numerics import bessel_jn, quad2d, schmidt_via_svd
from .runconfig import PRESET_DESCRIPTIONS, PRESETS, parse_config, preset, with_tail_tolerance
from .runner import execute


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kd", description="two-particle light-grating diffraction simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment and write CSV/manifest outputs")
    source = run_p.add_mutually_exclusive_group(required=True)
    source.add_argument("--preset", choices=sorted(PRESETS), help="named figure preset")
    source.add_argument("--config", type=Path, help="key=value config file")
    run_p.add_argument("--out", type=Path, required=True, help="output directory")
    run_p.add_argument("--svg", action="store_true", help="also render an SVG figure")
    run_p.add_argument("--tail-tol", type=float, default=None,
                       help="replace the configured n_max by automatic truncation at this tail mass")

    sub.add_parser("preset-list", help="list the available figure presets")
    sub.add_parser("verify", help="run the oracle cross-check suite and print residuals")
    return parser


def _cmd_run(args) -> int:
    if args.preset is not None:
        config = preset(args.preset)
        base = args.preset
    else:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 1
        config = parse_config(text)
        base = None
    if args.tail_tol is not None:
        config = with_tail_tolerance(config, args.tail_tol)
    result = execute(config, args.out, svg=args.svg, base_name=base)
    for path in result.csv_paths:
        print(f"wrote {path}")
    print(f"wrote {result.manifest_path}")
    if result.figure_path is not None:
        print(f"wrote {result.figure_path}")
    return 0


def _cmd_preset_list() -> int:
    for name in sorted(PRESETS):
        print(f"{name}: {PRESET_DESCRIPTIONS[name]}")
    return 0


def _verify_checks():
    """Yield (name, residual, tolerance) for the oracle cross-check battery."""
    total = sum(abs(bessel_jn(n, 1.0)) ** 2 for n in range(-40, 41))
    yield "bessel unitarity (w=1, |n|<=40)", abs(total - 1.0), 1e-12

    # power-series reference for J_1(1)
    half, term, series = 0.5, 0.5, 0.5
    for k in range(1, 25):
        term *= -(half * half) / (k * (k + 1))
        series += term
    yield "bessel vs power series (J_1(1))", abs(bessel_jn(1, 1.0) - series), 1e-12

    value, _ = quad2d(lambda p, q: np.exp(-p * p - q * q))
    yield "quadrature Gaussian (pi)", abs(value - math.pi), 1e-12

    state = multimode.GaussianEntangledState(1.0, 0.9, 1.1)
    axis = np.linspace(-8.0, 8.0, 401)
    kernel = multimode.initial_amplitude(state, axis[:, None], axis[None, :])
    svd = schmidt_via_svd(kernel, axis[1] - axis[0])
    closed = multimode.schmidt_number(state)
    yield "schmidt svd vs closed form", abs(svd - closed) / closed, 1e-3

    left = GratingConfig(w=0.3, k=0.2, n_max=2)
    right = GratingConfig(w=0.3, k=0.3, n_max=2)
    analytic = multimode.norm_integral_analytic(state, left, right)
    quad = multimode.norm_integral_quadrature(state, left, right)
    yield "normalization sum vs quadrature", abs(analytic - quad) / analytic, 1e-8

    theta_a = identical.overlap_analytic(state)
    theta_q = identical.overlap_quadrature(state)
    yield "overlap closed form vs quadrature", abs(theta_a - theta_q), 1e-8

    grating = GratingConfig(w=0.3, k=0.2, n_max=2)
    for stats in identical.ParticleStatistics:
        pair = identical.symmetrize(state, stats, grating)
        ana = identical.norm_integral_identical(pair)
        qd = identical.norm_integral_identical_quadrature(pair)
        yield f"identical norm vs quadrature ({stats.value})", abs(ana - qd) / ana, 1e-8

    pair = single_mode.SingleModePair(
        p=0.0, q=0.8,
        left=GratingConfig(w=1.0, k=0.2, n_max=8),
        right=GratingConfig(w=1.0, k=0.2, n_max=8),
    )
    residual = abs(single_mode.total_detection_probability(pair) - 1.0)
    yield "channel bookkeeping (sum of probabilities)", residual, 1e-10


def _cmd_verify() -> int:
    failed = 0
    for name, residual, tol in _verify_checks():
        ok = residual < tol
        failed += not ok
        print(f"{name}: residual = {residual:.3e} (tol {tol:.0e}) {'PASS' if ok else 'FAIL'}")
    if failed:
        print(f"{failed} check(s) failed", file=sys.stderr)
        return 4
    print("all oracle cross-checks passed")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "preset-list":
            return _cmd_preset_list()
        return _cmd_verify()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (NumericsError, ConvergenceError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
