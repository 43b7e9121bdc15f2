"""Command line: construct frequency sets, certify them, split grids.

Exit codes: 0 success / all checks pass, 1 certification flagged,
2 invalid input (files, dimensions, grids), 3 mathematical failure
(rank deficiency, infeasible subproblems, eta search giving up).

A default config file can be named in the ZONOBASIS_CONFIG environment
variable; explicit --config and per-flag overrides win over it.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .certify import certify
from .config import CONFIG_ENV_VAR, Config
from .construction import construct
from .decomposition import decompose, recompose
from .errors import InputError, MathError
from . import fileio

EXIT_OK = 0
EXIT_FLAGGED = 1
EXIT_INPUT = 2
EXIT_MATH = 3


def _load_config(args) -> Config:
    path = args.config or os.environ.get(CONFIG_ENV_VAR)
    config = Config.from_file(path) if path else Config()
    overrides = {}
    if getattr(args, "eta", None) is not None:
        overrides["eta"] = args.eta
    if getattr(args, "eta_mode", None) is not None:
        overrides["eta_mode"] = args.eta_mode
    if getattr(args, "radius", None):
        overrides["radii"] = tuple(args.radius)
    if getattr(args, "grid", None) is not None:
        overrides["grid_n"] = args.grid
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "window", None) is not None:
        overrides["window"] = args.window
    return config.override(**overrides)


def _cmd_construct(args) -> int:
    config = _load_config(args)
    Z = fileio.read_zonotope(args.spec)
    freq_set, trace = construct(Z, config)
    out = Path(args.out)
    window = config.window_radius
    fileio.write_frequency_set(out / "lambda.json", freq_set, window)
    fileio.write_trace(out / "trace.json", trace)
    points, tags = freq_set.window(window)
    unique, counts = np.unique(tags, return_counts=True)
    summary = ", ".join(f"{u}={c}" for u, c in zip(unique.tolist(), counts.tolist()))
    print(
        f"wrote {out / 'lambda.json'} and {out / 'trace.json'}: "
        f"{points.shape[0]} points in [-{window:g}, {window:g}]^{freq_set.dim} ({summary})"
    )
    return EXIT_OK


def _cmd_certify(args) -> int:
    config = _load_config(args)
    Z = fileio.read_zonotope(args.spec)
    freq_set, window = fileio.read_frequency_set(args.freqs)
    points, _ = freq_set.window(window)
    if points.shape[0] and points.shape[1] != Z.dim:
        raise InputError(
            f"frequency set dimension {points.shape[1]} does not match zonotope {Z.dim}"
        )
    needed = max(max(config.radii), config.density_radius)
    if window + 1e-9 < needed:
        raise InputError(
            f"stored window {window:g} is smaller than the largest certification "
            f"radius {needed:g}; re-run construct with --window {needed:g}"
        )
    trace = None
    trace_path = args.trace or str(Path(args.freqs).with_name("trace.json"))
    if Path(trace_path).exists():
        trace = fileio.read_trace(trace_path)
    report = certify(Z, freq_set, config, trace=trace)
    out = Path(args.out)
    fileio.write_report(out / "report.json", report)
    (out / "report.txt").write_text(report.render_text() + "\n", encoding="utf-8")
    (out / "density.csv").write_text(report.density_csv(), encoding="utf-8")
    (out / "spectra.csv").write_text(report.spectra_csv(), encoding="utf-8")
    print(report.render_text())
    return EXIT_OK if report.all_pass else EXIT_FLAGGED


def _cmd_decompose(args) -> int:
    _load_config(args)  # validates --config and shared flags for consistency
    Z = fileio.read_zonotope(args.spec)
    fn = fileio.read_grid_function(args.values)
    if fn.support is None:
        fn = type(fn)(fn.grid, fn.values, support=Z)
    parts = decompose(fn)
    out = Path(args.out)
    suffix = ".npz" if args.binary else ".json"
    fileio.write_grid_function(out / f"part_g{suffix}", parts.g)
    fileio.write_grid_function(out / f"part_h{suffix}", parts.h)
    rebuilt = recompose(parts.g, parts.h)
    residual = float(np.max(np.abs(rebuilt.values - fn.values)))
    print(
        f"wrote {out / ('part_g' + suffix)} and {out / ('part_h' + suffix)}; "
        f"round-trip residual {residual:.3e}"
    )
    return EXIT_OK if residual <= 1e-12 else EXIT_MATH


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zonobasis",
        description=(
            "Build exponential-basis frequency sets for zonotopes and run the "
            "numerical certification harness."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file (overrides $%s)" % CONFIG_ENV_VAR)
        p.add_argument("--eta", type=float, help="perturbation radius in (0, 1/2]; 0 = control")
        p.add_argument("--eta-mode", choices=("fixed", "adaptive"), dest="eta_mode")
        p.add_argument(
            "--radius",
            type=float,
            action="append",
            help="certification radius, repeatable for a ladder",
        )
        p.add_argument("--grid", type=int, help="grid resolution (power of two)")
        p.add_argument("--seed", type=int, help="RNG seed for randomized trials")
        p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("construct", help="build the frequency set for a zonotope spec")
    p.add_argument("spec", help="zonotope spec JSON")
    p.add_argument("--window", type=float, help="window radius for the written set")
    add_common(p)
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("certify", help="run the evidence harness on a stored set")
    p.add_argument("spec", help="zonotope spec JSON")
    p.add_argument("freqs", help="frequency-set JSON from construct")
    p.add_argument("--trace", help="construction trace JSON (default: next to freqs)")
    add_common(p)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("decompose", help="split a grid function into its two parts")
    p.add_argument("spec", help="zonotope spec JSON (support of the function)")
    p.add_argument("values", help="grid-function file (.json or .npz)")
    p.add_argument("--binary", action="store_true", help="write .npz instead of JSON")
    add_common(p)
    p.set_defaults(func=_cmd_decompose)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MathError as exc:
        print(f"math error: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
