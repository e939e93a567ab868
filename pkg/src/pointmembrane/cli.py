"""Command-line driver for the built-in experiments."""
from __future__ import annotations

import argparse
import logging
import sys

from .experiments import (ExperimentConfig, export_outputs, run_convergence, run_orientation,
                          run_single_null, run_sweep, run_two_particle_rotation)

log = logging.getLogger("pointmembrane")


def _levels(text: str) -> list[int]:
    """'2-6' or '2,3,5'."""
    if "-" in text:
        a, b = text.split("-", 1)
        return list(range(int(a), int(b) + 1))
    return [int(v) for v in text.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pointmembrane",
                                description="Membrane energy and particle-motion derivative experiments.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML or JSON experiment config file")
    common.add_argument("--levels", type=_levels, help="mesh levels, e.g. 2-6 or 4,5,6")
    common.add_argument("--level", type=int, help="mesh level for single-level experiments")
    common.add_argument("--beta", type=float, help="point-constraint penalty (default 1e8 kappa/R^2)")
    common.add_argument("--delta", type=float, help="curl-field support diameter (default 3h, clamped)")
    common.add_argument("--out", help="output directory (default ./results)")
    common.add_argument("--no-vtk", action="store_true", help="skip VTK mesh output")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("convergence", parents=[common], help="six-point refinement ladder with EOC")
    sub.add_parser("sweep-aligned", parents=[common], help="point sweep with vertex-aligned sites")
    sub.add_parser("sweep-offgrid", parents=[common], help="point sweep with sites off the grid")
    sub.add_parser("two-particle-rotation", parents=[common], help="rotate one of two particles")
    sub.add_parser("single-null", parents=[common], help="rotate a lone particle over levels")
    o = sub.add_parser("orientation", parents=[common], help="attraction/repulsion by orientation")
    o.add_argument("--second-at", choices=["image", "preimage"], default="image",
                   help="placement of the equatorial particle")
    return p


def make_config(args) -> ExperimentConfig:
    overrides = {"levels": args.levels, "level": args.level, "beta": args.beta,
                 "delta": args.delta, "out_dir": args.out}
    if args.config:
        return ExperimentConfig.from_file(args.config, **overrides)
    return ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = make_config(args)
        cmd = args.command
        if cmd == "convergence":
            result = run_convergence(cfg)
        elif cmd == "sweep-aligned":
            result = run_sweep(cfg, aligned=True)
        elif cmd == "sweep-offgrid":
            result = run_sweep(cfg, aligned=False)
        elif cmd == "two-particle-rotation":
            result = run_two_particle_rotation(cfg)
        elif cmd == "single-null":
            result = run_single_null(cfg)
        else:
            result = run_orientation(cfg, second_at=args.second_at)
        files = export_outputs(result, cfg, ("csv",) if args.no_vtk else ("csv", "vtk"))
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for c in result.checks:
        print(c.line())
    for f in files:
        print(f"wrote {f}")
    if not result.passed:
        print(f"{result.name}: acceptance checks failed", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
