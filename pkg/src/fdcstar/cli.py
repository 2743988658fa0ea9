"""Command line entry point.

Exit codes: 0 every check passed, 1 a check failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import functionals as fn
from .algebra import AlgebraDescriptor
from .experiments import COUNTS, RUNNERS, SCHEMA_VERSION, TOLERANCES, ConfigError, ExperimentConfig
from .gns import gns, validate_gns
from .io import dumps, load_json_arg

SEED_ENV = "FDCSTAR_SEED"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _tol_override(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("expected NAME=VALUE")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {value!r}") from None


def _common(p: argparse.ArgumentParser):
    p.add_argument("--algebra", help="block sizes, e.g. 2,1")
    p.add_argument("--dim", type=int, help="ambient Hilbert space dimension (default d_min)")
    p.add_argument("--seed", type=int, help=f"base seed (default ${SEED_ENV} or 0)")
    p.add_argument("--output", type=Path, help="write the JSON report here instead of stdout")
    p.add_argument("--pretty", action="store_true", help="indent the JSON output")
    p.add_argument("--config", help="JSON config file (flags override its values)")


def _experiment_flags(p: argparse.ArgumentParser):
    p.add_argument("--samples", type=int, help="use this sample count for every suite")
    p.add_argument("--tol-profile", choices=["default", "strict"])
    p.add_argument("--tol", type=_tol_override, action="append", default=[], metavar="NAME=VALUE",
                   help=f"override one tolerance; names: {', '.join(sorted(TOLERANCES))}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdcstar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run every invariant suite")
    _common(p)
    _experiment_flags(p)

    p = sub.add_parser("lift-experiment", help="local lift table along geometric segments")
    _common(p)
    _experiment_flags(p)
    p.add_argument("--steps", type=int, help="rows per table (default 12)")
    p.add_argument("--base-rank", type=int, help="rank of the sampled base quasi-state (default full)")

    p = sub.add_parser("duality-roundtrip", help="field -> affine function -> element reconstruction")
    _common(p)
    _experiment_flags(p)

    p = sub.add_parser("gns", help="GNS triple of a functional")
    _common(p)
    p.add_argument("--functional", help="functional JSON, inline or @file; default: a seeded random state")
    p.add_argument("--kind", choices=[fn.STATE, fn.QUASI_STATE], default=fn.STATE)

    p = sub.add_parser("describe", help="algebra summary and published constants")
    _common(p)
    return parser


def _config_from_args(args) -> ExperimentConfig:
    base: dict = {}
    if args.config:
        base = load_json_arg("@" + args.config if not args.config.startswith("@") else args.config)
        if not isinstance(base, dict):
            raise ConfigError("config file must hold a JSON object")
    if args.algebra:
        base["block_dims"] = AlgebraDescriptor.parse(args.algebra).block_dims
    if args.dim is not None:
        base["ambient_dim"] = args.dim
    base["seed"] = args.seed if args.seed is not None else base.get("seed", _default_seed())
    if getattr(args, "samples", None) is not None:
        base["samples"] = args.samples
    if getattr(args, "tol_profile", None):
        base["tol_profile"] = args.tol_profile
    if getattr(args, "tol", None):
        tols = dict(base.get("tolerances", {}))
        tols.update(dict(args.tol))
        base["tolerances"] = tols
    if getattr(args, "steps", None) is not None:
        base["lift_steps"] = args.steps
    if getattr(args, "base_rank", None) is not None:
        base["base_rank"] = args.base_rank
    if args.command in RUNNERS:
        base["experiment"] = args.command
    return ExperimentConfig.from_json(base)


def _emit(obj, args):
    text = dumps(obj, pretty=args.pretty)
    if args.output:
        args.output.write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _describe(cfg: ExperimentConfig) -> dict:
    desc = cfg.descriptor
    return {
        "schema_version": SCHEMA_VERSION,
        "algebra": desc.to_json(),
        "dim": desc.dim,
        "max_cyclic_dim": desc.max_cyclic_dim,
        "d_min": desc.d_min,
        "ambient_dim": cfg.d,
        "basis": [f"E{p}{q}^({i})" for i, p, q in desc.basis_labels()],
        "reconstruction_frame": [phi.to_json()["density_blocks"] for phi in fn.density_frame(desc)],
        "tolerances": {k: cfg.tol(k) for k in sorted(TOLERANCES)},
        "sample_counts": {k: cfg.count(k) for k in sorted(COUNTS)},
    }


def _usage_error(exc) -> int:
    print(f"fdcstar: error: {exc}", file=sys.stderr)
    return 2


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        phi = None
        if args.command == "gns":
            if args.functional:
                phi = fn.Functional.from_json(load_json_arg(args.functional))
            else:
                phi = fn.random_functional(cfg.descriptor, cfg.seed, args.kind)
    except (ValueError, KeyError, TypeError, OSError) as exc:
        return _usage_error(exc)

    if args.command in RUNNERS:
        report = RUNNERS[args.command](cfg)
        _emit(report.to_json(), args)
        return 0 if report.passed else 1
    if args.command == "gns":
        try:
            triple = gns(phi)
        except ValueError as exc:
            return _usage_error(exc)
        check = validate_gns(triple, phi)
        _emit({"schema_version": SCHEMA_VERSION, "functional": phi.to_json(), "triple": triple.to_json(),
               "validation": check.to_json()}, args)
        return 0 if check.passed else 1
    _emit(_describe(cfg), args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
