"""Command-line front door: demos, verification suites, bound sweeps, divergence runs.

Exit codes: 0 clean, 1 verification violation or demo failure, 2 config/IO error.
Reports go to stdout unless --out is given; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from .divergence import DivergenceOptions, observable_divergence
from .serialize import estimate_to_json, load_json, observable_from_json, save_json
from .verify import (
    DemoFailure,
    bound_curve,
    default_random_fixture,
    phase_space_demo,
    q8_program_pair,
    quaternion_demo,
    verify_b_properties,
    verify_prop1,
    verify_prop3,
    wh_program_pair,
)

SEED_ENV = "QML_SEED"

CONFIG_KEYS = {
    "command",
    "seed",
    "trials",
    "tolerances",
    "out",
    "format",
    "dim",
    "points",
    "fixture",
    "e1",
    "e2",
    "restarts",
}
TOLERANCE_KEYS = {"tol_check", "estimator_tol"}


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    trials: int = 1000
    tolerances: dict = field(default_factory=dict)
    out: str = None
    format: str = None
    dim: int = 3
    points: int = 201
    fixture: str = "random"
    e1: str = None
    e2: str = None
    restarts: int = 32


def _load_config_file(path: str) -> dict:
    try:
        doc = load_json(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(doc) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    tols = doc.get("tolerances", {})
    if not isinstance(tols, dict) or set(tols) - TOLERANCE_KEYS:
        raise ConfigError(f"tolerances must map a subset of {sorted(TOLERANCE_KEYS)}")
    return doc


def _parse_tol_flags(pairs) -> dict:
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"--tol expects key=value, got {item!r}")
        key, _, val = item.partition("=")
        if key not in TOLERANCE_KEYS:
            raise ConfigError(f"unknown tolerance {key!r}; known: {sorted(TOLERANCE_KEYS)}")
        out[key] = float(val)
    return out


def _resolve(args: argparse.Namespace) -> RunConfig:
    file_doc = _load_config_file(args.config) if args.config else {}
    cfg = RunConfig(command=args.command)
    for key in ("seed", "trials", "out", "format", "dim", "points", "fixture", "e1", "e2", "restarts"):
        if key in file_doc and file_doc[key] is not None:
            setattr(cfg, key, file_doc[key])
    cfg.tolerances.update(file_doc.get("tolerances", {}))

    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None:
        try:
            cfg.seed = int(env_seed)
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env_seed!r}") from exc

    for key in ("seed", "trials", "out", "format", "dim", "points", "fixture", "e1", "e2", "restarts"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    cfg.tolerances.update(_parse_tol_flags(getattr(args, "tol", None)))

    cfg.seed = int(cfg.seed)
    cfg.trials = int(cfg.trials)
    cfg.dim = int(cfg.dim)
    cfg.points = int(cfg.points)
    cfg.restarts = int(cfg.restarts)
    return cfg


def _emit(cfg: RunConfig, payload: str):
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(payload)
            if not payload.endswith("\n"):
                fh.write("\n")
    else:
        sys.stdout.write(payload)
        if not payload.endswith("\n"):
            sys.stdout.write("\n")


def _emit_json(cfg: RunConfig, doc: dict):
    if cfg.format not in (None, "json"):
        raise ConfigError(f"command {cfg.command!r} emits json, not {cfg.format!r}")
    if cfg.out:
        save_json(doc, cfg.out)
    else:
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _fixture_for(cfg: RunConfig):
    if cfg.fixture == "q8":
        return q8_program_pair()
    if cfg.fixture == "phase-space":
        return wh_program_pair(cfg.dim)
    if cfg.fixture == "random":
        return default_random_fixture(cfg.seed)
    raise ConfigError(f"unknown fixture {cfg.fixture!r}")


def _run_demo(cfg: RunConfig, which: str) -> int:
    try:
        doc = quaternion_demo() if which == "q8" else phase_space_demo(cfg.dim)
    except DemoFailure as exc:
        print(f"demo failed: {exc}", file=sys.stderr)
        return 1
    _emit_json(cfg, doc)
    return 0


def _run_verify(cfg: RunConfig, which: str) -> int:
    tol = cfg.tolerances.get("tol_check", 1e-9)
    if which == "prop1":
        mm, xi1, xi2, _, _ = _fixture_for(cfg)
        report = verify_prop1(mm, xi1, xi2, trials=cfg.trials, seed=cfg.seed, tol_check=tol)
    elif which == "prop3":
        mm, xi1, xi2, l1, l2 = _fixture_for(cfg)
        report = verify_prop3(mm, xi1, xi2, l1, l2, trials=cfg.trials, seed=cfg.seed, tol_check=tol)
    else:
        from .sampling import random_povm, rng_from

        rng = rng_from(cfg.seed)
        e1 = random_povm(rng, 2, 3)
        e2 = random_povm(rng, 2, 3)
        report = verify_b_properties(
            e1,
            e2,
            n=cfg.trials,
            seed=cfg.seed,
            estimator_tol=cfg.tolerances.get("estimator_tol", 2e-3),
        )
    _emit_json(cfg, report.to_dict())
    if report.violations:
        print(
            f"{report.check}: {report.violations} violation(s), worst margin {report.worst_margin:.3e}",
            file=sys.stderr,
        )
        return 1
    return 0


def _run_bound(cfg: RunConfig) -> int:
    if cfg.format not in (None, "csv"):
        raise ConfigError("bound emits csv only")
    curve = bound_curve(points=cfg.points)
    _emit(cfg, curve.to_csv())
    return 0


def _run_divergence(cfg: RunConfig) -> int:
    if not cfg.e1 or not cfg.e2:
        raise ConfigError("divergence needs --e1 and --e2 observable files")
    try:
        e1 = observable_from_json(load_json(cfg.e1))
        e2 = observable_from_json(load_json(cfg.e2))
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot load observables: {exc}") from exc
    opts = DivergenceOptions(seed=cfg.seed, restarts=cfg.restarts)
    est = observable_divergence(e1, e2, opts)
    _emit_json(cfg, estimate_to_json(est))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmultimeter",
        description="Programmable multimeter demos, verification suites, and bound sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file (same keys as the flags)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="write the report here instead of stdout")
        p.add_argument("--format", choices=["json", "csv"], default=None)

    demo = sub.add_parser("demo", help="run a built-in pipeline end to end")
    demo.add_argument("which", choices=["q8", "phase-space"])
    demo.add_argument("--dim", type=int, default=None, help="prime dimension for phase-space")
    common(demo)

    ver = sub.add_parser("verify", help="run a randomized verification suite")
    ver.add_argument("which", choices=["prop1", "prop3", "bprops"])
    ver.add_argument("--trials", type=int, default=None)
    ver.add_argument(
        "--fixture", choices=["random", "q8", "phase-space"], default=None,
        help="device under test (default: seeded random multimeter)",
    )
    ver.add_argument("--dim", type=int, default=None)
    ver.add_argument("--tol", action="append", metavar="KEY=VALUE")
    common(ver)

    bound = sub.add_parser("bound", help="sweep the sharp-pair programming bound to CSV")
    bound.add_argument("--points", type=int, default=None)
    common(bound)

    div = sub.add_parser("divergence", help="estimate the divergence of two observables")
    div.add_argument("--e1", default=None, help="observable JSON file")
    div.add_argument("--e2", default=None, help="observable JSON file")
    div.add_argument("--restarts", type=int, default=None)
    common(div)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args)
        if args.command == "demo":
            return _run_demo(cfg, args.which)
        if args.command == "verify":
            return _run_verify(cfg, args.which)
        if args.command == "bound":
            return _run_bound(cfg)
        if args.command == "divergence":
            return _run_divergence(cfg)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
