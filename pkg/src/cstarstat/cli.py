"""Command-line front end.

Subcommands: ``metric``, ``sld``, ``geodesic``, ``bounds``, ``check``.  One
JSON configuration file per invocation plus command-line overrides; reports
are JSON on stdout (diagnostics on stderr) with floats at 15 significant
digits, so identical configuration and seed give byte-identical output.

Exit codes: 0 success, 1 failed invariant check, 2 schema violation,
3 domain violation, 4 numerical failure, 5 non-stationary estimator.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import serialize
from .checks import run_checks
from .estimation import NonStationaryError, helstrom_check
from .measurement import NonRegularError
from .model import DomainError
from .serialize import SchemaError, round_sig
from .state_space import (
    SldUnsolvableError,
    geodesic,
    gradient_vector,
    sld_at_state,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_SCHEMA = 2
EXIT_DOMAIN = 3
EXIT_NUMERICAL = 4
EXIT_NONSTATIONARY = 5


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",") if x != ""])
    except ValueError as exc:
        raise SchemaError(f"cannot parse vector {text!r}: {exc}") from exc


def _parse_grid(text: str) -> list[np.ndarray]:
    """Axis specs lo:hi:count joined by commas; points in row-major order."""
    axes = []
    for part in text.split(","):
        pieces = part.split(":")
        if len(pieces) != 3:
            raise SchemaError(f"grid axis {part!r} must be lo:hi:count")
        try:
            lo, hi, count = float(pieces[0]), float(pieces[1]), int(pieces[2])
        except ValueError as exc:
            raise SchemaError(f"cannot parse grid axis {part!r}: {exc}") from exc
        if count < 1:
            raise SchemaError("grid axis needs at least one point")
        axes.append(np.linspace(lo, hi, count))
    mesh = np.meshgrid(*axes, indexing="ij")
    return [np.array(p) for p in zip(*[m.reshape(-1) for m in mesh])]


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise SchemaError("config root must be an object")
    return cfg


def _points_from(args, cfg, dim) -> list[np.ndarray]:
    if args.point is not None:
        pts = [_parse_vector(args.point)]
    elif args.grid is not None:
        pts = _parse_grid(args.grid)
    elif "points" in cfg:
        pts = [np.asarray(p, dtype=float) for p in cfg["points"]]
    elif "point" in cfg:
        pts = [np.asarray(cfg["point"], dtype=float)]
    else:
        raise SchemaError("no parameter point given (use --point or --grid)")
    for p in pts:
        if p.shape != (dim,):
            raise SchemaError(f"point {p.tolist()} has wrong dimension, expected {dim}")
    return pts


def _state_and_tangent(args, cfg):
    """Either an explicit state/tangent pair or a model point and direction."""
    if "state" in cfg and "tangent" in cfg:
        tangent = serialize.tangent_from_obj(cfg["tangent"])
        return tangent.base, tangent
    if "model" not in cfg:
        raise SchemaError("config needs either a model or a state/tangent pair")
    mdl = serialize.model_from_config(cfg["model"])
    point = _points_from(args, cfg, mdl.dim)[0]
    if args.direction is not None:
        direction = _parse_vector(args.direction)
    elif "direction" in cfg:
        direction = np.asarray(cfg["direction"], dtype=float)
    else:
        raise SchemaError("no direction given (use --direction)")
    if direction.shape != (mdl.dim,):
        raise SchemaError(f"direction has wrong dimension, expected {mdl.dim}")
    state = mdl.state_at(point)
    tangent = mdl.tangent_push(point, direction)
    return state, tangent


def _emit(report: dict, out_path: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _matrix_obj(mat: np.ndarray) -> list:
    return serialize.matrix_real_to_obj(mat)


def cmd_metric(args) -> int:
    cfg = _load_config(args.config)
    if "model" not in cfg:
        raise SchemaError("metric needs a model in the config")
    mdl = serialize.model_from_config(cfg["model"])
    kind = args.kind or cfg.get("kind", "quantum")
    if kind not in ("quantum", "classical"):
        raise SchemaError(f"kind must be quantum or classical, got {kind!r}")
    povm = None
    if kind == "classical":
        if "povm" not in cfg:
            raise SchemaError("classical metric needs a povm in the config")
        povm = serialize.povm_from_obj(cfg["povm"])
    points = _points_from(args, cfg, mdl.dim)
    entries = []
    for theta in points:
        g = mdl.quantum_metric(theta) if kind == "quantum" else mdl.classical_metric(povm, theta)
        entries.append({"point": [round_sig(t) for t in theta], "matrix": _matrix_obj(g)})
    _emit({"command": "metric", "kind": kind, "results": entries}, args.out)
    return EXIT_OK


def cmd_sld(args) -> int:
    cfg = _load_config(args.config)
    state, tangent = _state_and_tangent(args, cfg)
    if not np.any([np.abs(b).max() for b in tangent.rep.blocks]):
        report = {
            "command": "sld",
            "note": "zero tangent",
            "element": serialize.element_to_obj(tangent.rep),
            "gauge_dim": None,
            "residual": 0.0,
        }
        _emit(report, args.out)
        return EXIT_OK
    element, gauge_dim = sld_at_state(state, tangent)
    roundtrip = gradient_vector(state, element)
    residual = max(
        float(np.abs(a - b).max())
        for a, b in zip(roundtrip.rep.blocks, tangent.rep.blocks)
    )
    report = {
        "command": "sld",
        "element": serialize.element_to_obj(element),
        "gauge_dim": gauge_dim,
        "residual": round_sig(residual),
    }
    _emit(report, args.out)
    return EXIT_OK


def cmd_geodesic(args) -> int:
    cfg = _load_config(args.config)
    state, tangent = _state_and_tangent(args, cfg)
    if args.grid is not None:
        times = [float(t[0]) for t in _parse_grid(args.grid)]
    elif "times" in cfg:
        times = [float(t) for t in cfg["times"]]
    else:
        times = np.linspace(-1.0, 1.0, 5).tolist()
    entries = []
    for t in times:
        nu = geodesic(state, tangent, t)
        min_eig = min(
            float(np.linalg.eigvalsh((b + b.conj().T) / 2)[0])
            for b in nu.density.blocks
        )
        entries.append(
            {
                "t": round_sig(t),
                "state": serialize.state_to_obj(nu),
                "min_eigenvalue": round_sig(min_eig),
                "trace": round_sig(nu.density.trace().real),
            }
        )
    _emit({"command": "geodesic", "results": entries}, args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    cfg = _load_config(args.config)
    if "model" not in cfg:
        raise SchemaError("bounds needs a model in the config")
    model_cfg = dict(cfg["model"])
    rounds = args.rounds if args.rounds is not None else cfg.get("rounds")
    if rounds is not None:
        if not isinstance(rounds, int) or rounds < 1:
            raise SchemaError("rounds must be a positive integer")
        model_cfg["rounds"] = rounds
    mdl = serialize.model_from_config(model_cfg)
    if "povm" not in cfg:
        raise SchemaError("bounds needs a povm in the config")
    povm = serialize.povm_from_obj(cfg["povm"])
    if mdl.rounds > 1:
        from .measurement import tensor_power_povm

        povm = tensor_power_povm(povm, mdl.rounds)
    theta = _points_from(args, cfg, mdl.dim)[0]
    covectors = None
    if "covectors" in cfg:
        covectors = [np.asarray(x, dtype=float) for x in cfg["covectors"]]
        for xi in covectors:
            if xi.shape != (mdl.dim,):
                raise SchemaError("covectors must match the parameter dimension")
    est = cost = None
    if "estimator" in cfg:
        est = serialize.estimator_from_obj(cfg["estimator"])
        cost = serialize.cost_from_obj(cfg.get("cost", {"kind": "euclidean"}))
    report = helstrom_check(mdl, povm, cost, est, theta, covectors)
    obj = serialize.bound_report_to_obj(report)
    obj["command"] = "bounds"
    obj["summary"] = "pass" if report.passes else "fail"
    _emit(obj, args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = _load_config(args.config)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    trials = args.trials if args.trials is not None else cfg.get("trials", 200)
    inject = bool(cfg.get("inject_faulty_povm", False))
    result = run_checks(int(seed), trials=int(trials), inject_faulty_povm=inject)
    report = {
        "command": "check",
        "seed": result["seed"],
        "passes": result["passes"],
        "checks": [
            {
                "name": c["name"],
                "trials": c["trials"],
                "worst": round_sig(float(c["worst"])),
                "tolerance": round_sig(float(c["tolerance"])),
                "passes": c["passes"],
            }
            for c in result["checks"]
        ],
    }
    _emit(report, args.out)
    return EXIT_OK if result["passes"] else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cstarstat",
        description="Estimation theory on finite-dimensional C*-algebras",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--point", help="parameter point v1,v2,...")
        p.add_argument("--grid", help="grid spec lo:hi:count per axis, comma separated")
        p.add_argument("--direction", help="tangent direction v1,v2,...")
        p.add_argument("--seed", type=int, help="random seed")
        p.add_argument("--tol", type=float, help="tolerance override (reserved)")
        p.add_argument("--out", help="write the report to a file instead of stdout")

    p = sub.add_parser("metric", help="pullback metric at parameter points")
    common(p)
    p.add_argument("--kind", choices=["quantum", "classical"])
    p.set_defaults(fn=cmd_metric)

    p = sub.add_parser("sld", help="gradient representative of a model tangent")
    common(p)
    p.set_defaults(fn=cmd_sld)

    p = sub.add_parser("geodesic", help="metric geodesic through a state")
    common(p)
    p.set_defaults(fn=cmd_geodesic)

    p = sub.add_parser("bounds", help="Cramer-Rao / Helstrom bound report")
    common(p)
    p.add_argument("--rounds", type=int, help="independent rounds N")
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("check", help="run the seeded invariant suite")
    common(p)
    p.add_argument("--trials", type=int, help="trial count for randomized checks")
    p.set_defaults(fn=cmd_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NonStationaryError as exc:
        print(f"non-stationary estimator: {exc}", file=sys.stderr)
        return EXIT_NONSTATIONARY
    except (SldUnsolvableError, NonRegularError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
