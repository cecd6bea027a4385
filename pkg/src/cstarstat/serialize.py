"""JSON-friendly encoding of every object the library exchanges with files.

Complex matrices are flat row-major lists of [re, im] pairs; the square shape
is recovered from the length (or checked against an expected block size).
Validation failures raise :class:`SchemaError` with a path-labelled message
so configuration mistakes surface before any numerics run.
"""

from __future__ import annotations

import math

import numpy as np

from .algebra import AlgebraSpec, Element
from .estimation import BoundReport, CostFunction, Estimator, euclidean_cost
from .measurement import Povm
from .model import (
    ParametricModel,
    lie_group_model,
    multi_round,
    qubit_dephasing,
    qubit_pure,
    simplex_affine,
)
from .state_space import State, TangentVector

MODEL_TYPES = ("qubit_pure", "qubit_dephasing", "simplex_affine", "lie_group")


class SchemaError(ValueError):
    """A configuration object does not match its schema."""


def _require(cond: bool, where: str, msg: str):
    if not cond:
        raise SchemaError(f"{where}: {msg}")


def _get(obj: dict, key: str, where: str):
    _require(isinstance(obj, dict), where, f"expected an object, got {type(obj).__name__}")
    _require(key in obj, where, f"missing key {key!r}")
    return obj[key]


# -- matrices and elements -----------------------------------------------------

def matrix_to_obj(mat: np.ndarray) -> list:
    out = []
    for value in np.asarray(mat, dtype=np.complex128).reshape(-1):
        out.append([float(value.real), float(value.imag)])
    return out


def matrix_from_obj(obj, where: str = "matrix", expect_dim: int | None = None) -> np.ndarray:
    _require(isinstance(obj, list), where, "expected a list of [re, im] pairs")
    n2 = len(obj)
    n = math.isqrt(n2)
    _require(n * n == n2, where, f"{n2} entries do not form a square matrix")
    if expect_dim is not None:
        _require(n == expect_dim, where, f"matrix is {n}x{n}, expected {expect_dim}x{expect_dim}")
    flat = np.empty(n2, dtype=np.complex128)
    for i, pair in enumerate(obj):
        _require(
            isinstance(pair, list) and len(pair) == 2,
            f"{where}[{i}]",
            "expected an [re, im] pair",
        )
        re, im = pair
        _require(
            isinstance(re, (int, float)) and isinstance(im, (int, float)),
            f"{where}[{i}]",
            "entries must be numbers",
        )
        flat[i] = complex(re, im)
    return flat.reshape(n, n)


def spec_to_obj(spec: AlgebraSpec) -> dict:
    return {"block_dims": list(spec.block_dims)}


def spec_from_obj(obj, where: str = "spec") -> AlgebraSpec:
    dims = _get(obj, "block_dims", where)
    _require(isinstance(dims, list) and dims, where, "block_dims must be a nonempty list")
    _require(
        all(isinstance(n, int) and n >= 1 for n in dims),
        where,
        "block_dims must be positive integers",
    )
    return AlgebraSpec(tuple(dims))


def element_to_obj(x: Element) -> dict:
    return {"blocks": [matrix_to_obj(b) for b in x.blocks]}


def element_from_obj(obj, spec: AlgebraSpec | None = None, where: str = "element") -> Element:
    blocks_obj = _get(obj, "blocks", where)
    _require(isinstance(blocks_obj, list) and blocks_obj, where, "blocks must be a nonempty list")
    if spec is not None:
        _require(
            len(blocks_obj) == spec.num_blocks,
            where,
            f"{len(blocks_obj)} blocks for a {spec.num_blocks}-block algebra",
        )
        blocks = [
            matrix_from_obj(b, f"{where}.blocks[{k}]", expect_dim=n)
            for k, (b, n) in enumerate(zip(blocks_obj, spec.block_dims))
        ]
        return Element(spec, tuple(blocks))
    blocks = [matrix_from_obj(b, f"{where}.blocks[{k}]") for k, b in enumerate(blocks_obj)]
    inferred = AlgebraSpec(tuple(b.shape[0] for b in blocks))
    return Element(inferred, tuple(blocks))


def state_to_obj(s: State) -> dict:
    return {"spec": spec_to_obj(s.spec), "density": element_to_obj(s.density)}


def state_from_obj(obj, where: str = "state") -> State:
    spec = spec_from_obj(_get(obj, "spec", where), f"{where}.spec")
    density = element_from_obj(_get(obj, "density", where), spec, f"{where}.density")
    try:
        return State(density)
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def tangent_to_obj(v: TangentVector) -> dict:
    return {"base": state_to_obj(v.base), "rep": element_to_obj(v.rep)}


def tangent_from_obj(obj, where: str = "tangent") -> TangentVector:
    base = state_from_obj(_get(obj, "base", where), f"{where}.base")
    rep = element_from_obj(_get(obj, "rep", where), base.spec, f"{where}.rep")
    try:
        return TangentVector(base, rep)
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def povm_to_obj(P: Povm) -> dict:
    return {
        "spec": spec_to_obj(P.spec),
        "effects": [element_to_obj(m) for m in P.effects],
        "labels": list(P.labels),
    }


def povm_from_obj(obj, where: str = "povm") -> Povm:
    spec = spec_from_obj(_get(obj, "spec", where), f"{where}.spec")
    effects_obj = _get(obj, "effects", where)
    _require(
        isinstance(effects_obj, list) and effects_obj, where, "effects must be a nonempty list"
    )
    effects = tuple(
        element_from_obj(e, spec, f"{where}.effects[{j}]") for j, e in enumerate(effects_obj)
    )
    labels = obj.get("labels", [])
    _require(isinstance(labels, list), where, "labels must be a list")
    try:
        return Povm(spec, effects, tuple(labels))
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def estimator_from_obj(obj, where: str = "estimator") -> Estimator:
    values = _get(obj, "values", where)
    _require(isinstance(values, list) and values, where, "values must be a nonempty list")
    try:
        return Estimator(np.asarray(values, dtype=float))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def estimator_to_obj(est: Estimator) -> dict:
    return {"values": est.values.tolist()}


def cost_from_obj(obj, where: str = "cost") -> CostFunction:
    kind = _get(obj, "kind", where)
    _require(kind == "euclidean", where, f"unsupported cost kind {kind!r} in configuration")
    weight = obj.get("weight")
    if weight is None:
        return euclidean_cost()
    _require(isinstance(weight, list), f"{where}.weight", "expected a matrix as nested lists")
    try:
        return euclidean_cost(np.asarray(weight, dtype=float))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}.weight: {exc}") from exc


def model_from_config(cfg, where: str = "model") -> ParametricModel:
    """Build a model from its configuration object.

    Types: ``qubit_pure``, ``qubit_dephasing``, ``simplex_affine`` (abelian
    spec or explicit ``n``), ``lie_group`` (``generators``, ``rho0``,
    optional ``skew``).  An optional ``rounds`` key wraps the result in the
    tensor-power model.
    """
    mtype = _get(cfg, "type", where)
    _require(mtype in MODEL_TYPES, where, f"unknown model type {mtype!r}")
    if mtype == "qubit_pure":
        model = qubit_pure()
    elif mtype == "qubit_dephasing":
        model = qubit_dephasing()
    elif mtype == "simplex_affine":
        if "n" in cfg:
            n = cfg["n"]
            _require(isinstance(n, int) and n >= 2, f"{where}.n", "need an integer >= 2")
        else:
            spec = spec_from_obj(_get(cfg, "spec", where), f"{where}.spec")
            _require(spec.is_abelian(), f"{where}.spec", "simplex model needs an abelian algebra")
            n = spec.num_blocks
        model = simplex_affine(n)
    else:
        gens_obj = _get(cfg, "generators", where)
        _require(
            isinstance(gens_obj, list) and gens_obj,
            f"{where}.generators",
            "need a nonempty list",
        )
        rho0 = state_from_obj(_get(cfg, "rho0", where), f"{where}.rho0")
        gens = [
            element_from_obj(g, rho0.spec, f"{where}.generators[{r}]")
            for r, g in enumerate(gens_obj)
        ]
        for r, g in enumerate(gens):
            _require(
                g.is_selfadjoint(1e-8),
                f"{where}.generators[{r}]",
                "generators must be self-adjoint",
            )
        skew = cfg.get("skew", True)
        _require(isinstance(skew, bool), f"{where}.skew", "expected a boolean")
        model = lie_group_model(gens, rho0, skew=skew)

    if "domain" in cfg:
        dom = cfg["domain"]
        _require(
            isinstance(dom, list) and len(dom) == model.dim,
            f"{where}.domain",
            f"expected {model.dim} [lo, hi] intervals",
        )
        intervals = []
        for i, pair in enumerate(dom):
            _require(
                isinstance(pair, list) and len(pair) == 2,
                f"{where}.domain[{i}]",
                "expected [lo, hi]",
            )
            lo = -np.inf if pair[0] is None else float(pair[0])
            hi = np.inf if pair[1] is None else float(pair[1])
            _require(lo < hi, f"{where}.domain[{i}]", "need lo < hi")
            intervals.append((lo, hi))
        model.domain = tuple(intervals)

    rounds = cfg.get("rounds", 1)
    if rounds != 1:
        _require(
            isinstance(rounds, int) and rounds >= 1, f"{where}.rounds", "need an integer >= 1"
        )
        model = multi_round(model, rounds)
    return model


# -- reports --------------------------------------------------------------------

def round_sig(x: float, digits: int = 15) -> float:
    """Round to a fixed number of significant digits for stable report output."""
    if not np.isfinite(x):
        return float(x)
    return float(f"{float(x):.{digits}g}")


def _round_deep(obj):
    if isinstance(obj, float):
        return round_sig(obj)
    if isinstance(obj, (list, tuple)):
        return [_round_deep(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _round_deep(v) for k, v in obj.items()}
    return obj


def matrix_real_to_obj(mat: np.ndarray) -> list:
    return _round_deep(np.asarray(mat, dtype=float).tolist())


def bound_report_to_obj(report: BoundReport) -> dict:
    out = {
        "point": _round_deep(report.point.tolist()),
        "quantum_metric": matrix_real_to_obj(report.quantum_metric),
        "classical_metric": matrix_real_to_obj(report.classical_metric),
        "rounds": report.rounds,
        "passes": bool(report.passes),
    }
    if report.hessian is not None:
        out["hessian"] = matrix_real_to_obj(report.hessian)
    if report.covariance is not None:
        out["covariance"] = matrix_real_to_obj(report.covariance)
    gaps = []
    for entry in report.covector_gaps:
        g = {"covector": _round_deep(np.asarray(entry["covector"]).tolist())}
        if "cr" in entry:
            g["cr_gap"] = round_sig(entry["cr"])
        if "helstrom" in entry:
            g["helstrom_gap"] = round_sig(entry["helstrom"])
        gaps.append(g)
    out["covector_gaps"] = gaps
    if report.min_eig_cr is not None:
        out["min_eig_cr"] = round_sig(report.min_eig_cr)
    if report.min_eig_helstrom is not None:
        out["min_eig_helstrom"] = round_sig(report.min_eig_helstrom)
    if report.round_floors:
        out["round_floors"] = _round_deep(list(report.round_floors))
    return out
