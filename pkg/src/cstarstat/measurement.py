"""Discrete measurement procedures: POVMs and their classical statistics.

A measurement with n outcomes is a positive unital map from functions on the
outcome space into the algebra; concretely it is the list of its effects,
positive elements summing to the identity.  Pushing a state through the dual
map yields the outcome probabilities, and the Fisher-Rao geometry of those
probability vectors is what the classical estimation bounds see.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .algebra import (
    AlgebraSpec,
    Element,
    SpecMismatchError,
    delta_basis,
    identity,
    tensor_elements,
    tensor_power,
)
from .state_space import State, evaluate

POVM_TOL = 1e-9
REGULARITY_TOL = 1e-9


class NonRegularError(ValueError):
    """The induced probabilities touch the simplex boundary."""


@dataclass(frozen=True, eq=False)
class Povm:
    """Ordered effects of a discrete measurement, with outcome labels.

    Construction checks only structure (matching algebra, self-adjoint
    effects); positivity and unitality are diagnosed by
    :func:`validate_povm` so that broken inputs can still be inspected.
    """

    spec: AlgebraSpec
    effects: tuple[Element, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.effects:
            raise ValueError("a measurement needs at least one effect")
        for m in self.effects:
            if m.spec != self.spec:
                raise SpecMismatchError("effect on a different algebra")
            if not m.is_selfadjoint(1e-8):
                raise ValueError("effects must be self-adjoint")
        object.__setattr__(self, "effects", tuple(self.effects))
        if not self.labels:
            labels = tuple(f"x{j + 1}" for j in range(len(self.effects)))
        else:
            labels = tuple(str(l) for l in self.labels)
            if len(labels) != len(self.effects):
                raise ValueError("label count does not match effect count")
        object.__setattr__(self, "labels", labels)

    @property
    def n_outcomes(self) -> int:
        return len(self.effects)


@dataclass(frozen=True)
class PovmDiagnostics:
    min_effect_eigenvalue: float
    unitality_error: float
    passes: bool


@dataclass(frozen=True, eq=False)
class ProbabilityVector:
    """Nonnegative reals summing to one."""

    p: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.p, dtype=float)
        if arr.ndim != 1:
            raise ValueError("probability vector must be one-dimensional")
        if abs(arr.sum() - 1.0) > 1e-8:
            raise ValueError(f"probabilities sum to {arr.sum()}, expected 1")
        if arr.min() < -1e-9:
            raise ValueError(f"negative probability {arr.min():.3e}")
        object.__setattr__(self, "p", arr)

    def is_interior(self, tol: float = REGULARITY_TOL) -> bool:
        return bool(self.p.min() > tol)

    def __array__(self, dtype=None):
        return np.asarray(self.p, dtype=dtype)

    def __len__(self):
        return len(self.p)

    def __getitem__(self, i):
        return self.p[i]


def validate_povm(P: Povm, tol: float = POVM_TOL) -> PovmDiagnostics:
    """Report the worst effect eigenvalue and the unitality defect."""
    min_eig = min(
        float(np.linalg.eigvalsh((b + b.conj().T) / 2.0)[0])
        for m in P.effects
        for b in m.blocks
    )
    total = sum(P.effects, start=0)
    diff = total - identity(P.spec)
    unitality = diff.norm()
    return PovmDiagnostics(min_eig, unitality, min_eig >= -tol and unitality <= tol)


def push_forward(P: Povm, s: State) -> ProbabilityVector:
    """Outcome probabilities p_j = rho(m_j) of measuring the state."""
    if P.spec != s.spec:
        raise SpecMismatchError("measurement and state on different algebras")
    p = np.array([evaluate(s, m).real for m in P.effects])
    return ProbabilityVector(p)


def lift_function(P: Povm, f) -> Element:
    """Lift an outcome function to the algebra: m(f) = sum_j f_j m_j.

    Sends the constant function 1 to the identity and nonnegative functions
    to positive elements.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (P.n_outcomes,):
        raise ValueError(f"function has {f.shape} values, expected {P.n_outcomes}")
    return sum((float(fj) * m for fj, m in zip(f, P.effects)), start=0)


def fisher_rao(p, u, v, tol: float = REGULARITY_TOL) -> float:
    """Fisher-Rao metric on the open simplex: sum_j u_j v_j / p_j.

    Requires an interior probability vector and tangent arguments (components
    summing to zero).
    """
    parr = np.asarray(p, dtype=float)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if parr.min() <= tol:
        raise NonRegularError(f"boundary probability vector (min {parr.min():.3e})")
    if abs(u.sum()) > 1e-8 or abs(v.sum()) > 1e-8:
        raise ValueError("tangent components must sum to zero")
    return float(np.sum(u * v / parr))


def kadison_defect(P: Povm, f) -> float:
    """Minimum eigenvalue of m(f^2) - m(f)^2; nonnegative for a valid POVM.

    For projective measurements the lift is multiplicative and the defect
    vanishes.  The gap is exactly what separates the classical pullback
    metric from the canonical one.
    """
    f = np.asarray(f, dtype=float)
    lift_sq = lift_function(P, f * f)
    lift_f = lift_function(P, f)
    gap = lift_sq - lift_f @ lift_f
    return min(
        float(np.linalg.eigvalsh((b + b.conj().T) / 2.0)[0]) for b in gap.blocks
    )


def tensor_power_povm(P: Povm, N: int) -> Povm:
    """Product measurement for N independent rounds, outcomes in lexicographic order."""
    if N < 1:
        raise ValueError(f"tensor power needs N >= 1, got {N}")
    if P.n_outcomes ** N > 10 ** 6:
        raise ValueError(f"{P.n_outcomes}^{N} outcomes exceed the combinatorial guard")
    if N == 1:
        return P
    spec = tensor_power(P.spec, N)
    effects = []
    labels = []
    for combo in itertools.product(range(P.n_outcomes), repeat=N):
        effects.append(tensor_elements([P.effects[j] for j in combo]))
        labels.append(",".join(P.labels[j] for j in combo))
    return Povm(spec, tuple(effects), tuple(labels))


def is_regular(P: Povm, model, grid, tol: float = REGULARITY_TOL):
    """Check that the induced probabilities stay interior along a parameter grid.

    Returns ``(flag, worst_point, min_prob)`` where worst_point is the grid
    point with the smallest outcome probability.
    """
    points = [np.asarray(g, dtype=float) for g in grid]
    if not points:
        raise ValueError("empty grid")
    worst_point = None
    min_prob = np.inf
    for theta in points:
        p = push_forward(P, model.state_at(theta))
        m = float(np.min(p.p))
        if m < min_prob:
            min_prob = m
            worst_point = theta
    return (min_prob > tol, worst_point, min_prob)


def delta_povm(n: int) -> Povm:
    """The natural measurement on the n-point abelian algebra (indicator effects)."""
    effects = tuple(delta_basis(n))
    return Povm(effects[0].spec, effects)


def projective_povm(a: Element) -> Povm:
    """Rank-one spectral measurement of a self-adjoint element.

    One effect per eigenvector per block (eigenvalues in ascending order),
    embedded as zero on the other blocks; effects sum to the identity.
    """
    if not a.is_selfadjoint(1e-9):
        raise ValueError("projective measurement needs a self-adjoint element")
    spec = a.spec
    effects = []
    labels = []
    for k, blk in enumerate(a.blocks):
        _, u = np.linalg.eigh((blk + blk.conj().T) / 2.0)
        for i in range(u.shape[1]):
            blocks = [np.zeros((n, n), dtype=np.complex128) for n in spec.block_dims]
            vec = u[:, i]
            blocks[k] = np.outer(vec, vec.conj())
            effects.append(Element(spec, tuple(blocks)))
            labels.append(f"b{k}e{i}")
    return Povm(spec, tuple(effects), tuple(labels))


def random_povm(
    spec: AlgebraSpec, n_outcomes: int, rng: np.random.Generator
) -> Povm:
    """Random measurement with exact unitality.

    Draws positive elements a_j = b_j' b_j from complex Ginibre matrices and
    renormalizes them by the inverse square root of their sum, which makes
    the effects sum to the identity exactly while staying generically
    non-projective.
    """
    if n_outcomes < 1:
        raise ValueError("need at least one outcome")
    raw = []
    for _ in range(n_outcomes):
        blocks = []
        for n in spec.block_dims:
            b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            blocks.append(b.conj().T @ b)
        raw.append(Element(spec, tuple(blocks)))
    total = sum(raw, start=0)
    inv_sqrt_blocks = []
    for blk in total.blocks:
        lam, u = np.linalg.eigh((blk + blk.conj().T) / 2.0)
        inv_sqrt_blocks.append(u @ np.diag(1.0 / np.sqrt(lam)) @ u.conj().T)
    s_inv = Element(spec, tuple(inv_sqrt_blocks))
    effects = tuple(s_inv @ a @ s_inv for a in raw)
    return Povm(spec, effects)
