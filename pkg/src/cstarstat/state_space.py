"""States on a block matrix algebra and the Riemannian geometry of their orbits.

A state is a positive normalized functional, represented by its density
element through the trace pairing.  The invertible elements act on states by
``rho_g(c) = rho(g' c g) / rho(g' g)`` (g' the adjoint of g), and that action
composes on the left: ``group_action(g1, group_action(g2, s)) ==
group_action(g1 @ g2, s)`` holds exactly in the density representation.

Orbits of the action carry the canonical metric built from the Jordan
product, ``G(Y_a, Y_b) = rho({a,b}) - rho(a) rho(b)``, which restricts to
Fisher-Rao on commutative algebras, Fubini-Study on rank-one orbits and
Bures-Helstrom on full-rank orbits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    AlgebraSpec,
    Element,
    SpecMismatchError,
    frobenius_norm,
    jordan,
    multiply,
    trace_pairing,
)

STATE_POS_TOL = 1e-9
STATE_TRACE_TOL = 1e-9
TANGENT_TRACE_TOL = 1e-9

# Relative eigenvalue cutoff separating an orbit's tangent space from
# forbidden directions in the gradient-representative solve.
SLD_EPS_SCALE = 1e-12
SLD_CONSISTENCY_TOL = 1e-8


class SldUnsolvableError(ValueError):
    """The tangent has support outside the orbit's tangent space."""


def _hermitize(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2.0


@dataclass(frozen=True, eq=False)
class State:
    """Positive normalized functional, held as its density element."""

    density: Element

    def __post_init__(self):
        d = self.density
        if d.selfadjoint_defect() > 1e-8:
            raise ValueError("density is not self-adjoint")
        tr = d.trace()
        if abs(tr - 1.0) > STATE_TRACE_TOL:
            raise ValueError(f"density has trace {tr}, expected 1")
        min_eig = min(float(np.linalg.eigvalsh(_hermitize(b))[0]) for b in d.blocks)
        if min_eig < -STATE_POS_TOL:
            raise ValueError(f"density is not positive (min eigenvalue {min_eig:.3e})")

    @property
    def spec(self) -> AlgebraSpec:
        return self.density.spec


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Trace-free self-adjoint functional attached to a base state.

    Whether the functional actually lies in the base orbit's tangent space is
    only decidable through the gradient-representative solve, so it is
    checked by :func:`sld_at_state` rather than at construction.
    """

    base: State
    rep: Element

    def __post_init__(self):
        if self.rep.spec != self.base.spec:
            raise SpecMismatchError("tangent representative on a different algebra")
        if self.rep.selfadjoint_defect() > 1e-8:
            raise ValueError("tangent representative is not self-adjoint")
        tr = self.rep.trace()
        if abs(tr) > TANGENT_TRACE_TOL:
            raise ValueError(f"tangent representative has trace {tr}, expected 0")

    @property
    def spec(self) -> AlgebraSpec:
        return self.base.spec


def _require_same_base(v: TangentVector, w: TangentVector):
    if v.base is not w.base and not all(
        np.allclose(a, b, atol=1e-12) for a, b in zip(v.base.density.blocks, w.base.density.blocks)
    ):
        raise ValueError("tangent vectors live at different base states")


def evaluate(s: State, a: Element) -> complex:
    """The functional applied to an element: sum of block traces tr(rho_k a_k)."""
    return trace_pairing(s.density, a)


def maximally_mixed(spec: AlgebraSpec) -> State:
    blocks = tuple(
        np.eye(n, dtype=np.complex128) / spec.total_dim for n in spec.block_dims
    )
    return State(Element(spec, blocks))


def pure_state(vector, spec: AlgebraSpec | None = None, block: int = 0) -> State:
    """Rank-one state from a (not necessarily normalized) vector in one block."""
    v = np.asarray(vector, dtype=np.complex128)
    v = v / np.linalg.norm(v)
    if spec is None:
        spec = AlgebraSpec((len(v),))
    blocks = [np.zeros((n, n), dtype=np.complex128) for n in spec.block_dims]
    blocks[block] = np.outer(v, v.conj())
    return State(Element(spec, tuple(blocks)))


def random_state(spec: AlgebraSpec, rng: np.random.Generator, pure: bool = False) -> State:
    """Random faithful state (Ginibre bb' per block) or random rank-one state."""
    if pure:
        n = spec.block_dims[0]
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        return pure_state(v, spec=spec, block=0)
    blocks = []
    for n in spec.block_dims:
        b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        blocks.append(b @ b.conj().T + 1e-3 * np.eye(n))
    total = sum(np.trace(b).real for b in blocks)
    return State(Element(spec, tuple(b / total for b in blocks)))


def group_action(g: Element, s: State, tol: float = 1e-12) -> State:
    """Act with an invertible element: density g rho g' normalized to unit trace.

    Scale invariant (lambda g acts like g) and rank preserving, so the orbit
    signature is constant along orbits.
    """
    g._require_same_spec(s.density)
    min_sv = min(float(np.linalg.svd(b, compute_uv=False)[-1]) for b in g.blocks)
    if min_sv <= tol:
        raise ValueError(f"group element is not invertible (min singular value {min_sv:.3e})")
    blocks = [gb @ rb @ gb.conj().T for gb, rb in zip(g.blocks, s.density.blocks)]
    norm = sum(np.trace(b).real for b in blocks)
    if norm <= tol:
        raise ValueError("vanishing normalization rho(g'g)")
    return State(Element(s.spec, tuple(_hermitize(b / norm) for b in blocks)))


def gradient_vector(s: State, a: Element) -> TangentVector:
    """Gradient vector field of the function rho -> rho(a) at s.

    Density representative {rho, a} - rho(a) rho; trace-free by construction.
    """
    if not a.is_selfadjoint(1e-9):
        raise ValueError("gradient label must be self-adjoint")
    rho = s.density
    expect = evaluate(s, a).real
    rep = jordan(rho, a) - expect * rho
    return TangentVector(s, rep)


def hamiltonian_vector(s: State, b: Element) -> TangentVector:
    """Hamiltonian vector field of the unitary flow generated by b at s.

    As a functional it sends c to rho([[b,c]]); the density representative is
    (rho b - b rho)/(2i).  Vanishes identically on commutative algebras.
    """
    if not b.is_selfadjoint(1e-9):
        raise ValueError("hamiltonian label must be self-adjoint")
    rho = s.density
    blocks = tuple(
        (rb @ bb - bb @ rb) / 2.0j for rb, bb in zip(rho.blocks, b.blocks)
    )
    return TangentVector(s, Element(s.spec, blocks))


def fundamental_vector(s: State, a: Element, b: Element) -> TangentVector:
    """Fundamental vector field of the group action with label (a + ib)/2."""
    grad = gradient_vector(s, a)
    ham = hamiltonian_vector(s, b)
    return TangentVector(s, grad.rep + ham.rep)


def unitary_push(u: Element, v: TangentVector) -> TangentVector:
    """Pushforward of a tangent vector along the action of a unitary."""
    new_base = group_action(u, v.base)
    blocks = tuple(
        ub @ rb @ ub.conj().T for ub, rb in zip(u.blocks, v.rep.blocks)
    )
    return TangentVector(new_base, Element(v.spec, blocks))


def sld_at_state(
    s: State,
    v: TangentVector,
    consistency_tol: float = SLD_CONSISTENCY_TOL,
) -> tuple[Element, int]:
    """Solve for the self-adjoint element a with ``gradient_vector(s, a) == v``.

    Solved per block in the eigenbasis of the density: with eigenvalues l_i,
    the representative satisfies a_ij = 2 v_ij / (l_i + l_j) wherever
    l_i + l_j exceeds the cutoff, and is set to zero (minimum Frobenius norm)
    on the kernel pairs.  The returned representative automatically satisfies
    evaluate(s, a) = 0, which is the gauge the geodesic formula needs.

    Returns
    -------
    (a, gauge_dim)
        gauge_dim counts the kernel pairs of the solve plus one for the
        always-free identity direction.

    Raises
    ------
    SldUnsolvableError
        If v has support on a kernel pair, i.e. it points out of the orbit's
        tangent space.
    """
    if v.base is not s and not all(
        np.allclose(a, b, atol=1e-12)
        for a, b in zip(v.base.density.blocks, s.density.blocks)
    ):
        raise ValueError("tangent vector is based at a different state")
    rho = s.density
    lam_max = max(float(np.linalg.eigvalsh(_hermitize(b))[-1]) for b in rho.blocks)
    eps = SLD_EPS_SCALE * lam_max
    xi_scale = max(1.0, frobenius_norm(v.rep))

    blocks = []
    gauge_dim = 1  # identity direction never changes the gradient field
    for rb, xb in zip(rho.blocks, v.rep.blocks):
        lam, u = np.linalg.eigh(_hermitize(rb))
        xi = u.conj().T @ xb @ u
        denom = lam[:, None] + lam[None, :]
        allowed = denom > eps
        bad = np.abs(xi[~allowed])
        if bad.size and bad.max() > consistency_tol * xi_scale:
            raise SldUnsolvableError(
                "tangent leaves the orbit's tangent space "
                f"(residual {bad.max():.3e} on kernel pairs)"
            )
        a_eig = np.where(allowed, 2.0 * xi / np.where(allowed, denom, 1.0), 0.0)
        n = len(lam)
        iu = np.triu_indices(n)
        gauge_dim += int(np.count_nonzero(~allowed[iu]))
        blocks.append(_hermitize(u @ a_eig @ u.conj().T))
    return Element(s.spec, tuple(blocks)), gauge_dim


def metric(s: State, v: TangentVector, w: TangentVector) -> float:
    """Canonical metric G at s applied to two tangent vectors.

    Computed as the representative-independent pairing of v's functional
    against the gradient representative of w, never as the Jordan pairing of
    two independently gauge-fixed representatives.
    """
    _require_same_base(v, w)
    b_w, _ = sld_at_state(s, w)
    sld_at_state(s, v)  # both must admit gradient representatives
    return trace_pairing(v.rep, b_w).real


def geodesic(s: State, v: TangentVector, t: float) -> State:
    """Point at time t of the metric geodesic from s with initial velocity v.

    Closed form: with a the gradient representative of v (gauge rho(a) = 0)
    and speed^2 = rho(a^2),

        nu(t) = cos^2(|v| t) rho + sin^2(|v| t)/|v|^2 (a rho a)
                + sin(2 |v| t)/(2 |v|) {rho, a}.

    The curve keeps unit trace and positivity for every t (it is a convex
    combination of manifestly positive terms) but wanders across orbits of
    different rank.  Zero-speed tangents give the constant curve.
    """
    if t == 0.0:
        return s
    a, _ = sld_at_state(s, v)
    speed2 = evaluate(s, multiply(a, a)).real
    if speed2 < 1e-28:
        return s
    speed = float(np.sqrt(speed2))
    c2 = float(np.cos(speed * t) ** 2)
    s2 = float(np.sin(speed * t) ** 2) / speed2
    cs = float(np.sin(2.0 * speed * t)) / (2.0 * speed)
    blocks = []
    for rb, ab in zip(s.density.blocks, a.blocks):
        term = c2 * rb + s2 * (ab @ rb @ ab) + cs * (ab @ rb + rb @ ab) / 2.0
        blocks.append(_hermitize(term))
    return State(Element(s.spec, tuple(blocks)))


def orbit_signature(s: State, tol: float = 1e-9) -> list[int]:
    """Per-block numerical rank of the density; constant along group orbits."""
    return [
        int(np.count_nonzero(np.linalg.eigvalsh(_hermitize(b)) > tol))
        for b in s.density.blocks
    ]
