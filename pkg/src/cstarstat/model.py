"""Parametric models of states: built-in families, pullback metrics, SLDs.

A model is a smooth map from an open parameter domain into one orbit of
states.  Pulling the canonical orbit metric back through the map gives the
``quantum_metric``; composing with a measurement first and pulling back
Fisher-Rao gives the ``classical_metric``.  The first majorizes the second
for every measurement, which is the geometric content of the estimation
bounds.

Conventions fixed here:

* metric matrices are index-ordered like the parameters, and the symmetrized
  cross term of a metric written as ``B dx (x) dy`` contributes ``B`` (not
  B/2) to the off-diagonal matrix entry; for the dephasing family below this
  convention was pinned by evaluating the representative-independent pairing
  of the two coordinate tangents directly;
* gradient representatives returned by :func:`sld` carry the zero-expectation
  gauge, so closed forms stated up to an identity offset should be compared
  through their traceless parts.
"""

from __future__ import annotations

import numpy as np

from .algebra import (
    AlgebraSpec,
    Element,
    PAULI,
    abelian,
    identity,
    matrix_algebra,
    tensor_elements,
    trace_pairing,
)
from .measurement import NonRegularError, Povm, projective_povm, push_forward
from .state_space import State, TangentVector, group_action, sld_at_state

FD_STEP = 1e-5
REGULARITY_TOL = 1e-9


class DomainError(ValueError):
    """Parameter point (or a finite-difference stencil around it) leaves the domain."""


class ParametricModel:
    """Smooth parameter-to-state map with numerical differential.

    Parameters
    ----------
    spec : AlgebraSpec
    dim : int
        Number of real parameters.
    domain : sequence of (lo, hi)
        Open interval per coordinate; use +-inf for unbounded directions.
    density_fn : callable
        theta -> density Element of the state at theta.
    ddensity_fn : callable, optional
        (theta, r) -> Element, analytic partial derivative of the density in
        coordinate r.  Models without it fall back to central differences.
    constraint : callable, optional
        Extra open-domain predicate (e.g. simplex interior).
    """

    def __init__(
        self,
        spec: AlgebraSpec,
        dim: int,
        domain,
        density_fn,
        ddensity_fn=None,
        constraint=None,
        name: str = "",
        rounds: int = 1,
        base: "ParametricModel | None" = None,
    ):
        self.spec = spec
        self.dim = int(dim)
        self.domain = tuple((float(lo), float(hi)) for lo, hi in domain)
        if len(self.domain) != self.dim:
            raise ValueError("domain must give one interval per coordinate")
        self._density_fn = density_fn
        self._ddensity_fn = ddensity_fn
        self._constraint = constraint
        self.name = name
        self.rounds = int(rounds)
        self.base = base

    # -- domain --------------------------------------------------------------

    def contains(self, theta) -> bool:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.dim,):
            return False
        for t, (lo, hi) in zip(theta, self.domain):
            if not (lo < t < hi):
                return False
        if self._constraint is not None and not self._constraint(theta):
            return False
        return True

    def _check_domain(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.dim,):
            raise DomainError(f"point has shape {theta.shape}, expected ({self.dim},)")
        if not self.contains(theta):
            raise DomainError(f"point {theta.tolist()} outside the model domain")
        return theta

    # -- evaluation ----------------------------------------------------------

    def state_at(self, theta) -> State:
        theta = self._check_domain(theta)
        return State(self._density_fn(theta))

    def tangent_push(self, theta, direction) -> TangentVector:
        """Pushforward of a parameter-space direction to a tangent at the state.

        Uses the analytic derivative when the model carries one, otherwise a
        central difference with step 1e-5 * max(1, |theta|_inf); the stencil
        must stay inside the domain.
        """
        theta = self._check_domain(theta)
        direction = np.asarray(direction, dtype=float)
        if direction.shape != (self.dim,):
            raise ValueError(f"direction has shape {direction.shape}, expected ({self.dim},)")
        base_state = self.state_at(theta)
        if not np.any(direction):
            zero = Element(
                self.spec,
                tuple(np.zeros((n, n), dtype=np.complex128) for n in self.spec.block_dims),
            )
            return TangentVector(base_state, zero)
        if self._ddensity_fn is not None:
            rep = sum(
                (float(direction[r]) * self._ddensity_fn(theta, r)
                 for r in range(self.dim) if direction[r] != 0.0),
                start=0,
            )
            return TangentVector(base_state, rep)
        h = FD_STEP * max(1.0, float(np.max(np.abs(theta))))
        fwd = theta + h * direction
        bwd = theta - h * direction
        if not (self.contains(fwd) and self.contains(bwd)):
            raise DomainError("finite-difference stencil exits the model domain")
        rep = (1.0 / (2.0 * h)) * (self._density_fn(fwd) - self._density_fn(bwd))
        return TangentVector(base_state, rep)

    def sld(self, theta, direction) -> tuple[Element, int]:
        s = self.state_at(theta)
        v = self.tangent_push(theta, direction)
        return sld_at_state(s, v)

    def coordinate_tangents(self, theta) -> list[TangentVector]:
        eye = np.eye(self.dim)
        return [self.tangent_push(theta, eye[r]) for r in range(self.dim)]

    def quantum_metric(self, theta) -> np.ndarray:
        """Pullback of the canonical orbit metric, a d x d PSD matrix.

        Entry (r, s) is the pairing of the r-th coordinate tangent functional
        with the gradient representative of the s-th; symmetrized to clear
        rounding asymmetry.
        """
        theta = self._check_domain(theta)
        s = self.state_at(theta)
        tangents = self.coordinate_tangents(theta)
        reps = [sld_at_state(s, v)[0] for v in tangents]
        g = np.empty((self.dim, self.dim))
        for r in range(self.dim):
            for c in range(self.dim):
                g[r, c] = trace_pairing(tangents[r].rep, reps[c]).real
        return (g + g.T) / 2.0

    def classical_metric(self, P: Povm, theta, tol: float = REGULARITY_TOL) -> np.ndarray:
        """Pullback of Fisher-Rao through measure-then-map, a d x d PSD matrix.

        Requires the measurement to be regular at theta (all outcome
        probabilities strictly positive).
        """
        theta = self._check_domain(theta)
        s = self.state_at(theta)
        p = push_forward(P, s).p
        if p.min() <= tol:
            raise NonRegularError(
                f"measurement not regular at {theta.tolist()} (min probability {p.min():.3e})"
            )
        tangents = self.coordinate_tangents(theta)
        dp = np.array(
            [[trace_pairing(v.rep, m).real for m in P.effects] for v in tangents]
        )
        g = np.einsum("rj,sj,j->rs", dp, dp, 1.0 / p)
        return (g + g.T) / 2.0

    def __repr__(self):
        return f"ParametricModel({self.name or 'anonymous'}, dim={self.dim}, spec={self.spec})"


# -- module-level forms of the operations -------------------------------------------

def state_at(model: ParametricModel, theta) -> State:
    return model.state_at(theta)


def tangent_push(model: ParametricModel, theta, direction) -> TangentVector:
    return model.tangent_push(theta, direction)


def sld(model: ParametricModel, theta, direction) -> tuple[Element, int]:
    return model.sld(theta, direction)


def quantum_metric(model: ParametricModel, theta) -> np.ndarray:
    return model.quantum_metric(theta)


def classical_metric(model: ParametricModel, P: Povm, theta) -> np.ndarray:
    return model.classical_metric(P, theta)


# -- built-in families ------------------------------------------------------------

def _qubit_density(x1: float, x2: float, x3: float = 0.0) -> Element:
    mat = (PAULI[0] + x1 * PAULI[1] + x2 * PAULI[2] + x3 * PAULI[3]) / 2.0
    return Element(matrix_algebra(2), (mat,))


def qubit_pure() -> ParametricModel:
    """Circle of rank-one qubit states rho(g) = (1 + cos(g) s1 - sin(g) s2)/2.

    One periodic parameter on the whole real line; intentionally not
    identifiable.  Its pullback metric is constant.
    """

    def density(theta):
        g = theta[0]
        return _qubit_density(np.cos(g), -np.sin(g))

    def ddensity(theta, r):
        g = theta[0]
        mat = (-np.sin(g) * PAULI[1] - np.cos(g) * PAULI[2]) / 2.0
        return Element(matrix_algebra(2), (mat,))

    return ParametricModel(
        matrix_algebra(2),
        dim=1,
        domain=[(-np.inf, np.inf)],
        density_fn=density,
        ddensity_fn=ddensity,
        name="qubit_pure",
    )


def qubit_dephasing() -> ParametricModel:
    """Dephasing curve rho(g, z) = (1 + e^{-zg}(cos(g) s1 - sin(g) s2))/2.

    Two positive parameters: a rotation angle g and a damping rate z.  Pure
    at g -> 0, faithful everywhere in the open domain.  Closed-form pullback
    metric (matrix convention, see module docstring):

        G_gg = e^{-2zg} + z^2/(e^{2zg} - 1)
        G_gz = G_zg = z g/(e^{2zg} - 1)
        G_zz = g^2/(e^{2zg} - 1)
    """

    def density(theta):
        g, z = theta
        w = np.exp(-z * g)
        return _qubit_density(w * np.cos(g), -w * np.sin(g))

    def ddensity(theta, r):
        g, z = theta
        w = np.exp(-z * g)
        if r == 0:
            c1 = -w * (z * np.cos(g) + np.sin(g))
            c2 = w * (z * np.sin(g) - np.cos(g))
        else:
            c1 = -g * w * np.cos(g)
            c2 = g * w * np.sin(g)
        mat = (c1 * PAULI[1] + c2 * PAULI[2]) / 2.0
        return Element(matrix_algebra(2), (mat,))

    return ParametricModel(
        matrix_algebra(2),
        dim=2,
        domain=[(0.0, np.inf), (0.0, np.inf)],
        density_fn=density,
        ddensity_fn=ddensity,
        name="qubit_dephasing",
    )


def simplex_affine(n: int) -> ParametricModel:
    """Full interior of the n-outcome probability simplex, coordinates p_1..p_{n-1}."""
    if n < 2:
        raise ValueError("simplex model needs at least two outcomes")
    spec = abelian(n)

    def density(theta):
        probs = np.append(theta, 1.0 - theta.sum())
        return Element(
            spec, tuple(np.array([[p]], dtype=np.complex128) for p in probs)
        )

    def ddensity(theta, r):
        blocks = [np.zeros((1, 1), dtype=np.complex128) for _ in range(n)]
        blocks[r][0, 0] = 1.0
        blocks[-1][0, 0] = -1.0
        return Element(spec, tuple(blocks))

    return ParametricModel(
        spec,
        dim=n - 1,
        domain=[(0.0, 1.0)] * (n - 1),
        density_fn=density,
        ddensity_fn=ddensity,
        constraint=lambda theta: theta.sum() < 1.0 - 1e-15,
        name=f"simplex_affine({n})",
    )


def _expm_normal(x: Element, skew: bool) -> Element:
    """exp(i x) for skew (unitary flow) or exp(x), with x self-adjoint.

    Exact via eigendecomposition, which is legitimate because the exponent is
    normal.
    """
    blocks = []
    for blk in x.blocks:
        lam, u = np.linalg.eigh((blk + blk.conj().T) / 2.0)
        phase = np.exp(1j * lam) if skew else np.exp(lam)
        blocks.append(u @ np.diag(phase) @ u.conj().T)
    return Element(x.spec, tuple(blocks))


def lie_group_model(
    generators: list[Element], rho0: State, skew: bool = True
) -> ParametricModel:
    """One-parameter-subgroup model j(theta) = Phi(exp(sum theta_r g_r'), rho0).

    With ``skew`` the exponents are i g_r (unitary one-parameter subgroups);
    otherwise the self-adjoint generators are exponentiated directly.  The
    domain is all of R^d and the model stays in the orbit of rho0.
    """
    if not generators:
        raise ValueError("need at least one generator")
    spec = rho0.spec
    for g in generators:
        if g.spec != spec:
            raise ValueError("generator on a different algebra")
        if not g.is_selfadjoint(1e-9):
            raise ValueError("generators must be self-adjoint")
    d = len(generators)

    def density(theta):
        exponent = sum((float(t) * g for t, g in zip(theta, generators)), start=0)
        group_el = _expm_normal(exponent, skew)
        return group_action(group_el, rho0).density

    return ParametricModel(
        spec,
        dim=d,
        domain=[(-np.inf, np.inf)] * d,
        density_fn=density,
        name=f"lie_group(d={d}, skew={skew})",
    )


def multi_round(model: ParametricModel, N: int) -> ParametricModel:
    """Model of N independent identical rounds, j(theta) = rho_theta^(x N).

    Its pullback metric is exactly N times the base metric.  Guarded so the
    materialized matrices stay small.
    """
    if N < 1:
        raise ValueError(f"rounds must be >= 1, got {N}")
    if not (model.spec.num_blocks == 1 or model.spec.is_abelian()):
        raise ValueError("multi-round models support single-block or abelian algebras")
    if 2 * model.spec.total_dim ** N > 4096:
        raise ValueError(f"{model.spec.total_dim}^{N} exceeds the dimension guard")
    if N == 1:
        return model

    def density(theta):
        rho = model._density_fn(theta)
        return tensor_elements([rho] * N)

    def ddensity(theta, r):
        rho = model._density_fn(theta)
        if model._ddensity_fn is not None:
            drho = model._ddensity_fn(theta, r)
        else:
            eye = np.eye(model.dim)
            drho = model.tangent_push(theta, eye[r]).rep
        terms = []
        for i in range(N):
            factors = [rho] * N
            factors[i] = drho
            terms.append(tensor_elements(factors))
        return sum(terms, start=0)

    return ParametricModel(
        tensor_elements([identity(model.spec)] * N).spec,
        dim=model.dim,
        domain=model.domain,
        density_fn=density,
        ddensity_fn=ddensity,
        constraint=model._constraint,
        name=f"{model.name or 'model'}^{N}",
        rounds=N * model.rounds,
        base=model,
    )


def sld_projective_povm(model: ParametricModel, theta, direction=None) -> Povm:
    """Spectral measurement of the model's gradient representative at theta.

    For one-parameter models on faithful states this measurement closes the
    gap between the classical and canonical pullback metrics.
    """
    if direction is None:
        direction = np.eye(model.dim)[0]
    a, _ = model.sld(theta, direction)
    return projective_povm(a)
