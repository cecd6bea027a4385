"""Cost functions, estimators, and the Cramer-Rao / Helstrom bound machinery.

An estimator assigns a parameter value to each measurement outcome; together
with a cost function it induces the loss

    L(m1, m2) = sum_j C(m1, E_j) p_j(m2),

the expected cost of reporting m1 when the data are drawn at m2.  At a
stationary point the Hessian of L(., m2) and the second moment of the cost
scores combine into the covariance bivector Cov = H^{-1} Score H^{-1}, which
is bounded below by the inverse classical pullback metric (Cramer-Rao) and
further by the inverse canonical pullback metric (Helstrom), uniformly over
measurements.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import Element
from .measurement import NonRegularError, Povm, push_forward
from .model import ParametricModel

STATIONARITY_TOL = 1e-6
HESSIAN_FD_STEP = 1e-4
GRAD_FD_STEP = 1e-5
BOUND_SLACK = 1e-8
CONDITION_LIMIT = 1e8


class NonStationaryError(ValueError):
    """The estimator is not stationary at the requested point."""

    def __init__(self, residual):
        self.residual = np.asarray(residual, dtype=float)
        super().__init__(
            f"estimator not stationary (residual {self.residual.tolist()})"
        )


@dataclass(frozen=True)
class CostFunction:
    """Nonnegative cost vanishing on the diagonal.

    ``euclidean`` costs are C(m1, m2) = (m1 - m2)' W (m1 - m2) / 2 with an
    optional symmetric positive weight W (identity by default) and carry
    analytic first-slot gradients.  Custom costs supply an evaluator and
    optionally a first-slot gradient; missing gradients fall back to central
    differences.
    """

    kind: str = "euclidean"
    weight: np.ndarray | None = None
    func: object = None
    grad1: object = None

    def __post_init__(self):
        if self.kind == "euclidean":
            if self.weight is not None:
                w = np.asarray(self.weight, dtype=float)
                if w.ndim != 2 or w.shape[0] != w.shape[1]:
                    raise ValueError("weight must be a square matrix")
                if not np.allclose(w, w.T, atol=1e-12):
                    raise ValueError("weight must be symmetric")
                if np.linalg.eigvalsh(w)[0] <= 0:
                    raise ValueError("weight must be positive definite")
                object.__setattr__(self, "weight", w)
        elif self.kind == "custom":
            if self.func is None:
                raise ValueError("custom cost needs an evaluator")
        else:
            raise ValueError(f"unknown cost kind {self.kind!r}")

    def value(self, m1, m2) -> float:
        m1 = np.asarray(m1, dtype=float)
        m2 = np.asarray(m2, dtype=float)
        if self.kind == "euclidean":
            d = m1 - m2
            if self.weight is None:
                return 0.5 * float(d @ d)
            return 0.5 * float(d @ self.weight @ d)
        return float(self.func(m1, m2))

    def grad1_at(self, m1, m2) -> np.ndarray:
        """Gradient in the first slot, analytic for euclidean costs."""
        m1 = np.asarray(m1, dtype=float)
        m2 = np.asarray(m2, dtype=float)
        if self.kind == "euclidean":
            d = m1 - m2
            return d if self.weight is None else self.weight @ d
        if self.grad1 is not None:
            return np.asarray(self.grad1(m1, m2), dtype=float)
        g = np.empty(len(m1))
        for r in range(len(m1)):
            h = GRAD_FD_STEP * max(1.0, abs(m1[r]))
            e = np.zeros(len(m1))
            e[r] = h
            g[r] = (self.value(m1 + e, m2) - self.value(m1 - e, m2)) / (2.0 * h)
        return g


def euclidean_cost(weight=None) -> CostFunction:
    return CostFunction(kind="euclidean", weight=weight)


@dataclass(frozen=True)
class Estimator:
    """Outcome-indexed parameter values; must take at least two distinct values."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] < 1:
            raise ValueError("estimator values must be an (n_outcomes, dim) array")
        if all(np.allclose(v[0], row, atol=0.0) for row in v[1:]):
            raise ValueError("constant estimators are excluded")
        object.__setattr__(self, "values", v)

    @property
    def n_outcomes(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


@dataclass
class BoundReport:
    """Matrices and per-covector slack of the estimation bounds at one point."""

    point: np.ndarray
    quantum_metric: np.ndarray
    classical_metric: np.ndarray
    hessian: np.ndarray | None = None
    covariance: np.ndarray | None = None
    covector_gaps: list = field(default_factory=list)
    min_eig_cr: float | None = None
    min_eig_helstrom: float | None = None
    rounds: int = 1
    round_floors: list = field(default_factory=list)
    passes: bool = True


def _check_inputs(P: Povm, est: Estimator):
    if est.n_outcomes != P.n_outcomes:
        raise ValueError(
            f"estimator has {est.n_outcomes} values for {P.n_outcomes} outcomes"
        )


def _probabilities(model: ParametricModel, P: Povm, theta) -> np.ndarray:
    return push_forward(P, model.state_at(theta)).p


def loss(
    model: ParametricModel,
    P: Povm,
    cost: CostFunction,
    est: Estimator,
    m1,
    m2,
    regularity_tol: float = 1e-9,
) -> float:
    """Expected cost of reporting m1 under data drawn at m2.

    Requires the measurement to be regular at m2; the moment machinery
    downstream (residual, Hessian, scores) stays well defined on boundary
    probabilities and does not re-impose the check.
    """
    _check_inputs(P, est)
    m1 = np.asarray(m1, dtype=float)
    p = _probabilities(model, P, m2)
    if p.min() <= regularity_tol:
        raise NonRegularError(
            f"measurement not regular at {np.asarray(m2).tolist()} "
            f"(min probability {p.min():.3e})"
        )
    return float(sum(cost.value(m1, e) * pj for e, pj in zip(est.values, p)))


def cost_element(P: Povm, cost: CostFunction, est: Estimator, m1) -> Element:
    """Self-adjoint element whose expectation at any state reproduces the loss."""
    _check_inputs(P, est)
    m1 = np.asarray(m1, dtype=float)
    return sum(
        (cost.value(m1, e) * m for e, m in zip(est.values, P.effects)), start=0
    )


def _loss_fixed_data(model, P, cost, est, theta):
    p = _probabilities(model, P, theta)

    def L(m):
        return float(sum(cost.value(m, e) * pj for e, pj in zip(est.values, p)))

    return L, p


def stationarity_residual(
    model: ParametricModel, P: Povm, cost: CostFunction, est: Estimator, theta
) -> np.ndarray:
    """First-slot gradient of the loss at the true point; zero certifies stationarity.

    Euclidean costs use the analytic expectation identity (the residual is
    W (theta - E[estimator])); other costs are differenced centrally.
    """
    _check_inputs(P, est)
    theta = np.asarray(theta, dtype=float)
    _, p = _loss_fixed_data(model, P, cost, est, theta)
    if cost.kind == "euclidean":
        mean = est.values.T @ p
        d = theta - mean
        return d if cost.weight is None else cost.weight @ d
    L, _ = _loss_fixed_data(model, P, cost, est, theta)
    g = np.empty(model.dim)
    for r in range(model.dim):
        h = GRAD_FD_STEP * max(1.0, abs(theta[r]))
        e = np.zeros(model.dim)
        e[r] = h
        g[r] = (L(theta + e) - L(theta - e)) / (2.0 * h)
    return g


def hessian(
    model: ParametricModel,
    P: Povm,
    cost: CostFunction,
    est: Estimator,
    theta,
    stationarity_tol: float = STATIONARITY_TOL,
) -> np.ndarray:
    """Second differences of the fixed-data loss at a certified stationary point.

    Raises :class:`NonStationaryError` when the residual exceeds the gate;
    the Hessian form is only meaningful where the first derivative vanishes.
    """
    theta = np.asarray(theta, dtype=float)
    residual = stationarity_residual(model, P, cost, est, theta)
    if np.max(np.abs(residual)) > stationarity_tol:
        raise NonStationaryError(residual)
    L, _ = _loss_fixed_data(model, P, cost, est, theta)
    d = model.dim
    h = np.array([HESSIAN_FD_STEP * max(1.0, abs(t)) for t in theta])
    H = np.empty((d, d))
    L0 = L(theta)
    for r in range(d):
        er = np.zeros(d)
        er[r] = h[r]
        H[r, r] = (L(theta + er) - 2.0 * L0 + L(theta - er)) / h[r] ** 2
        for c in range(r + 1, d):
            ec = np.zeros(d)
            ec[c] = h[c]
            H[r, c] = H[c, r] = (
                L(theta + er + ec)
                - L(theta + er - ec)
                - L(theta - er + ec)
                + L(theta - er - ec)
            ) / (4.0 * h[r] * h[c])
    return (H + H.T) / 2.0


def score_matrix(
    model: ParametricModel, P: Povm, cost: CostFunction, est: Estimator, theta
) -> np.ndarray:
    """Second moment of the first-slot cost gradients under the true distribution."""
    _check_inputs(P, est)
    theta = np.asarray(theta, dtype=float)
    _, p = _loss_fixed_data(model, P, cost, est, theta)
    grads = np.array([cost.grad1_at(theta, e) for e in est.values])
    return np.einsum("jr,js,j->rs", grads, grads, p)


def covariance(
    model: ParametricModel,
    P: Povm,
    cost: CostFunction,
    est: Estimator,
    theta,
    stationarity_tol: float = STATIONARITY_TOL,
) -> np.ndarray:
    """Covariance bivector H^{-1} Score H^{-1} in the cotangent form.

    Invariant under rescaling the cost: the scale enters the score
    quadratically and is cancelled by the two inverse Hessians.  For
    Euclidean costs the loss Hessian equals the weight matrix identically, so
    it is used in closed form; other costs go through the differenced
    Hessian.
    """
    theta = np.asarray(theta, dtype=float)
    if cost.kind == "euclidean":
        residual = stationarity_residual(model, P, cost, est, theta)
        if np.max(np.abs(residual)) > stationarity_tol:
            raise NonStationaryError(residual)
        H = cost.weight if cost.weight is not None else np.eye(model.dim)
    else:
        H = hessian(model, P, cost, est, theta, stationarity_tol)
    if np.linalg.cond(H) > CONDITION_LIMIT:
        raise ValueError("singular loss Hessian; covariance undefined")
    C = score_matrix(model, P, cost, est, theta)
    Hinv = np.linalg.inv(H)
    cov = Hinv @ C @ Hinv
    return (cov + cov.T) / 2.0


def _quadratic(mat: np.ndarray, xi: np.ndarray) -> float:
    return float(xi @ mat @ xi)


def _inv(mat: np.ndarray, what: str) -> np.ndarray:
    if np.linalg.cond(mat) > CONDITION_LIMIT:
        raise ValueError(f"singular {what}")
    inv = np.linalg.inv(mat)
    return (inv + inv.T) / 2.0


def _default_covectors(dim: int, covectors) -> list[np.ndarray]:
    if covectors is None:
        return [row.copy() for row in np.eye(dim)]
    return [np.asarray(x, dtype=float) for x in covectors]


def cr_check(
    model: ParametricModel,
    P: Povm,
    cost: CostFunction,
    est: Estimator,
    theta,
    covectors=None,
    slack: float = BOUND_SLACK,
) -> BoundReport:
    """Verify Cov >= inverse classical metric on the given test covectors.

    The report carries the per-covector gaps, the minimum eigenvalue of
    Cov - (classical metric)^{-1}, and the surrounding matrices.
    """
    theta = np.asarray(theta, dtype=float)
    g_cl = model.classical_metric(P, theta)
    g_q = model.quantum_metric(theta)
    cov = covariance(model, P, cost, est, theta)
    H = hessian(model, P, cost, est, theta)
    g_cl_inv = _inv(g_cl, "classical pullback metric")
    gaps = []
    for xi in _default_covectors(model.dim, covectors):
        gaps.append({"covector": xi, "cr": _quadratic(cov - g_cl_inv, xi)})
    min_eig = float(np.linalg.eigvalsh(cov - g_cl_inv)[0])
    passes = min_eig >= -slack and all(g["cr"] >= -slack for g in gaps)
    return BoundReport(
        point=theta,
        quantum_metric=g_q,
        classical_metric=g_cl,
        hessian=H,
        covariance=cov,
        covector_gaps=gaps,
        min_eig_cr=min_eig,
        passes=passes,
    )


def helstrom_check(
    model: ParametricModel,
    P: Povm,
    cost: CostFunction | None,
    est: Estimator | None,
    theta,
    covectors=None,
    slack: float = BOUND_SLACK,
) -> BoundReport:
    """Verify the two-link chain Cov >= (classical)^{-1} >= (canonical)^{-1}.

    Without an estimator and cost only the metric link is reported.  For
    models built by :func:`cstarstat.model.multi_round` the report also
    carries the per-covector N-round floor (1/N) xi' (base metric)^{-1} xi.
    """
    theta = np.asarray(theta, dtype=float)
    g_cl = model.classical_metric(P, theta)
    g_q = model.quantum_metric(theta)
    g_cl_inv = _inv(g_cl, "classical pullback metric")
    g_q_inv = _inv(g_q, "canonical pullback metric")
    cov = None
    H = None
    if cost is not None and est is not None:
        cov = covariance(model, P, cost, est, theta)
        H = hessian(model, P, cost, est, theta)

    xis = _default_covectors(model.dim, covectors)
    gaps = []
    for xi in xis:
        entry = {"covector": xi, "helstrom": _quadratic(g_cl_inv - g_q_inv, xi)}
        if cov is not None:
            entry["cr"] = _quadratic(cov - g_cl_inv, xi)
        gaps.append(entry)

    min_hel = float(np.linalg.eigvalsh(g_cl_inv - g_q_inv)[0])
    min_cr = None
    if cov is not None:
        min_cr = float(np.linalg.eigvalsh(cov - g_cl_inv)[0])

    floors = []
    rounds = getattr(model, "rounds", 1)
    if rounds > 1 and getattr(model, "base", None) is not None:
        base_inv = _inv(model.base.quantum_metric(theta), "base pullback metric")
        floors = [_quadratic(base_inv, xi) / rounds for xi in xis]

    passes = min_hel >= -slack and all(g["helstrom"] >= -slack for g in gaps)
    if min_cr is not None:
        passes = passes and min_cr >= -slack and all(
            g["cr"] >= -slack for g in gaps
        )
    return BoundReport(
        point=theta,
        quantum_metric=g_q,
        classical_metric=g_cl,
        hessian=H,
        covariance=cov,
        covector_gaps=gaps,
        min_eig_cr=min_cr,
        min_eig_helstrom=min_hel,
        rounds=rounds,
        round_floors=floors,
        passes=passes,
    )
