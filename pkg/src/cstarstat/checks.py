"""Seeded self-check suite: the structural inequalities the theory guarantees.

Each check draws its own deterministic substream from the seed, so reports
are reproducible and individual checks are independent of suite order.
"""

from __future__ import annotations

import numpy as np

from . import measurement, model, state_space
from .algebra import Element, matrix_algebra, random_selfadjoint, random_unitary
from .measurement import kadison_defect, random_povm
from .state_space import (
    geodesic,
    gradient_vector,
    metric,
    random_state,
    unitary_push,
)

KADISON_TOL = 1e-10
MAJORIZATION_TOL = 1e-8
SCALING_TOL = 1e-6
UNITARY_TOL = 1e-8
GEODESIC_EIG_TOL = 1e-9
GEODESIC_TRACE_TOL = 1e-12


def check_kadison(seed: int, trials: int = 200, inject_faulty_povm: bool = False) -> dict:
    """m(f^2) - m(f)^2 is positive for random measurements and functions."""
    rng = np.random.default_rng([seed, 1])
    worst = np.inf
    count = 0
    for t in range(trials):
        spec = matrix_algebra(int(rng.integers(2, 4)))
        n_out = int(rng.integers(2, 7))
        P = random_povm(spec, n_out, rng)
        f = rng.standard_normal(n_out)
        worst = min(worst, kadison_defect(P, f))
        count += 1
    if inject_faulty_povm:
        spec = matrix_algebra(2)
        sigma1 = Element(spec, (np.array([[0, 1], [1, 0]], dtype=complex),))
        eye = Element(spec, (np.eye(2, dtype=complex),))
        bad = measurement.Povm(spec, (sigma1, eye - sigma1))
        worst = min(worst, kadison_defect(bad, np.array([1.0, -1.0])))
        count += 1
    return {
        "name": "kadison",
        "trials": count,
        "worst": worst,
        "tolerance": -KADISON_TOL,
        "passes": bool(worst >= -KADISON_TOL),
    }


def check_majorization(seed: int, trials: int = 200) -> dict:
    """Canonical pullback metric dominates every classical pullback metric."""
    rng = np.random.default_rng([seed, 2])
    worst = np.inf
    for t in range(trials):
        spec = matrix_algebra(2 if t % 2 == 0 else 3)
        rho0 = random_state(spec, rng)
        d = int(rng.integers(1, 3))
        gens = [random_selfadjoint(spec, rng) for _ in range(d)]
        m = model.lie_group_model(gens, rho0, skew=bool(rng.integers(0, 2)))
        theta = rng.uniform(-0.5, 0.5, size=d)
        P = random_povm(spec, int(rng.integers(2, 7)), rng)
        gq = m.quantum_metric(theta)
        gc = m.classical_metric(P, theta)
        worst = min(worst, float(np.linalg.eigvalsh(gq - gc)[0]))
    return {
        "name": "majorization",
        "trials": trials,
        "worst": worst,
        "tolerance": -MAJORIZATION_TOL,
        "passes": bool(worst >= -MAJORIZATION_TOL),
    }


def check_nround_scaling(seed: int) -> dict:
    """Metric of the N-round model is N times the base metric."""
    rng = np.random.default_rng([seed, 3])
    worst = 0.0
    cases = 0
    for base, points in (
        (model.qubit_pure(), [[-0.7], [0.3], [1.1]]),
        (model.qubit_dephasing(), [[0.5, 0.5], [1.0, 1.0], [1.5, 0.8]]),
    ):
        for N in (2, 3):
            wrapped = model.multi_round(base, N)
            for theta in points:
                diff = wrapped.quantum_metric(theta) - N * base.quantum_metric(theta)
                worst = max(worst, float(np.linalg.norm(diff, "fro")))
                cases += 1
    return {
        "name": "nround_scaling",
        "trials": cases,
        "worst": worst,
        "tolerance": SCALING_TOL,
        "passes": bool(worst <= SCALING_TOL),
    }


def check_unitary_invariance(seed: int, trials: int = 50) -> dict:
    """The canonical metric is preserved by unitary pushforwards."""
    rng = np.random.default_rng([seed, 4])
    worst = 0.0
    for t in range(trials):
        spec = matrix_algebra(2 if t % 2 == 0 else 3)
        s = random_state(spec, rng)
        v = gradient_vector(s, random_selfadjoint(spec, rng))
        w = gradient_vector(s, random_selfadjoint(spec, rng))
        u = random_unitary(spec, rng)
        before = metric(s, v, w)
        s2 = state_space.group_action(u, s)
        after = metric(s2, unitary_push(u, v), unitary_push(u, w))
        worst = max(worst, abs(after - before))
    return {
        "name": "unitary_invariance",
        "trials": trials,
        "worst": worst,
        "tolerance": UNITARY_TOL,
        "passes": bool(worst <= UNITARY_TOL),
    }


def check_geodesic_validity(seed: int, trials: int = 50) -> dict:
    """Geodesics keep positivity and unit trace over t in [-3, 3]."""
    rng = np.random.default_rng([seed, 5])
    worst_eig = np.inf
    worst_trace = 0.0
    times = np.arange(-3.0, 3.0 + 1e-9, 0.1)
    for t in range(trials):
        spec = matrix_algebra(2 if t % 2 == 0 else 3)
        s = random_state(spec, rng, pure=bool(t % 4 == 0))
        v = gradient_vector(s, random_selfadjoint(spec, rng))
        for tt in times:
            nu = geodesic(s, v, float(tt))
            eig = min(
                float(np.linalg.eigvalsh((b + b.conj().T) / 2)[0])
                for b in nu.density.blocks
            )
            worst_eig = min(worst_eig, eig)
            worst_trace = max(worst_trace, abs(nu.density.trace().real - 1.0))
    passes = worst_eig >= -GEODESIC_EIG_TOL and worst_trace <= GEODESIC_TRACE_TOL
    return {
        "name": "geodesic_validity",
        "trials": trials,
        "worst": min(worst_eig, -worst_trace),
        "tolerance": -GEODESIC_EIG_TOL,
        "passes": bool(passes),
    }


def run_checks(seed: int, trials: int = 200, inject_faulty_povm: bool = False) -> dict:
    results = [
        check_kadison(seed, trials=trials, inject_faulty_povm=inject_faulty_povm),
        check_majorization(seed, trials=trials),
        check_nround_scaling(seed),
        check_unitary_invariance(seed),
        check_geodesic_validity(seed),
    ]
    return {
        "seed": seed,
        "checks": results,
        "passes": all(r["passes"] for r in results),
    }
