import numpy as np
import pytest

from cstarstat.algebra import (
    commutator_norm,
    jordan,
    matrix_algebra,
    pauli_basis,
    random_selfadjoint,
)
from cstarstat.measurement import NonRegularError, Povm, delta_povm, random_povm
from cstarstat.model import (
    DomainError,
    lie_group_model,
    multi_round,
    qubit_dephasing,
    qubit_pure,
    simplex_affine,
    sld_projective_povm,
)
from cstarstat.state_space import (
    State,
    evaluate,
    group_action,
    metric,
    orbit_signature,
    random_state,
)

S0, S1, S2, S3 = pauli_basis()
M2 = matrix_algebra(2)


def axis_povm(sigma):
    return Povm(M2, (0.5 * (S0 + sigma), 0.5 * (S0 - sigma)))


def trine_povm():
    """Three effects (1 + cos(phi_k) s1 + sin(phi_k) s2)/3; informative in both
    planar directions, unlike any two-outcome measurement."""
    effects = []
    for k in range(3):
        phi = 2.0 * np.pi * k / 3.0
        effects.append((S0 + np.cos(phi) * S1 + np.sin(phi) * S2) * (1.0 / 3.0))
    return Povm(M2, tuple(effects))


def dephasing_bloch(g, z):
    w = np.exp(-z * g)
    return 0.5 * (S0.blocks[0] + w * (np.cos(g) * S1.blocks[0] - np.sin(g) * S2.blocks[0]))


def test_state_at_builtins():
    mp = qubit_pure()
    assert np.allclose(mp.state_at([0.0]).density.blocks[0], 0.5 * (S0 + S1).blocks[0])
    md = qubit_dephasing()
    assert np.allclose(md.state_at([1e-12, 3.0]).density.blocks[0],
                       0.5 * (S0 + S1).blocks[0], atol=1e-10)
    assert np.allclose(md.state_at([1.0, 1.0]).density.blocks[0], dephasing_bloch(1.0, 1.0))


def test_domain_enforced():
    md = qubit_dephasing()
    with pytest.raises(DomainError):
        md.state_at([-0.5, 1.0])
    ms = simplex_affine(3)
    with pytest.raises(DomainError):
        ms.state_at([0.7, 0.4])  # leaves the simplex interior
    assert ms.state_at([0.2, 0.3]).density.blocks[2][0, 0] == pytest.approx(0.5)


def test_tangent_push_analytic():
    mp = qubit_pure()
    for g in (-0.4, 0.0, 1.2):
        v = mp.tangent_push([g], [1.0])
        expected = 0.5 * (-np.sin(g) * S1.blocks[0] - np.cos(g) * S2.blocks[0])
        assert np.allclose(v.rep.blocks[0], expected, atol=1e-14)

    md = qubit_dephasing()
    g, z = 0.8, 1.3
    v = md.tangent_push([g, z], [0.0, 1.0])
    expected = -0.5 * g * np.exp(-z * g) * (
        np.cos(g) * S1.blocks[0] - np.sin(g) * S2.blocks[0]
    )
    assert np.allclose(v.rep.blocks[0], expected, atol=1e-14)

    zero = md.tangent_push([g, z], [0.0, 0.0])
    assert np.abs(zero.rep.blocks[0]).max() == 0.0


def test_tangent_push_finite_difference_matches_analytic():
    md = qubit_dephasing()
    fd_model = qubit_dephasing()
    fd_model._ddensity_fn = None  # force the finite-difference path
    for theta in ([0.5, 0.5], [1.0, 1.5]):
        for direction in ([1.0, 0.0], [0.0, 1.0], [0.6, -0.8]):
            v_an = md.tangent_push(theta, direction)
            v_fd = fd_model.tangent_push(theta, direction)
            assert np.allclose(v_an.rep.blocks[0], v_fd.rep.blocks[0], atol=1e-6)


def test_sld_dephasing_closed_forms():
    md = qubit_dephasing()
    g, z = 1.0, 1.0

    def traceless(mat):
        return mat - np.trace(mat) / 2.0 * np.eye(2)

    a_w, _ = md.sld([g, z], [0.0, 1.0])
    expected_w = -(g / (2.0 * np.sinh(z * g))) * (
        np.cos(g) * S1.blocks[0] - np.sin(g) * S2.blocks[0]
    )
    assert np.allclose(traceless(a_w.blocks[0]), expected_w, atol=1e-10)

    a_v, _ = md.sld([g, z], [1.0, 0.0])
    coeff = z / (2.0 * np.sinh(z * g))
    expected_v = (
        -(np.exp(-z * g) * np.sin(g) + coeff * np.cos(g)) * S1.blocks[0]
        + (coeff * np.sin(g) - np.exp(-z * g) * np.cos(g)) * S2.blocks[0]
    )
    assert np.allclose(traceless(a_v.blocks[0]), expected_v, atol=1e-10)

    # gradient representatives of the two directions do not commute
    assert commutator_norm(a_v, a_w) > 0.01


def test_sld_pure_model():
    mp = qubit_pure()
    a, _ = mp.sld([0.0], [1.0])
    assert np.allclose(a.blocks[0], -S2.blocks[0], atol=1e-12)
    for g in np.linspace(-2.0, 2.0, 9):
        a, _ = mp.sld([g], [1.0])
        coeffs = np.array([np.trace(a.blocks[0] @ p.blocks[0]).real / 2.0 for p in pauli_basis()])
        assert coeffs[1] * np.sin(g) + coeffs[2] * np.cos(g) == pytest.approx(-1.0, abs=1e-10)
        assert coeffs[3] == pytest.approx(0.0, abs=1e-12)


def test_quantum_metric_pure_model_constant():
    mp = qubit_pure()
    for g in np.linspace(-3.0, 3.0, 20):
        G = mp.quantum_metric([g])
        assert G.shape == (1, 1)
        assert G[0, 0] == pytest.approx(1.0, abs=1e-8)


def test_quantum_metric_dephasing_closed_form():
    md = qubit_dephasing()
    for g in (0.5, 1.0, 1.5):
        for z in (0.5, 1.0, 1.5):
            G = md.quantum_metric([g, z])
            denom = np.exp(2.0 * z * g) - 1.0
            expected = np.array(
                [
                    [np.exp(-2.0 * z * g) + z * z / denom, z * g / denom],
                    [z * g / denom, g * g / denom],
                ]
            )
            assert np.allclose(G, expected, rtol=1e-6, atol=1e-12)


def test_quantum_metric_cross_term_oracle():
    # independent computation of the off-diagonal entry through the Jordan pairing
    md = qubit_dephasing()
    g, z = 1.0, 1.0
    s = md.state_at([g, z])
    a_v, _ = md.sld([g, z], [1.0, 0.0])
    a_w, _ = md.sld([g, z], [0.0, 1.0])
    oracle = evaluate(s, jordan(a_v, a_w)).real - evaluate(s, a_v).real * evaluate(s, a_w).real
    G = md.quantum_metric([g, z])
    assert G[0, 1] == pytest.approx(oracle, abs=1e-10)
    assert G[0, 1] == pytest.approx(z * g / (np.exp(2 * z * g) - 1.0), abs=1e-10)


def test_quantum_metric_agrees_with_state_space_metric():
    md = qubit_dephasing()
    theta = [0.9, 0.7]
    s = md.state_at(theta)
    tangents = md.coordinate_tangents(theta)
    G = md.quantum_metric(theta)
    for r in range(2):
        for c in range(2):
            assert G[r, c] == pytest.approx(metric(s, tangents[r], tangents[c]), abs=1e-9)


def test_classical_metric_examples():
    mp = qubit_pure()
    G = mp.classical_metric(axis_povm(S2), [0.0])
    assert G[0, 0] == pytest.approx(1.0, abs=1e-10)

    with pytest.raises(NonRegularError):
        # the minus outcome of the s1 measurement has probability 0 at g=0
        mp.classical_metric(axis_povm(S1), [0.0])

    trivial = Povm(M2, (S0,))
    G0 = mp.classical_metric(trivial, [0.5])
    assert G0[0, 0] == pytest.approx(0.0, abs=1e-12)


def test_classical_equals_quantum_on_simplex():
    ms = simplex_affine(3)
    P = delta_povm(3)
    for theta in ([0.2, 0.3], [0.5, 0.25], [0.1, 0.6]):
        gq = ms.quantum_metric(theta)
        gc = ms.classical_metric(P, theta)
        assert np.allclose(gq, gc, atol=1e-12)
        p = np.array([theta[0], theta[1], 1.0 - sum(theta)])
        expected = np.diag(1.0 / p[:2]) + 1.0 / p[2]
        assert np.allclose(gq, expected, atol=1e-10)


def test_majorization_random():
    rng = np.random.default_rng(0)
    worst = np.inf
    for t in range(100):
        spec = matrix_algebra(2 if t % 2 == 0 else 3)
        rho0 = random_state(spec, rng)
        d = int(rng.integers(1, 3))
        gens = [random_selfadjoint(spec, rng) for _ in range(d)]
        m = lie_group_model(gens, rho0, skew=bool(rng.integers(0, 2)))
        theta = rng.uniform(-0.5, 0.5, size=d)
        P = random_povm(spec, int(rng.integers(2, 7)), rng)
        diff = m.quantum_metric(theta) - m.classical_metric(P, theta)
        worst = min(worst, float(np.linalg.eigvalsh(diff)[0]))
    assert worst >= -1e-8


def test_attainability_pure_model_at_zero():
    mp = qubit_pure()
    gq = mp.quantum_metric([0.0])
    gc = mp.classical_metric(axis_povm(S2), [0.0])
    assert np.allclose(gq, gc, atol=1e-8)
    assert gq[0, 0] == pytest.approx(1.0, abs=1e-10)


def test_attainability_sld_eigenbasis_closes_gap():
    rng = np.random.default_rng(1)
    for t in range(10):
        spec = matrix_algebra(2 if t % 2 == 0 else 3)
        rho0 = random_state(spec, rng)
        m = lie_group_model([random_selfadjoint(spec, rng)], rho0, skew=bool(t % 2))
        theta = rng.uniform(-0.4, 0.4, size=1)
        P = sld_projective_povm(m, theta)
        gq = m.quantum_metric(theta)
        gc = m.classical_metric(P, theta)
        assert abs(gq[0, 0] - gc[0, 0]) <= 1e-8


def test_multi_round_scaling():
    for base, points in (
        (qubit_pure(), [[-0.7], [0.3], [1.1]]),
        (qubit_dephasing(), [[0.5, 0.5], [1.0, 1.0], [1.5, 0.8]]),
    ):
        gbase = {tuple(p): base.quantum_metric(p) for p in points}
        for N in (2, 3):
            wrapped = multi_round(base, N)
            assert wrapped.rounds == N
            for p in points:
                diff = wrapped.quantum_metric(p) - N * gbase[tuple(p)]
                assert np.linalg.norm(diff, "fro") <= 1e-6


def test_multi_round_identity_and_guards():
    base = qubit_pure()
    assert multi_round(base, 1) is base
    with pytest.raises(ValueError):
        multi_round(base, 0)
    with pytest.raises(ValueError):
        multi_round(base, 12)  # dimension guard


def test_multi_round_pure_metric_value():
    wrapped = multi_round(qubit_pure(), 3)
    G = wrapped.quantum_metric([0.0])
    assert G[0, 0] == pytest.approx(3.0, abs=1e-8)


def test_lie_group_model_reproduces_circle_family():
    rho0 = State(0.5 * (S0 + S1))
    m = lie_group_model([0.5 * S3], rho0, skew=True)
    for g in (-1.0, 0.0, 0.4, 2.0):
        got = m.state_at([g]).density.blocks[0]
        expected = 0.5 * (
            S0.blocks[0] + np.cos(g) * S1.blocks[0] - np.sin(g) * S2.blocks[0]
        )
        assert np.allclose(got, expected, atol=1e-12)
    assert np.allclose(m.state_at([0.0]).density.blocks[0], rho0.density.blocks[0])


def test_lie_group_equivariance():
    rho0 = State(0.5 * (S0 + S1))
    m = lie_group_model([0.5 * S3], rho0, skew=True)
    from cstarstat.model import _expm_normal

    rng = np.random.default_rng(2)
    for _ in range(10):
        g = float(rng.uniform(-2, 2))
        z = float(rng.uniform(-2, 2))
        lhs = m.state_at([g + z]).density.blocks[0]
        u = _expm_normal(z * 0.5 * S3, skew=True)
        rhs = group_action(u, m.state_at([g])).density.blocks[0]
        assert np.allclose(lhs, rhs, atol=1e-10)


def test_lie_group_nonskew_stays_normalized():
    m = lie_group_model([S3], State(0.5 * S0), skew=False)
    for theta in (-1.5, 0.0, 0.7, 3.0):
        s = m.state_at([theta])
        assert s.density.trace().real == pytest.approx(1.0, abs=1e-12)
        assert orbit_signature(s) == [2]


def test_model_stays_in_one_orbit():
    md = qubit_dephasing()
    sigs = {tuple(orbit_signature(md.state_at([g, z])))
            for g in (0.3, 1.0, 2.0) for z in (0.2, 1.0)}
    assert sigs == {(2,)}
    mp = qubit_pure()
    sigs = {tuple(orbit_signature(mp.state_at([g]))) for g in np.linspace(-3, 3, 7)}
    assert sigs == {(1,)}
