"""States, the group action, the canonical metric, and its geodesics.

Run as: python3 demos/02_states_and_geometry.py
"""

import numpy as np

from cstarstat import (
    Element,
    State,
    TangentVector,
    abelian,
    evaluate,
    geodesic,
    gradient_vector,
    group_action,
    hamiltonian_vector,
    identity,
    matrix_algebra,
    maximally_mixed,
    metric,
    orbit_signature,
    pauli_basis,
    sld_at_state,
)

np.set_printoptions(precision=5, suppress=True)

s0, s1, s2, s3 = pauli_basis()
M2 = matrix_algebra(2)

# A rank-one qubit state and the maximally mixed state.
plus = State(0.5 * (s0 + s1))
mixed = maximally_mixed(M2)
print("orbit signature of the rank-one state:", orbit_signature(plus))
print("orbit signature of the mixed state:", orbit_signature(mixed))
print("normalization:", evaluate(plus, identity(M2)).real)

# The invertible group acts by conjugate-and-renormalize; scale drops out.
u = Element(M2, (np.array([[np.exp(1j * np.pi / 4), 0], [0, np.exp(-1j * np.pi / 4)]]),))
rotated = group_action(u, plus)
print("\nquarter turn of (1+s1)/2 has Bloch components",
      [evaluate(rotated, s).real for s in (s1, s2, s3)])
same = group_action(3.0 * u, plus)
print("rescaled group element acts identically:",
      np.allclose(same.density.blocks[0], rotated.density.blocks[0]))

# Gradient vs Hamiltonian directions at a state.
v_grad = gradient_vector(mixed, s1)
v_ham = hamiltonian_vector(plus, s3)
print("\ngradient tangent at the mixed state (rep):\n", v_grad.rep.blocks[0])
print("hamiltonian tangent at the rank-one state (rep):\n", v_ham.rep.blocks[0])

# The metric pairs tangents through the gradient representative.
print("\nG(Y_s1, Y_s1) at the mixed state:", metric(mixed, v_grad, v_grad))
a, gauge = sld_at_state(mixed, v_grad)
print("representative solving the flow equation:\n", a.blocks[0], "| gauge dim:", gauge)

# On an abelian algebra the same pairing is the Fisher-Rao metric.
spec3 = abelian(3)
p = State(Element(spec3, tuple(np.array([[x]], dtype=complex) for x in (0.2, 0.5, 0.3))))
u_t = TangentVector(p, Element(spec3, tuple(np.array([[x]], dtype=complex) for x in (1.0, -0.5, -0.5))))
fisher = sum(x * x / q for x, q in zip((1.0, -0.5, -0.5), (0.2, 0.5, 0.3)))
print("\nabelian metric:", metric(p, u_t, u_t), " vs sum u^2/p:", fisher)

# Geodesics leave and re-enter orbits while staying states.
v = gradient_vector(plus, s3)
print("\ngeodesic from the rank-one state:")
for t in (0.0, 0.3, 0.8, 1.5707):
    nu = geodesic(plus, v, t)
    eigs = np.linalg.eigvalsh(nu.density.blocks[0])
    print(f"  t={t:6.4f}  eigenvalues={eigs}  rank={orbit_signature(nu)}")
