"""Tour of the block matrix algebras: products, positivity, structure constants.

Run as: python3 demos/01_block_algebras.py
"""

import numpy as np

from cstarstat import (
    AlgebraSpec,
    abelian,
    commutator_norm,
    delta_basis,
    identity,
    is_positive,
    jordan,
    lie,
    matrix_algebra,
    multiply,
    pauli_basis,
    structure_constants,
    tensor_elements,
    tensor_power,
)

np.set_printoptions(precision=4, suppress=True)

# A direct sum of a 2x2 and a 3x3 block, and the commutative 3-point algebra.
spec = AlgebraSpec((2, 3))
print("spec:", spec, "| total matrix size:", spec.total_dim, "| dimension:", spec.dim)
print("abelian(3) is abelian:", abelian(3).is_abelian())

one = identity(spec)
print("identity is positive:", is_positive(one))

# Pauli relations: the Jordan product symmetrizes, the Lie product measures
# noncommutativity in self-adjoint terms.
s0, s1, s2, s3 = pauli_basis()
print("\n{s1, s2} =\n", jordan(s1, s2).blocks[0])
print("[[s1, s2]] = s3:\n", lie(s1, s2).blocks[0])
print("s1 s2 = i s3:\n", multiply(s1, s2).blocks[0])

# Structure constants of the qubit algebra in the Pauli basis.
d, c = structure_constants(pauli_basis())
print("\nJordan structure d[1,1,:] (so {s1,s1} = s0):", d[1, 1])
print("Lie structure c[1,2,:] (so [[s1,s2]] = s3):", c[1, 2])

# On the delta-function basis of the abelian algebra the Jordan constants are
# diagonal and the Lie constants vanish.
d_ab, c_ab = structure_constants(delta_basis(3))
print("\nabelian: d[1,1] =", d_ab[1, 1], " max |c| =", np.abs(c_ab).max())

# Commutators certify abelian subalgebra candidates.
print("\ncommutator norm (s1, s1):", commutator_norm(s1, s1))
print("commutator norm (s1, s2):", commutator_norm(s1, s2))

# Tensor products model independent rounds.
print("\n[2]^(x3) =", tensor_power(matrix_algebra(2), 3).block_dims)
t = tensor_elements([s3, s3])
print("s3 (x) s3 = diag(1,-1,-1,1):", np.diag(t.blocks[0]).real)
