"""Finite-dimensional C*-algebras as direct sums of full complex matrix blocks.

Every finite-dimensional C*-algebra is isomorphic to a direct sum
M_{n_1}(C) + ... + M_{n_B}(C), so an :class:`AlgebraSpec` is just the ordered
list of block sizes and an :class:`Element` a matching list of complex
matrices.  The commutative algebra of functions on an n-point outcome space
is the special case of n blocks of size 1.

All operations are pure functions of immutable values; nothing here keeps
global state.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce

import numpy as np

POSITIVITY_TOL = 1e-10
SELFADJOINT_TOL = 1e-10


class SpecMismatchError(ValueError):
    """Operands live on different algebras."""


@dataclass(frozen=True)
class AlgebraSpec:
    """Block structure of a finite-dimensional C*-algebra.

    Attributes
    ----------
    block_dims : tuple of int
        Ordered sizes (n_1, ..., n_B) of the full matrix blocks.  All sizes
        must be >= 1 and the tuple nonempty.
    """

    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if len(dims) == 0:
            raise ValueError("an algebra needs at least one block")
        if any(n < 1 for n in dims):
            raise ValueError(f"block dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "block_dims", dims)

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def total_dim(self) -> int:
        """Matrix size of the direct-sum representation, sum of n_k."""
        return sum(self.block_dims)

    @property
    def dim(self) -> int:
        """Complex dimension sum of n_k^2 (= real dimension of the self-adjoint part)."""
        return sum(n * n for n in self.block_dims)

    def is_abelian(self) -> bool:
        return all(n == 1 for n in self.block_dims)


def abelian(n: int) -> AlgebraSpec:
    """The commutative algebra of functions on an n-point space."""
    return AlgebraSpec((1,) * n)


def matrix_algebra(n: int) -> AlgebraSpec:
    """The full matrix algebra M_n(C)."""
    return AlgebraSpec((n,))


@dataclass(frozen=True, eq=False)
class Element:
    """Member of a block matrix algebra: one complex matrix per block."""

    spec: AlgebraSpec
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.blocks) != self.spec.num_blocks:
            raise SpecMismatchError(
                f"expected {self.spec.num_blocks} blocks, got {len(self.blocks)}"
            )
        mats = []
        for n, blk in zip(self.spec.block_dims, self.blocks):
            m = np.asarray(blk, dtype=np.complex128)
            if m.shape != (n, n):
                raise SpecMismatchError(f"block of shape {m.shape} does not match size {n}")
            mats.append(m)
        object.__setattr__(self, "blocks", tuple(mats))

    # -- structure helpers ---------------------------------------------------

    def adjoint(self) -> "Element":
        return Element(self.spec, tuple(b.conj().T for b in self.blocks))

    def trace(self) -> complex:
        return complex(sum(np.trace(b) for b in self.blocks))

    def norm(self) -> float:
        """C*-norm of the direct sum, i.e. the largest block spectral norm."""
        return max(float(np.linalg.norm(b, 2)) for b in self.blocks)

    def selfadjoint_defect(self) -> float:
        return max(float(np.linalg.norm(b - b.conj().T, 2)) for b in self.blocks)

    def is_selfadjoint(self, tol: float = SELFADJOINT_TOL) -> bool:
        return self.selfadjoint_defect() <= tol

    # -- arithmetic ------------------------------------------------------------

    def _require_same_spec(self, other: "Element"):
        if self.spec != other.spec:
            raise SpecMismatchError(f"specs differ: {self.spec} vs {other.spec}")

    def __add__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        self._require_same_spec(other)
        return Element(self.spec, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __radd__(self, other):
        if other == 0:  # allow sum() over elements
            return self
        return NotImplemented

    def __sub__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        self._require_same_spec(other)
        return Element(self.spec, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __neg__(self):
        return Element(self.spec, tuple(-b for b in self.blocks))

    def __mul__(self, scalar):
        if isinstance(scalar, Element):
            return NotImplemented
        return Element(self.spec, tuple(scalar * b for b in self.blocks))

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return multiply(self, other)


def zeros(spec: AlgebraSpec) -> Element:
    return Element(spec, tuple(np.zeros((n, n), dtype=np.complex128) for n in spec.block_dims))


def identity(spec: AlgebraSpec) -> Element:
    """The unit 1 of the algebra (block-wise identity matrices)."""
    return Element(spec, tuple(np.eye(n, dtype=np.complex128) for n in spec.block_dims))


def adjoint(x: Element) -> Element:
    """Involution: block-wise conjugate transpose."""
    return x.adjoint()


def multiply(x: Element, y: Element) -> Element:
    """Block-wise matrix product."""
    x._require_same_spec(y)
    return Element(x.spec, tuple(a @ b for a, b in zip(x.blocks, y.blocks)))


def jordan(x: Element, y: Element) -> Element:
    """Jordan product {x,y} = (xy + yx)/2; preserves self-adjointness."""
    x._require_same_spec(y)
    return Element(x.spec, tuple((a @ b + b @ a) / 2.0 for a, b in zip(x.blocks, y.blocks)))


def lie(x: Element, y: Element) -> Element:
    """Lie product [[x,y]] = (xy - yx)/(2i); preserves self-adjointness."""
    x._require_same_spec(y)
    return Element(x.spec, tuple((a @ b - b @ a) / 2.0j for a, b in zip(x.blocks, y.blocks)))


def commutator_norm(x: Element, y: Element) -> float:
    """Largest block spectral norm of xy - yx.

    A value below tolerance certifies that x and y are candidates for
    generating a commutative subalgebra, which is what makes the classical
    bound attainable.
    """
    x._require_same_spec(y)
    return max(
        float(np.linalg.norm(a @ b - b @ a, 2)) for a, b in zip(x.blocks, y.blocks)
    )


def is_positive(x: Element, tol: float = POSITIVITY_TOL) -> tuple[bool, float]:
    """Test positivity of a self-adjoint element.

    Returns ``(flag, min_eigenvalue)`` where the flag is true iff every
    block's minimum eigenvalue is >= -tol.  Raises if x is not self-adjoint
    within tol.
    """
    defect = x.selfadjoint_defect()
    if defect > max(tol, SELFADJOINT_TOL):
        raise ValueError(f"element is not self-adjoint (defect {defect:.3e})")
    min_eig = min(
        float(np.linalg.eigvalsh((b + b.conj().T) / 2.0)[0]) for b in x.blocks
    )
    return (min_eig >= -tol, min_eig)


def trace_pairing(x: Element, y: Element) -> complex:
    """Sum of block traces tr(x_k y_k); real for self-adjoint arguments."""
    x._require_same_spec(y)
    return complex(sum(np.trace(a @ b) for a, b in zip(x.blocks, y.blocks)))


def frobenius_norm(x: Element) -> float:
    return float(np.sqrt(sum(np.linalg.norm(b, "fro") ** 2 for b in x.blocks)))


def allclose(x: Element, y: Element, tol: float = 1e-10) -> bool:
    x._require_same_spec(y)
    return all(np.allclose(a, b, rtol=0.0, atol=tol) for a, b in zip(x.blocks, y.blocks))


# -- bases and structure constants ---------------------------------------------

PAULI = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


def pauli_basis() -> list[Element]:
    """Identity plus the three Pauli matrices as elements of M_2(C)."""
    spec = matrix_algebra(2)
    return [Element(spec, (p,)) for p in PAULI]


def delta_basis(n: int) -> list[Element]:
    """Indicator functions of the n outcomes, a basis of the abelian algebra."""
    spec = abelian(n)
    out = []
    for j in range(n):
        blocks = [np.zeros((1, 1), dtype=np.complex128) for _ in range(n)]
        blocks[j][0, 0] = 1.0
        out.append(Element(spec, tuple(blocks)))
    return out


def selfadjoint_basis(spec: AlgebraSpec) -> list[Element]:
    """A (non-orthonormal) basis of the self-adjoint part.

    Per block: diagonal units, symmetric off-diagonal pairs E_ij + E_ji, and
    antisymmetric pairs i(E_ij - E_ji).
    """
    out = []
    for k, n in enumerate(spec.block_dims):
        def embed(mat, k=k):
            blocks = [np.zeros((m, m), dtype=np.complex128) for m in spec.block_dims]
            blocks[k] = mat
            return Element(spec, tuple(blocks))

        for i in range(n):
            m = np.zeros((n, n), dtype=np.complex128)
            m[i, i] = 1.0
            out.append(embed(m))
        for i in range(n):
            for j in range(i + 1, n):
                m = np.zeros((n, n), dtype=np.complex128)
                m[i, j] = m[j, i] = 1.0
                out.append(embed(m))
                m = np.zeros((n, n), dtype=np.complex128)
                m[i, j] = 1.0j
                m[j, i] = -1.0j
                out.append(embed(m))
    return out


def structure_constants(basis: list[Element]) -> tuple[np.ndarray, np.ndarray]:
    """Structure constants of the Jordan and Lie products in a self-adjoint basis.

    Solves {e^j, e^k} = d^{jk}_l e^l and [[e^j, e^k]] = c^{jk}_l e^l in the
    least-squares sense under the trace inner product, so the basis does not
    need to be orthonormal.  The basis must span the self-adjoint part
    (checked through the rank of its Gram matrix), otherwise the expansion is
    ill-posed and a ``ValueError`` is raised.

    Returns
    -------
    (d, c) : pair of real arrays of shape (D, D, D)
        d is symmetric and c antisymmetric in the first two slots.
    """
    if not basis:
        raise ValueError("empty basis")
    spec = basis[0].spec
    dim = spec.dim
    if len(basis) != dim:
        raise ValueError(
            f"basis of the self-adjoint part must have {dim} elements, got {len(basis)}"
        )
    for e in basis:
        if e.spec != spec:
            raise SpecMismatchError("basis elements live on different algebras")
        if not e.is_selfadjoint(1e-9):
            raise ValueError("basis elements must be self-adjoint")

    gram = np.array(
        [[trace_pairing(a, b).real for b in basis] for a in basis], dtype=float
    )
    if np.linalg.matrix_rank(gram, tol=1e-10 * max(1.0, np.abs(gram).max())) < dim:
        raise ValueError("rank-deficient basis: does not span the self-adjoint part")

    d = np.zeros((dim, dim, dim))
    c = np.zeros((dim, dim, dim))
    for j in range(dim):
        for k in range(j, dim):
            jp = jordan(basis[j], basis[k])
            lp = lie(basis[j], basis[k])
            bj = np.array([trace_pairing(e, jp).real for e in basis])
            bl = np.array([trace_pairing(e, lp).real for e in basis])
            dj = np.linalg.solve(gram, bj)
            cl = np.linalg.solve(gram, bl)
            d[j, k] = d[k, j] = dj
            c[j, k] = cl
            c[k, j] = -cl
    return d, c


# -- tensor products -------------------------------------------------------------

def spec_tensor(specs: list[AlgebraSpec]) -> AlgebraSpec:
    """Tensor product algebra; blocks are all combinations in lexicographic order."""
    dims = []
    for combo in itertools.product(*[s.block_dims for s in specs]):
        dims.append(int(np.prod(combo)))
    return AlgebraSpec(tuple(dims))


def tensor_power(spec: AlgebraSpec, N: int) -> AlgebraSpec:
    if N < 1:
        raise ValueError(f"tensor power needs N >= 1, got {N}")
    return spec_tensor([spec] * N)


def tensor_elements(xs: list[Element]) -> Element:
    """Kronecker product taken block combination by block combination."""
    if not xs:
        raise ValueError("empty tensor product")
    out_spec = spec_tensor([x.spec for x in xs])
    blocks = []
    for combo in itertools.product(*[range(x.spec.num_blocks) for x in xs]):
        blocks.append(reduce(np.kron, [x.blocks[k] for x, k in zip(xs, combo)]))
    return Element(out_spec, tuple(blocks))


# -- random elements (deterministic given the generator) ----------------------------

def random_element(spec: AlgebraSpec, rng: np.random.Generator) -> Element:
    blocks = tuple(
        rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        for n in spec.block_dims
    )
    return Element(spec, blocks)


def random_selfadjoint(spec: AlgebraSpec, rng: np.random.Generator) -> Element:
    x = random_element(spec, rng)
    return Element(x.spec, tuple((b + b.conj().T) / 2.0 for b in x.blocks))


def random_unitary(spec: AlgebraSpec, rng: np.random.Generator) -> Element:
    """Haar-distributed block unitaries via QR of a complex Ginibre matrix."""
    blocks = []
    for n in spec.block_dims:
        z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        q, r = np.linalg.qr(z)
        q = q * (np.diag(r) / np.abs(np.diag(r)))
        blocks.append(q)
    return Element(spec, tuple(blocks))
