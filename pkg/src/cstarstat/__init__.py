"""Estimation theory on finite-dimensional C*-algebras.

Block matrix algebras and their states, the canonical metric and its
geodesics, gradient representatives (symmetric logarithmic derivatives),
POVM-induced statistical models, and numerical verification of the
Cramer-Rao and Helstrom bounds, covering the commutative (probability
simplex) and matrix (density matrix) cases in one API.
"""

from .algebra import (
    AlgebraSpec,
    Element,
    PAULI,
    SpecMismatchError,
    abelian,
    adjoint,
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
    trace_pairing,
)
from .estimation import (
    BoundReport,
    CostFunction,
    Estimator,
    NonStationaryError,
    cost_element,
    covariance,
    cr_check,
    euclidean_cost,
    helstrom_check,
    hessian,
    loss,
    score_matrix,
    stationarity_residual,
)
from .measurement import (
    NonRegularError,
    Povm,
    ProbabilityVector,
    delta_povm,
    fisher_rao,
    is_regular,
    kadison_defect,
    lift_function,
    projective_povm,
    push_forward,
    random_povm,
    tensor_power_povm,
    validate_povm,
)
from .model import (
    DomainError,
    ParametricModel,
    classical_metric,
    lie_group_model,
    multi_round,
    quantum_metric,
    qubit_dephasing,
    qubit_pure,
    simplex_affine,
    sld,
    sld_projective_povm,
    state_at,
    tangent_push,
)
from .state_space import (
    SldUnsolvableError,
    State,
    TangentVector,
    evaluate,
    fundamental_vector,
    geodesic,
    gradient_vector,
    group_action,
    hamiltonian_vector,
    maximally_mixed,
    metric,
    orbit_signature,
    pure_state,
    random_state,
    sld_at_state,
    unitary_push,
)

__version__ = "0.1.0"
