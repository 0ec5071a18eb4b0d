"""Numerical laboratory for entanglement generation by interaction."""

from .hilbert import (
    BipartiteDims,
    PureState,
    SchmidtDecomposition,
    partial_trace,
    purity_and_linear_entropy,
    random_state,
    schmidt_decompose,
    tensor_product,
)
from .hamiltonian import (
    BipartiteOperator,
    EffectivePair,
    LocalSplit,
    RateReport,
    biorthogonal_rate,
    check_theorem2_condition,
    check_theorem3_condition,
    effective_hamiltonians_pure,
    is_non_entangling,
    local_split,
    random_hermitian,
)
from .dynamics import (
    PropagatorSpec,
    TimeSeriesRecord,
    Trajectory,
    propagate_density,
    propagate_mean_field,
    propagate_pure,
    purity_decay_coefficient,
)

__version__ = "0.1.0"
