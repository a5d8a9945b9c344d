"""Entanglement-breaking channel toolkit."""

__version__ = "0.1.0"

from .basis import (
    OperatorBasis,
    TransferMatrix,
    WuFactors,
    bloch_vector,
    ebt_diag_necessary,
    gell_mann_basis,
    transfer_matrix,
    wu_factorization,
)
from .channels import (
    ChoiMatrix,
    HolevoChannel,
    KrausChannel,
    adjoint,
    apply,
    block_projection_channel,
    channels_close,
    choi_of,
    compose,
    convex_combination,
    cq_channel,
    dephasing_channel,
    depolarizing_channel,
    holevo_from_rank1_kraus,
    holevo_from_separable_choi,
    identity_channel,
    kraus_from_choi,
    kraus_from_holevo,
    point_channel,
    qc_channel,
    simulate_measure_prepare,
    to_kraus,
    unitary_channel,
)
from .decomposition import SeparableDecomposition
from .ebt import (
    EbtVerdict,
    NotEbtWitness,
    Status,
    classify,
    is_ppt,
    kraus_count_test,
    rank_d_decomposition,
    reduce_decomposition,
    two_qubit_decomposition,
)
from .errors import EbtError
from .extremality import (
    classify_structure,
    cpt_extremality,
    ebt_extremality_hints,
    tetrahedron_channel,
    trine_block_channel,
    verify_tetrahedron,
)
from .linalg import BipartiteDims, partial_trace, partial_transpose
from .states import DensityMatrix, PureState, Povm, maximally_entangled, validate_povm
