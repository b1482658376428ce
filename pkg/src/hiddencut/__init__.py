"""Desk-scale toolkit for planting, analyzing and recovering hidden
unentanglement cuts in n-qubit pure states."""

__version__ = "0.1.0"

from .gf2 import GF2Subspace, nullspace, orthogonal_complement, rref  # noqa: F401

# the purity() function itself is not re-exported: the name belongs to the
# hiddencut.purity submodule
from .purity import (  # noqa: F401
    EntanglementFeature,
    brute_force_cut_search,
    entanglement_feature,
    epsilon_certificate,
)
from .solver import (  # noqa: F401
    SolveReport,
    SolverConfig,
    choose_t,
    infer_num_parts,
    partition_from_nullspace,
    solve,
    solve_adaptive,
    solve_haar_t2,
    solve_nonadaptive,
)
from .statevec import (  # noqa: F401
    PlantedInstance,
    PureState,
    SetPartition,
    apply_qubit_permutation,
    haar_random_state,
    plant_instance,
    product_state,
)
from .wht import (  # noqa: F401
    FourierDistribution,
    adaptive_distribution,
    sample,
    statehsp_distribution,
    total_variation,
    walsh_hadamard,
)
