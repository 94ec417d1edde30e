"""Late-fusion multi-view kernel clustering via global and local alignment maximisation."""
from .analysis import (
    gap_trace,
    generalization_bound,
    lemma1_check,
    lemma2_check,
    theorem3_check,
    theorem4_bound,
)
from .baselines import a_mkkm, mkkm, sb_kkm
from .fusion_global import (
    FusionResult,
    gam_objective,
    lf_mvc_gam,
    update_beta,
    update_F_global,
    update_W_global,
)
from .fusion_local import (
    LocalFusionConfig,
    build_local_aggregates,
    lf_mvc_lam,
    update_beta_local,
    update_F_local,
    update_W_local,
)
from .kernels import KernelSpec, center_kernel, compute_kernel, normalize_kernel, preprocess, validate_and_symmetrize
from .metrics import accuracy, nmi, purity
from .partition import base_partitions, lloyd_round, neighbor_aggregate, regularizer_partition, top_k_eigvecs

__version__ = "0.1.0"
