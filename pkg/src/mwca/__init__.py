"""Multiway correspondence analysis of contingency tensors."""

from .analysis import (
    CaResult,
    CompareResult,
    MwcaResult,
    RankHypothesisError,
    VerificationReport,
    compare,
    isometry_routes,
    metric_pca,
    relative_error_ca_mwca,
    run_ca,
    run_mwca,
    verify_all,
    verify_barycentric,
    verify_component_link_euclidean,
    verify_component_link_metric,
)
from .decompose import (
    RankError,
    SvdResult,
    TuckerDecomposition,
    hooi,
    hosvd,
    mode_ranks,
    sign_fix,
    st_hosvd,
    svd,
)
from .io import drop_zero_slices, load_health_survey, load_table, save_table
from .metric import (
    Marginals,
    ModeMetric,
    ZeroMarginalError,
    ca_metric,
    isometry_apply,
    isometry_inverse,
    marginals,
    relative_frequencies,
    weighted_norm,
)
from .table import ContingencyTable
from .tensor import fold, kron_chain, kronecker, ttm, unfold

__version__ = "0.1.0"
