"""Rank-inducing norms built from a source matrix norm, and lower bounds of
the rank from the Capra (constant along primal rays) conjugacy.

The Jacobi SVD kernel is compiled with Cython when available; set
``RANKCAPRA_PURE=1`` to force the pure-Python fallback.
"""

from ._backend import BACKEND
from .capra import (
    BoundEstimate,
    Decomposition,
    SampledConjugate,
    conjugate_sampled,
    coupling,
    frobenius_equality_report,
    identity_phi,
    lower_add,
    phi_ray,
    rank_biconjugate,
    rank_conjugate,
    upper_add,
    variational_bound,
)
from .errors import InputError, NumericalError, RankCapraError, UnsupportedSourceError
from .linalg import (
    SvdFactors,
    numerical_rank,
    random_orthogonal,
    random_rank_r,
    singular_values,
    svd,
    trace_inner,
)
from .matrix_norms import (
    RankNormFamily,
    SourceNorm,
    build_family,
    dual_rrank_generic,
    dual_rrank_norm,
    parse_source,
    rrank_norm,
    source_eval,
    submatrix_top_l1,
)
from .oracle import (
    GaugeSparseSphere,
    NormBall,
    RankSphere,
    SupportProblem,
    support_estimate,
    vonneumann_extremal_check,
)
from .vector_norms import (
    SymmetricGauge,
    dual_coordinate_norm,
    dual_norm_oracle,
    ksupport2_norm,
    l0,
    lp_norm,
    parse_gauge,
    top_norm,
)

__version__ = "0.1.0"
