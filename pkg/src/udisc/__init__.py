"""Universal sampling discretization for sparse combinations of Riesz systems."""

from .construction import TwoStageParams, stage1_size, stage2_size, two_stage
from .errors import *  # noqa: F401,F403
from .function_space import (
    Dictionary,
    NormSpec,
    SparseFunction,
    evaluate,
    lacunary_function,
    lp_norm,
    make_perturbed_riesz,
    make_trig_real,
    random_sparse,
    sup_norm,
)
from .sampling import PointSet, discrete_lp, equispaced, sample_iid
from .verifier import (
    DiscretizationReport,
    SearchPolicy,
    check_instance,
    nikolskii_counterexample,
    ratio_extremes_p2,
    verify_universal,
)

__version__ = "0.1.0"
