"""Two-qubit correlation hierarchy: quantum, local, local-quantum and realistic models."""

from .correlations import (
    HierarchyReport,
    Region,
    XYPoint,
    classify,
    correlation,
    joint_probability,
    singlet_correlation_closed_form,
    xy_quantities,
)
from .hv_models import (
    CommonCauseModel,
    NonlocalRealisticModel,
    lqt_model_from_separable,
    lrt_from_lt,
    model_correlation,
    rt_model_from_quantum,
    verify_locality_condition,
)
from .optimizer import Objective, OptimizerConfig, find_threshold, maximize, werner_max_curve
from .qubit_algebra import (
    SettingPair,
    ValidationError,
    is_separable_ppt,
    make_product,
    make_singlet,
    make_werner,
    partial_transpose_B,
)
from .sampler import empirical_xy, sample_outcomes

__version__ = "0.1.0"
