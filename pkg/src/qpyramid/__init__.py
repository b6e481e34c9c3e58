"""Realizations, rigidity and flexes of labelled quadrangular pyramids."""
from .dof import FaceVector, counts, dof_balance
from .geometry import (
    BaseClass,
    BaseQuad,
    CongruenceTolerance,
    EdgeLengthSet,
    Realization,
    classify_base,
    congruent,
    edge_lengths,
    normalize_to_standard,
    segments_intersect,
)
from .rigidity import (
    FlexSample,
    RigidityReport,
    flex_sample,
    flex_tangent,
    jacobian,
    rank_analysis,
    residuals,
    rigidity_verdict,
    trace_family,
)
from .solver import (
    apex_from_three,
    base_from_angle,
    branch_nonconvex,
    branch_parallelogram,
    critical_points,
    ec_profile,
    find_realizations,
    parallelogram_eb2,
)

__version__ = "0.1.0"
