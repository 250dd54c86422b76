"""Geodesic pair-ball depth on Riemannian manifolds.

Depth of a point p under a sample: the fraction of sample pairs whose
connecting geodesic ball covers p. Works on flat space (optionally
weighted), the unit sphere, the flat torus, and the SPD matrix cone,
with rank-style baselines, seeded samplers, and large-sample tooling
for calibration experiments.
"""

from geodepth._backend import COMPILED, backend_name
from geodepth.errors import (
    CoincidentPoints,
    CutLocus,
    DegenerateSample,
    GeodepthError,
    ManifoldMismatch,
    NoConvergence,
    NotPositiveDefinite,
    NotSymmetric,
    NotUnitNorm,
    NoValidPole,
    RejectionStall,
    SamplerFailure,
    UnknownPreset,
    ValidationError,
    WrongDimension,
    ZeroMAD,
)
from geodepth.manifolds import (
    Euclidean,
    GeodesicBall,
    ManifoldSpec,
    Point,
    SPDCone,
    Sphere,
    Torus,
    ball_between,
    ball_contains,
    distance,
    midpoint,
    point_array,
    spd_map,
    sym_eig,
    validate,
)
from geodepth.depth import (
    Dataset,
    DepthReport,
    ProfileResult,
    ProfileRow,
    RaySpec,
    deepest_point,
    depth_profile,
    empirical_depth,
    empirical_depth_batch,
    population_depth_mc,
    subsampled_depth,
)
from geodepth.samplers import (
    MVM,
    VMF,
    Gaussian,
    Mixture,
    PointMass,
    RngStream,
    SamplerSpec,
    Wishart,
    preset,
    preset_names,
    sample,
)
from geodepth.baselines import DirectionSet, atd_sphere, pd1, pd2
from geodepth.asymptotics import (
    CLTReport,
    ConsistencyReport,
    clt_experiment,
    containment_covariance,
    gc_experiment,
    gx_gaussian,
    p2_gaussian,
    sigma2_marginal,
    zeta1,
)

__version__ = "0.1.0"

__all__ = [
    "CLTReport",
    "COMPILED",
    "CoincidentPoints",
    "ConsistencyReport",
    "CutLocus",
    "Dataset",
    "DegenerateSample",
    "DepthReport",
    "DirectionSet",
    "Euclidean",
    "Gaussian",
    "GeodepthError",
    "GeodesicBall",
    "MVM",
    "ManifoldMismatch",
    "ManifoldSpec",
    "Mixture",
    "NoConvergence",
    "NoValidPole",
    "NotPositiveDefinite",
    "NotSymmetric",
    "NotUnitNorm",
    "Point",
    "PointMass",
    "ProfileResult",
    "ProfileRow",
    "RaySpec",
    "RejectionStall",
    "RngStream",
    "SPDCone",
    "SamplerFailure",
    "SamplerSpec",
    "Sphere",
    "Torus",
    "UnknownPreset",
    "VMF",
    "ValidationError",
    "Wishart",
    "WrongDimension",
    "ZeroMAD",
    "__version__",
    "atd_sphere",
    "backend_name",
    "ball_between",
    "ball_contains",
    "clt_experiment",
    "containment_covariance",
    "deepest_point",
    "depth_profile",
    "distance",
    "empirical_depth",
    "empirical_depth_batch",
    "gc_experiment",
    "gx_gaussian",
    "midpoint",
    "p2_gaussian",
    "pd1",
    "pd2",
    "point_array",
    "population_depth_mc",
    "preset",
    "preset_names",
    "sample",
    "sigma2_marginal",
    "spd_map",
    "subsampled_depth",
    "sym_eig",
    "validate",
    "zeta1",
]
