"""Numerical toolkit for mean-width bounds of projections and sections of
convex hulls of isotropic spherical measures."""

from .errors import (
    DecompositionFailed,
    DimensionMismatch,
    Empty,
    Infeasible,
    IsowidthError,
    NoConvergence,
    NonFinite,
    NotCentered,
    NotEven,
    NotIsotropic,
    OriginNotInterior,
    ParseError,
    RankDeficient,
    TruncationWarning,
    Unbounded,
)
from .gauss import (
    Estimate,
    GaussianConstants,
    MCConfig,
    ReferenceBody,
    c_const,
    ell_norm,
    gaussian_constants,
    gaussian_mass,
    mean_width_complement,
    mean_width_mc,
    mean_width_reference,
)
from .geometry import (
    HPolytope,
    Subspace,
    VPolytope,
    enumerate_vertices,
    extreme_points,
    minkowski_v,
    orthonormalize_subspace,
    polar_v,
    project_polytope,
    random_subspace,
    section_polytope,
    support_h,
    support_v,
)
from .john import (
    AffineMap,
    Ellipsoid,
    JohnResult,
    contact_decomposition,
    john_decomposition,
    john_ellipsoid,
    to_john_position,
)
from .measures import (
    DiscreteSphericalMeasure,
    IsotropyReport,
    LiftedMeasure,
    canonical_measure,
    isotropy_check,
    lift_measure,
    project_measure,
    random_even_isotropic,
    simplex_vertices,
)
from .verify import (
    BallBartheResult,
    BoundReport,
    MomentBoundResult,
    TransportReport,
    ball_barthe_check,
    equality_case_detect,
    moment_bound_check,
    transport_bound_check,
    verify_projection_cross,
    verify_projection_simplex,
    verify_section_cube,
)

__version__ = "0.1.0"
