"""Generalized Eshelby tensors for transient heat conduction.

Spatial, time-convolved and harmonic tensor families for polynomial
eigen-fields over polyhedral, cuboid, spherical and ellipsoidal
inclusions, plus an equivalent-inclusion solver for a spherical
inhomogeneity in a slab.
"""

from ._backend import BACKEND_NAME
from .errors import (
    AccuracyError,
    ConditioningError,
    DomainError,
    EshelbyError,
    GeometryError,
    IntervalError,
    MeshTopologyError,
    ResolutionError,
    UnsupportedArgumentError,
    UnsupportedBCError,
)
from .geometry import (
    Material,
    Polyhedron,
    load_mesh,
    make_cuboid,
    tessellate_sphere,
)
from .kernels_transient import (
    C_nf,
    EigenCoeffs,
    SeriesParams,
    TensorSet,
    TimeGrid,
    assemble_tensors,
    flux,
    grad_C_nf,
    grad_spatial_L,
    higher_derivs_C,
    spatial_L,
    temperature,
)
from .kernels_harmonic import A_n, HarmonicParams, grad_A_n, harmonic_eshelby
from .kernels_sphere_ellipsoid import (
    Ellipsoid,
    ShellQuadrature,
    ellipsoid_L,
    sphere_C,
    sphere_E,
    sphere_L,
    sphere_tensor_set,
)
from .eim import (
    InhomogeneityProblem,
    UndisturbedField,
    slab_undisturbed,
    solve_history,
    total_field,
)

__version__ = "0.1.0"
