"""Vorticity-streamfunction toolkit for stationary flows on the unit sphere.

Builds quadrature grids, spherical-harmonic transforms and finite-difference
operators, evaluates the antipodal point-vortex pair (the stationary flow
shared by the viscous and inviscid equations), and corroborates numerically
the identities that single it out.
"""

from .grid import (
    DEFAULT_BAND,
    Grid,
    GridSpec,
    ScalarField,
    build_grid,
    cell_weights,
    colatitude_of_mercator,
    grid_from_colatitudes,
    mercator_of_colatitude,
    read_scalar_field,
    surface_integral,
    write_scalar_field,
)
from .spharm import (
    GaussConstraintError,
    SpectralField,
    SymmetryError,
    TransformPlan,
    analyze,
    build_plan,
    invert_poisson,
    laplace_beltrami_spectral,
    read_spectral_field,
    synthesize,
    write_spectral_field,
)
from .operators import (
    VelocityField,
    jacobian,
    laplace_beltrami_fd,
    mercator_laplacian,
    ns_residual,
    velocity_from_streamfunction,
    vorticity_from_velocity,
)
from .exact import (
    VortexPairParams,
    azimuthal_velocity,
    gradient_modulus_function,
    hemisphere_vorticity_integral,
    streamfunction_profile,
    vorticity_profile,
)
from .verify import CheckReport, global_harmonic_nullspace, run_all_checks
from .timestep import EvolutionConfig, InstabilityError, TimeSeries, evolve, rhs, steadiness_drift

__version__ = "0.1.0"
