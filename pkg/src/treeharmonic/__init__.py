"""Spherical harmonic analysis and Riesz means on the homogeneous tree T_{Q+1}."""
from .errors import (
    BoundViolation,
    ParameterError,
    PoleError,
    ResolutionError,
    ToleranceError,
    TruncationError,
)
from .heat import HeatParams, dense_subspace_experiment, heat_apply, heat_kernel, heat_l2_norm_check
from .quadrature import QuadratureGrid, periodic_grid
from .riesz import (
    KernelReport,
    RieszParams,
    comparison_kernel,
    decay_check,
    kernel_abel,
    kernel_report,
    kernel_spectral,
    maximal_apply,
    multiplier,
    radial_lq_norm,
    riesz_apply,
)
from .spectral import SpectralParams, c_function, gamma, phi, plancherel_weight
from .transforms import (
    SpectralFunction,
    abel_forward,
    abel_inverse,
    fourier_inverse,
    inverse_spherical,
    spherical_transform,
)
from .tree import (
    RadialFunction,
    TreeFunction,
    TreeParams,
    Vertex,
    ball,
    delta,
    distance,
    laplacian_apply,
    lp_norm,
    mean_apply,
    radial_convolve,
    sphere,
    sphere_size,
)
