"""Numerical laboratory for blow-up of the 2D quadratic semilinear wave
equation: simulation of lifespans, and executable machinery for the
slicing-iteration blow-up certificate."""

from .certificate import (
    CertificateConstants,
    amplitude_seq,
    blowup_functional_I,
    build_constants,
    exponents,
    lifespan_upper,
    series_S,
    slicer,
)
from .duhamel import ConeDomain, LowerBoundFn, agemi_rhs, duhamel_L, frame_rhs
from .freewave import (
    RadialData,
    bump_data,
    eval_u0,
    find_lowerbound_constants,
    fit_linear_constants,
    zero_moment_data,
)
from .grids import GridFunction
from .lifespan import (
    LifespanRecord,
    ScalingModel,
    fit_scaling,
    gamma,
    predicted_lifespan_model,
    solve_a,
    strauss_exponent,
    sweep,
)
from .quadrature import QuadratureError, QuadSpec, integrate_smooth, integrate_sqrt_singular
from .simulator import SimConfig, check_support, detect_blowup, run

__version__ = "0.1.0"
