"""Piecewise linear interpolation as reproducing-kernel interpolation on [0, 1]."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateFitError,
    DomainError,
    InvalidKernelError,
    MissingDerivativeError,
    MissingEndpointError,
    NodeSetError,
    NonUniformNodesError,
    SingularGramError,
    UnsupportedKindError,
    UnsupportedSpaceError,
)
from .kernel_core import (  # noqa: E402
    KernelModel,
    KernelParams,
    Kind,
    evaluate_kernel,
    green_bc_residuals,
    green_jump_residual,
    kernel_slopes,
    rkhs_inner_product,
    validate_params,
)
from .interpolation import (  # noqa: E402
    NodeSet,
    equivalence_gap,
    gram_matrix,
    piecewise_linear,
    solve_coefficients,
)
from .function_bank import builtin_bank, get_function, seminorm  # noqa: E402
from .quadrature import kernel_quadrature_weights, trapezoid_bound, trapezoid_rule  # noqa: E402
from .rates import measure_error, predict_exponent, rate_spec, run_study  # noqa: E402
