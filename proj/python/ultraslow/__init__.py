"""Distributed-order diffusion: memory kernels, moments, densities and checks."""

from ._core import (  # noqa: F401
    DomainError,
    Error,
    EvalResult,
    Inapplicable,
    InstabilityDetected,
    MemoryKernel,
    NonConvergence,
    QuadratureFailure,
    RouteUnavailable,
    SingularSample,
    check_cm,
    digamma,
    exp_integral_ei,
    fd_solve,
    kernel,
    kurtosis,
    mittag_leffler,
    moment,
    msd1,
    msd2,
    nu,
    partner,
    pdf,
    pdf_laplace,
    prabhakar_e,
    sonnine_residual,
    spectral_density,
    spectral_mass,
    vp_epsilon,
)

__version__ = "0.1.0"
