"""Frequency-domain kernels derived from the spectral densities, and the quadrature
engine every frequency integral goes through."""

from floquetheat.kernels.damping import (
    DampingKernel,
    damping_laplace,
    principal_part,
    static_damping,
    static_damping_scalar,
)
from floquetheat.kernels.noise import NoiseKernelFT, coth_factor, occupation, planck
from floquetheat.kernels.quadrature import (
    PeakHint,
    QuadratureSpec,
    breakpoints,
    checked_quad,
    integrate,
    principal_value,
)

__all__ = [
    "DampingKernel",
    "damping_laplace",
    "principal_part",
    "static_damping",
    "static_damping_scalar",
    "NoiseKernelFT",
    "coth_factor",
    "occupation",
    "planck",
    "PeakHint",
    "QuadratureSpec",
    "breakpoints",
    "checked_quad",
    "integrate",
    "principal_value",
]
