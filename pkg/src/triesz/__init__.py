"""Relative Fredholm and Riesz theory for *-homomorphisms of finite-dimensional C*-algebras."""

from .cstar import (
    AlgebraElement,
    AlgebraShape,
    SpectrumSet,
    is_invertible,
    is_normal,
    is_quasinilpotent,
    is_selfadjoint_projection,
    spectral_radius,
    spectrum,
)
from .decomp import (
    cluster_partition,
    generalized_riesz_decompose,
    minimal_sigma_polynomial,
    nested_orthogonalize,
    poly_riesz_decompose,
    riesz_projection,
    west_decompose,
)
from .hom import StarHomomorphism, apply, kernel_support
from .numerics import ToleranceConfig
from .spectra import (
    almost_inv_spectrum,
    beta_T,
    browder_witness,
    classify_point,
    omega_T,
    sigma_T,
)

__version__ = "0.1.0"
