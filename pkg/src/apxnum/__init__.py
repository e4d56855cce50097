"""Approximation numbers of composition operators on weighted Bergman spaces.

The space ``B_alpha`` (``alpha >= -1``; ``alpha = -1`` is the Hardy space) has
the orthonormal basis ``e_k = z^k / sqrt(w_k)`` with
``w_k = k! Gamma(2+alpha) / Gamma(k+2+alpha)``. The package computes the
approximation numbers ``a_n(C_phi)`` for analytic self-maps ``phi`` of the
disk, together with the explicit floors and ceilings that constrain them.
"""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .bergman import BergmanParams, CoeffSeries, inner, kernel_eval, norm, weights
from .errors import (
    ApxnumError,
    BoundViolation,
    ConfigurationError,
    ConsistencyError,
    DegenerateInputError,
    DomainError,
    InsufficientDataError,
    NumericalError,
    PreconditionError,
)
from .spectra import SingularSpectrum, approx_numbers, beta_estimate
from .symbols import (
    SchurSymbol,
    affine,
    blaschke_power,
    bracket,
    composed,
    conjugate_at,
    format_symbol,
    identity,
    lens,
    mobius,
    parse_symbol,
    phi_sharp,
    shrink,
)

__all__ = [
    "__version__",
    "BergmanParams",
    "CoeffSeries",
    "inner",
    "norm",
    "weights",
    "kernel_eval",
    "ApxnumError",
    "BoundViolation",
    "ConfigurationError",
    "ConsistencyError",
    "DegenerateInputError",
    "DomainError",
    "InsufficientDataError",
    "NumericalError",
    "PreconditionError",
    "SingularSpectrum",
    "approx_numbers",
    "beta_estimate",
    "SchurSymbol",
    "affine",
    "blaschke_power",
    "bracket",
    "composed",
    "conjugate_at",
    "format_symbol",
    "identity",
    "lens",
    "mobius",
    "parse_symbol",
    "phi_sharp",
    "shrink",
]
