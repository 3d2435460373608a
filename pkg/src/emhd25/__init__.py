"""Pseudo-spectral simulator and scaling-verification suite for 2.5D electron MHD."""

from .params import ParamSet
from .spectral import (
    Field,
    Grid,
    VectorField,
    dealias,
    derivative,
    divergence,
    gradient_perp,
    laplacian,
    poisson_bracket,
    sobolev_norm,
    sobolev_norm_vector,
)
from .state import State, load_checkpoint, save_checkpoint

__version__ = "0.1.0"

__all__ = [
    "ParamSet",
    "Grid",
    "Field",
    "VectorField",
    "State",
    "dealias",
    "derivative",
    "divergence",
    "gradient_perp",
    "laplacian",
    "poisson_bracket",
    "sobolev_norm",
    "sobolev_norm_vector",
    "save_checkpoint",
    "load_checkpoint",
    "__version__",
]
