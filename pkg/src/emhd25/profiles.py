"""Compactly supported radial profiles for the shear construction.

All profiles are smooth, vanish identically outside (1, 4), and are built
from the standard exponential kernel exp(-1/(x(1-x))).  The drift profile
derivative ``h_prime`` equals 1 exactly on [2, 3] and integrates to zero
over (1, 4), so its antiderivative ``h`` is itself compactly supported.
The carrier bump ``g`` sits on (2, 3), inside the plateau, where the
induced differential rotation is monotone and bounded away from zero.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import InterpolatedUnivariateSpline

__all__ = [
    "kernel_bump",
    "smoothstep",
    "profile_g",
    "profile_h",
    "profile_h_prime",
    "G_SUPPORT",
    "H_PRIME_PLATEAU",
    "H_PRIME_LOBE",
    "compensation_constant",
]

G_SUPPORT = (2.0, 3.0)
H_PRIME_PLATEAU = (2.0, 3.0)
_RAMP_LO = (1.5, 2.0)
_RAMP_HI = (3.0, 3.5)
H_PRIME_LOBE = (3.05, 3.95)


def _as_array(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=np.float64)
    return arr, arr.ndim == 0


def kernel_bump(x) -> np.ndarray | float:
    """exp(-1/(x(1-x))) on (0, 1), zero elsewhere."""
    arr, scalar = _as_array(x)
    out = np.zeros(arr.shape)
    inside = (arr > 0.0) & (arr < 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        t = arr[inside] * (1.0 - arr[inside])
        out[inside] = np.exp(-1.0 / t)
    return float(out) if scalar else out


def smoothstep(x) -> np.ndarray | float:
    """Smooth monotone step: 0 for x <= 0, 1 for x >= 1."""
    arr, scalar = _as_array(x)
    out = np.zeros(arr.shape)
    out[arr >= 1.0] = 1.0
    mid = (arr > 0.0) & (arr < 1.0)
    xm = arr[mid]
    with np.errstate(divide="ignore", over="ignore"):
        lo = np.exp(-1.0 / xm)
        hi = np.exp(-1.0 / (1.0 - xm))
    out[mid] = lo / (lo + hi)
    return float(out) if scalar else out


def profile_g(rho) -> np.ndarray | float:
    """Carrier bump: exponential kernel scaled onto (2, 3)."""
    lo, hi = G_SUPPORT
    arr, scalar = _as_array(rho)
    out = kernel_bump((arr - lo) / (hi - lo))
    return out if not scalar else float(out)


def _plateau(rho) -> np.ndarray | float:
    """Smooth plateau: 1 on [2, 3], supported in (1.5, 3.5)."""
    up = smoothstep((np.asarray(rho, dtype=np.float64) - _RAMP_LO[0]) / (_RAMP_LO[1] - _RAMP_LO[0]))
    down = smoothstep((_RAMP_HI[1] - np.asarray(rho, dtype=np.float64)) / (_RAMP_HI[1] - _RAMP_HI[0]))
    return up * down


def _lobe(rho) -> np.ndarray | float:
    lo, hi = H_PRIME_LOBE
    return kernel_bump((np.asarray(rho, dtype=np.float64) - lo) / (hi - lo))


@lru_cache(maxsize=1)
def compensation_constant() -> float:
    """Ratio of plateau mass to lobe mass, making h_prime integrate to zero."""
    plateau_mass, _ = quad(_plateau, _RAMP_LO[0], _RAMP_HI[1], epsabs=1e-14, epsrel=1e-13, limit=200)
    lobe_mass, _ = quad(_lobe, H_PRIME_LOBE[0], H_PRIME_LOBE[1], epsabs=1e-14, epsrel=1e-13, limit=200)
    return plateau_mass / lobe_mass


def profile_h_prime(rho) -> np.ndarray | float:
    """Derivative of the drift profile: 1 on [2, 3], mean-free over (1, 4)."""
    arr, scalar = _as_array(rho)
    out = _plateau(arr) - compensation_constant() * _lobe(arr)
    out = np.asarray(out)
    return float(out) if scalar else out


@lru_cache(maxsize=1)
def _h_spline() -> InterpolatedUnivariateSpline:
    """Quintic spline through the cumulative integral of h_prime on [1, 4].

    Cell integrals use 8-point Gauss-Legendre, so the node values carry
    quadrature error far below spline interpolation error.
    """
    n_cells = 4096
    nodes = np.linspace(1.0, 4.0, n_cells + 1)
    gl_x, gl_w = np.polynomial.legendre.leggauss(8)
    half = np.diff(nodes) / 2.0
    mid = (nodes[:-1] + nodes[1:]) / 2.0
    samples = mid[:, None] + half[:, None] * gl_x[None, :]
    cell_ints = half * (profile_h_prime(samples) @ gl_w)
    cumulative = np.concatenate(([0.0], np.cumsum(cell_ints)))
    return InterpolatedUnivariateSpline(nodes, cumulative, k=5)


def profile_h(rho) -> np.ndarray | float:
    """Drift profile: integral of h_prime from 1 to rho, supported in (1, 4)."""
    arr, scalar = _as_array(rho)
    out = np.zeros(arr.shape)
    inside = (arr > 1.0) & (arr < 4.0)
    if np.any(inside):
        out[inside] = _h_spline()(arr[inside])
    return float(out) if scalar else out
