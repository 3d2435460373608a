"""Construction of the oscillatory carrier / drift initial data pair.

The carrier is a radially localized bump modulated by m angular
oscillations; the drift stream function is radial.  Both live on the
annulus 1 < lam*r < 4, which must sit inside the box with margin.

    a0(r, theta) = lam**(1 - beta*gamma) * g(lam r) * cos(m theta)
    b0(r)        = lam**(2 - beta)       * h(lam r)
    u0           = lam**(3 - beta) * h'(lam r) * e_theta
"""

from __future__ import annotations

import numpy as np

from .params import ParamSet
from .profiles import profile_g, profile_h, profile_h_prime
from .spectral import (
    Field,
    Grid,
    VectorField,
    derivative,
    sobolev_norm,
    sobolev_norm_vector,
)
from .state import State

__all__ = [
    "UnderResolvedError",
    "required_resolution",
    "check_grid",
    "make_a0",
    "make_b0",
    "make_initial_data",
    "make_u0",
    "normalization_factor",
    "verify_initial_scalings",
]

SUPPORT_RADIUS_FACTOR = 4.0  # data vanishes outside lam*r < 4


class UnderResolvedError(ValueError):
    """Grid too coarse (or box too small) for the requested parameters."""


def required_resolution(p: ParamSet, L: float) -> int:
    """Minimum point count: eight points per wavelength of the finest feature.

    Angular content needs n >= 8 m; radial content of the profiles needs
    about eight points across a 1/lam-thick shell, i.e. n >= 32 lam L / pi.
    """
    return int(np.ceil(8.0 * max(p.m, 4.0 * p.lam * L / np.pi)))


def check_grid(p: ParamSet, grid: Grid) -> None:
    if grid.L < 2.0 * SUPPORT_RADIUS_FACTOR / p.lam:
        raise UnderResolvedError(
            f"box half-width {grid.L} leaves the support closer than L/2 to the "
            f"boundary; need L >= {2.0 * SUPPORT_RADIUS_FACTOR / p.lam} for lam = {p.lam}"
        )
    need = required_resolution(p, grid.L)
    if grid.n < need:
        raise UnderResolvedError(
            f"grid n = {grid.n} cannot resolve m = {p.m} at lam = {p.lam}; need n >= {need}"
        )


def make_a0(p: ParamSet, grid: Grid) -> Field:
    """Oscillatory carrier field on the grid.

    The continuum field has zero angular mean; the discrete sampling
    leaves quadrature dust in the zero mode, which is projected out so
    negative-order norms stay well-defined at any resolution.
    """
    check_grid(p, grid)
    r, theta = grid.polar_meshes()
    values = p.a_amplitude * profile_g(p.lam * r) * np.cos(p.m * theta)
    values = values - values.mean()
    return Field.from_values(grid, values)


def make_b0(p: ParamSet, grid: Grid) -> Field:
    """Radial drift stream function on the grid."""
    check_grid(p, grid)
    r, _ = grid.polar_meshes()
    return Field.from_values(grid, p.b_amplitude * profile_h(p.lam * r))


def make_initial_data(p: ParamSet, grid: Grid, normalize: bool = False) -> State:
    """Initial state at t = 0, optionally rescaled by one common factor.

    With ``normalize`` both fields are scaled so that
    ||a0||_{H^beta} + ||b0||_{H^(beta-1)} <= 1; the factor is recoverable
    via :func:`normalization_factor`.
    """
    a0 = make_a0(p, grid)
    b0 = make_b0(p, grid)
    if normalize:
        factor = normalization_factor(a0, b0, p.beta)
        a0 = factor * a0
        b0 = factor * b0
    return State(a=a0, b=b0, t=0.0)


def normalization_factor(a0: Field, b0: Field, beta: float) -> float:
    """Common factor bringing the Sobolev size of the pair to at most one."""
    size = sobolev_norm(a0, beta, homogeneous=False) + sobolev_norm(
        b0, beta - 1.0, homogeneous=False
    )
    return 1.0 / max(1.0, size)


def make_u0(p: ParamSet, grid: Grid) -> VectorField:
    """Initial drift velocity lam**(3-beta) h'(lam r) e_theta, built analytically.

    The same field is obtainable as gradient_perp(b0); keeping the direct
    polar construction gives an independent route for cross-checks.
    """
    check_grid(p, grid)
    X, Y = grid.meshes()
    r, _ = grid.polar_meshes()
    amp = p.lam ** (3.0 - p.beta)
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.where(r > 0.0, amp * profile_h_prime(p.lam * r) / r, 0.0)
    ux = -np.broadcast_to(Y, r.shape) * scale
    uy = np.broadcast_to(X, r.shape) * scale
    return VectorField(Field.from_values(grid, ux), Field.from_values(grid, uy))


def _auto_grid(p: ParamSet, max_n: int = 4096) -> Grid:
    """Smallest power-of-two grid resolving p, with the box scaled to lam.

    The box half-width shrinks as 8/lam so the annulus occupies a fixed
    share of the box across a sweep; norms of the compactly supported
    fields do not depend on the box once the support fits.
    """
    L = 8.0 / p.lam
    need = required_resolution(p, L)
    n = 256
    while n < need and n < max_n:
        n *= 2
    return Grid(n, L)


def _loglog_slope(lams: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    """Least-squares log-log slope with r^2; tolerates short sweeps."""
    lx, ly = np.log(lams), np.log(values)
    sst = float(np.sum((ly - ly.mean()) ** 2))
    if sst < 1e-28 * max(1.0, float(np.sum(ly * ly))):
        return 0.0, 1.0
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    return float(slope), 1.0 - float(np.sum(resid**2)) / sst


def verify_initial_scalings(
    p_range: list[ParamSet], s_range: list[float]
) -> dict[str, tuple[float, float, float, float]]:
    """Fit how the data's norms scale with lam and compare to predictions.

    For each s the carrier norm is fitted against the prediction
    gamma*(s - beta) and the drift velocity norm against s + 2 - beta;
    the grid C1 norm (sup of |u| plus sup of all first partials) is
    fitted against 4 - beta.  Entries map a quantity label to
    (fitted slope, r^2, predicted slope, deviation).

    Every member of the sweep must share beta and gamma and be
    resolvable on an automatically chosen grid; an oversized member
    raises the resolution error.
    """
    if len(p_range) < 3:
        raise ValueError("need at least 3 lam values to fit a scaling law")
    betas = {p.beta for p in p_range}
    gammas = {p.gamma for p in p_range}
    if len(betas) != 1 or len(gammas) != 1:
        raise ValueError("sweep members must share beta and gamma")
    beta, gamma = betas.pop(), gammas.pop()
    lams = np.array([p.lam for p in p_range], dtype=float)

    a_norms = {s: [] for s in s_range}
    u_norms = {s: [] for s in s_range}
    c1_norms = []
    for p in p_range:
        grid = _auto_grid(p)
        a0 = make_a0(p, grid)
        b0 = make_b0(p, grid)
        u0 = make_u0(p, grid)
        for s in s_range:
            a_norms[s].append(sobolev_norm(a0, s))
            u_norms[s].append(sobolev_norm_vector(u0, s, homogeneous=False))
        du_sup = max(
            float(np.abs(derivative(comp, ox, oy).values).max())
            for comp in (u0.x, u0.y)
            for ox, oy in ((1, 0), (0, 1))
        )
        c1_norms.append(float(u0.magnitude_values().max()) + du_sup)

    report: dict[str, tuple[float, float, float, float]] = {}
    for s in s_range:
        slope, r2 = _loglog_slope(lams, np.array(a_norms[s]))
        predicted = gamma * (s - beta)
        report[f"a0_Hs{s:+g}"] = (slope, r2, predicted, slope - predicted)
        slope, r2 = _loglog_slope(lams, np.array(u_norms[s]))
        predicted = s + 2.0 - beta
        report[f"u0_Hs{s:+g}"] = (slope, r2, predicted, slope - predicted)
    slope, r2 = _loglog_slope(lams, np.array(c1_norms))
    report["u0_C1"] = (slope, r2, 4.0 - beta, slope - (4.0 - beta))
    return report
