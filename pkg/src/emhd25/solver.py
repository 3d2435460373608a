"""Pseudo-spectral time integration of the 2.5D electron MHD system.

Equations (u = grad_perp b):

    a_t + grad_perp(b) . grad(a)            = 0
    b_t + grad_perp(a) . grad(laplacian(a)) = 0

both optionally damped by nu * (-laplacian)^p.  Quadratic terms are
evaluated pseudo-spectrally with two-thirds dealiasing, which makes the
truncation a Galerkin projection: the energy integral of
a_x^2 + a_y^2 + b^2 is conserved up to time-stepping error.

Time stepping is classical RK4.  The linearization about a frozen state
carries waves of frequency |grad_perp(a) . k| |k| (the Hall term
contributes two powers of k against the carrier gradient, not three,
because b never feeds back into its own equation), plus advective
transport at |u . k|.  Both are neutral oscillations, so the step size
is set against RK4's imaginary-axis stability extent 2*sqrt(2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.fft as sfft

from .spectral import Field, Grid, VectorField, gradient_perp
from .state import State

__all__ = [
    "SolverConfig",
    "Trajectory",
    "cfl_dt",
    "rhs",
    "step_rk4",
    "run",
    "run_frozen_velocity",
    "STATUS_COMPLETED",
    "STATUS_NAN",
    "STATUS_RESOLUTION",
    "STATUS_DT_COLLAPSE",
]

STATUS_COMPLETED = "completed"
STATUS_NAN = "aborted_nan"
STATUS_RESOLUTION = "aborted_resolution"
STATUS_DT_COLLAPSE = "aborted_dt_collapse"

# RK4 covers the imaginary axis out to |z| = 2*sqrt(2).  The advective and
# wave bounds are combined as a min rather than against the summed
# frequency, so each constant carries half the extent.
CFL_ADVECTION = np.sqrt(2.0)
CFL_WAVE = np.sqrt(2.0)
CFL_VISCOUS = 2.5  # real-axis extent of RK4 is about 2.79

RESOLUTION_BAND_FRACTION = 7.0 / 8.0
RESOLUTION_ENERGY_LIMIT = 1e-6


@dataclass(frozen=True)
class SolverConfig:
    """Run controls.

    dt_safety multiplies the stability bound; nu and p_hyper control the
    optional hyperviscosity nu * (-laplacian)^p applied to both equations;
    output_stride sets the probe cadence in steps.
    """

    t_end: float
    dt_safety: float = 0.5
    nu: float = 0.0
    p_hyper: int = 4
    dealias: bool = True
    output_stride: int = 1
    max_steps: int = 10_000_000

    def __post_init__(self) -> None:
        if not self.t_end >= 0.0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if not 0.0 < self.dt_safety <= 1.0:
            raise ValueError(f"dt_safety must lie in (0, 1], got {self.dt_safety}")
        if self.nu < 0.0:
            raise ValueError(f"hyperviscosity nu must be non-negative, got {self.nu}")
        if self.p_hyper < 1:
            raise ValueError(f"hyperviscosity order p_hyper must be >= 1, got {self.p_hyper}")
        if self.output_stride < 1:
            raise ValueError("output_stride must be >= 1")


@dataclass
class Trajectory:
    """Probe records plus the final state and how the run ended."""

    status: str
    final: State
    steps: int
    records: list
    message: str = ""


class _Workspace:
    """Precomputed multiplier arrays and scratch-free spectral kernels."""

    def __init__(self, grid: Grid, cfg: SolverConfig):
        self.grid = grid
        self.cfg = cfg
        k = grid.k1
        k_odd = k.copy()
        k_odd[grid.n // 2] = 0.0  # Nyquist has no partner for odd derivatives
        self.ikx = (1j * k_odd)[:, None]
        self.iky = (1j * k_odd)[None, :]
        self.k2 = k[:, None] ** 2 + k[None, :] ** 2
        self.mask = grid.dealias_mask() if cfg.dealias else None
        self.k_eff = grid.k_cutoff if cfg.dealias else grid.k_max
        self.visc = cfg.nu * self.k2**cfg.p_hyper if cfg.nu > 0.0 else None
        # The monitor band is the top eighth of the wavenumbers a run can
        # actually populate, so it must sit below the dealias cutoff when
        # dealiasing is on; a band above the cutoff would never fill.
        band = RESOLUTION_BAND_FRACTION * self.k_eff
        kabs_x = np.abs(k)[:, None]
        kabs_y = np.abs(k)[None, :]
        self.top_band = (np.maximum(kabs_x, kabs_y) > band)

    def grad_max(self, fhat: np.ndarray) -> float:
        gx = sfft.ifft2(self.ikx * fhat).real
        gy = sfft.ifft2(self.iky * fhat).real
        return float(np.max(np.hypot(gx, gy)))

    def rhs(self, ahat: np.ndarray, bhat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lap = -self.k2 * ahat
        spect = np.empty((6, self.grid.n, self.grid.n), dtype=np.complex128)
        spect[0] = self.ikx * ahat
        spect[1] = self.iky * ahat
        spect[2] = self.ikx * bhat
        spect[3] = self.iky * bhat
        spect[4] = self.ikx * lap
        spect[5] = self.iky * lap
        ax, ay, bx, by, lx, ly = sfft.ifft2(spect, axes=(-2, -1)).real
        da = by * ax - bx * ay
        db = ay * lx - ax * ly
        dhat = sfft.fft2(np.stack([da, db]), axes=(-2, -1))
        if self.mask is not None:
            dhat *= self.mask
        da_hat, db_hat = dhat[0], dhat[1]
        if self.visc is not None:
            da_hat = da_hat - self.visc * ahat
            db_hat = db_hat - self.visc * bhat
        return da_hat, db_hat

    def frozen_rhs_factory(
        self, velocity: tuple[np.ndarray, np.ndarray]
    ) -> Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]:
        ux, uy = velocity
        zero = np.zeros((self.grid.n, self.grid.n), dtype=np.complex128)

        def frozen_rhs(ahat: np.ndarray, bhat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            grads = np.empty((2, self.grid.n, self.grid.n), dtype=np.complex128)
            grads[0] = self.ikx * ahat
            grads[1] = self.iky * ahat
            ax, ay = sfft.ifft2(grads, axes=(-2, -1)).real
            da_hat = sfft.fft2(-(ux * ax + uy * ay))
            if self.mask is not None:
                da_hat = da_hat * self.mask
            if self.visc is not None:
                da_hat = da_hat - self.visc * ahat
            return da_hat, zero

        return frozen_rhs

    def stability_dt(self, ahat: np.ndarray, bhat: np.ndarray) -> float:
        u_max = self.grad_max(bhat)  # |grad_perp b| = |grad b| pointwise
        ga_max = self.grad_max(ahat)
        bounds = []
        if u_max > 0.0:
            bounds.append(CFL_ADVECTION / (u_max * self.k_eff))
        if ga_max > 0.0:
            bounds.append(CFL_WAVE / (ga_max * self.k_eff**2))
        if self.visc is not None:
            rate = float(self.cfg.nu) * self.k_eff ** (2 * self.cfg.p_hyper)
            if rate > 0.0:
                bounds.append(CFL_VISCOUS / rate)
        return min(bounds) if bounds else np.inf

    def resolution_fraction(self, ahat: np.ndarray, bhat: np.ndarray) -> float:
        ea = self.k2 * np.abs(ahat) ** 2
        eb = np.abs(bhat) ** 2
        total = float(np.sum(ea) + np.sum(eb))
        if total == 0.0:
            return 0.0
        top = float(np.sum(ea[self.top_band]) + np.sum(eb[self.top_band]))
        return top / total


def cfl_dt(state: State, cfg: SolverConfig) -> float:
    """Stability-bound step size for the current state, capped at t_end.

    The advective bound is CFL_ADVECTION / (max|grad_perp b| k_eff); the
    Hall-wave bound is CFL_WAVE / (max|grad a| k_eff^2), with k_eff the
    dealiased cutoff.  A motionless state returns t_end.
    """
    ws = _Workspace(state.grid, cfg)
    bound = ws.stability_dt(state.a.coefficients, state.b.coefficients)
    return float(min(bound, cfg.t_end))


def rhs(state: State, cfg: SolverConfig | None = None) -> tuple[Field, Field]:
    """Tendencies (da/dt, db/dt) as fields, mainly for inspection and tests."""
    if cfg is None:
        cfg = SolverConfig(t_end=1.0)
    ws = _Workspace(state.grid, cfg)
    da, db = ws.rhs(state.a.coefficients, state.b.coefficients)
    return Field.from_coefficients(state.grid, da), Field.from_coefficients(state.grid, db)


def step_rk4(state: State, dt: float, cfg: SolverConfig | None = None) -> State:
    """One classical RK4 step; convenience wrapper over the array kernel."""
    if cfg is None:
        cfg = SolverConfig(t_end=max(dt, 1.0))
    ws = _Workspace(state.grid, cfg)
    ahat, bhat = _rk4(ws.rhs, state.a.coefficients, state.b.coefficients, dt)
    return State(
        a=Field.from_coefficients(state.grid, ahat),
        b=Field.from_coefficients(state.grid, bhat),
        t=state.t + dt,
    )


def _rk4(rhs_fn, ahat, bhat, dt):
    k1a, k1b = rhs_fn(ahat, bhat)
    k2a, k2b = rhs_fn(ahat + 0.5 * dt * k1a, bhat + 0.5 * dt * k1b)
    k3a, k3b = rhs_fn(ahat + 0.5 * dt * k2a, bhat + 0.5 * dt * k2b)
    k4a, k4b = rhs_fn(ahat + dt * k3a, bhat + dt * k3b)
    new_a = ahat + (dt / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
    new_b = bhat + (dt / 6.0) * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
    return new_a, new_b


def _march(
    initial: State,
    cfg: SolverConfig,
    rhs_fn,
    ws: _Workspace,
    probe: Callable[[State, float], object] | None,
    freeze_b: bool,
    frozen_u_max: float = 0.0,
) -> Trajectory:
    ahat = initial.a.coefficients.copy()
    bhat = initial.b.coefficients.copy()
    if cfg.dealias:
        mask = ws.mask
        ahat *= mask
        bhat *= mask
    t = initial.t
    t_stop = initial.t + cfg.t_end
    records: list = []
    steps = 0
    frozen_zero_b = np.zeros_like(bhat) if freeze_b else None

    def snapshot(current_t: float, dt_used: float) -> State:
        st = State(
            a=Field.from_coefficients(initial.grid, ahat),
            b=initial.b if freeze_b else Field.from_coefficients(initial.grid, bhat),
            t=current_t,
        )
        if probe is not None:
            records.append(probe(st, dt_used))
        return st

    snapshot(t, 0.0)
    while t < t_stop - 1e-15 * max(1.0, abs(t_stop)):
        if steps >= cfg.max_steps:
            return Trajectory(
                status=STATUS_DT_COLLAPSE,
                final=_assemble(initial, ahat, bhat, t, freeze_b),
                steps=steps,
                records=records,
                message=f"step budget {cfg.max_steps} exhausted before t_end",
            )
        if freeze_b:
            bound = (
                CFL_ADVECTION / (frozen_u_max * ws.k_eff)
                if frozen_u_max > 0.0
                else np.inf
            )
            if ws.visc is not None:
                rate = float(cfg.nu) * ws.k_eff ** (2 * cfg.p_hyper)
                bound = min(bound, CFL_VISCOUS / rate)
        else:
            bound = ws.stability_dt(ahat, bhat)
        dt = cfg.dt_safety * bound
        remaining = t_stop - t
        if dt < 1e-14 * max(abs(t_stop), 1.0):
            return Trajectory(
                status=STATUS_DT_COLLAPSE,
                final=_assemble(initial, ahat, bhat, t, freeze_b),
                steps=steps,
                records=records,
                message=f"stability bound collapsed to dt = {dt:.3e}",
            )
        dt = min(dt, remaining)
        ahat, bhat = _rk4(rhs_fn, ahat, bhat, dt)
        t += dt
        steps += 1
        if not (np.all(np.isfinite(ahat)) and np.all(np.isfinite(bhat))):
            return Trajectory(
                status=STATUS_NAN,
                final=_assemble(initial, ahat, bhat, t, freeze_b, sanitize=True),
                steps=steps,
                records=records,
                message=f"non-finite coefficients after step {steps} at t = {t:.6e}",
            )
        frac = ws.resolution_fraction(ahat, frozen_zero_b if freeze_b else bhat)
        if frac > RESOLUTION_ENERGY_LIMIT:
            snapshot(t, dt)
            return Trajectory(
                status=STATUS_RESOLUTION,
                final=_assemble(initial, ahat, bhat, t, freeze_b),
                steps=steps,
                records=records,
                message=(
                    f"energy fraction {frac:.3e} in the top eighth of wavenumbers "
                    f"exceeds {RESOLUTION_ENERGY_LIMIT:.1e} at t = {t:.6e}"
                ),
            )
        is_last = t >= t_stop - 1e-15 * max(1.0, abs(t_stop))
        if steps % cfg.output_stride == 0 or is_last:
            snapshot(t, dt)
    return Trajectory(
        status=STATUS_COMPLETED,
        final=_assemble(initial, ahat, bhat, t, freeze_b),
        steps=steps,
        records=records,
        message="",
    )


def _assemble(initial: State, ahat, bhat, t, freeze_b: bool, sanitize: bool = False) -> State:
    if sanitize:
        ahat = np.nan_to_num(ahat)
        bhat = np.nan_to_num(bhat)
    return State(
        a=Field.from_coefficients(initial.grid, ahat),
        b=initial.b if freeze_b else Field.from_coefficients(initial.grid, bhat),
        t=t,
    )


def run(
    initial: State,
    cfg: SolverConfig,
    probe: Callable[[State, float], object] | None = None,
) -> Trajectory:
    """Integrate the full nonlinear system from ``initial`` for cfg.t_end.

    The probe, when given, is called as probe(state, last_dt) at t = 0,
    every ``output_stride`` accepted steps, and at the end; its return
    values are collected in Trajectory.records.  The run aborts with a
    distinct status on NaN, on stability-bound collapse, and when more
    than RESOLUTION_ENERGY_LIMIT of the energy reaches the top eighth of
    wavenumbers.
    """
    ws = _Workspace(initial.grid, cfg)
    return _march(initial, cfg, ws.rhs, ws, probe, freeze_b=False)


def run_frozen_velocity(
    initial: State,
    cfg: SolverConfig,
    probe: Callable[[State, float], object] | None = None,
    velocity: VectorField | None = None,
) -> Trajectory:
    """Advect the carrier by a fixed velocity (default grad_perp of b at t=0).

    Only a evolves; b is carried through unchanged.  This is the linear
    transport problem the closed-form sheared carrier solves exactly, so
    the pair gives an end-to-end oracle for the advection machinery.
    """
    ws = _Workspace(initial.grid, cfg)
    if velocity is None:
        velocity = gradient_perp(initial.b)
    if velocity.grid != initial.grid:
        raise ValueError("frozen velocity lives on a different grid")
    u_max = float(np.hypot(velocity.x.values, velocity.y.values).max())
    rhs_fn = ws.frozen_rhs_factory((velocity.x.values, velocity.y.values))
    return _march(initial, cfg, rhs_fn, ws, probe, freeze_b=True, frozen_u_max=u_max)
