"""Tests for the time integrator: tendencies, stability bounds, run control.

Oracle strategy: tendencies are cross-checked against an independent
assembly from the public spectral operators, stationary states must stay
put to near machine precision, a uniform-velocity transport run is
compared with the translated closed form, and a hyperviscous single-mode
run is compared with the exact exponential decay.
"""

import numpy as np
import pytest

from emhd25.approx import ApproxSolution
from emhd25.diagnostics import energy
from emhd25.initial_data import make_initial_data
from emhd25.params import ParamSet
from emhd25.solver import (
    STATUS_COMPLETED,
    STATUS_DT_COLLAPSE,
    STATUS_RESOLUTION,
    SolverConfig,
    cfl_dt,
    rhs,
    run,
    run_frozen_velocity,
    step_rk4,
)
from emhd25.spectral import Field, Grid, VectorField, laplacian, poisson_bracket
from emhd25.state import State


def _zero_field(grid):
    return Field.from_values(grid, np.zeros((grid.n, grid.n)))


def _mode_state(grid, amplitude=1.0):
    """State with a single low cosine mode in a and an empty b."""
    X, Y = grid.meshes()
    k0 = np.pi / grid.L
    a = Field.from_values(grid, amplitude * np.cos(k0 * X) + 0.0 * Y)
    return State(a=a, b=_zero_field(grid), t=0.0)


@pytest.fixture(scope="module")
def grid64():
    return Grid(n=64, L=1.0)


@pytest.fixture(scope="module")
def smooth_pair():
    """Generic smooth low-mode pair with no special symmetry."""
    grid = Grid(n=128, L=1.0)
    X, Y = grid.meshes()
    k0 = np.pi / grid.L
    av = np.zeros((grid.n, grid.n))
    bv = np.zeros((grid.n, grid.n))
    for jx, jy, amp in [(1, 2, 0.7), (3, 1, -0.4), (2, 2, 0.3)]:
        av += amp * np.cos(k0 * (jx * X + jy * Y) + 0.1 * jx)
        bv += 0.5 * amp * np.sin(k0 * (jx * X - jy * Y) + 0.2 * jy)
    return State(a=Field.from_values(grid, av), b=Field.from_values(grid, bv), t=0.0)


class TestTendencies:
    """rhs against independent assemblies and exact null cases."""

    def test_matches_bracket_assembly_without_dealiasing(self, smooth_pair):
        """da must equal {a,b} and db must equal {lap a, a} built from public ops."""
        cfg = SolverConfig(t_end=1.0, dealias=False)
        da, db = rhs(smooth_pair, cfg)
        da_ind = poisson_bracket(smooth_pair.a, smooth_pair.b)
        db_ind = poisson_bracket(laplacian(smooth_pair.a), smooth_pair.a)
        scale_a = np.max(np.abs(da_ind.values))
        scale_b = np.max(np.abs(db_ind.values))
        assert np.max(np.abs(da.values - da_ind.values)) <= 1e-10 * scale_a
        assert np.max(np.abs(db.values - db_ind.values)) <= 1e-9 * scale_b

    def test_matches_dealiased_bracket_with_default_config(self, smooth_pair):
        da, _ = rhs(smooth_pair)
        da_ind = poisson_bracket(smooth_pair.a, smooth_pair.b)
        scale = np.max(np.abs(da_ind.values))
        assert np.max(np.abs(da.values - da_ind.values)) <= 1e-12 * scale

    def test_zero_state_has_zero_tendencies(self, grid64):
        z = _zero_field(grid64)
        da, db = rhs(State(a=z, b=z, t=0.0))
        assert np.max(np.abs(da.values)) == 0.0
        assert np.max(np.abs(db.values)) == 0.0

    def test_empty_a_gives_zero_tendencies(self, grid64):
        """Both nonlinearities carry a gradient of a, so a = 0 freezes everything."""
        X, Y = grid64.meshes()
        b = Field.from_values(grid64, 0.4 * np.cos(np.pi * X) * np.cos(np.pi * Y))
        da, db = rhs(State(a=_zero_field(grid64), b=b, t=0.0))
        assert np.max(np.abs(da.values)) == 0.0
        assert np.max(np.abs(db.values)) == 0.0

    def test_purely_one_dimensional_pair_is_stationary(self, grid64):
        """Fields depending on x alone have parallel gradients everywhere."""
        X, Y = grid64.meshes()
        k0 = np.pi / grid64.L
        a = Field.from_values(grid64, np.sin(3 * k0 * X) + 0.0 * Y)
        b = Field.from_values(grid64, np.cos(2 * k0 * X) + 0.0 * Y)
        da, db = rhs(State(a=a, b=b, t=0.0))
        assert np.max(np.abs(da.values)) == 0.0
        assert np.max(np.abs(db.values)) == 0.0

    def test_radial_pair_is_stationary(self, radial_pair):
        """Concentric level sets make both brackets vanish identically."""
        da, db = rhs(radial_pair)
        assert np.max(np.abs(da.values)) <= 1e-10
        assert np.max(np.abs(db.values)) <= 1e-8


class TestStabilityBound:
    """cfl_dt contracts: motionless cap, amplitude and resolution scaling."""

    def test_zero_state_returns_t_end(self, grid64):
        z = _zero_field(grid64)
        cfg = SolverConfig(t_end=2.5)
        assert cfl_dt(State(a=z, b=z, t=0.0), cfg) == 2.5

    def test_amplitude_doubling_halves_the_bound(self, grid64):
        cfg = SolverConfig(t_end=1e9)
        dt1 = cfl_dt(_mode_state(grid64, 1.0), cfg)
        dt2 = cfl_dt(_mode_state(grid64, 2.0), cfg)
        assert dt1 / dt2 == pytest.approx(2.0, rel=1e-12)

    def test_resolution_doubling_quarters_the_bound(self):
        """The dispersive bound scales with the square of the cutoff."""
        cfg = SolverConfig(t_end=1e9)
        dt_coarse = cfl_dt(_mode_state(Grid(n=64, L=1.0)), cfg)
        dt_fine = cfl_dt(_mode_state(Grid(n=128, L=1.0)), cfg)
        assert dt_coarse / dt_fine == pytest.approx(4.0, rel=1e-9)

    def test_bound_is_positive_and_capped(self, radial_pair):
        cfg = SolverConfig(t_end=1.0)
        dt = cfl_dt(radial_pair, cfg)
        assert 0.0 < dt <= 1.0


class TestSingleStep:
    """step_rk4 on states with known exact behavior."""

    def test_zero_state_stays_zero(self, grid64):
        z = _zero_field(grid64)
        stepped = step_rk4(State(a=z, b=z, t=0.0), 0.1)
        assert np.max(np.abs(stepped.a.values)) == 0.0
        assert np.max(np.abs(stepped.b.values)) == 0.0

    def test_time_advances_by_dt(self, radial_pair):
        stepped = step_rk4(radial_pair, 1e-7)
        assert stepped.t == pytest.approx(radial_pair.t + 1e-7, abs=0.0)

    def test_one_dimensional_pair_does_not_drift(self, grid64):
        X, Y = grid64.meshes()
        k0 = np.pi / grid64.L
        a = Field.from_values(grid64, np.sin(3 * k0 * X) + 0.0 * Y)
        b = Field.from_values(grid64, np.cos(2 * k0 * X) + 0.0 * Y)
        state = State(a=a, b=b, t=0.0)
        stepped = step_rk4(state, 1e-3)
        assert np.max(np.abs(stepped.a.values - a.values)) <= 1e-14
        assert np.max(np.abs(stepped.b.values - b.values)) <= 1e-14

    def test_radial_pair_does_not_drift_at_stable_dt(self, radial_pair):
        dt = 0.5 * cfl_dt(radial_pair, SolverConfig(t_end=1.0))
        stepped = step_rk4(radial_pair, dt)
        assert np.max(np.abs(stepped.a.values - radial_pair.a.values)) <= 1e-13
        assert np.max(np.abs(stepped.b.values - radial_pair.b.values)) <= 1e-12


class TestHyperviscosity:
    """Dissipation against the exact single-mode exponential decay."""

    def test_single_mode_decays_at_the_analytic_rate(self):
        grid = Grid(n=32, L=1.0)
        X, Y = grid.meshes()
        k0 = np.pi / grid.L
        a = Field.from_values(grid, np.cos(3 * k0 * X) + 0.0 * Y)
        state = State(a=a, b=_zero_field(grid), t=0.0)
        nu, p, t_end = 1e-3, 2, 0.1
        traj = run(state, SolverConfig(t_end=t_end, nu=nu, p_hyper=p))
        assert traj.status == STATUS_COMPLETED
        expect = np.exp(-nu * (3 * k0) ** (2 * p) * t_end)
        ratio = np.max(np.abs(traj.final.a.values)) / np.max(np.abs(a.values))
        assert ratio == pytest.approx(expect, rel=1e-12)
        assert np.max(np.abs(traj.final.b.values)) == 0.0


class TestRunContract:
    """Run bookkeeping: records, duration semantics, determinism."""

    def test_zero_duration_returns_initial_time_and_one_record(self, radial_pair):
        traj = run(radial_pair, SolverConfig(t_end=0.0), probe=lambda s, dt: (s.t, dt))
        assert traj.status == STATUS_COMPLETED
        assert traj.steps == 0
        assert traj.records == [(radial_pair.t, 0.0)]
        assert traj.final.t == radial_pair.t

    def test_entry_projection_strips_unresolved_modes(self):
        """With dealiasing on, content beyond the cutoff is removed up front."""
        grid = Grid(n=64, L=1.0)
        coeffs = np.zeros((grid.n, grid.n), dtype=np.complex128)
        coeffs[28, 0] = coeffs[-28, 0] = 1.0
        coeffs[5, 3] = coeffs[-5, -3] = 2.0
        a = Field.from_coefficients(grid, coeffs)
        state = State(a=a, b=_zero_field(grid), t=0.25)
        traj = run(state, SolverConfig(t_end=0.0))
        assert abs(traj.final.a.coefficients[28, 0]) == 0.0
        assert abs(traj.final.a.coefficients[5, 3]) == pytest.approx(2.0, rel=1e-14)

    def test_record_cadence_follows_output_stride(self, radial_pair):
        dt = cfl_dt(radial_pair, SolverConfig(t_end=1.0))
        cfg = SolverConfig(t_end=7 * dt, output_stride=3)
        traj = run(radial_pair, cfg, probe=lambda s, dt_used: (s.t, dt_used))
        assert traj.status == STATUS_COMPLETED
        stride_hits = sum(
            1 for s in range(1, traj.steps + 1) if s % 3 == 0 or s == traj.steps
        )
        assert len(traj.records) == 1 + stride_hits
        assert traj.records[0] == (radial_pair.t, 0.0)
        times = [t for t, _ in traj.records]
        assert times == sorted(times)

    def test_zero_state_completes_in_one_step(self, grid64):
        z = _zero_field(grid64)
        traj = run(State(a=z, b=z, t=0.0), SolverConfig(t_end=2.5))
        assert traj.status == STATUS_COMPLETED
        assert traj.final.t == pytest.approx(2.5, rel=1e-12)
        assert np.max(np.abs(traj.final.a.values)) == 0.0

    def test_reruns_are_bit_identical(self, radial_pair):
        dt = cfl_dt(radial_pair, SolverConfig(t_end=1.0))
        cfg = SolverConfig(t_end=10 * dt)
        first = run(radial_pair, cfg)
        second = run(radial_pair, cfg)
        assert first.steps == second.steps
        assert np.array_equal(first.final.a.coefficients, second.final.a.coefficients)
        assert np.array_equal(first.final.b.coefficients, second.final.b.coefficients)

    def test_energy_is_conserved_on_a_short_inviscid_run(self, radial_pair):
        dt = cfl_dt(radial_pair, SolverConfig(t_end=1.0))
        traj = run(radial_pair, SolverConfig(t_end=40 * dt))
        assert traj.status == STATUS_COMPLETED
        assert traj.steps >= 40
        e0 = energy(radial_pair)
        e1 = energy(traj.final)
        assert abs(e1 - e0) <= 1e-12 * e0


class TestAborts:
    """Abnormal-termination statuses with diagnostic messages."""

    def test_energy_piled_at_the_grid_scale_aborts(self):
        """A retained mode in the top wavenumber band trips the monitor."""
        grid = Grid(n=64, L=1.0)
        coeffs = np.zeros((grid.n, grid.n), dtype=np.complex128)
        coeffs[20, 0] = coeffs[-20, 0] = 1.0
        a = Field.from_coefficients(grid, coeffs)
        traj = run(State(a=a, b=_zero_field(grid), t=0.0), SolverConfig(t_end=1.0))
        assert traj.status == STATUS_RESOLUTION
        assert traj.steps == 1
        assert "top eighth" in traj.message
        assert np.all(np.isfinite(traj.final.a.values))

    def test_collapsed_stability_bound_aborts_before_stepping(self, grid64):
        traj = run(_mode_state(grid64, 1e10), SolverConfig(t_end=1.0))
        assert traj.status == STATUS_DT_COLLAPSE
        assert traj.steps == 0
        assert "collapsed" in traj.message

    def test_exhausted_step_budget_aborts(self, radial_pair):
        traj = run(radial_pair, SolverConfig(t_end=1.0, max_steps=3))
        assert traj.status == STATUS_DT_COLLAPSE
        assert traj.steps == 3
        assert "step budget" in traj.message
        assert traj.final.t < radial_pair.t + 1.0


class TestFrozenVelocity:
    """Linear transport mode: fixed velocity, carried-through b."""

    def test_uniform_velocity_translates_the_field(self):
        """End state must match the initial data translated by u * t."""
        grid = Grid(n=128, L=1.0)
        X, Y = grid.meshes()
        k0 = np.pi / grid.L
        a = Field.from_values(grid, np.cos(k0 * (2 * X - Y)))
        b = Field.from_values(grid, 0.3 * np.cos(k0 * X) + 0.0 * Y)
        state = State(a=a, b=b, t=0.0)
        ones = np.ones((grid.n, grid.n))
        velocity = VectorField(
            Field.from_values(grid, 0.7 * ones), Field.from_values(grid, 0.3 * ones)
        )
        traj = run_frozen_velocity(state, SolverConfig(t_end=0.5), velocity=velocity)
        assert traj.status == STATUS_COMPLETED
        t = traj.final.t
        exact = np.cos(k0 * (2 * (X - 0.7 * t) - (Y - 0.3 * t)))
        assert np.max(np.abs(traj.final.a.values - exact)) <= 1e-6
        assert np.array_equal(traj.final.b.values, b.values)

    def test_empty_carrier_stays_empty(self, grid64):
        X, Y = grid64.meshes()
        b = Field.from_values(grid64, 0.3 * np.cos(np.pi * X) + 0.0 * Y)
        state = State(a=_zero_field(grid64), b=b, t=0.0)
        traj = run_frozen_velocity(state, SolverConfig(t_end=0.5))
        assert traj.status == STATUS_COMPLETED
        assert np.max(np.abs(traj.final.a.values)) == 0.0
        assert np.array_equal(traj.final.b.coefficients, b.coefficients)

    def test_velocity_on_another_grid_is_rejected(self, radial_pair):
        other = Grid(n=64, L=1.0)
        zeros = np.zeros((other.n, other.n))
        velocity = VectorField(
            Field.from_values(other, zeros), Field.from_values(other, zeros)
        )
        with pytest.raises(ValueError, match="different grid"):
            run_frozen_velocity(radial_pair, SolverConfig(t_end=0.1), velocity=velocity)

    def test_default_velocity_reproduces_the_sheared_carrier(self):
        """Quarter-horizon transport run against the closed-form solution.

        The same comparison at the full horizon is an acceptance criterion;
        this shorter run keeps the unit suite quick while still exercising
        the default velocity path end to end.
        """
        params = ParamSet(lam=4.0, beta=3.5, gamma=1.2, zeta=1.48)
        grid = Grid(n=512, L=2.0)
        state = make_initial_data(params, grid)
        sol = ApproxSolution(params=params, grid=grid)
        t_end = params.inflation_time / 4
        traj = run_frozen_velocity(state, SolverConfig(t_end=t_end))
        assert traj.status == STATUS_COMPLETED
        reference = sol.abar(t_end)
        diff = traj.final.a.values - reference.values
        rel_l2 = np.sqrt(np.sum(diff**2) / np.sum(reference.values**2))
        assert rel_l2 <= 1e-4
        sup0 = np.max(np.abs(state.a.values))
        sup1 = np.max(np.abs(traj.final.a.values))
        assert abs(sup1 - sup0) <= 1e-5 * sup0
        l20 = np.sqrt(np.sum(state.a.values**2))
        l21 = np.sqrt(np.sum(traj.final.a.values**2))
        assert abs(l21 - l20) <= 1e-8 * l20
