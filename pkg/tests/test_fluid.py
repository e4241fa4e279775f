import math

import numpy as np
import pytest

from nsvfp import (Grid, ModelParams, FluidState, FluidSchemeConfig,
                   NumericalBlowupError, StepRejectedError, fluid_substep,
                   stable_dt)

from conftest import constant_fluid


def smooth_state(grid, rho_amp=0.2, u_amp=0.1):
    x = grid.x_centers
    rho = 1.0 + rho_amp * np.sin(2 * math.pi * x)
    u = u_amp * np.cos(2 * math.pi * x)
    return FluidState(rho, rho * u)


def fluid_energy(state, params, grid):
    rho_f = np.maximum(state.rho, 1e-12)
    kinetic = 0.5 * state.m**2 / rho_f
    internal = params.A / (params.gamma - 1.0) * state.rho**params.gamma
    return grid.dx * float((kinetic + internal).sum())


class TestStableDt:
    def test_acoustic_bound(self, grid):
        # rho = 1, m = 0, A = 1, gamma = 2 -> sound speed sqrt(2)
        p = ModelParams(A=1.0, gamma=2.0)
        cfg = FluidSchemeConfig(cfl=0.5, visc_theta=1)
        dt = stable_dt(constant_fluid(grid, rho=1.0), p, cfg, grid)
        assert dt == pytest.approx(0.5 * grid.dx / math.sqrt(2.0), rel=1e-12)

    def test_vacuum_is_bounded_by_viscous_term(self, grid):
        p = ModelParams()
        cfg = FluidSchemeConfig(cfl=0.5, visc_theta=0)
        state = FluidState(np.zeros(grid.nx), np.zeros(grid.nx))
        dt = stable_dt(state, p, cfg, grid)
        # advective bound is infinite (no speed); the floored viscous rate binds
        expected = 0.5 * grid.dx**2 / (2.0 * (p.mu0 + p.mu1 * 1e-12) / 1e-12)
        assert dt == pytest.approx(expected, rel=1e-9)

    def test_doubling_nx_halves_advective_dt(self):
        p = ModelParams(A=1.0, gamma=2.0)
        cfg = FluidSchemeConfig(cfl=0.9, visc_theta=1)
        dts = [stable_dt(constant_fluid(Grid(nx, 8, 8.0), rho=1.0), p, cfg,
                         Grid(nx, 8, 8.0)) for nx in (32, 64)]
        assert dts[0] == pytest.approx(2.0 * dts[1], rel=1e-12)


class TestFluidSubstep:
    @pytest.mark.parametrize("reconstruction", ["first_order", "muscl_minmod"])
    @pytest.mark.parametrize("visc_theta", [0, 1])
    def test_constant_state_is_exact_fixed_point(self, grid, reconstruction,
                                                 visc_theta):
        p = ModelParams()
        cfg = FluidSchemeConfig(cfl=0.45, visc_theta=visc_theta,
                                reconstruction=reconstruction)
        state = constant_fluid(grid, rho=0.8, u=0.35)
        dt = 0.9 * stable_dt(state, p, cfg, grid)
        out = fluid_substep(state, dt, p, cfg, grid)
        np.testing.assert_allclose(out.rho, state.rho, rtol=1e-15, atol=0)
        np.testing.assert_allclose(out.m, state.m, rtol=1e-13, atol=1e-16)

    def test_viscous_fourier_mode_decay(self):
        # pressure effectively off, mu = 1: one explicit step damps the first
        # sine mode of u by the discrete-Laplacian factor
        g = Grid(nx=64, nv=8, v_max=8.0)
        eps = 1e-6
        p = ModelParams(A=1e-20, gamma=1.4, mu0=1.0, mu1=0.0)
        cfg = FluidSchemeConfig(cfl=0.9, visc_theta=0)
        u0 = eps * np.sin(2 * math.pi * g.x_centers)
        state = FluidState(np.ones(g.nx), u0.copy())
        dt = 0.4 * g.dx**2
        out = fluid_substep(state, dt, p, cfg, g)
        u1 = out.m / out.rho
        mode = lambda u: 2.0 * g.dx * float((u * np.sin(2 * math.pi * g.x_centers)).sum())
        predicted = 1.0 - dt * (2.0 / g.dx**2) * (1.0 - math.cos(2 * math.pi * g.dx))
        assert mode(u1) / mode(u0) == pytest.approx(predicted, rel=1e-5)

    @pytest.mark.parametrize("visc_theta", [0, 1])
    def test_exact_conservation_over_many_steps(self, visc_theta):
        g = Grid(nx=48, nv=8, v_max=8.0)
        p = ModelParams(mu0=0.05, mu1=0.05)
        cfg = FluidSchemeConfig(cfl=0.45, visc_theta=visc_theta)
        state = smooth_state(g)
        mass0 = g.dx * state.rho.sum()
        mom0 = g.dx * state.m.sum()
        for _ in range(500):
            state = fluid_substep(state, 0.9 * stable_dt(state, p, cfg, g), p, cfg, g)
        assert abs(g.dx * state.rho.sum() - mass0) <= 1e-13 * abs(mass0)
        assert abs(g.dx * state.m.sum() - mom0) <= 1e-13 * max(abs(mom0), 1.0)

    def test_density_positivity_first_order(self, rng):
        g = Grid(nx=64, nv=8, v_max=8.0)
        p = ModelParams(mu0=0.01, mu1=0.0)
        cfg = FluidSchemeConfig(cfl=0.9, visc_theta=1)
        rho = np.abs(rng.normal(1.0, 0.5, g.nx)) + 1e-3
        state = FluidState(rho, rho * rng.normal(0.0, 0.5, g.nx))
        for _ in range(200):
            state = fluid_substep(state, 0.9 * stable_dt(state, p, cfg, g), p, cfg, g)
            assert state.rho.min() >= 0.0

    def test_energy_nonincreasing_on_smooth_run(self):
        g = Grid(nx=64, nv=8, v_max=8.0)
        p = ModelParams()
        cfg = FluidSchemeConfig(cfl=0.45, visc_theta=1)
        state = smooth_state(g)
        energy = fluid_energy(state, p, g)
        slack = 1e-8 * energy
        for _ in range(300):
            state = fluid_substep(state, 0.9 * stable_dt(state, p, cfg, g), p, cfg, g)
            new_energy = fluid_energy(state, p, g)
            assert new_energy <= energy + slack
            energy = new_energy

    def test_step_rejection_carries_admissible_dt(self, grid):
        p = ModelParams()
        cfg = FluidSchemeConfig(cfl=0.5, visc_theta=1)
        state = constant_fluid(grid, rho=1.0, u=0.1)
        bound = stable_dt(state, p, cfg, grid)
        with pytest.raises(StepRejectedError) as err:
            fluid_substep(state, 2.0 * bound, p, cfg, grid)
        assert err.value.admissible_dt == pytest.approx(bound)

    def test_overflow_raises_blowup(self, grid):
        p = ModelParams()
        cfg = FluidSchemeConfig(cfl=0.5, visc_theta=0)
        state = FluidState(np.full(grid.nx, 1e250), np.zeros(grid.nx))
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(NumericalBlowupError):
                fluid_substep(state, 1e-60, p, cfg, grid)


def _coarsen(arr, factor):
    return arr.reshape(-1, factor).mean(axis=1)


def _run_levels(make_state, p, cfg, nx_levels, nx_ref, t_end, dt_of_dx):
    solutions = {}
    for nx in list(nx_levels) + [nx_ref]:
        g = Grid(nx=nx, nv=8, v_max=8.0)
        state = make_state(g)
        # land exactly on t_end so the levels are compared at the same time
        n_steps = int(math.ceil(t_end / dt_of_dx(g.dx)))
        dt = t_end / n_steps
        for _ in range(n_steps):
            state = fluid_substep(state, dt, p, cfg, g)
        solutions[nx] = state
    errors = []
    for nx in nx_levels:
        ref = solutions[nx_ref]
        fac = nx_ref // nx
        err = (np.abs(_coarsen(ref.rho, fac) - solutions[nx].rho).sum()
               + np.abs(_coarsen(ref.m, fac) - solutions[nx].m).sum()) / nx
        errors.append(err)
    return errors


class TestSelfConvergence:
    def test_smooth_orders(self):
        # fine-grid reference at nx = 4096; dt proportional to dx
        p = ModelParams(mu0=1e-4, mu1=0.0)
        t_end = 0.1
        levels = (64, 128, 256)
        orders = {}
        for recon, floor in (("first_order", 0.8), ("muscl_minmod", 1.5)):
            cfg = FluidSchemeConfig(cfl=0.9, visc_theta=0, reconstruction=recon)
            errors = _run_levels(smooth_state, p, cfg, levels, 4096, t_end,
                                 lambda dx: 0.25 * dx)
            orders[recon] = [math.log2(errors[k] / errors[k + 1])
                             for k in range(len(errors) - 1)]
            assert min(orders[recon]) >= floor, (recon, errors, orders)

    def test_riemann_errors_decrease_under_refinement(self):
        def sod_like(g):
            rho = np.where(g.x_centers < 0.5, 1.0, 0.125)
            return FluidState(rho, np.zeros(g.nx))

        p = ModelParams(mu0=0.01, mu1=0.0)
        cfg = FluidSchemeConfig(cfl=0.9, visc_theta=1)
        errors = _run_levels(sod_like, p, cfg, (64, 128, 256), 4096, 0.15,
                             lambda dx: dx / 12.0)
        assert errors[0] > errors[1] > errors[2]
