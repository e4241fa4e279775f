import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsvfp import (Grid, ModelParams, FluidState, KineticState,
                   DegenerateInputError, pressure, viscosity, drag_coefficient,
                   velocity_from_state, equilibrium_from_initial,
                   sample_maxwellian)

from conftest import constant_fluid, maxwellian_state


class TestGrid:
    def test_spacing_is_exact(self):
        g = Grid(nx=64, nv=32, v_max=8.0)
        assert g.dx * g.nx == 1.0
        assert g.dv * g.nv == 2.0 * g.v_max

    def test_v_centers_symmetric_for_even_nv(self):
        g = Grid(nx=8, nv=16, v_max=4.0)
        np.testing.assert_allclose(g.v_centers, -g.v_centers[::-1], atol=0)

    def test_rejects_bad_sizes(self):
        with pytest.raises(ValueError):
            Grid(nx=3, nv=32, v_max=8.0)
        with pytest.raises(ValueError):
            Grid(nx=8, nv=7, v_max=8.0)
        with pytest.raises(ValueError):
            Grid(nx=8, nv=8, v_max=0.0)

    def test_faces_bracket_centers(self):
        g = Grid(nx=8, nv=12, v_max=3.0, v_offset=0.5)
        assert g.v_faces[0] == pytest.approx(-2.5)
        assert g.v_faces[-1] == pytest.approx(3.5)
        np.testing.assert_allclose(0.5 * (g.v_faces[:-1] + g.v_faces[1:]),
                                   g.v_centers)


class TestModelParams:
    def test_defaults_valid(self):
        p = ModelParams()
        assert p.gamma > 1

    @pytest.mark.parametrize("kwargs", [
        {"A": 0.0}, {"gamma": 1.0}, {"gamma": 0.9}, {"mu0": 0.0},
        {"mu1": -1.0}, {"beta": -0.5}, {"kappa0": -1.0},
    ])
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            ModelParams(**kwargs)


class TestConstitutive:
    def test_pressure_zero_density(self, params):
        assert pressure(0.0, params) == 0.0

    def test_pressure_unit_case(self):
        assert pressure(1.0, ModelParams(A=1.0, gamma=2.0)) == 1.0

    def test_pressure_power_law(self):
        # 2^1.4, cross-checked with 40-digit arithmetic
        p = pressure(2.0, ModelParams(A=1.0, gamma=1.4))
        assert p == pytest.approx(2.6390158215457885, rel=1e-15)

    def test_viscosity_cases(self):
        assert viscosity(0.0, ModelParams(mu0=1, mu1=1, beta=1)) == 1.0
        assert viscosity(1.0, ModelParams(mu0=1, mu1=1, beta=0.37)) == 2.0
        assert viscosity(4.0, ModelParams(mu0=1, mu1=1, beta=0.5)) == pytest.approx(3.0)

    def test_viscosity_zero_exponent_convention(self):
        # 0**0 == 1 so mu(0) = mu0 + mu1 when beta = 0
        assert viscosity(0.0, ModelParams(mu0=1, mu1=2, beta=0.0)) == 3.0

    def test_drag_cases(self, params):
        assert drag_coefficient(0.0, params) == 0.0
        assert drag_coefficient(1.0, ModelParams(kappa0=1.0)) == 1.0
        assert drag_coefficient(2.5, ModelParams(kappa0=3.0)) == 7.5

    @pytest.mark.parametrize("fn", [pressure, viscosity, drag_coefficient])
    def test_negative_density_rejected(self, fn, params):
        with pytest.raises(ValueError):
            fn(-1e-9, params)
        with pytest.raises(ValueError):
            fn(np.array([1.0, -2.0]), params)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(min_value=0.0, max_value=50.0),
           st.floats(min_value=0.0, max_value=50.0))
    def test_monotone_in_density(self, r1, r2):
        p = ModelParams(A=0.7, gamma=1.7, mu0=0.3, mu1=1.2, beta=0.8, kappa0=2.0)
        lo, hi = min(r1, r2), max(r1, r2)
        assert pressure(lo, p) <= pressure(hi, p)
        assert viscosity(lo, p) <= viscosity(hi, p)
        assert drag_coefficient(lo, p) <= drag_coefficient(hi, p)


class TestVelocityFromState:
    def test_plain_quotient(self):
        u = velocity_from_state(FluidState([1.0, 1.0], [2.0, 0.0]))
        np.testing.assert_allclose(u, [2.0, 0.0])

    def test_vacuum_convention(self):
        u = velocity_from_state(FluidState([0.0], [0.0]), floor=1e-12)
        assert u[0] == 0.0

    def test_half_density(self):
        assert velocity_from_state(FluidState([0.5], [1.0]))[0] == pytest.approx(2.0)


class TestStateInvariants:
    def test_fluid_check_rejects_negative_density(self):
        with pytest.raises(ValueError):
            FluidState([1.0, -0.1], [0.0, 0.0]).check()

    def test_fluid_check_rejects_momentum_in_vacuum(self):
        with pytest.raises(ValueError):
            FluidState([0.0, 1.0], [0.5, 0.0]).check()

    def test_kinetic_check_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            KineticState(np.array([[1.0, np.inf], [0.0, 0.0]])).check()


class TestEquilibriumFromInitial:
    def test_uniform_data(self, grid):
        fluid = FluidState(np.ones(grid.nx), np.full(grid.nx, 0.5))
        kin = maxwellian_state(grid, n_total=1.0, center=0.0)
        eq = equilibrium_from_initial(fluid, kin, grid)
        assert eq.rho_bar == pytest.approx(1.0, rel=1e-14)
        assert eq.n_bar == pytest.approx(1.0, rel=1e-13)
        assert eq.u_c == pytest.approx(0.25, abs=1e-13)

    def test_even_distribution_gives_zero_speed(self, grid, rng):
        fluid = FluidState(np.ones(grid.nx), np.zeros(grid.nx))
        half = rng.uniform(0.2, 1.0, size=(grid.nx, grid.nv // 2))
        f = np.concatenate([half, half[:, ::-1]], axis=1)
        eq = equilibrium_from_initial(fluid, KineticState(f), grid)
        assert abs(eq.u_c) <= 1e-14

    def test_both_phases_at_common_speed(self, grid):
        # fluid and sampled Gaussian both moving at 1 -> u_c = 1 up to the
        # (asymmetric) quadrature tail of the off-center Gaussian
        fluid = FluidState(np.full(grid.nx, 2.0), np.full(grid.nx, 2.0))
        kin = maxwellian_state(grid, n_total=1.0, center=1.0)
        eq = equilibrium_from_initial(fluid, kin, grid)
        assert eq.u_c == pytest.approx(1.0, abs=1e-10)

    def test_zero_mass_rejected(self, grid):
        fluid = FluidState(np.zeros(grid.nx), np.zeros(grid.nx))
        kin = KineticState(np.zeros((grid.nx, grid.nv)))
        with pytest.raises(DegenerateInputError):
            equilibrium_from_initial(fluid, kin, grid)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_invariant_under_cell_rearrangement(self, seed):
        g = Grid(nx=16, nv=16, v_max=6.0)
        r = np.random.default_rng(seed)
        fluid = FluidState(r.uniform(0, 2, g.nx), r.normal(0, 1, g.nx))
        f = r.uniform(0, 1, (g.nx, g.nv))
        perm = r.permutation(g.nx)
        eq1 = equilibrium_from_initial(fluid, KineticState(f), g)
        eq2 = equilibrium_from_initial(
            FluidState(fluid.rho[perm], fluid.m[perm]), KineticState(f[perm]), g)
        assert eq1.rho_bar == pytest.approx(eq2.rho_bar, rel=1e-12)
        assert eq1.n_bar == pytest.approx(eq2.n_bar, rel=1e-12)
        assert eq1.u_c == pytest.approx(eq2.u_c, rel=1e-10, abs=1e-12)

    @pytest.mark.parametrize("u_c", [0.0, 0.5, -1.5])
    def test_maxwellian_tail_bound(self, u_c):
        g = Grid(nx=8, nv=128, v_max=8.0)
        fluid = FluidState(np.ones(g.nx), np.full(g.nx, u_c))
        row = sample_maxwellian(2.0, u_c, g.v_centers)
        eq = equilibrium_from_initial(fluid, KineticState(np.tile(row, (g.nx, 1))), g)
        quad_mass = g.dv * eq.maxwellian.sum()
        tail = eq.n_bar * math.erfc((g.v_max - abs(eq.u_c)) / math.sqrt(2.0))
        assert abs(quad_mass - eq.n_bar) <= tail + 1e-15 * eq.n_bar
