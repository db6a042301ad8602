import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from attenua.cavity import eigenmode, mode_lambda
from attenua.errors import NonzeroOnBoundary, NumericBlowup
from attenua.geometry import Disk, Grid, Obstacle, build_mask
from attenua.observables import energy
from attenua.solver import (
    InitialData,
    apply_generator,
    cfl_timestep,
    init_state,
    laplacian,
    step,
    velocity,
)


@pytest.fixture(scope="module")
def cavity():
    g = Grid(h=1.0 / 32.0, r_max=0.5)
    m = build_mask(Obstacle(), g)
    return g, m


def _discrete_lambda(grid, kx=1, ky=1):
    """Exact eigenvalue of the five-point Laplacian for the box sine mode."""
    S = 2.0 * grid.r_max
    h = grid.h
    return (4.0 / h**2) * (np.sin(kx * np.pi * h / (2 * S)) ** 2
                           + np.sin(ky * np.pi * h / (2 * S)) ** 2)


class TestCflTimestep:
    def test_2d_formula(self):
        g = Grid(h=0.1, r_max=1.0)
        assert cfl_timestep(g, 0.5) == pytest.approx(0.035355339, abs=1e-8)

    def test_3d_formula(self):
        g = Grid(h=0.1, r_max=1.0)
        assert cfl_timestep(g, 0.9, dim=3) == pytest.approx(0.051961524, abs=1e-8)

    def test_rejects_out_of_range(self):
        g = Grid(h=0.1, r_max=1.0)
        with pytest.raises(ValueError):
            cfl_timestep(g, 1.1)
        with pytest.raises(ValueError):
            cfl_timestep(g, 0.0)


class TestInitState:
    def test_zero_data(self, cavity):
        g, m = cavity
        z = np.zeros((g.n, g.n))
        s = init_state(InitialData(z, z), g, m, z, 0.01)
        assert not s.u_prev.any() and not s.u_curr.any()

    def test_eigenmode_back_step(self, cavity):
        g, m = cavity
        phi = np.where(m.fluid, eigenmode(g), 0.0)
        a = np.zeros_like(phi)
        dt = cfl_timestep(g, 0.5)
        s = init_state(InitialData(phi, np.zeros_like(phi)), g, m, a, dt)
        lam = _discrete_lambda(g)
        expected = (1.0 - 0.5 * lam * dt * dt) * phi
        assert np.allclose(s.u_prev[m.fluid], expected[m.fluid], atol=1e-13)

    def test_velocity_only_data(self, cavity):
        g, m = cavity
        X, Y = g.mesh()
        u1 = np.where(m.fluid, np.exp(-8 * (X**2 + Y**2)), 0.0)
        a = np.full_like(u1, 0.7)
        dt = 0.01
        s = init_state(InitialData(np.zeros_like(u1), u1), g, m, a, dt)
        expected = -dt * u1 + 0.5 * dt * dt * (-a * u1)
        assert np.allclose(s.u_prev[m.fluid], expected[m.fluid], atol=1e-15)

    def test_rejects_nonzero_boundary_data(self, cavity):
        g, m = cavity
        u0 = np.ones((g.n, g.n))
        with pytest.raises(NonzeroOnBoundary):
            init_state(InitialData(u0, np.zeros_like(u0)), g, m,
                       np.zeros_like(u0), 0.01)


class TestStep:
    def test_zero_state_stays_zero(self, cavity):
        g, m = cavity
        z = np.zeros((g.n, g.n))
        s = init_state(InitialData(z, z), g, m, z, 0.01)
        s = step(s, z, m, g)
        assert not s.u_curr.any()

    def test_dirichlet_nodes_stay_zero(self, cavity):
        g, m = cavity
        phi = np.where(m.fluid, eigenmode(g), 0.0)
        a = np.full_like(phi, 0.5)
        s = init_state(InitialData(phi, np.zeros_like(phi)), g, m, a,
                       cfl_timestep(g, 0.5))
        for _ in range(50):
            s = step(s, a, m, g)
        assert not s.u_curr[~m.fluid].any()

    @settings(max_examples=10, deadline=None)
    @given(st.floats(-2, 2), st.floats(-2, 2))
    def test_linearity(self, alpha, beta):
        g = Grid(h=1.0 / 16.0, r_max=0.5)
        m = build_mask(Obstacle(), g)
        rng = np.random.default_rng(11)
        a = np.where(m.fluid, rng.uniform(0, 1, (g.n, g.n)), 0.0)
        dt = cfl_timestep(g, 0.45)

        def run(u0, u1):
            s = init_state(InitialData(u0, u1), g, m, a, dt)
            for _ in range(5):
                s = step(s, a, m, g)
            return s.u_curr

        u0a = np.where(m.fluid, rng.standard_normal((g.n, g.n)), 0.0)
        u1a = np.where(m.fluid, rng.standard_normal((g.n, g.n)), 0.0)
        u0b = np.where(m.fluid, rng.standard_normal((g.n, g.n)), 0.0)
        u1b = np.where(m.fluid, rng.standard_normal((g.n, g.n)), 0.0)
        lhs = run(alpha * u0a + beta * u0b, alpha * u1a + beta * u1b)
        rhs = alpha * run(u0a, u1a) + beta * run(u0b, u1b)
        assert np.allclose(lhs, rhs, atol=1e-10)

    def test_blowup_detected_on_cfl_violation(self, cavity):
        g, m = cavity
        phi = np.where(m.fluid, eigenmode(g), 0.0)
        a = np.zeros_like(phi)
        s = init_state(InitialData(phi, np.zeros_like(phi)), g, m, a,
                       2.0 * g.h)  # far above the CFL bound
        with pytest.raises(NumericBlowup):
            for _ in range(500):
                s = step(s, a, m, g)

    def test_energy_monotone_with_damping(self):
        g = Grid(h=1.0 / 16.0, r_max=1.0)
        m = build_mask(Obstacle(disks=(Disk((0.0, 0.0), 0.25),)), g)
        rng = np.random.default_rng(5)
        X, Y = g.mesh()
        smooth = np.exp(-6 * ((X - 0.4) ** 2 + Y**2))
        u0 = np.where(m.fluid, smooth, 0.0)
        u1 = np.where(m.fluid, 0.3 * smooth, 0.0)
        a = np.where(m.fluid, rng.uniform(0, 2, (g.n, g.n)), 0.0)
        s = init_state(InitialData(u0, u1), g, m, a, cfl_timestep(g, 0.45))
        E_prev = energy(s, g, m)
        E0 = E_prev
        for _ in range(200):
            s = step(s, a, m, g)
            E = energy(s, g, m)
            assert E <= E_prev + 1e-10 * E0
            E_prev = E


class TestApplyGenerator:
    def test_zero_maps_to_zero(self, cavity):
        g, m = cavity
        z = np.zeros((g.n, g.n))
        out = apply_generator(InitialData(z, z), z, g, m)
        assert not out.u0.any() and not out.u1.any()

    def test_eigenmode_maps_to_discrete_eigenvalue(self, cavity):
        g, m = cavity
        phi = np.where(m.fluid, eigenmode(g), 0.0)
        out = apply_generator(InitialData(phi, np.zeros_like(phi)),
                              np.zeros_like(phi), g, m)
        lam = _discrete_lambda(g)
        assert not out.u0.any()
        assert np.allclose(out.u1[m.fluid], (-lam * phi)[m.fluid],
                           rtol=1e-10, atol=1e-10)

    def test_velocity_only_formula(self, cavity):
        g, m = cavity
        X, Y = g.mesh()
        u1 = np.where(m.fluid, np.exp(-8 * (X**2 + Y**2)), 0.0)
        a = np.full_like(u1, 0.7)
        out = apply_generator(InitialData(np.zeros_like(u1), u1), a, g, m)
        assert np.array_equal(out.u0, u1)
        assert np.allclose(out.u1[m.fluid], (-0.7 * u1)[m.fluid], atol=1e-14)


class TestVelocity:
    def test_static_state(self, cavity):
        g, m = cavity
        u = np.where(m.fluid, eigenmode(g), 0.0)
        s = init_state(InitialData(u, np.zeros_like(u)), g, m,
                       np.zeros_like(u), 0.01)
        s.u_prev = u.copy()
        assert not velocity(s).any()

    def test_linear_in_time_node(self, cavity):
        g, m = cavity
        c = 0.37
        dt = 0.01
        u_prev = np.where(m.fluid, c * 1.0, 0.0)
        u_curr = np.where(m.fluid, c * (1.0 + dt), 0.0)
        from attenua.solver import WaveState
        s = WaveState(u_prev=u_prev, u_curr=u_curr, t=dt, dt=dt,
                      step_index=1, ref_max=1.0)
        v = velocity(s)
        assert np.allclose(v[m.fluid], c, atol=1e-10)


class TestLaplacian:
    def test_quadratic_is_exact(self):
        g = Grid(h=0.125, r_max=1.0)
        X, Y = g.mesh()
        u = X**2 + 2 * Y**2
        lap = laplacian(u, g.h)
        assert np.allclose(lap[1:-1, 1:-1], 6.0, atol=1e-10)
