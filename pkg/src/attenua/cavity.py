"""Closed-form modal oracle for a square cavity with constant damping.

A sine eigenmode of the box reduces the PDE to the scalar oscillator
c'' + a c' + lam c = 0, whose solution is known in closed form; comparing the
projected modal amplitude of a simulation against it measures the combined
space-time discretization error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Grid, Obstacle, build_mask
from .solver import InitialData, cfl_timestep, init_state, step


def eigenmode(grid: Grid, kx: int = 1, ky: int = 1) -> np.ndarray:
    """Dirichlet sine mode of the full box, zero on the outer ring."""
    S = 2.0 * grid.r_max
    X, Y = grid.mesh()
    return np.sin(kx * np.pi * (X + grid.r_max) / S) * \
        np.sin(ky * np.pi * (Y + grid.r_max) / S)


def mode_lambda(grid: Grid, kx: int = 1, ky: int = 1) -> float:
    """Continuum eigenvalue of -Laplace for the mode."""
    S = 2.0 * grid.r_max
    return (np.pi / S) ** 2 * (kx * kx + ky * ky)


def damped_mode_amplitude(t, lam: float, a: float):
    """Solution of c'' + a c' + lam c = 0 with c(0)=1, c'(0)=0 (underdamped)."""
    t = np.asarray(t, dtype=float)
    mu = np.sqrt(lam - 0.25 * a * a)
    return np.exp(-0.5 * a * t) * (np.cos(mu * t) + (0.5 * a / mu) * np.sin(mu * t))


@dataclass
class ModalRun:
    t: np.ndarray
    amplitude: np.ndarray
    exact: np.ndarray

    @property
    def linf_rel_error(self) -> float:
        return float(np.max(np.abs(self.amplitude - self.exact))
                     / np.max(np.abs(self.exact)))


def run_modal_comparison(r_max: float, h: float, a_const: float,
                         c_safety: float, t_final: float,
                         kx: int = 1, ky: int = 1,
                         record_stride: int = 4) -> ModalRun:
    """Simulate the cavity mode and compare its amplitude to the closed form."""
    grid = Grid(h=h, r_max=r_max)
    mask = build_mask(Obstacle(), grid)
    phi = np.where(mask.fluid, eigenmode(grid, kx, ky), 0.0)
    lam = mode_lambda(grid, kx, ky)
    a_field = np.full_like(phi, a_const)

    dt = cfl_timestep(grid, c_safety)
    n_steps = int(round(t_final / dt))
    data = InitialData(u0=phi, u1=np.zeros_like(phi))
    state = init_state(data, grid, mask, a_field, dt)

    norm = float(np.sum(phi * phi))
    ts, amps = [0.0], [1.0]
    for i in range(1, n_steps + 1):
        state = step(state, a_field, mask, grid)
        if i % record_stride == 0 or i == n_steps:
            ts.append(state.t)
            amps.append(float(np.sum(state.u_curr * phi)) / norm)
    t = np.array(ts)
    return ModalRun(t=t, amplitude=np.array(amps),
                    exact=damped_mode_amplitude(t, lam, a_const))


def convergence_order(r_max: float, h_coarse: float, a_const: float,
                      c_safety: float, t_final: float) -> tuple[float, float, float]:
    """(error_coarse, error_fine, measured order) under (h, dt) -> (h/2, dt/2)."""
    e1 = run_modal_comparison(r_max, h_coarse, a_const, c_safety, t_final).linf_rel_error
    e2 = run_modal_comparison(r_max, h_coarse / 2.0, a_const, c_safety,
                              t_final).linf_rel_error
    return e1, e2, float(np.log2(e1 / e2))
