"""Leapfrog time stepping for the linearly damped wave equation.

The damping term is treated with the centered difference
(u_next - u_prev) / (2 dt), which makes the update pointwise solvable and the
scheme dissipative for every nonnegative coefficient under the CFL bound.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import NonzeroOnBoundary, NumericBlowup
from .geometry import DomainMask, Grid

BLOWUP_FACTOR = 1e6


def cfl_timestep(grid: Grid, c_safety: float, dim: int = 2) -> float:
    """Stable time step c_safety * h / sqrt(dim); c_safety must be in (0, 0.9]."""
    if not 0.0 < c_safety <= 0.9:
        raise ValueError("c_safety must satisfy 0 < c_safety <= 0.9")
    return c_safety * grid.h / np.sqrt(dim)


def laplacian(u: np.ndarray, h: float) -> np.ndarray:
    """Five-point Laplacian on interior nodes; Dirichlet neighbors read as 0."""
    lap = np.zeros_like(u)
    lap[1:-1, 1:-1] = (
        u[2:, 1:-1] + u[:-2, 1:-1] + u[1:-1, 2:] + u[1:-1, :-2]
        - 4.0 * u[1:-1, 1:-1]
    ) / (h * h)
    return lap


@dataclass
class InitialData:
    """Displacement and velocity fields on the full grid, zero off fluid."""

    u0: np.ndarray
    u1: np.ndarray

    def validate(self, mask: DomainMask) -> None:
        off = ~mask.fluid
        if np.any(self.u0[off] != 0.0) or np.any(self.u1[off] != 0.0):
            raise NonzeroOnBoundary("initial data must vanish on Dirichlet nodes")


@dataclass
class WaveState:
    u_prev: np.ndarray
    u_curr: np.ndarray
    t: float
    dt: float
    step_index: int
    ref_max: float  # initial amplitude scale for the blowup guard


def init_state(data: InitialData, grid: Grid, mask: DomainMask,
               a_field: np.ndarray, dt: float) -> WaveState:
    """Second-order Taylor back-step so the first leapfrog step is consistent.

    u_prev = u0 - dt u1 + (dt^2 / 2)(lap u0 - a u1).
    """
    data.validate(mask)
    u0 = np.where(mask.fluid, data.u0, 0.0)
    u1 = np.where(mask.fluid, data.u1, 0.0)
    u_prev = u0 - dt * u1 + 0.5 * dt * dt * (laplacian(u0, grid.h) - a_field * u1)
    u_prev = np.where(mask.fluid, u_prev, 0.0)
    ref = float(max(np.abs(u0).max(), np.abs(u1).max(), 1e-300))
    return WaveState(u_prev=u_prev, u_curr=u0, t=0.0, dt=dt, step_index=0,
                     ref_max=ref)


def step(state: WaveState, a_field: np.ndarray, mask: DomainMask,
         grid: Grid) -> WaveState:
    """One leapfrog step; per fluid node, with alpha = a dt / 2:

    u_next = [2 u - (1 - alpha) u_prev + dt^2 lap u] / (1 + alpha).
    """
    dt = state.dt
    alpha = 0.5 * dt * a_field
    lap = laplacian(state.u_curr, grid.h)
    u_next = (2.0 * state.u_curr - (1.0 - alpha) * state.u_prev
              + dt * dt * lap) / (1.0 + alpha)
    u_next = np.where(mask.fluid, u_next, 0.0)
    mx = float(np.abs(u_next).max())
    if mx > BLOWUP_FACTOR * state.ref_max:
        raise NumericBlowup(
            f"|u| reached {mx:g} at t={state.t + dt:g}; check CFL and mask")
    return replace(state, u_prev=state.u_curr, u_curr=u_next,
                   t=state.t + dt, step_index=state.step_index + 1)


def velocity(state: WaveState) -> np.ndarray:
    """Backward-difference velocity (u_curr - u_prev) / dt, offset by dt/2."""
    return (state.u_curr - state.u_prev) / state.dt


def apply_generator(data: InitialData, a_field: np.ndarray, grid: Grid,
                    mask: DomainMask) -> InitialData:
    """(u0, u1) -> (u1, lap u0 - a u1), the first-order-system generator.

    Iterating n times yields initial data whose solution is the n-th time
    derivative of the original one.
    """
    u0 = np.where(mask.fluid, data.u0, 0.0)
    u1 = np.where(mask.fluid, data.u1, 0.0)
    new1 = laplacian(u0, grid.h) - a_field * u1
    return InitialData(u0=u1, u1=np.where(mask.fluid, new1, 0.0))
