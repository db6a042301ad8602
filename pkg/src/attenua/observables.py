"""Functionals on states and initial data: energies, norms, multiplier, ratios.

All integrals are plain node sums times h^2; consistency with the solver's
discrete dissipation identity is prioritized over quadrature order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .damping import smoothstep
from .errors import BadWeightConstant, DegenerateWindow
from .geometry import DomainMask, Grid, min_fluid_radius
from .solver import InitialData, WaveState, apply_generator, laplacian, velocity


def grad_dot(u: np.ndarray, w: np.ndarray) -> float:
    """Sum over forward-difference edges of du * dw (fields zero off fluid).

    Multiplied by nothing: in 2-D, sum_edges (du/h)(dw/h) h^2 = sum_edges du dw.
    Exact summation-by-parts partner of the five-point Laplacian.
    """
    s = float(np.sum(np.diff(u, axis=0) * np.diff(w, axis=0)))
    s += float(np.sum(np.diff(u, axis=1) * np.diff(w, axis=1)))
    return s


def centered_gradient(u: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Node-collocated centered gradient, zero on the outer ring."""
    gx = np.zeros_like(u)
    gy = np.zeros_like(u)
    gx[1:-1, :] = (u[2:, :] - u[:-2, :]) / (2.0 * h)
    gy[:, 1:-1] = (u[:, 2:] - u[:, :-2]) / (2.0 * h)
    return gx, gy


def energy(state: WaveState, grid: Grid, mask: DomainMask) -> float:
    """Scheme-compatible discrete energy at the half step.

    E = 1/2 [ sum_edges (D u_curr)(D u_prev) + h^2 sum v^2 ] with v the
    backward-difference velocity. The gradient product (rather than a plain
    square) is what makes the per-step dissipation identity exact.
    """
    v = velocity(state)
    h2 = grid.h * grid.h
    return 0.5 * (grad_dot(state.u_curr, state.u_prev) + h2 * float(np.sum(v * v)))


def dissipation_step_centered(old: WaveState, new: WaveState,
                              a_field: np.ndarray, grid: Grid) -> float:
    """Exact per-step dissipation dt h^2 sum a vc^2, vc the centered velocity.

    Satisfies energy(new) - energy(old) = -(this value) to rounding.
    """
    vc = (new.u_curr - old.u_prev) / (2.0 * old.dt)
    return old.dt * grid.h * grid.h * float(np.sum(a_field * vc * vc))


def dissipation_step_backward(new: WaveState, a_field: np.ndarray,
                              grid: Grid) -> float:
    """Observable-convention dissipation increment dt h^2 sum a v^2."""
    v = velocity(new)
    return new.dt * grid.h * grid.h * float(np.sum(a_field * v * v))


def l2_norm_sq(u: np.ndarray, grid: Grid) -> float:
    return grid.h * grid.h * float(np.sum(u * u))


def local_energy(state: WaveState, R: float, grid: Grid, mask: DomainMask) -> float:
    """Energy integrand restricted to nodes with |x| < R (nodal gradients)."""
    gx, gy = centered_gradient(state.u_curr, grid.h)
    v = velocity(state)
    sel = grid.radius() < R
    h2 = grid.h * grid.h
    return 0.5 * h2 * float(np.sum((gx * gx + gy * gy + v * v)[sel]))


# ---------------------------------------------------------------------------
# cutoff and multiplier functional

@dataclass
class Cutoff:
    """Radial cutoff: 1 on |x| <= L, 0 on |x| >= 2L, cubic-smoothstep ramp.

    Discrete gradient and Laplacian fields are precomputed once; k is the
    multiplier weight, defaulting to 8/eps0 + 1.
    """

    psi: np.ndarray
    grad_x: np.ndarray
    grad_y: np.ndarray
    lap: np.ndarray
    grad_sq: np.ndarray
    k: float
    L: float


def build_cutoff(grid: Grid, L: float, eps0: float, k: float | None = None) -> Cutoff:
    r = grid.radius()
    psi = 1.0 - smoothstep((r - L) / L)
    gx, gy = centered_gradient(psi, grid.h)
    lap = laplacian(psi, grid.h)
    if k is None:
        k = 8.0 / eps0 + 1.0
    return Cutoff(psi=psi, grad_x=gx, grad_y=gy, lap=lap,
                  grad_sq=gx * gx + gy * gy, k=k, L=L)


def multiplier_X(state: WaveState, cutoff: Cutoff, a_field: np.ndarray,
                 grid: Grid, mask: DomainMask) -> float:
    """X = int v_f dtv_f + 1/2 int a v_f^2 + k E, with v_f = (1 - psi) u."""
    one_m = 1.0 - cutoff.psi
    vf = one_m * state.u_curr
    dvf = one_m * velocity(state)
    h2 = grid.h * grid.h
    return (h2 * float(np.sum(vf * dvf))
            + 0.5 * h2 * float(np.sum(a_field * vf * vf))
            + cutoff.k * energy(state, grid, mask))


def multiplier_bounds(state: WaveState, cutoff: Cutoff, a_field: np.ndarray,
                      grid: Grid, mask: DomainMask, eps0: float) -> tuple[float, float, float]:
    """(lower, X, upper) for the two-sided multiplier estimate:

    (eps0/4) int v_f^2 + (k - 8/eps0) E  <=  X
        <=  (3/2) ||a||_inf int v_f^2 + (k + 2/eps0) E.
    """
    one_m = 1.0 - cutoff.psi
    vf = one_m * state.u_curr
    h2 = grid.h * grid.h
    int_vf2 = h2 * float(np.sum(vf * vf))
    E = energy(state, grid, mask)
    X = multiplier_X(state, cutoff, a_field, grid, mask)
    a_inf = float(a_field.max())
    lower = (eps0 / 4.0) * int_vf2 + (cutoff.k - 8.0 / eps0) * E
    upper = 1.5 * a_inf * int_vf2 + (cutoff.k + 2.0 / eps0) * E
    return lower, X, upper


def cutoff_identity_residual(state: WaveState, cutoff: Cutoff, grid: Grid,
                             mask: DomainMask) -> float:
    """Relative defect of the integration-by-parts identity

    int (2 grad(psi).grad(u) + u lap(psi)) (1 - psi) u = int |grad psi|^2 u^2,

    which holds exactly in the continuum and to discretization order here.
    """
    u = state.u_curr
    gx, gy = centered_gradient(u, grid.h)
    h2 = grid.h * grid.h
    lhs = h2 * float(np.sum(
        (2.0 * (cutoff.grad_x * gx + cutoff.grad_y * gy) + u * cutoff.lap)
        * (1.0 - cutoff.psi) * u))
    rhs = h2 * float(np.sum(cutoff.grad_sq * u * u))
    return abs(lhs - rhs) / max(rhs, np.finfo(float).eps)


# ---------------------------------------------------------------------------
# windowed observability quantities

def window_fields(state: WaveState, cutoff: Cutoff, a_field: np.ndarray,
                  grid: Grid) -> tuple[float, float]:
    """(E_w, g_obs) at the current step, for the empirical observability ratio.

    w = psi u; E_w its energy; g_obs = h^2 sum (a |dt w|^2 + |f|^2) with
    f = -2 grad(psi).grad(u) - u lap(psi).
    """
    u = state.u_curr
    v = velocity(state)
    w = cutoff.psi * u
    wv = cutoff.psi * v
    h2 = grid.h * grid.h
    E_w = 0.5 * (grad_dot(w, w) + h2 * float(np.sum(wv * wv)))
    gx, gy = centered_gradient(u, grid.h)
    f = -2.0 * (cutoff.grad_x * gx + cutoff.grad_y * gy) - u * cutoff.lap
    g = h2 * float(np.sum(a_field * wv * wv + f * f))
    return E_w, g


def observability_ratio(t: np.ndarray, E_w: np.ndarray, g_obs: np.ndarray,
                        start_index: int, T: float) -> float:
    """E_w(t) over the dissipation-plus-source integral on [t, t + T].

    Trapezoid rule over the recorded samples. Zero numerator with zero
    denominator is 0 by convention; a vanishing denominator against a
    positive numerator raises DegenerateWindow since it would falsify the
    bounded-observability inequality at this resolution.
    """
    t0 = t[start_index]
    sel = (t >= t0) & (t <= t0 + T)
    if sel.sum() < 2:
        raise ValueError("window too short for the recorded stride")
    _trapz = getattr(np, "trapezoid", None) or np.trapz
    denom = float(_trapz(g_obs[sel], t[sel]))
    num = float(E_w[start_index])
    if denom < np.finfo(float).eps:
        if num < np.finfo(float).eps:
            return 0.0
        raise DegenerateWindow(
            f"window at t={t0:g} has E_w={num:g} but zero dissipation integral")
    return num / denom


# ---------------------------------------------------------------------------
# initial-data functionals

def weight_field(grid: Grid, mask: DomainMask, B: float, dim: int = 2) -> np.ndarray:
    """The radial weight d(x): |x| for dim >= 3, |x| ln(B|x|) for dim = 2."""
    if B * min_fluid_radius(grid, mask) < 2.0 - 1e-12:
        raise BadWeightConstant(
            f"need B * inf|x| >= 2, got B={B:g}, inf|x|={min_fluid_radius(grid, mask):g}")
    r = grid.radius()
    if dim >= 3:
        return r
    with np.errstate(divide="ignore", invalid="ignore"):
        w = r * np.log(B * r)
    w[r == 0.0] = 0.0
    return w


def weighted_norm(data: InitialData, a_field: np.ndarray, grid: Grid,
                  mask: DomainMask, B: float, dim: int = 2) -> float:
    """L^2 norm of d(x) (u1 + a u0); finiteness buys the faster decay rate."""
    d = weight_field(grid, mask, B, dim)
    g = d * (data.u1 + a_field * data.u0)
    g = np.where(mask.fluid, g, 0.0)
    return math.sqrt(l2_norm_sq(g, grid))


def h_norm_sq(data: InitialData, grid: Grid) -> float:
    """Energy-space norm 1/2 int |grad u0|^2 + |u1|^2."""
    h2 = grid.h * grid.h
    return 0.5 * (grad_dot(data.u0, data.u0) + h2 * float(np.sum(data.u1 ** 2)))


@dataclass
class DataNorms:
    I0: float
    I1: float
    I0n: dict[int, float] = field(default_factory=dict)
    I1p: dict[int, float] = field(default_factory=dict)
    B: float = 2.0
    weighted: float = 0.0

    def normalizer(self, n: int, weighted: bool) -> float:
        if n == 0:
            return self.I1 if weighted else self.I0
        return self.I1p[n] if weighted else self.I0n[n]


def data_norms(data: InitialData, a_field: np.ndarray, grid: Grid,
               mask: DomainMask, n: int = 0, B: float = 2.0,
               with_weight: bool = True) -> DataNorms:
    """All initial-data functionals up to cascade depth n.

    I0 = ||u0||_{H^1}^2 + ||u1||^2; I1 adds the weighted norm squared;
    the cascade sums accumulate energy-space norms of generator iterates
    plus ||u0||^2 (and the weighted term for the weighted family).
    """
    h2 = grid.h * grid.h
    u0_l2 = l2_norm_sq(data.u0, grid)
    I0 = grad_dot(data.u0, data.u0) + u0_l2 + h2 * float(np.sum(data.u1 ** 2))
    wsq = 0.0
    if with_weight:
        wsq = weighted_norm(data, a_field, grid, mask, B) ** 2
    norms = DataNorms(I0=I0, I1=I0 + wsq, B=B, weighted=math.sqrt(wsq))

    acc = 0.0
    cur = data
    for i in range(n + 1):
        acc += h_norm_sq(cur, grid)
        norms.I0n[i] = acc + u0_l2
        norms.I1p[i] = acc + u0_l2 + wsq
        if i < n:
            cur = apply_generator(cur, a_field, grid, mask)
    return norms


# ---------------------------------------------------------------------------
# energy records

@dataclass
class EnergyRecord:
    t: float
    E: float
    l2_sq: float
    local_E: float
    dissipation_cum: float
    X: float


CSV_HEADER = "t,E,l2_sq,local_E,dissipation_cum,X"


def energy_balance_residual(t: np.ndarray, E: np.ndarray,
                            dissipation_cum: np.ndarray, T: float) -> float:
    """|E(T) + D(T) - E(0)| / E(0); the continuum identity predicts zero."""
    # tolerate rounding of the final accumulated step time past T
    idx = int(np.searchsorted(t, T + 1e-9 * max(1.0, abs(T)), side="right")) - 1
    if idx < 0:
        raise ValueError("series does not reach t=0")
    return abs(E[idx] + dissipation_cum[idx] - E[0]) / E[0]
