"""Damping coefficients a(x) >= 0 and the control region where a exceeds eps0."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import DomainMask, Grid

RADIAL_PLATEAU = "radial_plateau"
CONSTANT = "constant"
ANNULUS = "annulus"
TABLE = "table"

_KINDS = (RADIAL_PLATEAU, CONSTANT, ANNULUS, TABLE)


def smoothstep(t):
    """Cubic smoothstep, C1, monotone from 0 at t<=0 to 1 at t>=1."""
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


@dataclass(frozen=True)
class DampingProfile:
    """Nonnegative bounded damping coefficient.

    radial_plateau: 0 inside |x| <= L - transition_width, a_max for |x| >= L,
    cubic-smoothstep ramp in between. annulus: a_max on r_lo <= |x| <= r_hi
    (smooth shoulders of the same width), 0 far outside; deliberately violates
    the positivity-at-infinity hypothesis for negative tests. table: explicit
    per-node values.
    """

    kind: str
    eps0: float
    L: float
    a_max: float
    transition_width: float = 1.0
    r_lo: float = 0.0
    r_hi: float = 0.0
    table: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown damping kind {self.kind!r}")
        if self.a_max < 0.0 or self.eps0 < 0.0:
            raise ValueError("a_max and eps0 must be nonnegative")

    def __call__(self, x):
        return eval_damping(self, x)


def eval_damping(profile: DampingProfile, x) -> np.ndarray | float:
    """Evaluate a(x); vectorized over points with trailing axis 2."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = x[None, :] if single else x
    r = np.linalg.norm(pts, axis=-1)
    if profile.kind == CONSTANT:
        out = np.full_like(r, profile.a_max)
    elif profile.kind == RADIAL_PLATEAU:
        w = max(profile.transition_width, 1e-300)
        out = profile.a_max * smoothstep((r - (profile.L - profile.transition_width)) / w)
    elif profile.kind == ANNULUS:
        w = max(profile.transition_width, 1e-300)
        rise = smoothstep((r - (profile.r_lo - w)) / w)
        fall = smoothstep((profile.r_hi + w - r) / w)
        out = profile.a_max * np.minimum(rise, fall)
    else:  # TABLE evaluated off-grid makes no sense; callers use node_values
        raise ValueError("TABLE profiles are defined per-node; use node_values")
    return float(out[0]) if single else out


def node_values(profile: DampingProfile, grid: Grid) -> np.ndarray:
    """Per-node damping field on the full grid."""
    if profile.kind == TABLE:
        if profile.table is None or profile.table.shape != (grid.n, grid.n):
            raise ValueError("table profile requires a (n, n) value array")
        return np.asarray(profile.table, dtype=float)
    return eval_damping(profile, grid.points())


@dataclass
class HypAReport:
    holds: bool
    violating_node: tuple[float, float] | None = None
    violating_value: float | None = None


def verify_hyp_a(profile: DampingProfile, grid: Grid, mask: DomainMask) -> HypAReport:
    """Check a(x) > eps0 strictly on every fluid node with |x| >= L."""
    a = node_values(profile, grid)
    r = grid.radius()
    far = mask.fluid & (r >= profile.L)
    bad = far & ~(a > profile.eps0)
    if not bad.any():
        return HypAReport(holds=True)
    i, j = np.argwhere(bad)[0]
    pt = grid.points()[i, j]
    return HypAReport(holds=False, violating_node=(float(pt[0]), float(pt[1])),
                      violating_value=float(a[i, j]))


@dataclass
class OmegaMask:
    """Node-wise control region: fluid nodes with a(x) > eps0."""

    in_omega: np.ndarray  # (n, n) bool, False off fluid
    grid: Grid

    def contains(self, x) -> bool:
        """Nearest-node membership lookup for off-grid points."""
        x = np.asarray(x, dtype=float)
        i = int(round((x[0] + self.grid.r_max) / self.grid.h))
        j = int(round((x[1] + self.grid.r_max) / self.grid.h))
        n = self.grid.n
        if not (0 <= i < n and 0 <= j < n):
            return False
        return bool(self.in_omega[i, j])


def omega_mask(profile: DampingProfile, grid: Grid, mask: DomainMask) -> OmegaMask:
    a = node_values(profile, grid)
    return OmegaMask(in_omega=mask.fluid & (a > profile.eps0), grid=grid)


def omega_threshold_radius(profile: DampingProfile, tol: float = 1e-12) -> float:
    """Radius r* with a(r) > eps0 exactly for r > r*, for radial profiles.

    Solved by bisection on the radial ramp; the analytic descriptor used by
    the ray checker so it stays independent of the PDE grid.
    """
    if profile.kind == CONSTANT:
        return 0.0 if profile.a_max > profile.eps0 else np.inf
    if profile.kind != RADIAL_PLATEAU:
        raise ValueError("threshold radius is defined for radial profiles only")
    if profile.a_max <= profile.eps0:
        return np.inf
    if profile.eps0 <= 0.0:
        return profile.L - profile.transition_width
    lo = profile.L - profile.transition_width
    hi = profile.L
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if eval_damping(profile, np.array([mid, 0.0])) > profile.eps0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
