"""Specular billiard ray tracing and sampled geometric-control checks.

Rays move with speed 1 in the exterior of a disk union. Impacts are bracketed
by stepping at dt_ray and resolved by bisection on the analytic signed
distance, so the checker never touches the PDE grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Obstacle, signed_distance

TANGENT_TOL = 1e-6
IMPACT_TOL = 1e-10


@dataclass
class Ray:
    x: tuple[float, float]
    v: tuple[float, float]

    def __post_init__(self):
        vx, vy = self.v
        nrm = math.hypot(vx, vy)
        if nrm == 0.0:
            raise ValueError("ray direction must be nonzero")
        self.v = (vx / nrm, vy / nrm)


class OmegaRegion:
    """Analytic control-region descriptor: membership plus optional level set."""

    def contains(self, x, y) -> bool:  # pragma: no cover - interface
        raise NotImplementedError


@dataclass
class RadialOmega(OmegaRegion):
    """omega = {|x| > r_star}; the descriptor for radial plateau damping."""

    r_star: float

    def contains(self, x, y) -> bool:
        return math.hypot(x, y) > self.r_star


@dataclass
class PredicateOmega(OmegaRegion):
    fn: object  # callable (x, y) -> bool

    def contains(self, x, y) -> bool:
        return bool(self.fn(x, y))


@dataclass
class MaskOmega(OmegaRegion):
    """Nearest-node lookup in a grid OmegaMask (see damping.omega_mask)."""

    mask: object

    def contains(self, x, y) -> bool:
        return self.mask.contains(np.array([x, y]))


def reflect(v: tuple[float, float], n: tuple[float, float]) -> tuple[float, float]:
    """Specular reflection v' = v - 2 (v.n) n, renormalized to unit length."""
    dot = v[0] * n[0] + v[1] * n[1]
    wx = v[0] - 2.0 * dot * n[0]
    wy = v[1] - 2.0 * dot * n[1]
    nrm = math.hypot(wx, wy)
    return (wx / nrm, wy / nrm)


def _sd(obstacle: Obstacle, x: float, y: float) -> float:
    best = math.inf
    for d in obstacle.disks:
        cx, cy = d.center
        best = min(best, math.hypot(x - cx, y - cy) - d.radius)
    return best


def _active_disk(obstacle: Obstacle, x: float, y: float):
    best, bd = math.inf, None
    for d in obstacle.disks:
        cx, cy = d.center
        s = math.hypot(x - cx, y - cy) - d.radius
        if s < best:
            best, bd = s, d
    return bd


@dataclass
class Flight:
    """State of one ray advanced by the stepping engine."""

    x: float
    y: float
    vx: float
    vy: float
    t: float = 0.0
    path_length: float = 0.0
    tangential: bool = False
    reflections: int = 0


def _advance(fl: Flight, obstacle: Obstacle, tau: float, dt_ray: float,
             on_segment=None) -> None:
    """Advance a flight by time tau, handling impacts.

    Straight segments of length <= dt_ray are checked for a sign change of the
    signed distance; a crossing is resolved by bisection to IMPACT_TOL, the
    position snapped onto the active circle, and the velocity reflected.
    on_segment(fl, x0, y0, seg_t0, seg_len), when given, is called after each
    straight sub-segment.
    """
    remaining = tau
    guard = 0
    while remaining > 1e-15:
        step = min(dt_ray, remaining)
        x0, y0, t0 = fl.x, fl.y, fl.t
        x1 = x0 + fl.vx * step
        y1 = y0 + fl.vy * step
        if obstacle.disks and _sd(obstacle, x1, y1) < 0.0:
            lo, hi = 0.0, step
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                s = _sd(obstacle, x0 + fl.vx * mid, y0 + fl.vy * mid)
                if s < 0.0:
                    hi = mid
                else:
                    lo = mid
                if hi - lo < IMPACT_TOL:
                    break
            ti = 0.5 * (lo + hi)
            xi = x0 + fl.vx * ti
            yi = y0 + fl.vy * ti
            disk = _active_disk(obstacle, xi, yi)
            cx, cy = disk.center
            dx, dy = xi - cx, yi - cy
            dn = math.hypot(dx, dy)
            nx, ny = dx / dn, dy / dn
            # snap exactly onto the circle
            xi = cx + disk.radius * nx
            yi = cy + disk.radius * ny
            if abs(fl.vx * nx + fl.vy * ny) < TANGENT_TOL:
                fl.tangential = True
            fl.vx, fl.vy = reflect((fl.vx, fl.vy), (nx, ny))
            fl.x, fl.y = xi, yi
            fl.t = t0 + ti
            fl.path_length += ti
            fl.reflections += 1
            remaining -= ti
            if on_segment is not None and ti > 0.0:
                on_segment(fl, x0, y0, t0, ti)
            guard += 1
            if guard > 100000:
                raise RuntimeError("impact loop did not terminate")
        else:
            fl.x, fl.y = x1, y1
            fl.t = t0 + step
            fl.path_length += step
            remaining -= step
            if on_segment is not None:
                on_segment(fl, x0, y0, t0, step)


@dataclass
class Trajectory:
    samples: list = field(default_factory=list)  # (t, (x, y), (vx, vy))
    tangential: bool = False
    path_length: float = 0.0


def trace_ray(ray: Ray, obstacle: Obstacle, dt_ray: float, t_max: float) -> Trajectory:
    """Trace a billiard ray for time t_max, recording every sub-segment end."""
    fl = Flight(ray.x[0], ray.x[1], ray.v[0], ray.v[1])
    traj = Trajectory()
    traj.samples.append((0.0, (fl.x, fl.y), (fl.vx, fl.vy)))

    def rec(f: Flight, x0, y0, t0, seg):
        traj.samples.append((f.t, (f.x, f.y), (f.vx, f.vy)))

    _advance(fl, obstacle, t_max, dt_ray, on_segment=rec)
    traj.tangential = fl.tangential
    traj.path_length = fl.path_length
    return traj


def time_to_omega(ray: Ray, obstacle: Obstacle, omega: OmegaRegion, T: float,
                  dt_ray: float):
    """First entry time into omega before T, or None.

    Returns (entry_time_or_None, tangential_flag). Entry inside a straight
    sub-segment is refined by bisection on the membership predicate; entries
    coinciding with a reflection sub-step keep the sub-step resolution.
    """
    if omega.contains(ray.x[0], ray.x[1]):
        return 0.0, False
    fl = Flight(ray.x[0], ray.x[1], ray.v[0], ray.v[1])
    found: list[float] = []

    def check(f: Flight, x0, y0, t0, seg):
        if found:
            return
        if omega.contains(f.x, f.y):
            vx, vy = f.vx, f.vy
            # endpoint velocity equals segment velocity: segment is straight
            lo, hi = 0.0, seg
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if omega.contains(x0 + vx * mid, y0 + vy * mid):
                    hi = mid
                else:
                    lo = mid
            found.append(t0 + hi)

    _advance(fl, obstacle, T, dt_ray, on_segment=check)
    if found and found[0] < T:
        return found[0], fl.tangential
    return None, fl.tangential


@dataclass
class GccReport:
    controlled: bool
    T: float
    max_entry_time: float        # inf if some sampled ray never enters
    worst_ray: Ray | None
    samples: int
    low_confidence_fraction: float = 0.0

    def to_dict(self) -> dict:
        return {
            "controlled": self.controlled,
            "T": self.T,
            "max_entry_time": self.max_entry_time,
            "worst_ray": None if self.worst_ray is None else {
                "x": list(self.worst_ray.x), "v": list(self.worst_ray.v)},
            "samples": self.samples,
            "low_confidence_fraction": self.low_confidence_fraction,
        }


def _position_samples(obstacle: Obstacle, omega: OmegaRegion, L: float,
                      n_pos: int, include_omega: bool = False) -> list[tuple[float, float]]:
    """Grid over B_L (excluding omega unless asked) plus boundary-offset points."""
    m = max(3, math.ceil(math.sqrt(n_pos)))
    if m % 2 == 0:
        m += 1  # odd count keeps the axes (x=0, y=0) in the sample set
    pts: list[tuple[float, float]] = []
    coords = np.linspace(-L, L, m)
    for x in coords:
        for y in coords:
            if math.hypot(x, y) > L:
                continue
            if obstacle.disks and _sd(obstacle, x, y) <= 1e-9:
                continue
            if not include_omega and omega.contains(x, y):
                continue
            pts.append((float(x), float(y)))
    off = 1e-3
    n_off = max(16, m)
    for d in obstacle.disks:
        cx, cy = d.center
        for k in range(n_off):
            th = 2.0 * math.pi * k / n_off
            x = cx + (d.radius + off) * math.cos(th)
            y = cy + (d.radius + off) * math.sin(th)
            if math.hypot(x, y) > L:
                continue
            if _sd(obstacle, x, y) <= 0.0:
                continue
            if not include_omega and omega.contains(x, y):
                continue
            pts.append((x, y))
    return pts


def _directions(n_dir: int) -> list[tuple[float, float]]:
    return [(math.cos(2.0 * math.pi * k / n_dir), math.sin(2.0 * math.pi * k / n_dir))
            for k in range(n_dir)]


def _scan(positions, directions, obstacle, omega, T, dt_ray) -> GccReport:
    worst: Ray | None = None
    max_entry = 0.0
    any_missed = False
    n_low = 0
    total = 0
    for p in positions:
        for v in directions:
            total += 1
            ray = Ray(p, v)
            entry, tang = time_to_omega(ray, obstacle, omega, T, dt_ray)
            if tang:
                n_low += 1
            if entry is None:
                any_missed = True
                worst = ray
                max_entry = math.inf
            elif max_entry < math.inf and entry > max_entry:
                max_entry = entry
                worst = ray
    controlled = (not any_missed) and max_entry < T
    return GccReport(controlled=controlled, T=T, max_entry_time=max_entry,
                     worst_ray=worst, samples=total,
                     low_confidence_fraction=(n_low / total) if total else 0.0)


def check_gcc(obstacle: Obstacle, omega: OmegaRegion, T: float,
              n_pos: int, n_dir: int, L: float, dt_ray: float) -> GccReport:
    """Sampled geometric-control check over B_L.

    Sampling can only falsify or support control, never prove it; the report
    carries the sample count so callers can demand density.
    """
    if n_pos < 16 or n_dir < 16:
        raise ValueError("sampling counts must be >= 16")
    positions = _position_samples(obstacle, omega, L, n_pos)
    if not positions:
        # everything in B_L already sits in omega
        return GccReport(controlled=True, T=T, max_entry_time=0.0,
                         worst_ray=None, samples=0)
    return _scan(positions, _directions(n_dir), obstacle, omega, T, dt_ray)


def check_localized_gcc(obstacle: Obstacle, omega: OmegaRegion, L: float, T: float,
                        n_pos: int, n_dir: int, dt_ray: float) -> GccReport:
    """Check that rays started in B_L enter omega_1 = omega intersect B_{2L}.

    Implements the localization dichotomy: a ray that stays in B_L must meet
    omega inside B_L; one that leaves crosses the annulus L <= |x| <= 2L,
    which lies in omega when damping is positive at infinity.
    """
    if n_pos < 16 or n_dir < 16:
        raise ValueError("sampling counts must be >= 16")
    omega1 = PredicateOmega(
        lambda x, y: omega.contains(x, y) and math.hypot(x, y) <= 2.0 * L)
    positions = _position_samples(obstacle, omega1, L, n_pos, include_omega=True)
    if not positions:
        return GccReport(controlled=True, T=T, max_entry_time=0.0,
                         worst_ray=None, samples=0)
    return _scan(positions, _directions(n_dir), obstacle, omega1, T, dt_ray)
