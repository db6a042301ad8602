"""Truncated exterior computational domain: disk obstacles, uniform grid, node tags.

The physical domain is the exterior of a union of closed disks, truncated to
the box [-r_max, r_max]^2 with homogeneous Dirichlet conditions on the box
boundary and on a staircase band around each obstacle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyFluid, ObstacleTouchesBox

# node tags
FLUID = 0
OBSTACLE = 1
DIRICHLET_INNER = 2
DIRICHLET_OUTER = 3


@dataclass(frozen=True)
class Disk:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("disk radius must be positive")


@dataclass(frozen=True)
class Obstacle:
    """Union of closed disks; the complement is the propagation domain."""

    disks: tuple[Disk, ...] = ()
    dim: int = 2

    @property
    def min_radius(self) -> float:
        if not self.disks:
            return np.inf
        return min(d.radius for d in self.disks)


def signed_distance(obstacle: Obstacle, x) -> np.ndarray | float:
    """Signed distance to the obstacle union: negative inside, positive outside.

    For a disk union this is exactly min_i(|x - c_i| - r_i). Accepts a single
    point of shape (2,) or an array of points with trailing axis 2.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = x[None, :] if single else x
    if not obstacle.disks:
        out = np.full(pts.shape[:-1], np.inf)
    else:
        dists = []
        for d in obstacle.disks:
            c = np.asarray(d.center, dtype=float)
            dists.append(np.linalg.norm(pts - c, axis=-1) - d.radius)
        out = np.min(dists, axis=0)
    return float(out[0]) if single else out


@dataclass(frozen=True)
class Grid:
    """Uniform Cartesian grid on [-r_max, r_max]^2 with odd node count per axis."""

    h: float
    r_max: float

    def __post_init__(self):
        if self.h <= 0.0 or self.r_max <= 0.0:
            raise ValueError("h and r_max must be positive")
        ratio = 2.0 * self.r_max / self.h
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("2*r_max/h must be an integer so the origin is a node")
        if round(ratio) % 2 != 0:
            raise ValueError("node count per axis must be odd")

    @property
    def n(self) -> int:
        return int(round(2.0 * self.r_max / self.h)) + 1

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.r_max, self.r_max, self.n)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        c = self.axis
        return np.meshgrid(c, c, indexing="ij")

    def points(self) -> np.ndarray:
        """All node coordinates, shape (n, n, 2)."""
        X, Y = self.mesh()
        return np.stack([X, Y], axis=-1)

    def radius(self) -> np.ndarray:
        X, Y = self.mesh()
        return np.hypot(X, Y)


@dataclass
class DomainMask:
    """Per-node classification plus a compact linear index for fluid nodes."""

    tags: np.ndarray            # (n, n) int8
    fluid: np.ndarray = field(init=False)      # (n, n) bool
    fluid_index: np.ndarray = field(init=False)  # (n, n) int, -1 off fluid

    def __post_init__(self):
        self.fluid = self.tags == FLUID
        self.fluid_index = np.full(self.tags.shape, -1, dtype=np.int64)
        self.fluid_index[self.fluid] = np.arange(int(self.fluid.sum()))

    @property
    def n_fluid(self) -> int:
        return int(self.fluid.sum())

    def count(self, tag: int) -> int:
        return int((self.tags == tag).sum())


def build_mask(obstacle: Obstacle, grid: Grid) -> DomainMask:
    """Classify every grid node.

    OBSTACLE: strictly inside the disk union. DIRICHLET_INNER: outside the
    union but stencil-adjacent to an obstacle node (the staircase boundary).
    DIRICHLET_OUTER: the box boundary ring. Everything else is FLUID.
    """
    for d in obstacle.disks:
        if np.hypot(*d.center) + d.radius >= grid.r_max - 4.0 * grid.h:
            raise ObstacleTouchesBox(
                f"disk at {d.center} r={d.radius} too close to the box "
                f"(need |c|+r < r_max - 4h = {grid.r_max - 4.0 * grid.h:g})"
            )

    pts = grid.points()
    sd = signed_distance(obstacle, pts)
    n = grid.n
    tags = np.zeros((n, n), dtype=np.int8)
    obs = sd < 0.0
    tags[obs] = OBSTACLE

    # staircase Dirichlet band: non-obstacle nodes with an obstacle neighbor
    nb = np.zeros((n, n), dtype=bool)
    nb[1:, :] |= obs[:-1, :]
    nb[:-1, :] |= obs[1:, :]
    nb[:, 1:] |= obs[:, :-1]
    nb[:, :-1] |= obs[:, 1:]
    inner = nb & ~obs
    tags[inner] = DIRICHLET_INNER

    tags[0, :] = DIRICHLET_OUTER
    tags[-1, :] = DIRICHLET_OUTER
    tags[:, 0] = DIRICHLET_OUTER
    tags[:, -1] = DIRICHLET_OUTER

    mask = DomainMask(tags=tags)
    if mask.n_fluid == 0:
        raise EmptyFluid("no FLUID node in the classification")
    return mask


def min_fluid_radius(grid: Grid, mask: DomainMask) -> float:
    """Smallest |x| over fluid nodes; the discrete stand-in for inf_{x in domain}|x|."""
    r = grid.radius()
    return float(r[mask.fluid].min())
