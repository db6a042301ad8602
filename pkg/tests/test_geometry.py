import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from attenua.errors import ObstacleTouchesBox
from attenua.geometry import (
    DIRICHLET_OUTER,
    FLUID,
    OBSTACLE,
    Disk,
    Grid,
    Obstacle,
    build_mask,
    min_fluid_radius,
    signed_distance,
)

UNIT_DISK = Obstacle(disks=(Disk(center=(0.0, 0.0), radius=1.0),))
TWO_DISKS = Obstacle(disks=(Disk(center=(-3.0, 0.0), radius=1.0),
                            Disk(center=(3.0, 0.0), radius=1.0)))


class TestSignedDistance:
    def test_outside_unit_disk(self):
        assert signed_distance(UNIT_DISK, np.array([2.0, 0.0])) == pytest.approx(1.0)

    def test_center_of_unit_disk(self):
        assert signed_distance(UNIT_DISK, np.array([0.0, 0.0])) == pytest.approx(-1.0)

    def test_union_takes_min(self):
        assert signed_distance(TWO_DISKS, np.array([0.0, 0.0])) == pytest.approx(2.0)

    def test_no_obstacle_is_infinite(self):
        assert signed_distance(Obstacle(), np.array([5.0, 5.0])) == np.inf

    def test_vectorized_matches_scalar(self):
        pts = np.array([[2.0, 0.0], [0.0, 0.0], [0.5, 0.5]])
        out = signed_distance(UNIT_DISK, pts)
        for p, v in zip(pts, out):
            assert v == pytest.approx(signed_distance(UNIT_DISK, p))

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
    def test_lipschitz_along_segments(self, x0, y0, x1, y1):
        a = signed_distance(TWO_DISKS, np.array([x0, y0]))
        b = signed_distance(TWO_DISKS, np.array([x1, y1]))
        assert abs(a - b) <= np.hypot(x1 - x0, y1 - y0) + 1e-12


class TestGrid:
    def test_origin_is_a_node(self):
        g = Grid(h=0.5, r_max=1.0)
        assert g.n == 5
        assert 0.0 in g.axis

    def test_rejects_non_integer_ratio(self):
        with pytest.raises(ValueError):
            Grid(h=0.3, r_max=1.0)

    def test_rejects_even_node_count(self):
        with pytest.raises(ValueError):
            Grid(h=2.0 / 3.0, r_max=1.0)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            Grid(h=-0.1, r_max=1.0)


class TestBuildMask:
    def test_empty_obstacle_all_interior_fluid(self):
        g = Grid(h=0.5, r_max=1.0)
        m = build_mask(Obstacle(), g)
        assert m.count(DIRICHLET_OUTER) == 4 * (g.n - 1)
        assert m.n_fluid == (g.n - 2) ** 2
        assert m.count(OBSTACLE) == 0

    def test_obstacle_node_count_matches_area(self):
        # brute-force point-in-disk count equals pi r^2 / h^2 within 3%
        g = Grid(h=0.05, r_max=4.0)
        m = build_mask(UNIT_DISK, g)
        expected = np.pi / 0.05**2
        assert abs(m.count(OBSTACLE) - expected) <= 0.03 * expected

    def test_margin_violation_raises(self):
        g = Grid(h=0.05, r_max=4.0)
        bad = Obstacle(disks=(Disk(center=(3.9, 0.0), radius=0.5),))
        with pytest.raises(ObstacleTouchesBox):
            build_mask(bad, g)

    def test_deterministic(self):
        g = Grid(h=0.1, r_max=4.0)
        m1 = build_mask(UNIT_DISK, g)
        m2 = build_mask(UNIT_DISK, g)
        assert np.array_equal(m1.tags, m2.tags)

    def test_fluid_neighbors_are_fluid_or_dirichlet(self):
        g = Grid(h=0.1, r_max=4.0)
        m = build_mask(UNIT_DISK, g)
        fi, fj = np.nonzero(m.fluid)
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            assert np.all(m.tags[fi + di, fj + dj] != OBSTACLE)

    def test_refinement_preserves_far_fluid_nodes(self):
        coarse = Grid(h=0.1, r_max=4.0)
        fine = Grid(h=0.05, r_max=4.0)
        mc = build_mask(UNIT_DISK, coarse)
        mf = build_mask(UNIT_DISK, fine)
        pts = coarse.points()
        sd = signed_distance(UNIT_DISK, pts)
        far_fluid = mc.fluid & (sd > 2.0 * coarse.h)
        fi, fj = np.nonzero(far_fluid)
        # the same physical point on the fine grid has doubled indices
        assert np.all(mf.tags[2 * fi, 2 * fj] != OBSTACLE)

    def test_min_fluid_radius_positive_with_origin_obstacle(self):
        g = Grid(h=1.0 / 16.0, r_max=4.0)
        m = build_mask(UNIT_DISK, g)
        r = min_fluid_radius(g, m)
        assert r > 1.0

    def test_fluid_index_is_compact(self):
        g = Grid(h=0.25, r_max=4.0)
        m = build_mask(UNIT_DISK, g)
        idx = m.fluid_index[m.fluid]
        assert sorted(idx) == list(range(m.n_fluid))
