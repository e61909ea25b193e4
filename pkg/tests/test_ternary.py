import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coos.errors import DomainError
from coos.ternary import (
    AXES,
    AxisConstraint,
    Segment,
    SimplexRegion,
    TernaryPoint,
    centroid,
    clip_region,
    constant_coordinate_intersection,
    convex_hull,
    embed,
    embedded_distance,
    to_ternary,
)

nonneg = st.floats(min_value=0.0, max_value=1e6, allow_nan=False, allow_infinity=False)


def raw_triples():
    return st.tuples(nonneg, nonneg, nonneg)


def assert_simplex(p: TernaryPoint, tol=1e-9):
    assert abs(p.a + p.b + p.c - 1.0) <= tol
    assert min(p.a, p.b, p.c) >= -1e-12


class TestToTernary:
    def test_proportional(self):
        p = to_ternary((2, 3, 5))
        assert p.as_tuple() == (0.2, 0.3, 0.5)

    def test_degenerate_zero_maps_to_center(self):
        assert to_ternary((0, 0, 0)).as_tuple() == (1 / 3, 1 / 3, 1 / 3)

    def test_vertex_fixed_point(self):
        assert to_ternary((1, 0, 0)).as_tuple() == (1.0, 0.0, 0.0)

    @pytest.mark.parametrize("bad", [(-1, 0, 1), (float("nan"), 1, 1), (float("inf"), 1, 1)])
    def test_rejects_bad_components(self, bad):
        with pytest.raises(DomainError):
            to_ternary(bad)

    @given(raw_triples(), st.floats(min_value=1e-3, max_value=1e3))
    @settings(max_examples=200)
    def test_scale_invariant(self, raw, k):
        p = to_ternary(raw)
        q = to_ternary(tuple(k * v for v in raw))
        assert p.l1_distance(q) < 3e-12

    @given(raw_triples())
    def test_result_on_simplex(self, raw):
        assert_simplex(to_ternary(raw))


class TestCentroid:
    def test_vertex_symmetry(self):
        pts = [TernaryPoint(1, 0, 0), TernaryPoint(0, 1, 0), TernaryPoint(0, 0, 1)]
        c = centroid(pts)
        assert c.l1_distance(TernaryPoint(1 / 3, 1 / 3, 1 / 3)) < 1e-12

    def test_singleton_identity(self):
        p = TernaryPoint(0.6, 0.2, 0.2)
        assert centroid([p]).l1_distance(p) < 1e-12

    def test_weighted_hand_oracle(self):
        # (1*(1,0,0) + 3*(0,1,0)) / 4 = (0.25, 0.75, 0)
        c = centroid([TernaryPoint(1, 0, 0), TernaryPoint(0, 1, 0)], [1, 3])
        assert c.l1_distance(TernaryPoint(0.25, 0.75, 0.0)) < 1e-12

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            centroid([])

    def test_zero_weight_rejected(self):
        with pytest.raises(DomainError):
            centroid([TernaryPoint(1, 0, 0)], [0.0])

    @given(st.lists(raw_triples(), min_size=1, max_size=8), st.randoms())
    @settings(max_examples=100)
    def test_permutation_invariant_and_bounded(self, raws, rnd):
        pts = [to_ternary(r) for r in raws]
        shuffled = list(pts)
        rnd.shuffle(shuffled)
        c1, c2 = centroid(pts), centroid(shuffled)
        assert c1.l1_distance(c2) < 1e-12
        for axis in AXES:
            vals = [p.coordinate(axis) for p in pts]
            assert min(vals) - 1e-12 <= c1.coordinate(axis) <= max(vals) + 1e-12


class TestConstantCoordinateIntersection:
    P = TernaryPoint(0.6, 0.2, 0.2)
    Q = TernaryPoint(0.2, 0.5, 0.3)

    def test_outside_simplex_returns_none(self):
        assert constant_coordinate_intersection(self.P, "a", self.Q, "b") is None

    def test_hand_oracle(self):
        x = constant_coordinate_intersection(self.P, "c", self.Q, "b")
        assert x is not None
        assert x.l1_distance(TernaryPoint(0.3, 0.5, 0.2)) < 1e-12

    def test_coincident_point(self):
        p = TernaryPoint(0.4, 0.3, 0.3)
        for ap in AXES:
            for aq in AXES:
                if ap == aq:
                    continue
                x = constant_coordinate_intersection(p, ap, p, aq)
                assert x is not None
                assert x.l1_distance(p) < 1e-12

    def test_same_axis_rejected(self):
        with pytest.raises(DomainError):
            constant_coordinate_intersection(self.P, "a", self.Q, "a")

    @given(raw_triples(), raw_triples())
    @settings(max_examples=300)
    def test_brute_force_classification(self, r1, r2):
        # Independent oracle: for each ordered axis pair, the remaining
        # coordinate is 1 - p[i] - q[j]; valid iff that is >= -1e-12.
        p, q = to_ternary(r1), to_ternary(r2)
        for i, ap in enumerate(AXES):
            for j, aq in enumerate(AXES):
                if i == j:
                    continue
                remaining = 1.0 - p.as_tuple()[i] - q.as_tuple()[j]
                got = constant_coordinate_intersection(p, ap, q, aq)
                if remaining < -1e-12:
                    assert got is None
                else:
                    assert got is not None
                    assert abs(got.as_tuple()[i] - p.as_tuple()[i]) < 1e-12
                    assert abs(got.as_tuple()[j] - q.as_tuple()[j]) < 1e-12
                    assert_simplex(got)


class TestClipRegion:
    def test_extreme_bound_single_vertex(self):
        r = clip_region(SimplexRegion.full(), AxisConstraint("a", "min", 1.0))
        assert len(r.vertices) == 1
        assert r.vertices[0].l1_distance(TernaryPoint(1, 0, 0)) < 1e-9
        assert r.area() == 0.0

    def test_vacuous_bound(self):
        full = SimplexRegion.full()
        r = clip_region(full, AxisConstraint("a", "min", 0.0))
        assert r == full

    def test_half_cut_hand_oracle(self):
        r = clip_region(SimplexRegion.full(), AxisConstraint("a", "min", 0.5))
        expect = {(0.5, 0.5, 0.0), (1.0, 0.0, 0.0), (0.5, 0.0, 0.5)}
        got = {tuple(round(v, 12) for v in p.as_tuple()) for p in r.vertices}
        assert got == expect

    def test_contradictory_bounds_empty(self):
        r = clip_region(SimplexRegion.full(), AxisConstraint("a", "min", 0.9))
        r = clip_region(r, AxisConstraint("a", "max", 0.1))
        assert r.is_empty
        assert r.area() == 0.0

    @given(
        st.lists(st.tuples(st.sampled_from(AXES), st.sampled_from(["min", "max"]),
                           st.floats(min_value=0.0, max_value=1.0)), min_size=0, max_size=4),
        st.sampled_from(AXES),
        st.sampled_from(["min", "max"]),
        st.floats(min_value=0.0, max_value=1.0),
    )
    @settings(max_examples=200)
    def test_idempotent_and_monotone(self, pre, axis, kind, value):
        region = SimplexRegion.full()
        for a, k, v in pre:
            region = clip_region(region, AxisConstraint(a, k, v))
        before = region.area()
        c = AxisConstraint(axis, kind, value)
        once = clip_region(region, c)
        twice = clip_region(once, c)
        assert once.area() <= before + 1e-12
        assert twice.vertices == once.vertices
        for v_ in once.vertices:
            assert_simplex(v_)


class TestSegment:
    def test_held_coordinate_must_agree(self):
        with pytest.raises(DomainError):
            Segment(TernaryPoint(0.5, 0.3, 0.2), TernaryPoint(0.2, 0.5, 0.3), held_coordinate="a")

    def test_held_coordinate_ok(self):
        s = Segment(TernaryPoint(0.5, 0.3, 0.2), TernaryPoint(0.5, 0.2, 0.3), held_coordinate="a")
        assert s.length() > 0


class TestEmbedding:
    def test_vertices(self):
        ax, ay = embed(TernaryPoint(1, 0, 0))
        assert (ax, ay) == (0.0, 1.0)
        bx, by = embed(TernaryPoint(0, 1, 0))
        assert bx == pytest.approx(-math.sqrt(3) / 2)
        assert by == -0.5

    def test_edge_length(self):
        d = embedded_distance(TernaryPoint(1, 0, 0), TernaryPoint(0, 1, 0))
        assert d == pytest.approx(math.sqrt(3))


class TestConvexHull:
    def test_interior_point_dropped(self):
        pts = [
            TernaryPoint(1, 0, 0),
            TernaryPoint(0, 1, 0),
            TernaryPoint(0, 0, 1),
            TernaryPoint(1 / 3, 1 / 3, 1 / 3),
        ]
        hull = convex_hull(pts)
        assert len(hull.vertices) == 3

    def test_two_points(self):
        hull = convex_hull([TernaryPoint(1, 0, 0), TernaryPoint(0, 1, 0)])
        assert len(hull.vertices) == 2

    @given(st.lists(raw_triples(), min_size=1, max_size=12))
    @settings(max_examples=100)
    def test_hull_contains_inputs(self, raws):
        pts = [to_ternary(r) for r in raws]
        hull = convex_hull(pts)
        for p in pts:
            assert hull.contains(p, tol=1e-7)
