import numpy as np
import pytest

from coos.errors import DomainError
from coos.intent import diagnose
from coos.ternary import TernaryPoint, to_ternary


def _cluster(center, n, radius, seed):
    """Deterministic points within an embedding radius of a center."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        # small barycentric offsets keep the embedding displacement < radius
        delta = rng.uniform(-radius / 2, radius / 2, size=3)
        delta -= delta.mean()
        raw = np.clip(np.array(center) + delta, 0.0, None)
        out.append(to_ternary(raw))
    return out


class TestDiagnose:
    def test_two_cluster_fixture(self):
        big = _cluster((0.6, 0.2, 0.2), 7, 0.05, seed=1)
        small = _cluster((0.2, 0.6, 0.2), 3, 0.05, seed=2)
        points = {f"p{i:02d}": p for i, p in enumerate(big + small)}
        groups = diagnose(points)
        assert len(groups) == 2
        assert groups[0].size == 7
        assert groups[0].is_majority
        assert not groups[1].is_majority
        # centroid oracle: plain arithmetic mean of the member points
        members = [points[m] for m in groups[0].member_ids]
        mean = tuple(sum(p.as_tuple()[i] for p in members) / len(members) for i in range(3))
        assert groups[0].aggregation_point.l1_distance(TernaryPoint(*mean)) < 1e-12
        assert groups[0].aggregation_point.l1_distance(TernaryPoint(0.6, 0.2, 0.2)) < 0.1

    def test_identical_points_single_group(self):
        p = TernaryPoint(0.5, 0.3, 0.2)
        points = {f"p{i}": p for i in range(6)}
        groups = diagnose(points)
        assert len(groups) == 1
        assert groups[0].size == 6
        assert groups[0].aggregation_point.l1_distance(p) < 1e-12

    def test_singleton(self):
        groups = diagnose({"only": TernaryPoint(0.2, 0.3, 0.5)})
        assert len(groups) == 1
        assert groups[0].size == 1
        assert groups[0].is_majority

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            diagnose({})

    def test_partition_property(self):
        rng = np.random.default_rng(5)
        points = {f"p{i}": to_ternary(rng.dirichlet((1, 1, 1))) for i in range(23)}
        groups = diagnose(points)
        seen = [m for g in groups for m in g.member_ids]
        assert sorted(seen) == sorted(points.keys())
        assert sum(g.size for g in groups) == len(points)
        assert sum(1 for g in groups if g.is_majority) == 1
        for g in groups:
            members = [points[m] for m in g.member_ids]
            mean = tuple(sum(p.as_tuple()[i] for p in members) / len(members) for i in range(3))
            assert g.aggregation_point.l1_distance(TernaryPoint(*mean)) < 1e-12

    def test_insertion_order_irrelevant(self):
        big = _cluster((0.6, 0.2, 0.2), 5, 0.05, seed=3)
        small = _cluster((0.2, 0.2, 0.6), 4, 0.05, seed=4)
        points = {f"p{i}": p for i, p in enumerate(big + small)}
        shuffled = dict(reversed(list(points.items())))
        a = diagnose(points)
        b = diagnose(shuffled)
        assert [g.member_ids for g in a] == [g.member_ids for g in b]
        assert [g.aggregation_point for g in a] == [g.aggregation_point for g in b]

    def test_determinism(self):
        rng = np.random.default_rng(9)
        points = {f"p{i}": to_ternary(rng.dirichlet((1, 1, 1))) for i in range(15)}
        assert diagnose(points, seed=0) == diagnose(points, seed=0)

    def test_three_clusters(self):
        pts = (
            _cluster((0.7, 0.15, 0.15), 6, 0.04, seed=11)
            + _cluster((0.15, 0.7, 0.15), 5, 0.04, seed=12)
            + _cluster((0.15, 0.15, 0.7), 4, 0.04, seed=13)
        )
        points = {f"p{i:02d}": p for i, p in enumerate(pts)}
        groups = diagnose(points)
        assert len(groups) == 3
        assert [g.size for g in groups] == [6, 5, 4]

    def test_fewer_than_four_points_single_group(self):
        points = {
            "a": TernaryPoint(0.9, 0.05, 0.05),
            "b": TernaryPoint(0.05, 0.9, 0.05),
            "c": TernaryPoint(0.05, 0.05, 0.9),
        }
        groups = diagnose(points)
        assert len(groups) == 1
