"""Slow-loop consensus building over the ternary board.

Builds the presentation geometry facilitators work with: the consensus
reference point (centroid of group preferences), conflict segments from
each group's aggregation point to the reference point, compromise paths
(two-segment bypasses along lines parallel to the triangle edges, so one
value stays constant on each leg), and a candidate region that is narrowed
constraint by constraint. A minority-respecting social choice is computed
with positionality weights: the majority keeps its head count while the
minority is scaled by the majority/minority size ratio times the
total/respected value-dimension ratio. The engine reports the reference
point, region, and proposal target separately and never commits a decision
itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .energy import Scenario
from .errors import DomainError
from .intent import IntentGroup
from .ternary import (
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
)

COINCIDENT_TOL = 1e-12


@dataclass(frozen=True)
class CompromisePath:
    """A single-bend bypass between two group points.

    The first leg holds one coordinate of the start point, the second leg a
    different coordinate of the end point; ``via`` is the bend.
    """

    segments: tuple[Segment, Segment]
    via: TernaryPoint
    total_length: float
    held_axes: tuple[str, str]


@dataclass(frozen=True)
class ConsensusGeometry:
    reference_point: TernaryPoint
    groups: tuple[IntentGroup, ...]
    conflict_segments: tuple[Segment, ...]
    compromise_paths: dict[tuple[int, int], tuple[CompromisePath, ...]]
    candidate_region: SimplexRegion
    applied_constraints: tuple[AxisConstraint, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class SocialChoiceResult:
    target_point: TernaryPoint
    chosen_scenario_id: int
    weights_used: tuple[float, float]  # (majority weight, minority weight)
    dimension_ratio_used: float


def reference_point(groups: Sequence[IntentGroup], size_weighted: bool = True) -> TernaryPoint:
    """Centroid of the groups' aggregation points.

    Size-weighted (the default) equals the centroid of all individual
    points; the unweighted variant treats each group as one voice.
    """
    if len(groups) == 0:
        raise DomainError("no groups", code="empty_input")
    pts = [g.aggregation_point for g in groups]
    weights = [float(g.size) for g in groups] if size_weighted else None
    return centroid(pts, weights)


def compromise_paths(g1: IntentGroup, g2: IntentGroup) -> list[CompromisePath]:
    """All in-simplex single-bend bypasses from g1's point to g2's point.

    One candidate per ordered axis pair: hold ``axis_p`` at g1's value on
    the first leg and ``axis_q`` at g2's value on the second. Candidates
    whose bend falls outside the simplex are dropped. Paths come back
    sorted by embedded length, ties in axis-pair order.
    """
    p, q = g1.aggregation_point, g2.aggregation_point
    if p.l1_distance(q) <= COINCIDENT_TOL:
        return []
    paths: list[CompromisePath] = []
    for axis_p in AXES:
        for axis_q in AXES:
            if axis_p == axis_q:
                continue
            via = constant_coordinate_intersection(p, axis_p, q, axis_q)
            if via is None:
                continue
            seg1 = Segment(p, via, held_coordinate=axis_p)
            seg2 = Segment(via, q, held_coordinate=axis_q)
            paths.append(
                CompromisePath(
                    segments=(seg1, seg2),
                    via=via,
                    total_length=seg1.length() + seg2.length(),
                    held_axes=(axis_p, axis_q),
                )
            )
    paths.sort(key=lambda cp: (cp.total_length, cp.held_axes))
    return paths


def build_geometry(groups: Sequence[IntentGroup], size_weighted: bool = True) -> ConsensusGeometry:
    """Assemble the full board geometry for a diagnosis result.

    The initial candidate region is the convex hull of all aggregation
    points and every valid bend point of every pairwise bypass.
    """
    if len(groups) == 0:
        raise DomainError("no groups", code="empty_input")
    ref = reference_point(groups, size_weighted=size_weighted)
    conflicts = tuple(
        Segment(g.aggregation_point, ref)
        for g in groups
        if g.aggregation_point.l1_distance(ref) > COINCIDENT_TOL
    )
    paths: dict[tuple[int, int], tuple[CompromisePath, ...]] = {}
    hull_points: list[TernaryPoint] = [g.aggregation_point for g in groups]
    for gi in groups:
        for gj in groups:
            if gi.group_id == gj.group_id:
                continue
            plist = compromise_paths(gi, gj)
            paths[(gi.group_id, gj.group_id)] = tuple(plist)
            hull_points.extend(cp.via for cp in plist)
    region = convex_hull(hull_points)
    return ConsensusGeometry(
        reference_point=ref,
        groups=tuple(groups),
        conflict_segments=conflicts,
        compromise_paths=paths,
        candidate_region=region,
    )


def narrow(geometry: ConsensusGeometry, constraint: AxisConstraint) -> ConsensusGeometry:
    """Clip the candidate region by one constraint; an empty result is a
    legitimate outcome that flags a facilitation impasse."""
    region = clip_region(geometry.candidate_region, constraint)
    return replace(
        geometry,
        candidate_region=region,
        applied_constraints=geometry.applied_constraints + (constraint,),
    )


def positionality_weights(
    n_majority: int, n_minority: int, dims_total: int, dims_minority_respected: int
) -> tuple[float, float]:
    """Majority and minority aggregation weights.

    The minority head count is scaled by the majority/minority ratio and by
    the dimensionality ratio, which algebraically reduces the minority
    weight to ``n_majority * dims_total / dims_minority_respected``.
    """
    if n_majority < 1 or n_minority < 1:
        raise DomainError("group sizes must be >= 1", code="bad_positionality")
    if not (1 <= dims_minority_respected <= dims_total):
        raise DomainError(
            "need 1 <= dims_minority_respected <= dims_total", code="bad_positionality"
        )
    w_maj = float(n_majority)
    w_min = n_minority * (n_majority / n_minority) * (dims_total / dims_minority_respected)
    return (w_maj, w_min)


def positionality_choice(
    majority: IntentGroup,
    minority: IntentGroup,
    dims_total: int,
    dims_minority_respected: int,
    scenarios: Sequence[Scenario],
) -> SocialChoiceResult:
    """Weighted target between the two aggregation points, then the nearest
    scenario in the embedding (ties to the lowest id)."""
    if len(scenarios) == 0:
        raise DomainError("empty scenario set", code="empty_input")
    w_maj, w_min = positionality_weights(
        majority.size, minority.size, dims_total, dims_minority_respected
    )
    target = centroid(
        [majority.aggregation_point, minority.aggregation_point], [w_maj, w_min]
    )
    chosen = nearest_scenario(target, scenarios)
    return SocialChoiceResult(
        target_point=target,
        chosen_scenario_id=chosen.id,
        weights_used=(w_maj, w_min),
        dimension_ratio_used=dims_total / dims_minority_respected,
    )


def nearest_scenario(target: TernaryPoint, scenarios: Sequence[Scenario]) -> Scenario:
    if len(scenarios) == 0:
        raise DomainError("empty scenario set", code="empty_input")
    best: Optional[Scenario] = None
    best_key: Optional[tuple[float, int]] = None
    for s in scenarios:
        if s.point is None:
            raise DomainError(
                f"scenario {s.id} has no ternary point; normalize the set first",
                code="unnormalized_scenarios",
            )
        key = (embedded_distance(target, s.point), s.id)
        if best_key is None or key < best_key:
            best, best_key = s, key
    assert best is not None
    return best


# --- serialization ------------------------------------------------------------


def _segment_doc(seg: Segment) -> dict:
    return {
        "start": list(seg.start.as_tuple()),
        "end": list(seg.end.as_tuple()),
        "start_xy": list(embed(seg.start)),
        "end_xy": list(embed(seg.end)),
        "held_coordinate": seg.held_coordinate,
    }


def geometry_to_dict(geometry: ConsensusGeometry) -> dict:
    """The board payload: every drawable carries both barycentric and
    embedded coordinates so clients never have to do simplex math."""
    return {
        "reference_point": list(geometry.reference_point.as_tuple()),
        "reference_point_xy": list(embed(geometry.reference_point)),
        "groups": [
            {
                "group_id": g.group_id,
                "size": g.size,
                "is_majority": g.is_majority,
                "aggregation_point": list(g.aggregation_point.as_tuple()),
                "aggregation_xy": list(embed(g.aggregation_point)),
            }
            for g in geometry.groups
        ],
        "conflict_segments": [_segment_doc(s) for s in geometry.conflict_segments],
        "compromise_paths": [
            {
                "from_group": pair[0],
                "to_group": pair[1],
                "paths": [
                    {
                        "via": list(cp.via.as_tuple()),
                        "via_xy": list(embed(cp.via)),
                        "held_axes": list(cp.held_axes),
                        "total_length": cp.total_length,
                        "segments": [_segment_doc(s) for s in cp.segments],
                    }
                    for cp in paths
                ],
            }
            for pair, paths in sorted(geometry.compromise_paths.items())
        ],
        "candidate_region": {
            "vertices": [list(v.as_tuple()) for v in geometry.candidate_region.vertices],
            "vertices_xy": [list(embed(v)) for v in geometry.candidate_region.vertices],
            "area": geometry.candidate_region.area(),
        },
        "applied_constraints": [
            {"axis": c.axis, "kind": c.kind, "value": c.value}
            for c in geometry.applied_constraints
        ],
    }


def choice_to_dict(result: SocialChoiceResult) -> dict:
    return {
        "target_point": list(result.target_point.as_tuple()),
        "target_xy": list(embed(result.target_point)),
        "chosen_scenario_id": result.chosen_scenario_id,
        "weights_used": list(result.weights_used),
        "dimension_ratio_used": result.dimension_ratio_used,
    }
