"""Geometry on the two-dimensional probability simplex (ternary diagram).

A ternary point is a triple of nonnegative shares ``(a, b, c)`` summing to
one; here they carry the social / environmental / economic value shares.
All slow-loop modules route their geometry through this module: proportional
normalization, weighted centroids, intersections of constant-coordinate
lines (the lines parallel to the triangle edges), convex region clipping,
and a fixed 2D embedding used whenever a Euclidean length or area is needed.

Embedding convention (documented once, used everywhere): vertex A maps to
``(0, 1)``, vertex B to ``(-sqrt(3)/2, -1/2)``, vertex C to
``(sqrt(3)/2, -1/2)``; a point embeds as the barycentric combination of the
three vertex positions.

Tolerances: invariant checks use ``1e-9``; equalities that hold by
construction are asserted at ``1e-12``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .errors import DomainError

AXES = ("a", "b", "c")

SUM_TOL = 1e-9
CONSTRUCT_TOL = 1e-12

_SQRT3_2 = math.sqrt(3.0) / 2.0

# Vertex positions of the equilateral embedding, in axis order (a, b, c).
EMBED_VERTICES = ((0.0, 1.0), (-_SQRT3_2, -0.5), (_SQRT3_2, -0.5))


def _axis_index(axis: str) -> int:
    try:
        return AXES.index(axis)
    except ValueError:
        raise DomainError(f"unknown axis {axis!r}, expected one of {AXES}", code="bad_axis")


@dataclass(frozen=True)
class TernaryPoint:
    """A barycentric coordinate triple on the 2-simplex.

    Construction validates the simplex invariants: components at least
    ``-1e-12`` and a total of one within ``1e-9``. Use :func:`to_ternary`
    to build a point from an arbitrary nonnegative raw triple.
    """

    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        for axis, v in zip(AXES, (self.a, self.b, self.c)):
            if not math.isfinite(v):
                raise DomainError(f"coordinate {axis} is not finite: {v!r}", code="bad_coordinate")
            if v < -CONSTRUCT_TOL:
                raise DomainError(f"coordinate {axis} is negative: {v!r}", code="bad_coordinate")
        total = self.a + self.b + self.c
        if abs(total - 1.0) > SUM_TOL:
            raise DomainError(f"coordinates sum to {total!r}, expected 1", code="bad_coordinate")

    def coordinate(self, axis: str) -> float:
        return (self.a, self.b, self.c)[_axis_index(axis)]

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)

    def __iter__(self) -> Iterator[float]:
        return iter((self.a, self.b, self.c))

    def l1_distance(self, other: "TernaryPoint") -> float:
        return abs(self.a - other.a) + abs(self.b - other.b) + abs(self.c - other.c)

    def isclose(self, other: "TernaryPoint", tol: float = SUM_TOL) -> bool:
        return self.l1_distance(other) <= 3 * tol


CENTER = TernaryPoint(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)


def to_ternary(raw: Sequence[float]) -> TernaryPoint:
    """Proportionally normalize a nonnegative raw triple onto the simplex.

    The all-zero triple maps to the simplex center: no information reads as
    indifference between the three values.
    """
    if len(raw) != 3:
        raise DomainError(f"expected a triple, got {len(raw)} components", code="bad_raw_triple")
    vals = [float(v) for v in raw]
    for v in vals:
        if not math.isfinite(v):
            raise DomainError(f"raw component is not finite: {v!r}", code="bad_raw_triple")
        if v < 0.0:
            raise DomainError(f"raw component is negative: {v!r}", code="bad_raw_triple")
    total = vals[0] + vals[1] + vals[2]
    if total == 0.0:
        return CENTER
    return TernaryPoint(vals[0] / total, vals[1] / total, vals[2] / total)


def centroid(
    points: Sequence[TernaryPoint], weights: Optional[Sequence[float]] = None
) -> TernaryPoint:
    """Weighted arithmetic mean of ternary points; stays on the simplex."""
    if len(points) == 0:
        raise DomainError("centroid of an empty point set", code="empty_input")
    if weights is None:
        w = [1.0] * len(points)
    else:
        if len(weights) != len(points):
            raise DomainError(
                f"{len(weights)} weights for {len(points)} points", code="bad_weights"
            )
        w = [float(x) for x in weights]
        if any(x < 0.0 or not math.isfinite(x) for x in w):
            raise DomainError("weights must be finite and nonnegative", code="bad_weights")
    total = sum(w)
    if total <= 0.0:
        raise DomainError("total weight is zero", code="bad_weights")
    a = sum(wi * p.a for wi, p in zip(w, points)) / total
    b = sum(wi * p.b for wi, p in zip(w, points)) / total
    c = sum(wi * p.c for wi, p in zip(w, points)) / total
    # Guard against rounding drift before revalidating the invariants.
    s = a + b + c
    return TernaryPoint(a / s, b / s, c / s)


def constant_coordinate_intersection(
    p: TernaryPoint, axis_p: str, q: TernaryPoint, axis_q: str
) -> Optional[TernaryPoint]:
    """Intersect the constant-``axis_p`` line through ``p`` with the
    constant-``axis_q`` line through ``q``.

    These are the auxiliary lines parallel to the triangle edges. The
    intersection fixes two coordinates, so the third is determined; when it
    falls below ``-1e-12`` the lines meet outside the simplex and ``None``
    is returned.
    """
    i = _axis_index(axis_p)
    j = _axis_index(axis_q)
    if i == j:
        raise DomainError("held axes must be distinct", code="bad_axis_pair")
    coords = [0.0, 0.0, 0.0]
    coords[i] = p.as_tuple()[i]
    coords[j] = q.as_tuple()[j]
    k = 3 - i - j
    coords[k] = 1.0 - coords[i] - coords[j]
    if coords[k] < -CONSTRUCT_TOL:
        return None
    coords[k] = max(coords[k], 0.0)
    return TernaryPoint(*coords)


@dataclass(frozen=True)
class Segment:
    """A straight segment between two ternary points.

    ``held_coordinate`` tags segments that run parallel to a triangle edge,
    in which case both endpoints must agree on that coordinate within 1e-9.
    """

    start: TernaryPoint
    end: TernaryPoint
    held_coordinate: Optional[str] = None

    def __post_init__(self) -> None:
        if self.held_coordinate is not None:
            i = _axis_index(self.held_coordinate)
            lo = self.start.as_tuple()[i]
            hi = self.end.as_tuple()[i]
            if abs(lo - hi) > SUM_TOL:
                raise DomainError(
                    f"held coordinate {self.held_coordinate} differs: {lo!r} vs {hi!r}",
                    code="bad_segment",
                )

    def length(self) -> float:
        return embedded_distance(self.start, self.end)


def embed(p: TernaryPoint) -> tuple[float, float]:
    """Map a ternary point to the fixed equilateral 2D embedding."""
    x = p.a * EMBED_VERTICES[0][0] + p.b * EMBED_VERTICES[1][0] + p.c * EMBED_VERTICES[2][0]
    y = p.a * EMBED_VERTICES[0][1] + p.b * EMBED_VERTICES[1][1] + p.c * EMBED_VERTICES[2][1]
    return (x, y)


def embedded_distance(p: TernaryPoint, q: TernaryPoint) -> float:
    px, py = embed(p)
    qx, qy = embed(q)
    return math.hypot(px - qx, py - qy)


def _signed_area_xy(xy: Sequence[tuple[float, float]]) -> float:
    n = len(xy)
    if n < 3:
        return 0.0
    acc = 0.0
    for i in range(n):
        x1, y1 = xy[i]
        x2, y2 = xy[(i + 1) % n]
        acc += x1 * y2 - x2 * y1
    return 0.5 * acc


@dataclass(frozen=True)
class SimplexRegion:
    """A convex polygon inside the simplex, as an ordered vertex list.

    Vertices are stored counterclockwise in the embedding, starting from the
    lexicographically smallest ``(a, b, c)`` tuple, with coincident vertices
    merged; the empty region has no vertices. Use :meth:`from_points` so the
    canonical ordering holds.
    """

    vertices: tuple[TernaryPoint, ...]

    @staticmethod
    def empty() -> "SimplexRegion":
        return SimplexRegion(())

    @staticmethod
    def full() -> "SimplexRegion":
        return SimplexRegion.from_points(
            [TernaryPoint(1, 0, 0), TernaryPoint(0, 1, 0), TernaryPoint(0, 0, 1)]
        )

    @staticmethod
    def from_points(points: Iterable[TernaryPoint]) -> "SimplexRegion":
        verts = _dedupe_ring([p for p in points])
        if len(verts) >= 3:
            xy = [embed(p) for p in verts]
            if _signed_area_xy(xy) < 0.0:
                verts.reverse()
        if verts:
            start = min(range(len(verts)), key=lambda i: verts[i].as_tuple())
            verts = verts[start:] + verts[:start]
        return SimplexRegion(tuple(verts))

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    def area(self) -> float:
        return abs(_signed_area_xy([embed(p) for p in self.vertices]))

    def contains(self, p: TernaryPoint, tol: float = SUM_TOL) -> bool:
        """Point-in-convex-polygon test in the embedding (boundary counts)."""
        n = len(self.vertices)
        if n == 0:
            return False
        if n == 1:
            return embedded_distance(self.vertices[0], p) <= tol
        px, py = embed(p)
        xy = [embed(v) for v in self.vertices]
        if n == 2:
            (x1, y1), (x2, y2) = xy
            cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
            if abs(cross) > tol:
                return False
            dot = (px - x1) * (x2 - x1) + (py - y1) * (y2 - y1)
            return -tol <= dot <= (x2 - x1) ** 2 + (y2 - y1) ** 2 + tol
        for i in range(n):
            x1, y1 = xy[i]
            x2, y2 = xy[(i + 1) % n]
            cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
            if cross < -tol:
                return False
        return True


def _dedupe_ring(points: list[TernaryPoint]) -> list[TernaryPoint]:
    out: list[TernaryPoint] = []
    for p in points:
        if not out or out[-1].l1_distance(p) > CONSTRUCT_TOL:
            out.append(p)
    while len(out) > 1 and out[0].l1_distance(out[-1]) <= CONSTRUCT_TOL:
        out.pop()
    return out


@dataclass(frozen=True)
class AxisConstraint:
    """A half-plane constraint on one barycentric coordinate."""

    axis: str
    kind: str  # "min" keeps x[axis] >= value, "max" keeps x[axis] <= value
    value: float

    def __post_init__(self) -> None:
        _axis_index(self.axis)
        if self.kind not in ("min", "max"):
            raise DomainError(f"constraint kind must be min or max, got {self.kind!r}", code="bad_constraint")
        if not (0.0 <= self.value <= 1.0) or not math.isfinite(self.value):
            raise DomainError(f"constraint value must be in [0, 1], got {self.value!r}", code="bad_constraint")

    def signed_slack(self, p: TernaryPoint) -> float:
        v = p.coordinate(self.axis)
        return v - self.value if self.kind == "min" else self.value - v


def clip_region(region: SimplexRegion, constraint: AxisConstraint) -> SimplexRegion:
    """Intersect a convex region with a coordinate half-plane.

    Standard convex polygon clipping (Sutherland-Hodgman against a single
    plane), performed directly in barycentric coordinates; the cut is linear
    so interpolated vertices stay on the simplex. The result may be empty.
    """
    verts = region.vertices
    n = len(verts)
    if n == 0:
        return SimplexRegion.empty()
    if n == 1:
        if constraint.signed_slack(verts[0]) >= -CONSTRUCT_TOL:
            return region
        return SimplexRegion.empty()

    slack = [constraint.signed_slack(v) for v in verts]
    out: list[TernaryPoint] = []
    for i in range(n):
        cur, nxt = verts[i], verts[(i + 1) % n]
        s1, s2 = slack[i], slack[(i + 1) % n]
        if s1 >= -CONSTRUCT_TOL:
            out.append(cur)
        crosses = (s1 > CONSTRUCT_TOL and s2 < -CONSTRUCT_TOL) or (
            s1 < -CONSTRUCT_TOL and s2 > CONSTRUCT_TOL
        )
        if crosses:
            t = s1 / (s1 - s2)
            coords = [
                cur.as_tuple()[k] + t * (nxt.as_tuple()[k] - cur.as_tuple()[k]) for k in range(3)
            ]
            coords = [max(v, 0.0) for v in coords]
            total = coords[0] + coords[1] + coords[2]
            out.append(TernaryPoint(coords[0] / total, coords[1] / total, coords[2] / total))
    return SimplexRegion.from_points(out)


def convex_hull(points: Sequence[TernaryPoint]) -> SimplexRegion:
    """Convex hull of ternary points (monotone chain in the embedding)."""
    if len(points) == 0:
        return SimplexRegion.empty()
    uniq: list[TernaryPoint] = []
    for p in sorted(points, key=lambda q: q.as_tuple()):
        if not uniq or uniq[-1].l1_distance(p) > CONSTRUCT_TOL:
            uniq.append(p)
    if len(uniq) <= 2:
        return SimplexRegion.from_points(uniq)

    pts = sorted(uniq, key=embed)

    def turns_left(o: TernaryPoint, a: TernaryPoint, b: TernaryPoint) -> bool:
        ox, oy = embed(o)
        ax, ay = embed(a)
        bx, by = embed(b)
        return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox) > CONSTRUCT_TOL

    def chain(seq: list[TernaryPoint]) -> list[TernaryPoint]:
        res: list[TernaryPoint] = []
        for p in seq:
            while len(res) >= 2 and not turns_left(res[-2], res[-1], p):
                res.pop()
            res.append(p)
        return res

    lower = chain(pts)
    upper = chain(list(reversed(pts)))
    ring = lower[:-1] + upper[:-1]
    return SimplexRegion.from_points(ring)
