"""Group intention diagnostics: cluster participant preference points and
label the majority.

Clustering runs in the fixed 2D embedding with a deterministic, seeded
k-means (k-means++ seeding, several restarts, lowest inertia wins). The
number of groups is chosen from {1..5} by maximal silhouette; when there
are fewer than four points, or no k from 2..5 reaches a 0.25 silhouette,
everyone forms a single group. Participants are processed in sorted-id
order so the partition does not depend on insertion order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .ternary import TernaryPoint, centroid, embed

MAX_GROUPS = 5
SILHOUETTE_FLOOR = 0.25
KMEANS_RESTARTS = 8
KMEANS_ITERS = 100


@dataclass(frozen=True)
class IntentGroup:
    group_id: int
    member_ids: tuple[str, ...]
    aggregation_point: TernaryPoint
    size: int
    is_majority: bool


def _kmeans_once(xy: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = xy.shape[0]
    centers = np.empty((k, 2))
    centers[0] = xy[int(rng.integers(0, n))]
    for c in range(1, k):
        d2 = np.min(((xy[:, None, :] - centers[None, :c, :]) ** 2).sum(axis=2), axis=1)
        total = d2.sum()
        if total <= 0.0:
            centers[c] = xy[int(rng.integers(0, n))]
            continue
        centers[c] = xy[int(rng.choice(n, p=d2 / total))]
    labels = np.zeros(n, dtype=int)
    for _ in range(KMEANS_ITERS):
        d2 = ((xy[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = d2.argmin(axis=1)
        for c in range(k):
            mask = new_labels == c
            if mask.any():
                centers[c] = xy[mask].mean(axis=0)
            else:
                # Re-seed an empty cluster with the point farthest from its center.
                far = int(d2.min(axis=1).argmax())
                centers[c] = xy[far]
                new_labels[far] = c
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return labels


def _inertia(xy: np.ndarray, labels: np.ndarray) -> float:
    total = 0.0
    for c in np.unique(labels):
        pts = xy[labels == c]
        total += float(((pts - pts.mean(axis=0)) ** 2).sum())
    return total


def _silhouette(xy: np.ndarray, labels: np.ndarray) -> float:
    n = xy.shape[0]
    uniq = np.unique(labels)
    if uniq.size < 2:
        return -1.0
    dist = np.sqrt(((xy[:, None, :] - xy[None, :, :]) ** 2).sum(axis=2))
    scores = np.zeros(n)
    for i in range(n):
        own = labels[i]
        own_mask = labels == own
        if own_mask.sum() <= 1:
            scores[i] = 0.0  # singleton convention
            continue
        a = dist[i][own_mask & (np.arange(n) != i)].mean()
        b = min(dist[i][labels == other].mean() for other in uniq if other != own)
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0.0 else (b - a) / denom
    return float(scores.mean())


def diagnose(points: dict[str, TernaryPoint], seed: int = 0) -> list[IntentGroup]:
    """Partition participants into intent groups and mark the majority.

    Groups are ordered by size descending, ties broken by the lowest member
    id; the first group is the majority.
    """
    if not points:
        raise DomainError("no participant points to diagnose", code="empty_input")
    ids = sorted(points.keys())
    xy = np.array([embed(points[p]) for p in ids])
    n = len(ids)

    best_labels = np.zeros(n, dtype=int)
    if n >= 4 and not np.allclose(xy, xy[0], atol=1e-12):
        best_score = SILHOUETTE_FLOOR
        for k in range(2, min(MAX_GROUPS, n) + 1):
            labels = None
            inertia = np.inf
            for restart in range(KMEANS_RESTARTS):
                rng = np.random.default_rng((seed, k, restart))
                cand = _kmeans_once(xy, k, rng)
                cand_inertia = _inertia(xy, cand)
                if cand_inertia < inertia - 1e-12:
                    inertia = cand_inertia
                    labels = cand
            score = _silhouette(xy, labels)
            if score > best_score:
                best_score = score
                best_labels = labels

    members: dict[int, list[str]] = {}
    for pid, lab in zip(ids, best_labels):
        members.setdefault(int(lab), []).append(pid)

    ordered = sorted(members.values(), key=lambda ms: (-len(ms), min(ms)))
    groups = []
    for gid, ms in enumerate(ordered):
        agg = centroid([points[m] for m in ms])
        groups.append(
            IntentGroup(
                group_id=gid,
                member_ids=tuple(sorted(ms)),
                aggregation_point=agg,
                size=len(ms),
                is_majority=(gid == 0),
            )
        )
    return groups


def intent_to_dict(groups: list[IntentGroup], points: dict[str, TernaryPoint]) -> dict:
    """JSON payload for the board UI: groups plus per-member points."""
    return {
        "groups": [
            {
                "group_id": g.group_id,
                "member_ids": list(g.member_ids),
                "size": g.size,
                "is_majority": g.is_majority,
                "aggregation_point": list(g.aggregation_point.as_tuple()),
                "aggregation_xy": list(embed(g.aggregation_point)),
                "members": [
                    {
                        "participant_id": m,
                        "point": list(points[m].as_tuple()),
                        "xy": list(embed(points[m])),
                    }
                    for m in g.member_ids
                ],
            }
            for g in groups
        ]
    }
