"""Report rendering: matplotlib figures plus a delimited summary table.

Given a scenario set, writes into an output directory:

* ``scenarios.csv`` -- one row per scenario with parameters, raw indices,
  and normalized indices;
* ``ternary_cloud.png`` -- the scenario cloud in the triangle;
* ``index_histograms.png`` -- distribution of the three raw indices;
* ``tradeoff_matrix.png`` -- pairwise scatter of the raw indices.

Figures are rendered with the Agg backend so the CLI works headless.
"""

from __future__ import annotations

import csv
import os
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .energy import Scenario, normalize_set
from .errors import DomainError
from .ternary import TernaryPoint, embed


def _triangle_xy() -> np.ndarray:
    pts = [TernaryPoint(1, 0, 0), TernaryPoint(0, 1, 0), TernaryPoint(0, 0, 1)]
    return np.array([embed(p) for p in pts])


def write_scenario_csv(path: str, scenarios: Sequence[Scenario]) -> None:
    fields = [
        "id",
        "solar_capacity_kw",
        "hydro_capacity_kw",
        "storage_energy_kwh",
        "local_ownership_share",
        "social",
        "environmental",
        "economic_cost",
        "norm_social",
        "norm_environmental",
        "norm_economic",
        "mix_solar",
        "mix_hydro",
        "mix_grid",
    ]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for s in scenarios:
            norm = s.normalized or (None, None, None)
            writer.writerow(
                [
                    s.id,
                    s.params.solar_capacity_kw,
                    s.params.hydro_capacity_kw,
                    s.params.storage_energy_kwh,
                    s.params.local_ownership_share,
                    f"{s.social:.6f}",
                    f"{s.environmental:.6f}",
                    f"{s.economic_cost:.2f}",
                    "" if norm[0] is None else f"{norm[0]:.6f}",
                    "" if norm[1] is None else f"{norm[1]:.6f}",
                    "" if norm[2] is None else f"{norm[2]:.6f}",
                    f"{s.generation_mix[0]:.6f}",
                    f"{s.generation_mix[1]:.6f}",
                    f"{s.generation_mix[2]:.6f}",
                ]
            )


def render_report(out_dir: str, scenarios: Sequence[Scenario]) -> list[str]:
    """Write the CSV and the figures; returns the created file paths."""
    if not scenarios:
        raise DomainError("no scenarios to report on", code="empty_input")
    if any(s.normalized is None for s in scenarios):
        scenarios = normalize_set(list(scenarios))
    os.makedirs(out_dir, exist_ok=True)
    created = []

    csv_path = os.path.join(out_dir, "scenarios.csv")
    write_scenario_csv(csv_path, scenarios)
    created.append(csv_path)

    tri = _triangle_xy()
    xy = np.array([embed(s.point) for s in scenarios if s.point is not None])
    fig, ax = plt.subplots(figsize=(6, 5.5))
    ax.fill(
        np.append(tri[:, 0], tri[0, 0]),
        np.append(tri[:, 1], tri[0, 1]),
        facecolor="none",
        edgecolor="black",
    )
    ax.scatter(xy[:, 0], xy[:, 1], s=4, c=[s.environmental for s in scenarios], cmap="viridis")
    labels = ("social", "environmental", "economic")
    offsets = ((0, 0.06), (-0.08, -0.06), (0.08, -0.06))
    for (x, y), label, (dx, dy) in zip(tri, labels, offsets):
        ax.text(x + dx, y + dy, label, ha="center", fontsize=10)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.set_title("scenario cloud (color: renewable utilization)")
    cloud_path = os.path.join(out_dir, "ternary_cloud.png")
    fig.savefig(cloud_path, dpi=120)
    plt.close(fig)
    created.append(cloud_path)

    fig, axes = plt.subplots(1, 3, figsize=(12, 3.5))
    series = [
        ("circulation rate", [s.social for s in scenarios]),
        ("renewable utilization", [s.environmental for s in scenarios]),
        ("cost per household", [s.economic_cost for s in scenarios]),
    ]
    for ax, (label, values) in zip(axes, series):
        ax.hist(values, bins=40, color="#32708f")
        ax.set_title(label, fontsize=10)
    fig.tight_layout()
    hist_path = os.path.join(out_dir, "index_histograms.png")
    fig.savefig(hist_path, dpi=120)
    plt.close(fig)
    created.append(hist_path)

    fig, axes = plt.subplots(1, 3, figsize=(12, 3.8))
    pairs = [
        ("circulation", "utilization", [s.social for s in scenarios], [s.environmental for s in scenarios]),
        ("circulation", "cost", [s.social for s in scenarios], [s.economic_cost for s in scenarios]),
        ("utilization", "cost", [s.environmental for s in scenarios], [s.economic_cost for s in scenarios]),
    ]
    for ax, (xl, yl, xs, ys) in zip(axes, pairs):
        ax.scatter(xs, ys, s=3, alpha=0.4, color="#7f3270")
        ax.set_xlabel(xl, fontsize=9)
        ax.set_ylabel(yl, fontsize=9)
    fig.tight_layout()
    pair_path = os.path.join(out_dir, "tradeoff_matrix.png")
    fig.savefig(pair_path, dpi=120)
    plt.close(fig)
    created.append(pair_path)

    return created
