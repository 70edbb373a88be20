"""Series computation and rendering for the three figure kinds.

The series builders are pure functions of the parsed table so tests can
check the plotted data against the CSV without decoding an image.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .schema import Table, load_csv

DEFAULT_BUCKET = 0.05

KINDS = ("phase", "mink", "threshold")


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    csv_path: str
    out_path: str
    bucket: float = DEFAULT_BUCKET

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.bucket <= 0:
            raise ValueError(f"bucket width must be positive, got {self.bucket}")


def bucket_index(ratio: float, bucket: float) -> int:
    """Index of the half-open bucket [i*w, (i+1)*w) holding ratio, with a
    small tolerance so boundary ratios (k/n an exact multiple of w) land in
    the upper bucket despite float rounding."""
    return int(ratio / bucket + 1e-6)


def phase_series(table: Table, bucket: float = DEFAULT_BUCKET):
    """Bucket rows by k/n; returns (centers, fraction_sat, mean_wall_ms)."""
    groups: dict = {}
    for row in table.rows:
        ratio = int(row["k"]) / int(row["n"])
        groups.setdefault(bucket_index(ratio, bucket), []).append(row)
    centers = []
    fractions = []
    mean_ms = []
    for idx in sorted(groups):
        rows = groups[idx]
        centers.append((idx + 0.5) * bucket)
        fractions.append(
            sum(1 for r in rows if r["status"] == "SAT") / len(rows)
        )
        mean_ms.append(sum(float(r["wall_ms"]) for r in rows) / len(rows))
    return centers, fractions, mean_ms


def mink_series(table: Table):
    """Returns (points, conservative_points), each a list of (n, k_min)."""
    exact = []
    conservative = []
    for row in table.rows:
        point = (int(row["n"]), int(row["k_min"]))
        if int(row["conservative"]):
            conservative.append(point)
        else:
            exact.append(point)
    return exact, conservative


def threshold_series(table: Table):
    """Returns {size: [(t, fraction), ...]} with each line sorted by t."""
    lines: dict = {}
    for row in table.rows:
        lines.setdefault(int(row["n"]), []).append(
            (int(row["t"]), float(row["fraction"]))
        )
    return {n: sorted(points) for n, points in sorted(lines.items())}


def render(spec: PlotSpec) -> None:
    """Render the figure; raises before touching the output on any error."""
    table = load_csv(spec.csv_path, spec.kind)
    fig, ax = plt.subplots(figsize=(6, 4))
    try:
        if spec.kind == "phase":
            centers, fractions, mean_ms = phase_series(table, spec.bucket)
            ax.plot(centers, fractions, "o-", color="tab:blue")
            ax.set_xlabel("k / |V|")
            ax.set_ylabel("fraction SAT", color="tab:blue")
            ax.set_ylim(-0.05, 1.05)
            ax2 = ax.twinx()
            ax2.plot(centers, mean_ms, "s--", color="tab:red")
            ax2.set_ylabel("mean solve time (ms)", color="tab:red")
            ax.set_title("satisfiability and solve effort vs width ratio")
        elif spec.kind == "mink":
            exact, conservative = mink_series(table)
            if exact:
                ax.scatter(*zip(*exact), marker="o", label="exact")
            if conservative:
                ax.scatter(
                    *zip(*conservative), marker="x", label="conservative"
                )
            ns = [int(r["n"]) for r in table.rows]
            lo, hi = min(ns), max(ns)
            ax.plot([lo, hi], [lo, hi], "k--", label="k = |V|")
            ax.set_xlabel("|V|")
            ax.set_ylabel("minimum width k")
            ax.legend()
            ax.set_title("minimum representable width vs graph size")
        else:
            for n, points in threshold_series(table).items():
                ts, fractions = zip(*points)
                ax.plot(ts, fractions, "o-", label=f"n={n}")
            ax.set_xlabel("threshold t")
            ax.set_ylabel("matched fraction")
            ax.set_ylim(-0.05, 1.05)
            ax.legend()
            ax.set_title("matched fraction vs conflict threshold")
        fig.tight_layout()
        fig.savefig(spec.out_path)
    finally:
        plt.close(fig)
