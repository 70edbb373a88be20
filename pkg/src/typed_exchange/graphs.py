"""Compatibility graphs, attribute representations, and threshold feasibility."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

from .bits import BitVector, WidthMismatchError


def threshold_feasible(d: BitVector, p: BitVector, t: int) -> bool:
    """Donor ``d`` can give to patient ``p`` iff they share at most ``t`` set bits."""
    if t < 0:
        raise ValueError(f"threshold must be non-negative, got {t}")
    return d.dot(p) <= t


@dataclass(frozen=True)
class CompatibilityGraph:
    """Directed graph over patient-donor pairs (and optional altruists).

    Vertices are 0..n-1.  An edge (i, j) means the donor at i can give to the
    patient at j.  Self-loops are forbidden; intra-pair compatibility is never
    modeled.
    """

    n: int
    edges: frozenset = field(default_factory=frozenset)
    altruists: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(self.edges))
        object.__setattr__(self, "altruists", frozenset(self.altruists))
        if self.n < 0:
            raise ValueError(f"negative vertex count {self.n}")
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"self-loop ({i},{i}) not allowed")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i},{j}) out of range [0,{self.n})")
        for a in self.altruists:
            if not 0 <= a < self.n:
                raise ValueError(f"altruist {a} out of range [0,{self.n})")

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self.edges

    @cached_property
    def out_masks(self) -> tuple:
        """Per-vertex bitmask of out-neighbors."""
        masks = [0] * self.n
        for i, j in self.edges:
            masks[i] |= 1 << j
        return tuple(masks)

    @cached_property
    def in_masks(self) -> tuple:
        masks = [0] * self.n
        for i, j in self.edges:
            masks[j] |= 1 << i
        return tuple(masks)

    def out_neighbors(self, i: int) -> list:
        m = self.out_masks[i]
        return [j for j in range(self.n) if (m >> j) & 1]

    def in_neighbors(self, j: int) -> list:
        m = self.in_masks[j]
        return [i for i in range(self.n) if (m >> i) & 1]

    def with_altruists(self, altruists: Iterable[int]) -> "CompatibilityGraph":
        return CompatibilityGraph(self.n, self.edges, frozenset(altruists))


def all_ordered_pairs(n: int) -> frozenset:
    return frozenset((i, j) for i in range(n) for j in range(n) if i != j)


@dataclass(frozen=True)
class AttributeRepresentation:
    """Per-vertex donor/patient bit vectors of width k with threshold t."""

    k: int
    t: int
    donor: tuple
    patient: tuple

    def __post_init__(self):
        object.__setattr__(self, "donor", tuple(self.donor))
        object.__setattr__(self, "patient", tuple(self.patient))
        if self.k < 0 or self.t < 0:
            raise ValueError(f"k={self.k}, t={self.t} must be non-negative")
        if len(self.donor) != len(self.patient):
            raise ValueError("donor and patient vector lists differ in length")
        for v in (*self.donor, *self.patient):
            if v.width != self.k:
                raise WidthMismatchError(f"vector width {v.width} != k={self.k}")

    @property
    def n(self) -> int:
        return len(self.donor)

    def feasible(self, i: int, j: int) -> bool:
        return threshold_feasible(self.donor[i], self.patient[j], self.t)


def build_graph_from_attributes(rep: AttributeRepresentation) -> CompatibilityGraph:
    """Edge (i,j) present iff i != j and <d_i, p_j> <= t.  Altruist set empty."""
    edges = set()
    for i in range(rep.n):
        dw = rep.donor[i].word
        for j in range(rep.n):
            if i != j and (dw & rep.patient[j].word).bit_count() <= rep.t:
                edges.add((i, j))
    return CompatibilityGraph(rep.n, frozenset(edges))


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of checking a representation against a graph's adjacency."""

    ok: bool
    mismatches: tuple  # of (pair, expected_edge, inner_product)

    def __post_init__(self):
        if self.ok != (len(self.mismatches) == 0):
            raise ValueError("ok flag inconsistent with mismatch list")


def verify_representation(
    graph: CompatibilityGraph,
    rep: AttributeRepresentation,
    constrained: Optional[Iterable] = None,
) -> VerificationReport:
    """Check (i,j) in E  <=>  <d_i, p_j> <= t for every constrained pair."""
    if rep.n != graph.n:
        raise ValueError(f"representation covers {rep.n} vertices, graph has {graph.n}")
    if constrained is None:
        pairs = ((i, j) for i in range(graph.n) for j in range(graph.n) if i != j)
    else:
        pairs = sorted(set(constrained))
    mismatches = []
    for i, j in pairs:
        if i == j:
            raise ValueError(f"constrained pair ({i},{i}) is a self-pair")
        inner = rep.donor[i].dot(rep.patient[j])
        expected = graph.has_edge(i, j)
        if (inner <= rep.t) != expected:
            mismatches.append(((i, j), expected, inner))
    mismatches.sort()
    return VerificationReport(ok=not mismatches, mismatches=tuple(mismatches))
