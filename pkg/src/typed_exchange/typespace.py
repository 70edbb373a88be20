"""Type spaces: grouping interchangeable vertices and their compatibility table."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .bits import BitVector
from .graphs import (
    AttributeRepresentation,
    CompatibilityGraph,
    threshold_feasible,
)


class TypePartitionError(ValueError):
    """The graph admits no well-defined neighborhood partition."""


@dataclass(frozen=True)
class TypeSpace:
    """Distinct vertex types with counts and a pairwise compatibility table.

    ``vectors[i]`` is the defining (donor, patient) pair for attribute-derived
    spaces, or None for neighborhood-derived ones.  ``compat[i][j]`` says
    whether a vertex of type i can donate to a (distinct) vertex of type j;
    the diagonal covers distinct same-type vertices.
    """

    vectors: tuple  # of Optional[(BitVector, BitVector)]
    counts: tuple
    compat: tuple  # of tuple[bool]
    vertex_type: tuple

    def __post_init__(self):
        k = len(self.counts)
        if not (len(self.vectors) == len(self.compat) == k):
            raise ValueError("type arrays differ in length")
        if any(len(row) != k for row in self.compat):
            raise ValueError("compat table is not square")
        if any(c < 0 for c in self.counts):
            raise ValueError("negative type count")
        if self.vertex_type:
            tallies = [0] * k
            for th in self.vertex_type:
                tallies[th] += 1
            if tallies != list(self.counts):
                raise ValueError("vertex_type map inconsistent with counts")

    @property
    def num_types(self) -> int:
        return len(self.counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    def members_of(self, theta: int) -> list:
        return [v for v, th in enumerate(self.vertex_type) if th == theta]

    def with_counts(self, counts) -> "TypeSpace":
        """Same types/compat, new multiplicities (vertex map dropped)."""
        return TypeSpace(self.vectors, tuple(counts), self.compat, ())


def extract_type_space(
    source: Union[AttributeRepresentation, CompatibilityGraph],
) -> TypeSpace:
    if isinstance(source, AttributeRepresentation):
        return _from_attributes(source)
    if isinstance(source, CompatibilityGraph):
        return _from_neighborhoods(source)
    raise TypeError(f"cannot extract a type space from {type(source).__name__}")


def _from_attributes(rep: AttributeRepresentation) -> TypeSpace:
    index: dict = {}
    vectors = []
    counts = []
    vertex_type = []
    for i in range(rep.n):
        key = (rep.donor[i].word, rep.patient[i].word)
        if key not in index:
            index[key] = len(vectors)
            vectors.append((rep.donor[i], rep.patient[i]))
            counts.append(0)
        th = index[key]
        counts[th] += 1
        vertex_type.append(th)
    compat = tuple(
        tuple(threshold_feasible(d, p2, rep.t) for (_, p2) in vectors)
        for (d, _) in vectors
    )
    return TypeSpace(tuple(vectors), tuple(counts), compat, tuple(vertex_type))


def extract_type_space_with_altruists(
    rep: AttributeRepresentation, altruists
):
    """Attribute-derived type space over the chain-closed graph: altruists
    form their own types and every paired type can donate to every altruist
    type through the dummy chain edge.

    Returns (TypeSpace, frozenset of altruist type indices).
    """
    altruists = frozenset(altruists)
    index: dict = {}
    vectors = []
    counts = []
    vertex_type = []
    alt_flag = []
    for i in range(rep.n):
        key = (rep.donor[i].word, rep.patient[i].word, i in altruists)
        if key not in index:
            index[key] = len(vectors)
            vectors.append((rep.donor[i], rep.patient[i]))
            counts.append(0)
            alt_flag.append(i in altruists)
        th = index[key]
        counts[th] += 1
        vertex_type.append(th)
    compat = tuple(
        tuple(
            threshold_feasible(vectors[a][0], vectors[b][1], rep.t)
            or (alt_flag[b] and not alt_flag[a])
            for b in range(len(vectors))
        )
        for a in range(len(vectors))
    )
    ts = TypeSpace(tuple(vectors), tuple(counts), compat, tuple(vertex_type))
    alt_types = frozenset(th for th, flag in enumerate(alt_flag) if flag)
    return ts, alt_types


def _same_type(g: CompatibilityGraph, u: int, v: int) -> bool:
    """Identical in/out neighborhoods once u and v ignore each other.
    Altruists never merge with paired vertices: chains treat them differently
    even when the neighborhoods coincide."""
    if (u in g.altruists) != (v in g.altruists):
        return False
    drop = ~((1 << u) | (1 << v))
    return (
        g.out_masks[u] & drop == g.out_masks[v] & drop
        and g.in_masks[u] & drop == g.in_masks[v] & drop
    )


def _from_neighborhoods(g: CompatibilityGraph) -> TypeSpace:
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u in range(g.n):
        for v in range(u + 1, g.n):
            if _same_type(g, u, v):
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[rv] = ru

    classes: dict = {}
    for v in range(g.n):
        classes.setdefault(find(v), []).append(v)
    groups = sorted(classes.values())

    # The pairwise relation need not be transitive; reject merged classes
    # that are not actually uniform, and classes whose internal adjacency
    # is mixed (no consistent f(theta, theta) exists).
    for members in groups:
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                if not _same_type(g, members[a], members[b]):
                    raise TypePartitionError(
                        f"vertices {members[a]} and {members[b]} were grouped "
                        "together but their neighborhoods disagree"
                    )
        internal = {g.has_edge(u, v) for u in members for v in members if u != v}
        if len(internal) > 1:
            raise TypePartitionError(
                f"class {members} has inconsistent intra-class adjacency"
            )

    vertex_type = [0] * g.n
    counts = []
    for th, members in enumerate(groups):
        for v in members:
            vertex_type[v] = th
        counts.append(len(members))

    num = len(groups)
    compat = []
    for a in range(num):
        row = []
        for b in range(num):
            if a == b:
                members = groups[a]
                if len(members) >= 2:
                    row.append(g.has_edge(members[0], members[1]))
                else:
                    row.append(False)  # no distinct pair exists; moot by capacity
            else:
                row.append(g.has_edge(groups[a][0], groups[b][0]))
        compat.append(tuple(row))

    return TypeSpace(
        tuple(None for _ in groups), tuple(counts), tuple(compat), tuple(vertex_type)
    )


def graph_from_type_space(ts: TypeSpace) -> CompatibilityGraph:
    """Materialize a graph with ``counts[theta]`` vertices per type, type-major order."""
    starts = []
    total = 0
    for c in ts.counts:
        starts.append(total)
        total += c
    edges = set()
    for a in range(ts.num_types):
        for b in range(ts.num_types):
            if not ts.compat[a][b]:
                continue
            for u in range(starts[a], starts[a] + ts.counts[a]):
                for v in range(starts[b], starts[b] + ts.counts[b]):
                    if u != v:
                        edges.add((u, v))
    return CompatibilityGraph(total, frozenset(edges))
