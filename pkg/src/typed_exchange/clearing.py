"""Clearing in the type space: closed type walks, multiplicity optimization,
cover realization, altruist chain modeling, and flip-and-clear.

The literal enumerate-all-multiplicities loop is replaced by an exact search
over walk multiplicities with the same per-type capacity feasibility test:
a branch-and-bound for small instances, an integer program (HiGHS via scipy)
for larger ones, with a greedy-matches-upper-bound shortcut for the dense
cases where everything can be matched.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import csr_matrix

from .graphs import CompatibilityGraph
from .typespace import TypeSpace

COST_TOLERANCE = 1e-9


def _min_rotation(seq: tuple) -> tuple:
    return min(tuple(seq[i:] + seq[:i]) for i in range(len(seq)))


@dataclass(frozen=True)
class TypeWalk:
    """A closed walk through the type space, stored in canonical rotation."""

    seq: tuple

    def __post_init__(self):
        if len(self.seq) < 2:
            raise ValueError("type walks have length >= 2")
        if self.seq != _min_rotation(self.seq):
            raise ValueError(f"{self.seq} is not in canonical rotation")

    @classmethod
    def canonical(cls, seq: Iterable[int]) -> "TypeWalk":
        return cls(_min_rotation(tuple(seq)))

    def __len__(self) -> int:
        return len(self.seq)

    def occurrences(self) -> Dict[int, int]:
        occ: Dict[int, int] = {}
        for th in self.seq:
            occ[th] = occ.get(th, 0) + 1
        return occ

    def is_closed(self, ts: TypeSpace) -> bool:
        return all(
            ts.compat[self.seq[i]][self.seq[(i + 1) % len(self.seq)]]
            for i in range(len(self.seq))
        )


@dataclass(frozen=True)
class TypeWalkSet:
    L: int
    walks: tuple  # sorted TypeWalks

    def __len__(self) -> int:
        return len(self.walks)


def enumerate_type_walks(ts: TypeSpace, L: int) -> TypeWalkSet:
    """All rotation-canonical closed walks of length 2..L over the compat table."""
    if L < 2:
        raise ValueError(f"cycle cap must be >= 2, got {L}")
    num = ts.num_types
    compat = ts.compat
    found = set()
    for length in range(2, L + 1):
        for start in range(num):
            # DFS over sequences whose every element is >= start, so the
            # minimum sits first; canonicalization settles rotation ties.
            stack = [(start,)]
            while stack:
                seq = stack.pop()
                if len(seq) == length:
                    if compat[seq[-1]][start]:
                        found.add(_min_rotation(seq))
                    continue
                for nxt in range(start, num):
                    if compat[seq[-1]][nxt]:
                        stack.append(seq + (nxt,))
    walks = tuple(TypeWalk(seq) for seq in sorted(found, key=lambda s: (len(s), s)))
    return TypeWalkSet(L, walks)


@dataclass(frozen=True)
class MultiplicityVector:
    """Cycle counts per type walk; the matched-vertex total is its value."""

    counts: tuple  # of (TypeWalk, int), sorted, positive entries only

    @classmethod
    def from_dict(cls, counts: Dict[TypeWalk, int]) -> "MultiplicityVector":
        items = tuple(
            sorted(
                ((w, m) for w, m in counts.items() if m),
                key=lambda wm: (len(wm[0].seq), wm[0].seq),
            )
        )
        for _, m in items:
            if m < 0:
                raise ValueError("negative multiplicity")
        return cls(items)

    @property
    def value(self) -> int:
        """Matched-vertex count."""
        return sum(m * len(w) for w, m in self.counts)

    def type_usage(self) -> Dict[int, int]:
        usage: Dict[int, int] = {}
        for w, m in self.counts:
            for th, occ in w.occurrences().items():
                usage[th] = usage.get(th, 0) + m * occ
        return usage

    def check_capacity(self, ts: TypeSpace) -> bool:
        return all(
            used <= ts.counts[th] for th, used in self.type_usage().items()
        )


def _usable_walks(ts: TypeSpace, walkset: TypeWalkSet, altruist_types) -> list:
    """Walks that could ever be packed: capacity-feasible for one copy and,
    when altruist types are flagged, visiting at most one altruist."""
    out = []
    for w in walkset.walks:
        occ = w.occurrences()
        if any(occ[th] > ts.counts[th] for th in occ):
            continue
        if altruist_types and sum(occ.get(th, 0) for th in altruist_types) > 1:
            continue
        out.append(w)
    return out


def _walk_weight(w: TypeWalk, weights) -> float:
    return sum(weights[th] * o for th, o in w.occurrences().items())


def _greedy_pack(ts: TypeSpace, walks: list, weights) -> Dict[TypeWalk, int]:
    caps = list(ts.counts)
    picked: Dict[TypeWalk, int] = {}
    ranked = sorted(
        walks, key=lambda w: (-_walk_weight(w, weights), -len(w), w.seq)
    )
    for w in ranked:
        if _walk_weight(w, weights) <= 0:
            continue
        occ = w.occurrences()
        m = min(caps[th] // occ[th] for th in occ)
        if m > 0:
            picked[w] = m
            for th, o in occ.items():
                caps[th] -= m * o
    return picked


def _branch_and_bound(
    ts: TypeSpace, walks: list, incumbent: Dict[TypeWalk, int], weights
):
    order = sorted(
        walks, key=lambda w: (-_walk_weight(w, weights), -len(w), w.seq)
    )
    occs = [w.occurrences() for w in order]
    wlens = [_walk_weight(w, weights) for w in order]
    suffix_support = [set() for _ in range(len(order) + 1)]
    for i in range(len(order) - 1, -1, -1):
        suffix_support[i] = suffix_support[i + 1] | set(occs[i])

    best_value = sum(m * _walk_weight(w, weights) for w, m in incumbent.items())
    best = dict(incumbent)
    caps = list(ts.counts)

    def recurse(idx: int, value, chosen: Dict[TypeWalk, int]):
        nonlocal best_value, best
        if value > best_value:
            best_value = value
            best = dict(chosen)
        if idx == len(order):
            return
        bound = value + sum(
            caps[th] * weights[th] for th in suffix_support[idx]
        )
        if bound <= best_value:
            return
        occ = occs[idx]
        mmax = min(caps[th] // occ[th] for th in occ)
        for m in range(mmax, -1, -1):
            if m:
                chosen[order[idx]] = m
                for th, o in occ.items():
                    caps[th] -= m * o
            recurse(idx + 1, value + m * wlens[idx], chosen)
            if m:
                for th, o in occ.items():
                    caps[th] += m * o
                del chosen[order[idx]]

    recurse(0, 0, {})
    return best


def _milp_pack(ts: TypeSpace, walks: list, incumbent: Dict[TypeWalk, int], weights):
    lengths = np.array([_walk_weight(w, weights) for w in walks], dtype=float)
    rows, cols, data = [], [], []
    ubs = []
    for j, w in enumerate(walks):
        occ = w.occurrences()
        ubs.append(min(ts.counts[th] // occ[th] for th in occ))
        for th, o in occ.items():
            rows.append(th)
            cols.append(j)
            data.append(o)
    a = csr_matrix((data, (rows, cols)), shape=(ts.num_types, len(walks)))
    res = milp(
        c=-lengths,
        constraints=LinearConstraint(a, ub=np.array(ts.counts, dtype=float)),
        integrality=np.ones(len(walks)),
        bounds=Bounds(lb=0, ub=np.array(ubs, dtype=float)),
    )
    if res.x is None:
        return dict(incumbent)
    m = np.round(res.x).astype(int)
    # repair any rounding slip against capacities (exact arithmetic check)
    usage = a @ m
    for th in range(ts.num_types):
        while usage[th] > ts.counts[th]:
            j = max(
                (jj for jj in range(len(walks)) if m[jj] > 0 and a[th, jj] > 0),
                key=lambda jj: a[th, jj],
            )
            m[j] -= 1
            usage = a @ m
    solution = {walks[j]: int(m[j]) for j in range(len(walks)) if m[j] > 0}
    if sum(mm * _walk_weight(w, weights) for w, mm in solution.items()) < sum(
        mm * _walk_weight(w, weights) for w, mm in incumbent.items()
    ):
        return dict(incumbent)
    return solution


_BNB_VERTEX_LIMIT = 14


def clear_by_types(
    ts: TypeSpace,
    L: int,
    walkset: Optional[TypeWalkSet] = None,
    altruist_types: Iterable[int] = (),
    type_weights: Optional[Sequence[float]] = None,
) -> Tuple[MultiplicityVector, int]:
    """Maximum matched-vertex multiplicity vector under per-type capacities.

    ``type_weights`` overrides the objective: each matched vertex of type θ
    scores type_weights[θ] instead of 1 (e.g. weight 0 on altruist types
    maximizes matched pairs).  The returned value is always the plain
    matched-vertex count of the optimal vector."""
    if walkset is None:
        walkset = enumerate_type_walks(ts, L)
    altruist_types = frozenset(altruist_types)
    walks = _usable_walks(ts, walkset, altruist_types)
    if not walks:
        return MultiplicityVector(()), 0
    weights = (
        tuple(type_weights) if type_weights is not None else (1,) * ts.num_types
    )
    if len(weights) != ts.num_types:
        raise ValueError("type_weights length must equal the number of types")
    greedy = _greedy_pack(ts, walks, weights)
    greedy_value = sum(m * _walk_weight(w, weights) for w, m in greedy.items())
    support = set()
    for w in walks:
        support.update(w.occurrences())
    upper = sum(ts.counts[th] * weights[th] for th in support)
    if greedy_value == upper:
        best = greedy
    elif ts.n <= _BNB_VERTEX_LIMIT:
        best = _branch_and_bound(ts, walks, greedy, weights)
    else:
        best = _milp_pack(ts, walks, greedy, weights)
    mv = MultiplicityVector.from_dict(best)
    assert mv.check_capacity(ts)
    return mv, mv.value


@dataclass(frozen=True)
class CycleCover:
    """Vertex-disjoint directed cycles in a concrete graph."""

    cycles: tuple  # of vertex tuples
    value: int

    def validate(self, graph: CompatibilityGraph, L: Optional[int] = None) -> None:
        seen = set()
        total = 0
        for cyc in self.cycles:
            if len(cyc) < 2:
                raise ValueError(f"cycle {cyc} too short")
            if L is not None and len(cyc) > L:
                raise ValueError(f"cycle {cyc} exceeds cap {L}")
            for v in cyc:
                if v in seen:
                    raise ValueError(f"vertex {v} used twice")
                seen.add(v)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                if not graph.has_edge(a, b):
                    raise ValueError(f"missing edge ({a},{b}) in cycle {cyc}")
            total += len(cyc)
        if total != self.value:
            raise ValueError(f"value {self.value} != matched count {total}")


def realize_cover(
    graph: CompatibilityGraph, ts: TypeSpace, mv: MultiplicityVector
) -> CycleCover:
    """Assign concrete vertices to each packed walk, in index order per type.

    Vertices of one type are interchangeable, so any capacity-respecting
    assignment yields a valid cover.
    """
    if not ts.vertex_type:
        raise ValueError("type space carries no vertex map; cannot realize")
    if not mv.check_capacity(ts):
        raise ValueError("multiplicity vector violates type capacities")
    pools = {th: sorted(ts.members_of(th), reverse=True) for th in range(ts.num_types)}
    cycles = []
    for walk, m in mv.counts:
        for _ in range(m):
            cyc = tuple(pools[th].pop() for th in walk.seq)
            cycles.append(cyc)
    cover = CycleCover(tuple(cycles), sum(len(c) for c in cycles))
    cover.validate(graph)
    return cover


def model_altruists(
    graph: CompatibilityGraph, chain_cap: Optional[int] = None
) -> CompatibilityGraph:
    """Add the dummy edge (v, a) for every altruist a and non-altruist v, so
    chains become cycles through their altruist.  ``chain_cap`` is accepted
    for interface symmetry; chains share the cycle cap when it is None."""
    del chain_cap  # shared-cap convention; separate caps are not modeled here
    if not graph.altruists:
        return graph
    edges = set(graph.edges)
    for a in graph.altruists:
        for v in range(graph.n):
            if v != a and v not in graph.altruists:
                edges.add((v, a))
    return CompatibilityGraph(graph.n, frozenset(edges), graph.altruists)


@dataclass(frozen=True)
class FlipCostMatrix:
    """c[i][j]: cost of changing a vertex of type i into type j."""

    cost: tuple  # of tuple[float]

    def __post_init__(self):
        for i, row in enumerate(self.cost):
            if len(row) != len(self.cost):
                raise ValueError("cost matrix must be square")
            if abs(row[i]) > COST_TOLERANCE:
                raise ValueError(f"diagonal cost c[{i}][{i}] must be zero")
            for c in row:
                if c < 0:
                    raise ValueError("costs must be non-negative")

    def __getitem__(self, pair):
        return self.cost[pair[0]][pair[1]]


@dataclass(frozen=True)
class FlipPlan:
    """Non-negative switch counts s(theta -> theta') and the resulting net."""

    switches: tuple  # of ((from, to), count), positive entries
    cleared_value: int
    total_cost: float
    net_value: float

    def switch_dict(self) -> Dict[Tuple[int, int], int]:
        return dict(self.switches)


@dataclass
class FlipClearResult:
    plan: FlipPlan
    multiplicities: MultiplicityVector
    net_value: float


def flip_and_clear(
    ts: TypeSpace, L: int, cost: FlipCostMatrix
) -> FlipClearResult:
    """Best net value over all ways to pay for type switches before clearing.

    Exhaustive over per-type switch-count vectors with memoized clearing and
    an optimistic bound (every vertex matched, minus cost so far).
    """
    num = ts.num_types
    if len(cost.cost) != num:
        raise ValueError(
            f"cost matrix is {len(cost.cost)}x{len(cost.cost)}, type space has {num} types"
        )
    walkset = enumerate_type_walks(ts, L)
    total_vertices = ts.n

    clear_cache: Dict[tuple, Tuple[MultiplicityVector, int]] = {}

    def cleared(counts: tuple) -> Tuple[MultiplicityVector, int]:
        if counts not in clear_cache:
            clear_cache[counts] = clear_by_types(
                ts.with_counts(counts), L, walkset=walkset
            )
        return clear_cache[counts]

    best: Optional[FlipClearResult] = None

    # Per-type distributions: how many of theta's vertices switch to each
    # other type.  DFS over types, pruning on the optimistic bound.
    def distributions(theta: int):
        budget = ts.counts[theta]
        targets = [x for x in range(num) if x != theta]

        def rec(i: int, left: int, acc: list):
            if i == len(targets):
                yield tuple(acc)
                return
            for s in range(left + 1):
                acc.append((targets[i], s))
                yield from rec(i + 1, left - s, acc)
                acc.pop()

        yield from rec(0, budget, [])

    def search(theta: int, counts: list, cost_so_far: float, switches: list):
        nonlocal best
        if best is not None and total_vertices - cost_so_far <= best.net_value + COST_TOLERANCE:
            return
        if theta == num:
            mv, value = cleared(tuple(counts))
            net = value - cost_so_far
            if best is None or net > best.net_value + COST_TOLERANCE:
                plan = FlipPlan(
                    tuple(sorted((pair, s) for pair, s in switches if s)),
                    value,
                    cost_so_far,
                    net,
                )
                best = FlipClearResult(plan, mv, net)
            return
        for dist in distributions(theta):
            moved = sum(s for _, s in dist)
            extra = sum(s * cost[(theta, to)] for to, s in dist)
            if best is not None and total_vertices - cost_so_far - extra <= best.net_value + COST_TOLERANCE:
                continue
            for to, s in dist:
                counts[to] += s
            counts[theta] -= moved
            search(
                theta + 1,
                counts,
                cost_so_far + extra,
                switches + [((theta, to), s) for to, s in dist],
            )
            counts[theta] += moved
            for to, s in dist:
                counts[to] -= s

    search(0, list(ts.counts), 0.0, [])
    assert best is not None
    return best
