"""Ground-truth brute-force engines, used for validation only.

Everything here favors transparent exhaustiveness over speed, with hard size
guards so a test instrument can never silently run forever.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .bits import BitVector
from .graphs import AttributeRepresentation, CompatibilityGraph


class SizeGuardError(ValueError):
    """Instance exceeds the oracle's guard; pass force=True to override."""


@dataclass(frozen=True)
class CycleCatalog:
    """All simple directed cycles of length 2..L, in canonical rotation
    (minimum vertex first), with per-cycle vertex bitmasks."""

    cycles: tuple
    masks: tuple
    L: int

    def __len__(self) -> int:
        return len(self.cycles)


def enumerate_cycles(graph: CompatibilityGraph, L: int) -> CycleCatalog:
    if L < 2:
        raise ValueError(f"cycle cap must be >= 2, got {L}")
    cycles = []
    out_masks = graph.out_masks
    for root in range(graph.n):
        # DFS visiting only vertices > root keeps the root minimal: each
        # cycle is generated exactly once, already in canonical rotation.
        stack = [(root, [root], 1 << root)]
        while stack:
            v, path, mask = stack.pop()
            m = out_masks[v]
            if len(path) >= 2 and (m >> root) & 1:
                cycles.append(tuple(path))
            if len(path) == L:
                continue
            for w in range(graph.n - 1, root, -1):
                if (m >> w) & 1 and not (mask >> w) & 1:
                    stack.append((w, path + [w], mask | (1 << w)))
    cycles.sort(key=lambda c: (len(c), c))
    masks = tuple(sum(1 << v for v in c) for c in cycles)
    return CycleCatalog(tuple(cycles), masks, L)


def max_cycle_cover_bruteforce(
    graph: CompatibilityGraph,
    L: int,
    force: bool = False,
    altruist_cap: Optional[int] = None,
):
    """Exact maximum vertex-disjoint packing of cycles of length <= L.

    Returns (list of cycles, matched-vertex count).  Recursion over the
    cycle catalog with bitmask conflicts and a free-vertex upper bound.
    ``altruist_cap`` drops cycles visiting more than that many altruists
    (chain modeling forbids multi-altruist cycles).
    """
    if graph.n > 20 and not force:
        raise SizeGuardError(
            f"n={graph.n} exceeds the brute-force guard of 20 (force=True to override)"
        )
    catalog = enumerate_cycles(graph, L)
    cycles, masks = catalog.cycles, catalog.masks
    if altruist_cap is not None and graph.altruists:
        keep = [
            idx
            for idx in range(len(cycles))
            if sum(1 for v in cycles[idx] if v in graph.altruists) <= altruist_cap
        ]
        cycles = tuple(cycles[idx] for idx in keep)
        masks = tuple(masks[idx] for idx in keep)
    order = sorted(range(len(cycles)), key=lambda i: -len(cycles[i]))
    # suffix_union[i]: vertices reachable by cycles order[i:]
    suffix_union = [0] * (len(order) + 1)
    for i in range(len(order) - 1, -1, -1):
        suffix_union[i] = suffix_union[i + 1] | masks[order[i]]

    best_value = 0
    best_pick: list = []

    def recurse(idx: int, used: int, value: int, picked: list) -> None:
        nonlocal best_value, best_pick
        if value > best_value:
            best_value = value
            best_pick = list(picked)
        if idx == len(order):
            return
        bound = value + (suffix_union[idx] & ~used).bit_count()
        if bound <= best_value:
            return
        ci = order[idx]
        if not masks[ci] & used:
            picked.append(ci)
            recurse(idx + 1, used | masks[ci], value + len(cycles[ci]), picked)
            picked.pop()
        recurse(idx + 1, used, value, picked)

    recurse(0, 0, 0, [])
    return [list(cycles[ci]) for ci in best_pick], best_value


def exhaustive_representation(
    graph: CompatibilityGraph,
    k: int,
    t: int,
    constrained: Optional[Iterable] = None,
    force: bool = False,
):
    """Try every bit assignment; returns ('SAT', rep) or ('UNSAT', None).

    The search is organized vertex by vertex with pair-consistency pruning,
    but covers the full 2^(2kn) assignment space.
    """
    n = graph.n
    if 2 * k * n > 24 and not force:
        raise SizeGuardError(
            f"2kn={2 * k * n} exceeds the exhaustion guard of 24 (force=True to override)"
        )
    if constrained is None:
        pairs = {(i, j) for i in range(n) for j in range(n) if i != j}
    else:
        pairs = set(constrained)
    ncombo = 1 << (2 * k)
    kmask = (1 << k) - 1
    full = (1 << ncombo) - 1

    def ok(ci: int, cj: int, i: int, j: int) -> bool:
        # forward pair (i, j) and backward pair (j, i), as constrained
        if (i, j) in pairs:
            di, pj = ci & kmask, cj >> k
            if ((di & pj).bit_count() <= t) != graph.has_edge(i, j):
                return False
        if (j, i) in pairs:
            dj, pi = cj & kmask, ci >> k
            if ((dj & pi).bit_count() <= t) != graph.has_edge(j, i):
                return False
        return True

    # allowed[i][j][ci] = bitmask of combos cj compatible with vertex i at ci
    allowed = {}
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) in pairs or (j, i) in pairs:
                table = []
                for ci in range(ncombo):
                    mask = 0
                    for cj in range(ncombo):
                        if ok(ci, cj, i, j):
                            mask |= 1 << cj
                    table.append(mask)
                allowed[(i, j)] = table

    assignment = [0] * n

    def search(i: int, cands: list) -> bool:
        if i == n:
            return True
        mask = cands[i]
        while mask:
            low = mask & -mask
            ci = low.bit_length() - 1
            mask ^= low
            assignment[i] = ci
            nxt = list(cands)
            feasible = True
            for j in range(i + 1, n):
                tbl = allowed.get((i, j))
                if tbl is not None:
                    nxt[j] &= tbl[ci]
                    if not nxt[j]:
                        feasible = False
                        break
            if feasible and search(i + 1, nxt):
                return True
        return False

    if n and search(0, [full] * n):
        donor = tuple(BitVector(k, c & kmask) for c in assignment)
        patient = tuple(BitVector(k, c >> k) for c in assignment)
        return "SAT", AttributeRepresentation(k, t, donor, patient)
    if n == 0:
        return "SAT", AttributeRepresentation(k, t, (), ())
    return "UNSAT", None


def sat_bruteforce(formula, force: bool = False):
    """Truth-table SAT check; returns ('SAT', assignment dict) or ('UNSAT', None)."""
    n = formula.n_vars
    if n > 20 and not force:
        raise SizeGuardError(
            f"{n} variables exceeds the truth-table guard of 20 (force=True to override)"
        )
    clauses = [tuple(cl) for cl in formula.clauses]
    for bits in range(1 << n):
        sat = True
        for cl in clauses:
            if not any(
                (bits >> (abs(lit) - 1)) & 1 == (lit > 0) for lit in cl
            ):
                sat = False
                break
        if sat:
            return "SAT", {v + 1: bool((bits >> v) & 1) for v in range(n)}
    return "UNSAT", None
