"""Deciding and constructing (k,t)-representations of compatibility graphs.

Two CNF routes exist: a direct encoding for t=0 (conflict-free edges plus a
witnessed conflict per non-edge) and a cardinality-counter encoding for
general t.  A complete CDCL search over either encoding decides the
representation-with-ignored-pairs question; pairs outside ``constrained``
impose no constraint at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .bits import BitVector
from .graphs import (
    AttributeRepresentation,
    CompatibilityGraph,
    all_ordered_pairs,
    verify_representation,
)
from .satsolver import (
    SAT,
    TIMEOUT,
    UNSAT,
    CdclSolver,
    SolverStats,
)


class SoundnessError(RuntimeError):
    """A SAT model decoded to a representation that fails verification."""


@dataclass(frozen=True)
class RepresentationProblem:
    """Find width-k vectors reproducing the graph's adjacency on the
    constrained ordered pairs, under threshold t."""

    graph: CompatibilityGraph
    k: int
    t: int = 0
    constrained: Optional[frozenset] = None  # None means all ordered pairs
    # Optional symmetry-breaking unit assignments ('d'|'p', vertex, bit, value).
    # The caller asserts these preserve satisfiability (e.g. pinning a subgraph
    # whose representation is unique up to column permutation); encoders add
    # them as unit clauses.
    pins: frozenset = frozenset()

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not 0 <= self.t < self.k:
            raise ValueError(f"need 0 <= t < k, got t={self.t}, k={self.k}")
        if self.constrained is not None:
            pairs = frozenset(self.constrained)
            object.__setattr__(self, "constrained", pairs)
            for i, j in pairs:
                if i == j:
                    raise ValueError(f"constrained self-pair ({i},{i})")
                if not (0 <= i < self.graph.n and 0 <= j < self.graph.n):
                    raise ValueError(f"constrained pair ({i},{j}) out of range")
        pins = frozenset(self.pins)
        object.__setattr__(self, "pins", pins)
        for role, vertex, bit, value in pins:
            if role not in ("d", "p"):
                raise ValueError(f"pin role must be 'd' or 'p', got {role!r}")
            if not (0 <= vertex < self.graph.n and 0 <= bit < self.k):
                raise ValueError(f"pin ({role},{vertex},{bit}) out of range")
            if value not in (0, 1, False, True):
                raise ValueError(f"pin value must be boolean, got {value!r}")

    @property
    def pairs(self) -> list:
        if self.constrained is None:
            n = self.graph.n
            return [(i, j) for i in range(n) for j in range(n) if i != j]
        return sorted(self.constrained)


@dataclass
class CnfEncoding:
    num_vars: int
    clauses: list
    varmap: dict  # ('d',i,q) / ('p',i,q) / ('z',i,j,q) / ('c',i,j,q) / ('xi',i,j)
    cardinality_aux: list = field(default_factory=list)
    problem: Optional[RepresentationProblem] = None

    def var(self, *key) -> int:
        return self.varmap[key]


class _VarPool:
    def __init__(self):
        self.count = 0
        self.varmap = {}

    def new(self, key=None) -> int:
        self.count += 1
        if key is not None:
            if key in self.varmap:
                raise ValueError(f"duplicate varmap key {key}")
            self.varmap[key] = self.count
        return self.count


def _declare_primaries(pool: _VarPool, n: int, k: int) -> None:
    for i in range(n):
        for q in range(k):
            pool.new(("d", i, q))
    for i in range(n):
        for q in range(k):
            pool.new(("p", i, q))


def _pin_clauses(problem: RepresentationProblem, pool: _VarPool) -> list:
    clauses = []
    for role, vertex, bit, value in sorted(problem.pins):
        var = pool.varmap[(role, vertex, bit)]
        clauses.append([var] if value else [-var])
    return clauses


def encode_k0(problem: RepresentationProblem) -> CnfEncoding:
    """Direct CNF for t=0: edges forbid shared bits, non-edges demand a
    witnessed shared bit via k auxiliary variables."""
    if problem.t != 0:
        raise ValueError(f"encode_k0 requires t=0, got t={problem.t}")
    g, k = problem.graph, problem.k
    pool = _VarPool()
    _declare_primaries(pool, g.n, k)
    clauses = []
    aux = []
    for i, j in problem.pairs:
        if g.has_edge(i, j):
            for q in range(k):
                clauses.append([-pool.varmap[("d", i, q)], -pool.varmap[("p", j, q)]])
        else:
            zs = [pool.new(("z", i, j, q)) for q in range(k)]
            aux.extend(zs)
            clauses.append(list(zs))
            for q in range(k):
                clauses.append([-zs[q], pool.varmap[("d", i, q)]])
                clauses.append([-zs[q], pool.varmap[("p", j, q)]])
    clauses.extend(_pin_clauses(problem, pool))
    return CnfEncoding(pool.count, clauses, pool.varmap, aux, problem)


def _add_at_most(pool, clauses, lits, bound, escape=None):
    """Sequential-counter at-most-``bound`` over ``lits``; an optional escape
    literal, when true, lifts the constraint.  Returns new aux vars."""
    n = len(lits)
    if bound >= n:
        return []
    tail = [escape] if escape is not None else []
    if bound == 0:
        for x in lits:
            clauses.append([-x] + tail)
        return []
    # rows[q][j]: at least j+1 of lits[0..q] are true (forced-up direction only)
    aux = []
    rows = []
    for q in range(n - 1):  # no registers needed after the last literal
        size = min(q + 1, bound)
        row = [pool.new() for _ in range(size)]
        aux.extend(row)
        clauses.append([-lits[q], row[0]])
        if rows:
            prev = rows[-1]
            for j in range(len(prev)):
                clauses.append([-prev[j], row[j]])
                if j + 1 < len(row):
                    clauses.append([-lits[q], -prev[j], row[j + 1]])
        rows.append(row)
    for q in range(1, n):
        prev = rows[q - 1]
        if len(prev) >= bound:
            clauses.append([-lits[q], -prev[bound - 1]] + tail)
    return aux


def _add_at_least(pool, clauses, lits, bound, escape=None):
    """At-least-``bound`` over ``lits`` with monotone counters; optional escape."""
    n = len(lits)
    tail = [escape] if escape is not None else []
    if bound <= 0:
        return []
    if bound > n:
        clauses.append(list(tail))  # empty clause when there is no escape
        return []
    if bound == 1:
        clauses.append(list(lits) + tail)
        return []
    # rows[q][j]: at least j+1 of lits[0..q] are true (justified-down direction)
    aux = []
    rows = []
    for q in range(n):
        size = min(q + 1, bound)
        row = [pool.new() for _ in range(size)]
        aux.extend(row)
        clauses.append([-row[0]] + list(lits[: q + 1]))
        prev = rows[-1] if rows else []
        for j in range(1, size):
            # row[j] -> prev[j] or (lits[q] and prev[j-1])
            c1 = [-row[j], lits[q]]
            c2 = [-row[j], prev[j - 1]]
            if j < len(prev):
                c1.append(prev[j])
                c2.append(prev[j])
            clauses.append(c1)
            clauses.append(c2)
        rows.append(row)
    clauses.append([rows[-1][bound - 1]] + tail)
    return aux


def encode_kt(
    problem: RepresentationProblem, with_violations: bool = False
) -> CnfEncoding:
    """Cardinality encoding for general 0 <= t < k.

    Conflict indicators c^q_ij <-> d_i^q & p_j^q; constrained edges demand at
    most t conflicts, constrained non-edges at least t+1.  With
    ``with_violations`` every pair gets a selector that, when true, lifts the
    pair's cardinality constraint (the min-violations search space).
    """
    g, k, t = problem.graph, problem.k, problem.t
    pool = _VarPool()
    _declare_primaries(pool, g.n, k)
    clauses = []
    aux = []
    for i, j in problem.pairs:
        cs = []
        for q in range(k):
            c = pool.new(("c", i, j, q))
            d, p = pool.varmap[("d", i, q)], pool.varmap[("p", j, q)]
            clauses.append([-c, d])
            clauses.append([-c, p])
            clauses.append([-d, -p, c])
            cs.append(c)
        xi = pool.new(("xi", i, j)) if with_violations else None
        if g.has_edge(i, j):
            aux.extend(_add_at_most(pool, clauses, cs, t, escape=xi))
        else:
            aux.extend(_add_at_least(pool, clauses, cs, t + 1, escape=xi))
    clauses.extend(_pin_clauses(problem, pool))
    return CnfEncoding(pool.count, clauses, pool.varmap, aux, problem)


def decode_model(problem: RepresentationProblem, varmap: dict, model: dict) -> AttributeRepresentation:
    n, k = problem.graph.n, problem.k
    donor = []
    patient = []
    for i in range(n):
        donor.append(BitVector.from_bits(int(model[varmap[("d", i, q)]]) for q in range(k)))
        patient.append(BitVector.from_bits(int(model[varmap[("p", i, q)]]) for q in range(k)))
    return AttributeRepresentation(problem.k, problem.t, tuple(donor), tuple(patient))


@dataclass
class SolveOutcome:
    status: str  # SAT / UNSAT / TIMEOUT
    rep: Optional[AttributeRepresentation] = None
    stats: SolverStats = field(default_factory=SolverStats)


def solve(
    problem: RepresentationProblem,
    max_conflicts: Optional[int] = None,
    max_seconds: Optional[float] = None,
) -> SolveOutcome:
    """Complete search; SAT outcomes carry a representation that has been
    re-verified against the constrained pairs."""
    enc = encode_k0(problem) if problem.t == 0 else encode_kt(problem)
    solver = CdclSolver(enc.num_vars, enc.clauses)
    result = solver.solve(max_conflicts=max_conflicts, max_seconds=max_seconds)
    if result.status != SAT:
        return SolveOutcome(result.status, stats=result.stats)
    rep = decode_model(problem, enc.varmap, result.model)
    report = verify_representation(problem.graph, rep, problem.pairs)
    if not report.ok:
        raise SoundnessError(
            f"decoded model fails verification on {len(report.mismatches)} pairs"
        )
    return SolveOutcome(SAT, rep=rep, stats=result.stats)


@dataclass
class EnumerationResult:
    reps: list
    exhausted: bool
    timed_out: bool


def enumerate_solutions(
    problem: RepresentationProblem,
    limit: Optional[int] = None,
    max_conflicts: Optional[int] = None,
    max_seconds: Optional[float] = None,
) -> EnumerationResult:
    """Distinct satisfying representations, blocked over the d/p variables."""
    enc = encode_k0(problem) if problem.t == 0 else encode_kt(problem)
    solver = CdclSolver(enc.num_vars, enc.clauses)
    primaries = sorted(
        v for key, v in enc.varmap.items() if key[0] in ("d", "p")
    )
    reps = []
    while limit is None or len(reps) < limit:
        result = solver.solve(max_conflicts=max_conflicts, max_seconds=max_seconds)
        if result.status == TIMEOUT:
            return EnumerationResult(reps, exhausted=False, timed_out=True)
        if result.status == UNSAT:
            return EnumerationResult(reps, exhausted=True, timed_out=False)
        rep = decode_model(problem, enc.varmap, result.model)
        report = verify_representation(problem.graph, rep, problem.pairs)
        if not report.ok:
            raise SoundnessError("enumerated model fails verification")
        reps.append(rep)
        solver.add_clause(
            [-v if result.model[v] else v for v in primaries]
        )
    return EnumerationResult(reps, exhausted=False, timed_out=False)


def zero_pad(rep: AttributeRepresentation, extra: int) -> AttributeRepresentation:
    """Widen by ``extra`` zero bits; preserves all inner products."""
    pad = BitVector.zeros(extra)
    return AttributeRepresentation(
        rep.k + extra,
        rep.t,
        tuple(d.concat(pad) for d in rep.donor),
        tuple(p.concat(pad) for p in rep.patient),
    )


def lift_representation(rep: AttributeRepresentation, t: int) -> AttributeRepresentation:
    """Turn a (k,0)-representation into a (k+t,t) one by appending t ones."""
    if rep.t != 0:
        raise ValueError(f"lifting starts from a threshold-0 representation, got t={rep.t}")
    if t < 0:
        raise ValueError(f"negative lift amount {t}")
    if t == 0:
        return rep
    pad = BitVector.ones(t)
    return AttributeRepresentation(
        rep.k + t,
        t,
        tuple(d.concat(pad) for d in rep.donor),
        tuple(p.concat(pad) for p in rep.patient),
    )


def constructive_representation(graph: CompatibilityGraph) -> AttributeRepresentation:
    """Basis-vector (n',0)-representation, n' = min(n1+1, n2+1, n).

    Donor-side scheme: vertices with outgoing edges get distinct basis donor
    vectors, the rest share one extra basis vector; patient bits record
    non-adjacency.  The patient-side scheme is the mirror image.
    """
    n = graph.n
    if n == 0:
        return AttributeRepresentation(1, 0, (), ())
    out_vertices = [i for i in range(n) if graph.out_masks[i]]
    in_vertices = [j for j in range(n) if graph.in_masks[j]]
    n1, n2 = len(out_vertices), len(in_vertices)
    w_d = n1 + 1 if n1 < n else n
    w_p = n2 + 1 if n2 < n else n
    if w_d <= w_p:
        w = max(w_d, 1)
        pos = {v: idx for idx, v in enumerate(out_vertices)}
        donor = []
        for i in range(n):
            donor.append(BitVector.basis(w, pos.get(i, w - 1)))
        patient = []
        for j in range(n):
            bits = [0] * w
            for i in range(n):
                if not graph.has_edge(i, j):
                    bits[pos.get(i, w - 1)] = 1
            patient.append(BitVector.from_bits(bits))
    else:
        w = max(w_p, 1)
        pos = {v: idx for idx, v in enumerate(in_vertices)}
        patient = [BitVector.basis(w, pos.get(j, w - 1)) for j in range(n)]
        donor = []
        for i in range(n):
            bits = [0] * w
            for j in range(n):
                if not graph.has_edge(i, j):
                    bits[pos.get(j, w - 1)] = 1
            donor.append(BitVector.from_bits(bits))
    return AttributeRepresentation(w, 0, tuple(donor), tuple(patient))


def theorem_width_bound(graph: CompatibilityGraph) -> int:
    """The constructive width n' = min(n1+1, n2+1, n), floored at 1."""
    n = graph.n
    n1 = sum(1 for i in range(n) if graph.out_masks[i])
    n2 = sum(1 for j in range(n) if graph.in_masks[j])
    return max(1, min(n1 + 1, n2 + 1, n))


@dataclass
class MinKResult:
    k_min: int
    rep: AttributeRepresentation
    conservative: bool


def min_k(
    graph: CompatibilityGraph,
    t: int = 0,
    max_conflicts: Optional[int] = None,
    max_seconds: Optional[float] = None,
) -> MinKResult:
    """Smallest k with a SAT answer at threshold t, by bisection over
    [t+1, n'+t].  The top of the range is witnessed constructively, so the
    search always terminates with a verified representation.  Timeouts count
    as UNSAT and mark the answer conservative."""
    hi = theorem_width_bound(graph) + t
    best_k = hi
    base = constructive_representation(graph)
    if base.k < hi - t:
        base = zero_pad(base, hi - t - base.k)
    best_rep = lift_representation(base, t)
    timeout_ks = []
    lo = t + 1
    hi -= 1
    while lo <= hi:
        mid = (lo + hi) // 2
        outcome = solve(
            RepresentationProblem(graph, mid, t),
            max_conflicts=max_conflicts,
            max_seconds=max_seconds,
        )
        if outcome.status == SAT:
            best_k, best_rep = mid, outcome.rep
            hi = mid - 1
        else:
            if outcome.status == TIMEOUT:
                timeout_ks.append(mid)
            lo = mid + 1
    conservative = any(k < best_k for k in timeout_ks)
    return MinKResult(best_k, best_rep, conservative)


@dataclass
class MinViolationsResult:
    rep: AttributeRepresentation
    xi_count: int
    conservative: bool


def min_violations(
    graph: CompatibilityGraph,
    k: int,
    t: int = 0,
    constrained: Optional[frozenset] = None,
    max_conflicts: Optional[int] = None,
    max_seconds: Optional[float] = None,
) -> MinViolationsResult:
    """Minimum number of constrained pairs any width-k representation must
    get wrong, by binary search on a cardinality bound over the per-pair
    violation selectors.  Each step is a complete SAT call."""
    problem = RepresentationProblem(graph, k, t, constrained)
    base = encode_kt(problem, with_violations=True)
    xi_vars = sorted(v for key, v in base.varmap.items() if key[0] == "xi")
    pairs = problem.pairs

    def attempt(bound: int):
        pool = _VarPool()
        pool.count = base.num_vars
        clauses = list(base.clauses)
        _add_at_most(pool, clauses, xi_vars, bound)
        solver = CdclSolver(pool.count, clauses)
        return solver.solve(max_conflicts=max_conflicts, max_seconds=max_seconds)

    lo, hi = 0, len(pairs)
    best_rep = None
    best_count = None
    conservative = False
    while lo <= hi:
        mid = (lo + hi) // 2
        result = attempt(mid)
        if result.status == SAT:
            rep = decode_model(problem, base.varmap, result.model)
            count = len(verify_representation(graph, rep, pairs).mismatches)
            if count > mid:
                raise SoundnessError(
                    f"model under bound {mid} decodes to {count} mismatches"
                )
            best_rep, best_count = rep, count
            hi = count - 1
        else:
            if result.status == TIMEOUT:
                conservative = True
            lo = mid + 1
    if best_rep is None:
        # every bound up to |pairs| timed out; fall back to an arbitrary rep
        zeros = tuple(BitVector.zeros(k) for _ in range(graph.n))
        best_rep = AttributeRepresentation(k, t, zeros, zeros)
        best_count = len(verify_representation(graph, best_rep, pairs).mismatches)
        conservative = True
    return MinViolationsResult(best_rep, best_count, conservative)
