"""Instance generators: random attribute pools, blood-type pools, the
hard-to-represent witness family, the bit-grounding gadget, and the full
3SAT reduction with its assignment decoder."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

from .bits import BitVector
from .graphs import (
    AttributeRepresentation,
    CompatibilityGraph,
    build_graph_from_attributes,
)
from .represent import RepresentationProblem


class DecodeError(RuntimeError):
    """A representation that verified the instance decoded inconsistently."""


# ---------------------------------------------------------------------------
# random attribute pools


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for the random pool generator.

    Defaults aim for plausible clinical edge densities; they are tunable
    stand-ins, not a calibrated population model.
    """

    n: int
    k: int = 10
    t: int = 0
    donor_probs: tuple = ()  # per-bit activation probability; scalar broadcast below
    patient_probs: tuple = ()
    altruist_fraction: float = 0.05
    seed: int = 0

    def __post_init__(self):
        dp = self.donor_probs if self.donor_probs else (0.1,) * self.k
        pp = self.patient_probs if self.patient_probs else (0.2,) * self.k
        if isinstance(dp, (int, float)):
            dp = (float(dp),) * self.k
        if isinstance(pp, (int, float)):
            pp = (float(pp),) * self.k
        object.__setattr__(self, "donor_probs", tuple(dp))
        object.__setattr__(self, "patient_probs", tuple(pp))
        if len(self.donor_probs) != self.k or len(self.patient_probs) != self.k:
            raise ValueError("per-bit probability lists must have length k")
        for prob in (*self.donor_probs, *self.patient_probs):
            if not 0.0 <= prob <= 1.0:
                raise ValueError(f"probability {prob} outside [0,1]")
        if not 0.0 <= self.altruist_fraction <= 1.0:
            raise ValueError("altruist fraction outside [0,1]")


def gen_attribute_pool(cfg: GeneratorConfig):
    """Returns (AttributeRepresentation, CompatibilityGraph) with altruists flagged."""
    rng = random.Random(cfg.seed)
    donor = []
    patient = []
    for _ in range(cfg.n):
        donor.append(
            BitVector.from_bits(
                int(rng.random() < prob) for prob in cfg.donor_probs
            )
        )
        patient.append(
            BitVector.from_bits(
                int(rng.random() < prob) for prob in cfg.patient_probs
            )
        )
    rep = AttributeRepresentation(cfg.k, cfg.t, tuple(donor), tuple(patient))
    graph = build_graph_from_attributes(rep)
    num_altruists = round(cfg.altruist_fraction * cfg.n)
    altruists = frozenset(rng.sample(range(cfg.n), num_altruists)) if num_altruists else frozenset()
    return rep, graph.with_altruists(altruists)


# ---------------------------------------------------------------------------
# blood-type pools

_DONOR_VECTORS = {"O": "00", "A": "10", "B": "01", "AB": "11"}
_PATIENT_VECTORS = {"O": "11", "A": "01", "B": "10", "AB": "00"}
_UNIFORM = {"O": 0.25, "A": 0.25, "B": 0.25, "AB": 0.25}


def gen_blood_pool(
    n: int,
    donor_dist: Optional[Dict[str, float]] = None,
    patient_dist: Optional[Dict[str, float]] = None,
    seed: int = 0,
):
    """k=2 antigen-bit pool: donor bits are antigens present, patient bits
    are antigens the patient cannot accept; t=0."""
    donor_dist = dict(donor_dist or _UNIFORM)
    patient_dist = dict(patient_dist or donor_dist)
    for dist in (donor_dist, patient_dist):
        if set(dist) != {"O", "A", "B", "AB"} or abs(sum(dist.values()) - 1.0) > 1e-9:
            raise ValueError("distribution must cover O/A/B/AB and sum to 1")
    rng = random.Random(seed)
    order = ["O", "A", "B", "AB"]

    def draw(dist):
        x = rng.random()
        acc = 0.0
        for ty in order:
            acc += dist[ty]
            if x < acc:
                return ty
        return order[-1]

    donor = []
    patient = []
    for _ in range(n):
        donor.append(BitVector.from_string(_DONOR_VECTORS[draw(donor_dist)]))
        patient.append(BitVector.from_string(_PATIENT_VECTORS[draw(patient_dist)]))
    rep = AttributeRepresentation(2, 0, tuple(donor), tuple(patient))
    return rep, build_graph_from_attributes(rep)


def blood_universe_pool(copies: int = 1) -> AttributeRepresentation:
    """Every (donor type, patient type) profile, ``copies`` times each; t=0."""
    donor = []
    patient = []
    for d_ty in ("O", "A", "B", "AB"):
        for p_ty in ("O", "A", "B", "AB"):
            for _ in range(copies):
                donor.append(BitVector.from_string(_DONOR_VECTORS[d_ty]))
                patient.append(BitVector.from_string(_PATIENT_VECTORS[p_ty]))
    return AttributeRepresentation(2, 0, tuple(donor), tuple(patient))


# ---------------------------------------------------------------------------
# hard witnesses and the bit-grounding gadget


def gen_theorem4_graph(n: int) -> CompatibilityGraph:
    """Vertex i points at everything except itself and i-1 (mod n); this
    family needs full width n at threshold 0."""
    if n < 3:
        raise ValueError(f"witness family needs n >= 3, got {n}")
    edges = frozenset(
        (i, j)
        for i in range(n)
        for j in range(n)
        if j != i and j != (i - 1) % n
    )
    return CompatibilityGraph(n, edges)


@dataclass(frozen=True)
class Gadget:
    """The bit-grounding gadget: a cycle-complement block whose vertices are
    labeled by 2-subsets of bit indices, plus one sink vertex per bit."""

    k: int
    graph: CompatibilityGraph
    constrained: frozenset
    subsets: tuple  # subsets[u] = the 2-subset S_u for block-1 vertex u
    bit_vertices: tuple  # bit_vertices[i] = block-2 vertex grounding bit i

    @property
    def block1_size(self) -> int:
        return len(self.subsets)

    def canonical_representation(self) -> AttributeRepresentation:
        """The identity-permutation witness at threshold 1."""
        nn = self.block1_size
        donor = []
        patient = []
        for u in range(nn):
            donor.append(BitVector.from_bits(
                1 if q in self.subsets[u] else 0 for q in range(self.k)
            ))
            nxt = self.subsets[(u + 1) % nn]
            patient.append(BitVector.from_bits(
                1 if q in nxt else 0 for q in range(self.k)
            ))
        for i in range(self.k):
            donor.append(BitVector.ones(self.k))
            patient.append(BitVector.from_bits(
                0 if q == i else 1 for q in range(self.k)
            ))
        return AttributeRepresentation(self.k, 1, tuple(donor), tuple(patient))


def gen_gadget(k: int) -> Gadget:
    if k < 3:
        raise ValueError(f"gadget needs k >= 3, got {k}")
    subsets = tuple(frozenset(s) for s in combinations(range(k), 2))
    n1 = len(subsets)
    n = n1 + k
    edges = set()
    for u in range(n1):
        for w in range(n1):
            if w != u and w != (u - 1) % n1:
                edges.add((u, w))
    bit_vertices = tuple(n1 + i for i in range(k))
    for u in range(n1):
        for i in subsets[u]:
            edges.add((u, bit_vertices[i]))
    graph = CompatibilityGraph(n, frozenset(edges))
    constrained = frozenset((a, b) for a in range(n) for b in range(n) if a != b)
    return Gadget(k, graph, constrained, subsets, bit_vertices)


# ---------------------------------------------------------------------------
# 3SAT and the hardness reduction


@dataclass(frozen=True)
class ThreeSatFormula:
    n_vars: int
    clauses: tuple  # of 3-literal tuples, DIMACS-signed

    def __post_init__(self):
        object.__setattr__(
            self, "clauses", tuple(tuple(cl) for cl in self.clauses)
        )
        for cl in self.clauses:
            if len(cl) != 3:
                raise ValueError(f"clause {cl} does not have exactly 3 literals")
            for lit in cl:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise ValueError(f"literal {lit} out of range")


def read_dimacs_3sat(path: Union[str, Path]) -> ThreeSatFormula:
    n_vars = None
    clauses = []
    current = []
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            toks = line.split()
            if len(toks) != 4 or toks[1] != "cnf":
                raise ValueError(f"bad DIMACS header {line!r}")
            n_vars = int(toks[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if n_vars is None:
        raise ValueError("missing 'p cnf' header")
    for cl in clauses:
        if len(cl) != 3:
            raise ValueError(f"clause {cl} is not 3-literal; pad by repetition")
    return ThreeSatFormula(n_vars, tuple(clauses))


def random_3sat(n_vars: int, n_clauses: int, seed: int = 0) -> ThreeSatFormula:
    rng = random.Random(seed)
    clauses = []
    for _ in range(n_clauses):
        vs = rng.sample(range(1, n_vars + 1), min(3, n_vars))
        while len(vs) < 3:
            vs.append(rng.choice(vs))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return ThreeSatFormula(n_vars, tuple(clauses))


def _literal_bit(lit: int, n_vars: int) -> int:
    """Positive literal i sits at bit i-1, its negation at n+i-1."""
    return lit - 1 if lit > 0 else n_vars + (-lit) - 1


@dataclass(frozen=True)
class ReductionInstance:
    formula: ThreeSatFormula
    problem: RepresentationProblem
    gadget: Gadget
    v_vertex: int
    u_vertex: int
    var_vertices: tuple
    clause_vertices: tuple
    gadget_offset: int

    @property
    def k(self) -> int:
        return self.problem.k


def reduce_3sat(formula: ThreeSatFormula) -> ReductionInstance:
    """Build the threshold-1 representation instance whose constrained pairs
    are satisfiable exactly when the formula is."""
    n = formula.n_vars
    m = len(formula.clauses)
    k = 2 * n + 2
    gadget = gen_gadget(k)
    g1 = gadget.block1_size

    v = 0
    u = 1
    var_vertices = tuple(2 + i for i in range(n))
    clause_vertices = tuple(2 + n + j for j in range(m))
    g0 = 2 + n + m  # gadget vertices occupy g0 .. g0 + C(k,2) + k - 1
    total = g0 + gadget.graph.n

    subset_index = {s: idx for idx, s in enumerate(gadget.subsets)}

    def block1_vertex(a: int, b: int) -> int:
        return g0 + subset_index[frozenset((a, b))]

    edges = set()
    for a, b in gadget.graph.edges:
        edges.add((g0 + a, g0 + b))
    for w in var_vertices:
        edges.add((v, w))
    extra_pair_vertex = block1_vertex(2 * n, 2 * n + 1)
    for gu in range(g0, g0 + g1):
        if gu != extra_pair_vertex:
            edges.add((gu, u))
    for i in range(1, n + 1):
        blocker = block1_vertex(i - 1, n + i - 1)
        for gu in range(g0, g0 + g1):
            if gu != blocker:
                edges.add((gu, var_vertices[i - 1]))
    for j, clause in enumerate(formula.clauses):
        bits = sorted({_literal_bit(lit, n) for lit in clause})
        blockers = {block1_vertex(a, b) for a, b in combinations(bits, 2)}
        blockers |= {block1_vertex(b, k - 1) for b in bits}
        for gu in range(g0, g0 + g1):
            if gu not in blockers:
                edges.add((gu, clause_vertices[j]))

    constrained = set()
    for a, b in gadget.constrained:
        constrained.add((g0 + a, g0 + b))
    others = [u, *var_vertices, *clause_vertices]
    for w in others:
        for x in range(total):
            if x != w:
                constrained.add((w, x))  # w has no outgoing edges anywhere
        for g in range(g0, total):
            constrained.add((g, w))  # incoming side fully pinned to the gadget
    for g in range(g0, total):
        constrained.add((g, v))  # v has no incoming edges
    for w in others:
        constrained.add((v, w))
    # pairs (v, gadget) stay unconstrained: the reduction never fixes them

    graph = CompatibilityGraph(total, frozenset(edges))
    # The gadget's (k,1)-representations are exactly the column permutations
    # of the canonical one, so pinning the gadget block to canonical form
    # preserves satisfiability while removing all k! column symmetries.
    canon = gadget.canonical_representation()
    pins = set()
    for local, (d, p) in enumerate(zip(canon.donor, canon.patient)):
        vtx = g0 + local
        for q in range(k):
            pins.add(("d", vtx, q, bool(d.bit(q))))
            pins.add(("p", vtx, q, bool(p.bit(q))))
    problem = RepresentationProblem(
        graph, k, 1, frozenset(constrained), frozenset(pins)
    )
    return ReductionInstance(
        formula, problem, gadget, v, u, var_vertices, clause_vertices, g0
    )


def decode_assignment(
    instance: ReductionInstance, rep: AttributeRepresentation
) -> Dict[int, bool]:
    """Read a truth assignment off the special vertex's donor bits.

    Bit meanings are grounded through the gadget's sink vertices, so any
    column permutation decodes correctly.  Raises DecodeError if the
    representation is structurally inconsistent or the decoded assignment
    fails the formula (unreachable for verified representations).
    """
    n = instance.formula.n_vars
    k = instance.k
    g0 = instance.gadget_offset
    column_of_bit = {}
    for i, bv in enumerate(instance.gadget.bit_vertices):
        pvec = rep.patient[g0 + bv]
        zeros = [q for q in range(k) if not pvec.bit(q)]
        if len(zeros) != 1:
            raise DecodeError(
                f"bit vertex {i} has {len(zeros)} patient zeros, expected 1"
            )
        column_of_bit[i] = zeros[0]
    qd_v = rep.donor[instance.v_vertex].support()
    assignment = {}
    for i in range(1, n + 1):
        pos = column_of_bit[i - 1] in qd_v
        neg = column_of_bit[n + i - 1] in qd_v
        if pos and neg:
            raise DecodeError(f"variable {i} has both polarity bits set")
        assignment[i] = pos
    for cl in instance.formula.clauses:
        if not any(assignment[abs(lit)] == (lit > 0) for lit in cl):
            raise DecodeError(f"decoded assignment fails clause {cl}")
    return assignment
