import random

import pytest

from typed_exchange.bits import BitVector
from typed_exchange.graphs import (
    AttributeRepresentation,
    CompatibilityGraph,
    build_graph_from_attributes,
    verify_representation,
)
from typed_exchange.forge import gen_theorem4_graph
from typed_exchange.oracle import exhaustive_representation
from typed_exchange.represent import (
    RepresentationProblem,
    _VarPool,
    _add_at_least,
    _add_at_most,
    constructive_representation,
    encode_k0,
    encode_kt,
    enumerate_solutions,
    lift_representation,
    min_k,
    min_violations,
    solve,
    theorem_width_bound,
    zero_pad,
)
from typed_exchange.satsolver import SAT, UNSAT, solve_cnf


def random_graph(n, p, rng):
    edges = frozenset(
        (i, j) for i in range(n) for j in range(n) if i != j and rng.random() < p
    )
    return CompatibilityGraph(n, edges)


class TestEncodeK0Shape:
    def test_two_vertices_both_edges(self):
        g = CompatibilityGraph(2, frozenset({(0, 1), (1, 0)}))
        enc = encode_k0(RepresentationProblem(g, 1, 0))
        # 2 donor + 2 patient vars; one binary clause per edge
        assert enc.num_vars == 4
        assert len(enc.clauses) == 2

    def test_two_vertices_no_edges(self):
        g = CompatibilityGraph(2, frozenset())
        enc = encode_k0(RepresentationProblem(g, 1, 0))
        # 4 primaries + 2 witness vars; 3 clauses per non-edge
        assert enc.num_vars == 6
        assert len(enc.clauses) == 6

    def test_rejects_wrong_threshold(self):
        g = CompatibilityGraph(2, frozenset())
        with pytest.raises(ValueError):
            encode_k0(RepresentationProblem(g, 2, 1))


class TestCardinalityCounters:
    """Truth-table check: the counters constrain exactly popcount."""

    def project(self, builder, n, bound):
        pool = _VarPool()
        lits = [pool.new() for _ in range(n)]
        clauses = []
        builder(pool, clauses, lits, bound)
        sat_patterns = set()
        for bits in range(1 << n):
            units = [
                [lits[i]] if (bits >> i) & 1 else [-lits[i]] for i in range(n)
            ]
            res = solve_cnf(pool.count, clauses + units)
            if res.status == SAT:
                sat_patterns.add(bits)
        return sat_patterns

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_at_most(self, n):
        for bound in range(n + 1):
            got = self.project(_add_at_most, n, bound)
            want = {b for b in range(1 << n) if bin(b).count("1") <= bound}
            assert got == want, (n, bound)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_at_least(self, n):
        for bound in range(n + 2):
            got = self.project(_add_at_least, n, bound)
            want = {b for b in range(1 << n) if bin(b).count("1") >= bound}
            assert got == want, (n, bound)

    def test_escape_lifts_at_most(self):
        pool = _VarPool()
        lits = [pool.new() for _ in range(3)]
        esc = pool.new()
        clauses = []
        _add_at_most(pool, clauses, lits, 0, escape=esc)
        # all lits true is blocked without the escape, allowed with it
        assert solve_cnf(pool.count, clauses + [[l] for l in lits] + [[-esc]]).status == UNSAT
        assert solve_cnf(pool.count, clauses + [[l] for l in lits] + [[esc]]).status == SAT


class TestOracleAgreement:
    def test_k0_matches_exhaustive(self):
        rng = random.Random(11)
        for trial in range(80):
            n = rng.randint(1, 4)
            k = rng.randint(1, 3)
            if 2 * k * n > 24:
                continue
            g = random_graph(n, rng.random(), rng)
            expected, _ = exhaustive_representation(g, k, 0)
            outcome = solve(RepresentationProblem(g, k, 0))
            assert outcome.status == expected, (trial, n, k)
            if outcome.status == SAT:
                assert verify_representation(g, outcome.rep).ok

    def test_kt_matches_exhaustive(self):
        rng = random.Random(12)
        for trial in range(60):
            n = rng.randint(1, 4)
            k = rng.randint(2, 3)
            t = rng.randint(1, k - 1)
            if 2 * k * n > 24:
                continue
            g = random_graph(n, rng.random(), rng)
            expected, _ = exhaustive_representation(g, k, t)
            outcome = solve(RepresentationProblem(g, k, t))
            assert outcome.status == expected, (trial, n, k, t)
            if outcome.status == SAT:
                assert verify_representation(g, outcome.rep).ok

    def test_constrained_pairs_ignored(self):
        # theorem graph needs k=3 fully constrained, but dropping enough
        # pairs from F makes k=2 representable
        g = gen_theorem4_graph(3)
        assert solve(RepresentationProblem(g, 2, 0)).status == UNSAT
        some_pairs = frozenset({(0, 1), (1, 2)})
        assert solve(RepresentationProblem(g, 2, 0, some_pairs)).status == SAT


class TestPins:
    def test_pins_become_unit_constraints(self):
        g = CompatibilityGraph(2, frozenset({(0, 1), (1, 0)}))
        pins = frozenset({("d", 0, 0, True), ("p", 1, 0, False)})
        outcome = solve(RepresentationProblem(g, 2, 0, pins=pins))
        assert outcome.status == SAT
        assert outcome.rep.donor[0].bit(0) == 1
        assert outcome.rep.patient[1].bit(0) == 0

    def test_contradictory_pins_unsat(self):
        g = CompatibilityGraph(2, frozenset())
        pins = frozenset({("d", 0, 0, True), ("p", 1, 0, True)})
        # forces a conflict bit on the non-edge witness side is fine, but a
        # direct pin clash on the same variable is impossible
        bad = frozenset({("d", 0, 0, True), ("d", 0, 0, False)})
        assert solve(RepresentationProblem(g, 1, 0, pins=bad)).status == UNSAT
        assert solve(RepresentationProblem(g, 1, 0, pins=pins)).status == SAT

    def test_pin_validation(self):
        g = CompatibilityGraph(2, frozenset())
        with pytest.raises(ValueError):
            RepresentationProblem(g, 1, 0, pins=frozenset({("x", 0, 0, True)}))
        with pytest.raises(ValueError):
            RepresentationProblem(g, 1, 0, pins=frozenset({("d", 0, 5, True)}))


class TestLiftingAndPadding:
    def test_zero_pad_preserves_adjacency(self):
        rng = random.Random(3)
        g = random_graph(4, 0.4, rng)
        rep = constructive_representation(g)
        padded = zero_pad(rep, 3)
        assert padded.k == rep.k + 3
        assert verify_representation(g, padded).ok

    @pytest.mark.parametrize("t", [1, 2, 3])
    def test_lift_law(self, t):
        rng = random.Random(4)
        g = random_graph(5, 0.3, rng)
        rep = constructive_representation(g)
        lifted = lift_representation(rep, t)
        assert lifted.k == rep.k + t and lifted.t == t
        assert verify_representation(g, lifted).ok

    def test_lift_requires_t0(self):
        rep = AttributeRepresentation(
            2, 1, (BitVector.ones(2),), (BitVector.ones(2),)
        )
        with pytest.raises(ValueError):
            lift_representation(rep, 1)


class TestConstructive:
    def test_random_graphs_verify(self):
        rng = random.Random(5)
        for _ in range(30):
            n = rng.randint(1, 8)
            g = random_graph(n, 0.3, rng)
            rep = constructive_representation(g)
            assert rep.k == theorem_width_bound(g)
            assert verify_representation(g, rep).ok

    def test_width_bound_formula(self):
        g = CompatibilityGraph(4, frozenset({(0, 1), (2, 1)}))
        # n1=2 sources, n2=1 sink, n=4 -> min(3, 2, 4) = 2
        assert theorem_width_bound(g) == 2


class TestMinK:
    def test_matches_exhaustive(self):
        rng = random.Random(6)
        for _ in range(15):
            n = rng.randint(2, 4)
            g = random_graph(n, rng.random(), rng)
            result = min_k(g)
            assert not result.conservative
            assert verify_representation(g, result.rep).ok
            for k in range(1, result.k_min):
                if 2 * k * n <= 24:
                    status, _ = exhaustive_representation(g, k, 0)
                    assert status == UNSAT, (g, k)

    def test_threshold_shift(self):
        g = gen_theorem4_graph(3)
        assert min_k(g, t=0).k_min == 3
        result = min_k(g, t=1)
        assert result.rep.t == 1
        assert verify_representation(g, result.rep).ok
        status_below, _ = exhaustive_representation(g, result.k_min - 1, 1)
        assert status_below == UNSAT


class TestEnumeration:
    def test_counts_all_models(self):
        g = CompatibilityGraph(1, frozenset())
        result = enumerate_solutions(RepresentationProblem(g, 2, 0))
        # one isolated vertex: any of 4 donor x 4 patient assignments works
        assert result.exhausted and len(result.reps) == 16

    def test_limit(self):
        g = CompatibilityGraph(1, frozenset())
        result = enumerate_solutions(RepresentationProblem(g, 2, 0), limit=5)
        assert len(result.reps) == 5 and not result.exhausted


class TestMinViolations:
    def test_zero_when_representable(self):
        g = gen_theorem4_graph(3)
        result = min_violations(g, k=3)
        assert result.xi_count == 0 and not result.conservative

    def test_theorem_graph_below_width(self):
        g = gen_theorem4_graph(3)
        result = min_violations(g, k=2)
        assert result.xi_count == 1 and not result.conservative
        report = verify_representation(g, result.rep)
        assert len(report.mismatches) == 1
