import pytest

from typed_exchange.forge import ThreeSatFormula, gen_theorem4_graph
from typed_exchange.graphs import CompatibilityGraph, all_ordered_pairs, verify_representation
from typed_exchange.oracle import (
    SizeGuardError,
    enumerate_cycles,
    exhaustive_representation,
    max_cycle_cover_bruteforce,
    sat_bruteforce,
)


def complete_digraph(n):
    return CompatibilityGraph(n, all_ordered_pairs(n))


class TestEnumerateCycles:
    def test_directed_three_cycle(self):
        g = CompatibilityGraph(3, frozenset({(0, 1), (1, 2), (2, 0)}))
        catalog = enumerate_cycles(g, 3)
        assert catalog.cycles == ((0, 1, 2),)

    def test_complete_digraph_counts(self):
        catalog = enumerate_cycles(complete_digraph(4), 3)
        # C(4,2) two-cycles plus 2 * C(4,3) three-cycles
        assert len(catalog) == 14
        assert sum(1 for c in catalog.cycles if len(c) == 2) == 6
        assert sum(1 for c in catalog.cycles if len(c) == 3) == 8

    def test_empty_graph(self):
        assert len(enumerate_cycles(CompatibilityGraph(3, frozenset()), 3)) == 0

    def test_canonical_rotation(self):
        catalog = enumerate_cycles(complete_digraph(4), 3)
        for cyc in catalog.cycles:
            assert cyc[0] == min(cyc)

    def test_cap_respected(self):
        catalog = enumerate_cycles(complete_digraph(5), 2)
        assert all(len(c) == 2 for c in catalog.cycles)


class TestMaxCover:
    def test_complete_digraph(self):
        _, value = max_cycle_cover_bruteforce(complete_digraph(4), 3)
        assert value == 4

    def test_odd_vertices_with_two_cap(self):
        _, value = max_cycle_cover_bruteforce(complete_digraph(5), 2)
        assert value == 4

    def test_size_guard(self):
        with pytest.raises(SizeGuardError):
            max_cycle_cover_bruteforce(CompatibilityGraph(21, frozenset()), 3)

    def test_altruist_cap_filters_cycles(self):
        g = CompatibilityGraph(
            2, frozenset({(0, 1), (1, 0)}), frozenset({0, 1})
        )
        _, value = max_cycle_cover_bruteforce(g, 2)
        assert value == 2
        _, capped = max_cycle_cover_bruteforce(g, 2, altruist_cap=1)
        assert capped == 0


class TestExhaustiveRepresentation:
    def test_theorem_graph_bracket(self):
        g = gen_theorem4_graph(3)
        status, _ = exhaustive_representation(g, 2, 0)
        assert status == "UNSAT"
        status, rep = exhaustive_representation(g, 3, 0)
        assert status == "SAT"
        assert verify_representation(g, rep).ok

    def test_constrained_subset(self):
        g = gen_theorem4_graph(3)
        status, rep = exhaustive_representation(
            g, 2, 0, constrained={(0, 1), (1, 2)}
        )
        assert status == "SAT"
        assert verify_representation(g, rep, [(0, 1), (1, 2)]).ok

    def test_size_guard(self):
        with pytest.raises(SizeGuardError):
            exhaustive_representation(CompatibilityGraph(5, frozenset()), 3, 0)


class TestSatBruteforce:
    def test_satisfiable(self):
        formula = ThreeSatFormula(3, (((1, -2, 3)),))
        status, assignment = sat_bruteforce(formula)
        assert status == "SAT"
        assert any(
            assignment[abs(l)] == (l > 0) for l in formula.clauses[0]
        )

    def test_unsatisfiable(self):
        formula = ThreeSatFormula(1, ((1, 1, 1), (-1, -1, -1)))
        assert sat_bruteforce(formula) == ("UNSAT", None)

    def test_size_guard(self):
        formula = ThreeSatFormula(21, ((1, 2, 3),))
        with pytest.raises(SizeGuardError):
            sat_bruteforce(formula)
