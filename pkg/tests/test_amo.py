"""At-most-one engine: normalization, translation, marginals, counting."""

from __future__ import annotations

from fractions import Fraction

import pytest

from covercount import (
    AmoInstance,
    DegreeExceededError,
    EdgeSizeExceededError,
    Hypergraph,
    TruncationPolicy,
    UnsatisfiableError,
    adaptive,
    certified_depth_amo,
    count_hypergraph_matchings_brute,
    count_matchings,
    count_matchings_exact,
    exact_count,
    exact_marginals,
    from_hypergraph,
    heuristic,
    marginal_exact_amo,
    marginal_truncated_amo,
    normalize,
)
from covercount.amo import amo_branch_child
from covercount.cnf import FREE, PINNED_ONE


def amo(n, constraints, pins=None):
    return AmoInstance.from_raw(n, constraints, pins)


class TestNormalize:
    def test_one_pin_shrinks_constraint(self):
        norm = normalize(amo(3, [(0, 1, 2)], pins={0: 1}))
        assert norm.constraints == ((1, 2),)

    def test_zero_pin_forces_others(self):
        norm = normalize(amo(2, [(0, 1)], pins={0: 0}))
        assert norm.constraints == ()
        assert norm.pins[1] == PINNED_ONE

    def test_duplicate_variable_forced(self):
        norm = normalize(amo(1, [(0, 0)]))
        assert norm.constraints == ()
        assert norm.pins[0] == PINNED_ONE

    def test_two_zeros_unsatisfiable(self):
        with pytest.raises(UnsatisfiableError):
            normalize(amo(3, [(0, 1, 2)], pins={0: 0, 1: 0}))

    def test_duplicate_zero_occurrence_unsatisfiable(self):
        with pytest.raises(UnsatisfiableError):
            normalize(amo(2, [(0, 0, 1)], pins={0: 0}))

    def test_zero_propagation_cascade(self):
        # x0=0 forces x1=1; K_2(x1,x2) then shrinks to vacuous K_1(x2)
        norm = normalize(amo(3, [(0, 1), (1, 2)], pins={0: 0}))
        assert norm.constraints == ()
        assert norm.pins[1] == PINNED_ONE
        assert norm.pins[2] == FREE

    def test_conflicting_requirements_unsatisfiable(self):
        # x0=0 forces x1=1, but x1 is pinned 0: two zeros in (1,2) is not
        # reached, the conflict surfaces as two zero pins in (0,1)
        with pytest.raises(UnsatisfiableError):
            normalize(amo(3, [(0, 1), (1, 2)], pins={0: 0, 1: 0}))

    def test_degree_cap_after_normalize(self):
        cons = [(0, 1), (0, 2), (0, 3), (0, 4)]
        with pytest.raises(DegreeExceededError):
            normalize(amo(5, cons))

    def test_count_preserved(self, amo_corpus):
        for seed, _, inst in amo_corpus[:80]:
            assert exact_count(inst) == exact_count(normalize(inst)), seed

    def test_arity_cap_on_construction(self):
        with pytest.raises(ValueError):
            amo(5, [(0, 1, 2, 3, 4)])


class TestFromHypergraph:
    def test_path_graph(self):
        h = Hypergraph.from_raw(3, [(0, 1), (1, 2)])
        inst = from_hypergraph(h)
        assert inst.n_vars == 2
        assert inst.constraints == ((0,), (0, 1), (1,))
        assert count_matchings_exact(normalize(inst))[0] == 3

    def test_triangle(self):
        h = Hypergraph.from_raw(3, [(0, 1), (1, 2), (0, 2)])
        assert count_matchings_exact(from_hypergraph(h))[0] == 4

    def test_single_3edge(self):
        h = Hypergraph.from_raw(3, [(0, 1, 2)])
        inst = from_hypergraph(h)
        assert inst.constraints == ((0,), (0,), (0,))
        assert exact_count(inst) == 2

    def test_parallel_edges(self):
        h = Hypergraph.from_raw(3, [(0, 1, 2), (0, 1, 2)])
        inst = from_hypergraph(h)
        assert inst.n_vars == 2
        assert inst.constraints == ((0, 1), (0, 1), (0, 1))
        assert count_matchings_exact(inst)[0] == 3  # empty, e0, e1

    def test_edge_size_cap(self):
        with pytest.raises(EdgeSizeExceededError):
            from_hypergraph(Hypergraph.from_raw(4, [(0, 1, 2, 3)]))

    def test_degree_cap(self):
        edges = [(0, i) for i in range(1, 6)]
        with pytest.raises(DegreeExceededError):
            from_hypergraph(Hypergraph.from_raw(6, edges))


class TestMarginal:
    def test_single_constraint(self):
        inst = normalize(amo(2, [(0, 1)]))
        assert marginal_truncated_amo(inst, 0, 1).value == 0.5
        assert marginal_exact_amo(inst, 0) == Fraction(1, 2)
        assert exact_marginals(inst)[0] == Fraction(1, 2)

    def test_free_variable(self):
        inst = normalize(amo(3, [(1, 2)]))
        assert marginal_truncated_amo(inst, 0, 3).value == 1.0

    def test_depth_zero(self):
        inst = normalize(amo(2, [(0, 1)]))
        mr = marginal_truncated_amo(inst, 0, 0)
        assert mr.value == 1.0
        assert mr.clamped

    def test_branch_child_never_unsatisfiable(self, amo_corpus_normalized):
        for seed, _, norm in amo_corpus_normalized[:60]:
            for x in norm.free_vars():
                occ = norm.occ[x]
                for j in range(len(occ)):
                    w = len(norm.constraints[occ[j]]) - 1
                    for i in range(w):
                        var, child = amo_branch_child(norm, x, j, i)
                        assert child.degree(var) <= 2 or child.pins[var] == PINNED_ONE

    def test_oracle_equivalence_sample(self, amo_corpus_normalized):
        for seed, _, norm in amo_corpus_normalized[:80]:
            memo = {}
            for x, want in exact_marginals(norm).items():
                got = marginal_exact_amo(norm, x, memo=memo)
                assert got == want, (seed, x)

    def test_range(self, amo_corpus_normalized):
        for seed, _, norm in amo_corpus_normalized[:40]:
            for x in norm.free_vars():
                for depth in (0, 2, 5):
                    v = marginal_truncated_amo(norm, x, depth).value
                    assert 0.0 <= v <= 1.0, (seed, x, depth)


class TestCounting:
    def test_certified_depth_value(self):
        assert certified_depth_amo(10, 0.1) == 755

    def test_empty_instance(self):
        z, factors = count_matchings_exact(amo(4, []))
        assert z == 16
        assert len(factors) == 4

    def test_exact_equals_brute_on_corpus(self, amo_corpus):
        for seed, h, inst in amo_corpus[:80]:
            z = count_matchings_exact(inst)[0]
            assert z == count_hypergraph_matchings_brute(h), seed
            assert z == exact_count(inst), seed

    def test_adaptive_estimate(self, amo_corpus):
        for seed, h, inst in amo_corpus[:30]:
            est = count_matchings(inst, adaptive(0.01))
            z = exact_count(inst)
            assert abs(est.count / z - 1) <= 0.01, seed

    def test_heuristic_mode(self):
        inst = from_hypergraph(Hypergraph.from_raw(3, [(0, 1), (1, 2)]))
        est = count_matchings(inst, heuristic(6))
        assert round(est.count) == 3

    def test_pinned_variables_contribute_factor_one(self):
        inst = amo(3, [(0, 1)], pins={2: 0})
        z, factors = count_matchings_exact(inst)
        assert z == 3  # x2 is forced, (x0,x1) leaves 3 options
        assert [x for x, _ in factors] == [0, 1]

    def test_decay_envelope_sample(self, amo_corpus_normalized):
        env = 4 * 6**0.5
        for seed, _, norm in amo_corpus_normalized[:25]:
            margs = exact_marginals(norm)
            for x, frac in margs.items():
                if norm.degree(x) == 0:
                    continue
                exact = float(frac)
                value, clamped = None, True
                for depth in range(11):
                    if clamped:
                        mr = marginal_truncated_amo(norm, x, depth)
                        value, clamped = mr.value, mr.clamped
                    assert abs(value - exact) <= env * 0.99**depth, (seed, x, depth)
