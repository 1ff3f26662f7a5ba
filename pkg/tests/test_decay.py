"""Potential function, decay rates, grid maximization, decay curves."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings, strategies as st

from covercount import (
    KappaSpec,
    MonotoneCnf,
    empirical_decay_curve,
    eval_kappa,
    from_hypergraph,
    grid_max,
    normalize,
)
from covercount.amo import Hypergraph
from covercount.constants import CNF_DECAY_BASE, SQRT6
from covercount.decay import phi, phi_deriv, phi_inv, phi_inv_deriv

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


class TestPotential:
    @given(unit)
    def test_inverse_identity(self, x):
        assert phi_inv(phi(x)) == pytest.approx(x, abs=1e-12)

    @given(unit, unit)
    def test_monotone(self, a, b):
        lo, hi = sorted((a, b))
        assert phi(lo) <= phi(hi)

    def test_endpoints(self):
        assert phi(0.0) == 0.0
        assert phi(1.0) < 2.0

    @given(st.floats(min_value=0.0, max_value=1.999999, allow_nan=False))
    def test_inv_derivative_below_sqrt6(self, y):
        d = phi_inv_deriv(y)
        assert 0.0 <= d < SQRT6
        assert d == pytest.approx(
            math.sqrt(phi_inv(y) * (1.0 + phi_inv(y))), abs=1e-12
        )

    @given(st.floats(min_value=1e-6, max_value=1.0, allow_nan=False))
    def test_derivatives_are_reciprocal(self, x):
        assert phi_deriv(x) * phi_inv_deriv(phi(x)) == pytest.approx(1.0, rel=1e-9)

    def test_identities_over_dense_sweep(self):
        # 10^4 seeded points across the whole domain
        import random

        rng = random.Random(99)
        for _ in range(10_000):
            x = rng.random()
            assert abs(phi_inv(phi(x)) - x) <= 1e-12
            y = rng.uniform(0.0, 1.999)
            assert phi_inv_deriv(y) < SQRT6


class TestEvalKappa:
    def test_reference_point(self):
        got = eval_kappa(KappaSpec("cnf_single", (1,)), (0.5,))
        assert got == pytest.approx(1.0 / (SQRT6 * CNF_DECAY_BASE), abs=1e-12)

    def test_zero_coordinate_kills_group(self):
        spec = KappaSpec("cnf_single", (1, 2))
        full = eval_kappa(spec, (0.3, 0.0))
        only_first = eval_kappa(KappaSpec("cnf_single", (1,)), (0.3,))
        # the width-2 group contributes nothing; only the leading factor
        # (which still sees both groups' product) differs from the 1-group rate
        assert full <= only_first
        assert full > 0.0

    def test_boundary_continuity(self):
        for family, dim_w in (("cnf_single", (2,)), ("cnf_two", (2,))):
            spec = KappaSpec(family, dim_w)
            at_zero = eval_kappa(spec, (0.0,) * spec.dim)
            near_zero = eval_kappa(spec, (1e-9,) * spec.dim)
            assert at_zero == pytest.approx(near_zero, abs=1e-3)

    def test_two_layer_restriction_matches_single_layer(self):
        # fixing all but the first child of each group to 1/2 recovers the
        # single-layer rate exactly
        w = (2, 3)
        t = (0.31, 0.47)
        point = (t[0], 0.5, t[1], 0.5, 0.5)
        assert eval_kappa(KappaSpec("cnf_two", w), point) == pytest.approx(
            eval_kappa(KappaSpec("cnf_single", w), t), abs=1e-12
        )

    def test_amo_equal_children_match_single_layer(self):
        w = (2, 3)
        r = (0.6, 0.2)
        point = (r[0], r[0], r[1], r[1], r[1])
        assert eval_kappa(KappaSpec("amo_two", w), point) == pytest.approx(
            eval_kappa(KappaSpec("amo_single", w), r), abs=1e-12
        )

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            eval_kappa(KappaSpec("cnf_single", (1,)), (0.7,))
        with pytest.raises(ValueError):
            KappaSpec("cnf_single", (2, 1))
        with pytest.raises(ValueError):
            KappaSpec("nope", (1,))

    @given(st.floats(min_value=0.0, max_value=0.99, allow_nan=False),
           st.floats(min_value=1e-6, max_value=0.01, allow_nan=False))
    @settings(max_examples=60)
    def test_g_factor_monotone(self, h, dh):
        g = lambda v: math.sqrt(v / (1.0 + v))
        assert g(h) <= g(h + dh)


class TestGridMax:
    def test_single_group_width_one(self):
        rep = grid_max(KappaSpec("cnf_single", (1,)), bound=0.42)
        assert rep.value == pytest.approx(1.0 / (SQRT6 * CNF_DECAY_BASE), abs=1e-3)
        assert rep.argmax == (0.5,)
        assert rep.passed

    def test_restricted_box_argmax_location(self):
        # three width-1 groups and a width-2 group confined below 0.2: the
        # width-1 coordinates peak near 0.28
        box = ((0.0, 0.5),) * 3 + ((0.0, 0.199),)
        rep = grid_max(KappaSpec("cnf_single", (1, 1, 1, 2), box=box), resolution=49)
        for coord in rep.argmax[:3]:
            assert 0.27 < coord < 0.29, rep.argmax

    def test_amo_two_layer_33(self):
        rep = grid_max(KappaSpec("amo_two", (3, 3)), bound=0.98)
        assert rep.passed
        assert rep.value > 0.9  # the bound is nearly tight

    def test_deterministic(self):
        a = grid_max(KappaSpec("cnf_single", (1, 2)))
        b = grid_max(KappaSpec("cnf_single", (1, 2)))
        assert a == b

    def test_two_layer_max_at_least_single_layer(self):
        for w in ((1,), (1, 1), (2,)):
            two = grid_max(KappaSpec("cnf_two", w)).value
            single = grid_max(KappaSpec("cnf_single", w)).value
            assert two >= single - 1e-9

    def test_resolution_stability(self):
        # doubling the resolution never moves a maximum by more than the
        # grid tolerance, so passing bounds cannot silently flip
        for spec in (KappaSpec("cnf_single", (1,)), KappaSpec("cnf_single", (1, 1)),
                     KappaSpec("amo_single", (3,))):
            coarse = grid_max(spec).value
            res = {1: 4097, 2: 513}[spec.dim]
            fine = grid_max(spec, resolution=2 * res - 1).value
            assert abs(fine - coarse) <= 1e-3


class TestDecayCurve:
    def test_cnf_l0_error(self):
        inst = MonotoneCnf.from_raw(2, [(0, 1)])
        curve = empirical_decay_curve(inst, 0, 5)
        depth0 = curve[0]
        assert depth0[0] == 0
        assert depth0[1] == pytest.approx(0.5)  # guess 1 vs exact 1/2
        assert depth0[2] == pytest.approx(5 * SQRT6)

    def test_error_vanishes_once_tree_is_complete(self, cnf_corpus):
        for seed, _, formed in cnf_corpus[:15]:
            for x in formed.constrained_vars()[:2]:
                curve = empirical_decay_curve(formed, x, 30)
                assert curve[-1][1] <= 1e-12, (seed, x)

    def test_envelope_holds(self, cnf_corpus):
        for seed, _, formed in cnf_corpus[:15]:
            for x in formed.constrained_vars():
                for depth, err, env in empirical_decay_curve(formed, x, 30):
                    assert err <= env, (seed, x, depth)

    def test_amo_curve(self):
        inst = normalize(from_hypergraph(Hypergraph.from_raw(3, [(0, 1), (1, 2)])))
        curve = empirical_decay_curve(inst, 0, 10)
        assert curve[0][1] == pytest.approx(1 - 1 / 2)  # guess 1 vs exact 1/2
        assert curve[-1][1] <= 1e-12
        assert all(err <= env for _, err, env in curve)
