import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from hqeuler.characters import enumerate_characters, ring_for
from hqeuler.congruence import (
    CongruenceError,
    forward_difference,
    forward_difference_recursive,
    kummer_check,
    pair_congruence_check,
)
from hqeuler.cyclotomic import CycloRing
from hqeuler.euler import EulerParams
from hqeuler.lfunction import LFunctionSpec, epsilon


def spec_for(p=5, d=1, r=7, h=1, q=6, char=0, prec=30):
    chars = enumerate_characters(d)
    ring = ring_for(r, chars, p, prec)
    return LFunctionSpec(chars[char], EulerParams(0, h, q, ring, ring.M // r, d), 12)


class TestForwardDifference:
    def test_k_zero(self):
        assert forward_difference([5, 9, 11], 1, 0, 2) == 11

    def test_linear(self):
        assert forward_difference(list(range(10)), 2, 1, 0) == 2

    def test_third_difference_of_quadratic(self):
        seq = [m * m for m in range(30)]
        for m in range(10):
            assert forward_difference(seq, 1, 3, m) == 0

    @settings(max_examples=50)
    @given(st.lists(st.integers(-1000, 1000), min_size=40, max_size=40),
           st.integers(1, 4), st.integers(0, 5), st.integers(0, 10))
    def test_recursive_matches_binomial(self, seq, c, k, m):
        if m + k * c >= len(seq):
            return
        assert forward_difference(seq, c, k, m) == forward_difference_recursive(seq, c, k, m)

    def test_linearity_in_ring(self):
        R = CycloRing(7, 5, 12)
        rng = random.Random(1)
        a = [R.root_of_unity(rng.randrange(7)).scale(rng.randrange(100)) for _ in range(20)]
        b = [R.root_of_unity(rng.randrange(7)).scale(rng.randrange(100)) for _ in range(20)]
        alpha, beta = R.root_of_unity(2).scale(3), R.root_of_unity(5)
        mix = [alpha * x + beta * y for x, y in zip(a, b)]
        lhs = forward_difference(mix, 4, 3, 1)
        rhs = alpha * forward_difference(a, 4, 3, 1) + beta * forward_difference(b, 4, 3, 1)
        assert (lhs - rhs).is_zero()

    def test_missing_entry(self):
        with pytest.raises(CongruenceError):
            forward_difference([1, 2], 1, 3, 0)


class TestKummer:
    @pytest.mark.parametrize("k", [1, 2])
    def test_trivial_character(self, k):
        rep = kummer_check(spec_for(), 4, k, range(9))
        assert rep.passed, rep.residuals
        assert all(v >= 0 for v in rep.integrality)

    def test_k_zero_is_integrality(self):
        rep = kummer_check(spec_for(), 4, 0, range(5))
        assert rep.passed and rep.residuals == rep.integrality

    def test_c_must_be_multiple_of_p_minus_one(self):
        with pytest.raises(CongruenceError):
            kummer_check(spec_for(), 3, 1, range(3))

    def test_quadratic_character_p7(self):
        rep = kummer_check(spec_for(p=7, d=3, r=5, char=1, q=8), 6, 2, range(5))
        assert rep.passed, rep.residuals

    def test_detects_a_perturbed_value(self):
        spec = spec_for()
        eps = {i: epsilon(i, spec) for i in range(10)}
        eps[4] = eps[4] + spec.params.ring.one()
        assert forward_difference(eps, 4, 2, 0).min_valuation() == 0
        assert forward_difference(eps, 4, 2, 1).min_valuation() >= 2


class TestPairs:
    def test_equal_indices(self):
        rep = pair_congruence_check(spec_for(), 3, 3)
        assert rep.residuals[0] == math.inf or rep.residuals[0] >= 30 - 8

    def test_trivial_p5(self):
        assert pair_congruence_check(spec_for(), 6, 2).passed

    def test_quadratic_p7(self):
        assert pair_congruence_check(spec_for(p=7, d=3, r=5, char=1, q=8), 7, 1).passed

    def test_incongruent_indices_rejected(self):
        with pytest.raises(CongruenceError):
            pair_congruence_check(spec_for(), 3, 2)

    def test_zero_index_needs_opt_in(self):
        with pytest.raises(CongruenceError):
            pair_congruence_check(spec_for(), 4, 0)
        assert pair_congruence_check(spec_for(), 4, 0, allow_zero=True).residuals
