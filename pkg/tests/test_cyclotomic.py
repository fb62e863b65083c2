import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hqeuler.cyclotomic import (
    CycloRing,
    CyclotomicError,
    cyclotomic_poly,
    euler_phi,
    poly_mul,
)
from hqeuler.padic import PadicScalar


def divisors(n):
    return [k for k in range(1, n + 1) if n % k == 0]


class TestCyclotomicPolynomials:
    def test_small_cases(self):
        assert list(cyclotomic_poly(1)) == [-1, 1]
        assert list(cyclotomic_poly(4)) == [1, 0, 1]

    @pytest.mark.parametrize("M", [6, 12, 15, 21, 28])
    def test_product_over_divisors(self, M):
        prod = [1]
        for k in divisors(M):
            prod = poly_mul(prod, cyclotomic_poly(k))
        assert prod == [-1] + [0] * (M - 1) + [1]

    def test_degree_fifteen(self):
        assert len(cyclotomic_poly(15)) - 1 == 8 == euler_phi(15)

    @pytest.mark.parametrize("M", [3, 7, 12])
    def test_roots_are_primitive(self, M):
        phi = cyclotomic_poly(M)
        z = cmath.exp(2j * math.pi / M)
        assert abs(sum(c * z**i for i, c in enumerate(phi))) < 1e-10


class TestRingArithmetic:
    def test_x_squared_is_minus_one_for_m4(self):
        R = CycloRing(4, 7, 6)
        x = R.root_of_unity(1)
        assert (x * x - R.one()).min_valuation() == 0
        assert (x * x + R.one()).is_zero()

    def test_invert_one(self):
        R = CycloRing(4, 7, 6)
        assert (R.one().invert() - R.one()).is_zero()

    def test_invert_one_plus_x(self):
        R = CycloRing(4, 7, 8)
        a = R.one() + R.root_of_unity(1)
        inv = a.invert()
        # independent oracle: (1+x)(1-x)=1-x^2=2, so 1/(1+x) = (1-x)/2
        half = pow(2, -1, 7**8)
        expected = R.element([half, -half % 7**8])
        assert (inv - expected).min_valuation() >= 8
        assert (a * inv - R.one()).min_valuation() >= 8

    def test_invert_non_unit_raises(self):
        # Phi_3 = (x - 2)(x - 4) mod 7, so x - 2 is a zero divisor mod 7
        R = CycloRing(3, 7, 5)
        with pytest.raises(ValueError):
            (R.root_of_unity(1) - R.one().scale(2)).invert()

    def test_invert_p_multiple_shifts_valuation(self):
        R = CycloRing(3, 7, 5)
        inv = R.one().scale(7).invert()
        assert inv.min_valuation() == -1

    def test_invert_in_rational_mode(self):
        R = CycloRing(5)
        a = R.one().scale(3) + R.root_of_unity(2)
        assert a * a.invert() == R.one()

    def test_padic_mode_rejects_p_dividing_m(self):
        with pytest.raises(CyclotomicError):
            CycloRing(10, 5, 4)

    def test_root_of_unity_trivial(self):
        R = CycloRing(4, 5, 4)
        assert (R.root_of_unity(0) - R.one()).is_zero()
        assert (R.root_of_unity(2) + R.one()).is_zero()

    @settings(max_examples=40)
    @given(st.integers(-50, 50), st.integers(-50, 50), st.sampled_from([3, 7, 12]))
    def test_group_law(self, k, j, M):
        R = CycloRing(M, 5, 6)
        assert (R.root_of_unity(k) * R.root_of_unity(j) - R.root_of_unity(k + j)).is_zero()
        assert (R.root_of_unity(k) ** M - R.one()).is_zero()

    def test_min_valuation_examples(self):
        R = CycloRing(7, 5, 8)
        assert R.zero().min_valuation() == math.inf
        a = R.one().scale(5) + R.root_of_unity(1).scale(125)
        assert a.min_valuation() == 1

    @settings(max_examples=40)
    @given(st.lists(st.integers(-10**6, 10**6), min_size=6, max_size=6),
           st.lists(st.integers(-10**6, 10**6), min_size=6, max_size=6))
    def test_min_valuation_submultiplicative(self, u, v):
        R = CycloRing(7, 5, 12)
        a, b = R.element(u), R.element(v)
        prod = a * b
        if not prod.is_zero():
            assert prod.min_valuation() >= a.min_valuation() + b.min_valuation()

    @settings(max_examples=30)
    @given(st.lists(st.integers(1, 10**6), min_size=6, max_size=6), st.integers(1, 5))
    def test_free_basis_gauge_shift(self, u, k):
        R = CycloRing(7, 5, 20)
        a = R.element(u)
        assert a.scale(5**k).min_valuation() == a.min_valuation() + k

    @pytest.mark.parametrize("r", [3, 5, 7, 9, 15])
    def test_product_of_one_plus_roots_of_unity(self, r):
        # over all r-th roots the product is -((-1)^r - 1) = 2, from x^r - 1 at -1;
        # over the primitive ones it is Phi_r(-1) = 1 for odd r > 1
        R = CycloRing(r)
        every, primitive = R.one(), R.one()
        for k in range(r):
            term = R.one() + R.root_of_unity(k)
            every = every * term
            if math.gcd(k, r) == 1:
                primitive = primitive * term
        assert every == R.one().scale(2)
        assert primitive == R.one()

    def test_absprec_of_product(self):
        R = CycloRing(3, 5, 10)
        a = R.element([5, 1], absprec=6)
        b = R.element([25, 0], absprec=10)
        assert (a * b).absprec == min(6 + 2, 10 + 0)

    def test_scale_by_fraction_and_padic_scalar(self):
        R = CycloRing(3, 5, 6)
        x = R.root_of_unity(1).scale(Fraction(1, 5))
        assert x.min_valuation() == -1
        y = R.one().scale(PadicScalar.from_int(25, 5, 6))
        assert y.min_valuation() == 2

    def test_embed_rational_into_padic(self):
        Q = CycloRing(3)
        a = Q.one().scale(Fraction(2, 3)) + Q.root_of_unity(1)
        R = CycloRing(3, 5, 8)
        e = a.embed(R)
        assert (e.scale(3) - R.one().scale(2) - R.root_of_unity(1).scale(3)).min_valuation() >= 8

    def test_json_round_trip(self):
        R = CycloRing(7, 5, 6)
        a = R.element([1, 5, 0, 3, 25, 7])
        assert (R.from_json(a.to_json()) - a).min_valuation() >= 6
