import math
from fractions import Fraction

import pytest

from hqeuler.characters import DirichletCharacter, enumerate_characters, primitivize, ring_for
from hqeuler.cyclotomic import CycloRing
from hqeuler.euler import (
    EulerError,
    EulerParams,
    classical_generalized_numbers,
    classical_twisted_numbers,
    distribution_rhs,
    generalized_twisted_number,
    poly_from_numbers,
    qbracket,
    qbracket_neg,
    twisted_hq_euler_number,
    twisted_hq_euler_numbers,
    twisted_hq_euler_poly,
)

PREC = 20


def padic_params(n, p=5, r=7, h=1, q=6, d=1, M=None, prec=PREC):
    M = M or r
    ring = CycloRing(M, p, prec)
    return EulerParams(n, h, q, ring, M // r, d)


def explicit_low_degree(n, q, h, w, x):
    """E_0, E_1, E_2 written out term by term, evaluated in an exact rational ring."""
    one = w.ring.one()
    q = Fraction(q)

    def inv(m):
        return (one + w.scale(q**m)).invert()

    if n == 0:
        return inv(h).scale(1 + q)
    if n == 1:
        return (inv(h) - inv(h + 1).scale(q**x)).scale((1 + q) / (1 - q))
    if n == 2:
        return (inv(h) - inv(h + 1).scale(2 * q**x) + inv(h + 2).scale(q ** (2 * x))).scale(
            (1 + q) / (1 - q) ** 2)
    raise ValueError(n)


def series_mul(a, b, N):
    out = [a[0].ring.zero() for _ in range(N)]
    for i, x in enumerate(a[:N]):
        for j, y in enumerate(b[: N - i]):
            out[i + j] = out[i + j] + x * y
    return out


def series_inv(a, N):
    inv0 = a[0].invert()
    out = [inv0]
    for k in range(1, N):
        acc = a[0].ring.zero()
        for j in range(1, k + 1):
            if j < len(a):
                acc = acc + a[j] * out[k - j]
        out.append(-(acc * inv0))
    return out


def exp_series(c, ring, N):
    return [ring.one().scale(Fraction(c) ** k / math.factorial(k)) for k in range(N)]


def generating_function_numbers(w, chi, d, N):
    """n! [z^n] of 2 sum_{i<d} (-1)^i chi(i) w^i e^{iz} / (w^d e^{dz} + 1) by series division."""
    ring = w.ring
    num = [ring.zero() for _ in range(N)]
    for i in range(d):
        if not chi.is_unit(i):
            continue
        c = (chi.evaluate(i, ring) * w**i).scale(2 * (-1) ** i)
        num = [a + b.scale(1) * c for a, b in zip(num, exp_series(i, ring, N))]
    den = [t * w**d for t in exp_series(d, ring, N)]
    den[0] = den[0] + ring.one()
    coeffs = series_mul(num, series_inv(den, N), N)
    return [c.scale(math.factorial(k)) for k, c in enumerate(coeffs)]


class TestBrackets:
    def test_integer_q(self):
        assert qbracket(3, 2) == 7
        assert qbracket_neg(3, 2) == 3

    def test_limit_at_one(self):
        assert qbracket(Fraction(7, 3), 1) == Fraction(7, 3)


class TestClosedForm:
    @pytest.mark.parametrize("n", [0, 1, 2])
    @pytest.mark.parametrize("h", [1, 2, 3])
    @pytest.mark.parametrize("x", [0, 1, 4])
    def test_explicit_low_degree_in_rational_mode(self, n, h, x):
        R = CycloRing(7)
        w = R.root_of_unity(1)
        P = EulerParams(n, h, 6, R, 1)
        assert twisted_hq_euler_poly(P, x) == explicit_low_degree(n, 6, h, w, x)

    @pytest.mark.parametrize("n", [0, 1, 2])
    @pytest.mark.parametrize("q", [6, 51])
    def test_explicit_low_degree_padic(self, n, q):
        Rq = CycloRing(7)
        want = explicit_low_degree(n, q, 2, Rq.root_of_unity(1), 3)
        P = padic_params(n, q=q, h=2)
        got = twisted_hq_euler_poly(P, 3)
        assert (got - want.embed(P.ring)).min_valuation() >= 12

    def test_n_zero_independent_of_x(self):
        P = padic_params(0)
        vals = [twisted_hq_euler_poly(P, x) for x in (0, 1, 7, Fraction(2, 3))]
        assert all((v - vals[0]).is_zero() for v in vals)

    def test_number_is_poly_at_zero(self):
        P = padic_params(3)
        assert (twisted_hq_euler_number(P) - twisted_hq_euler_poly(P, 0)).is_zero()

    def test_even_twist_rejected(self):
        with pytest.raises(EulerError):
            padic_params(1, r=4)

    def test_q_not_one_mod_p_rejected(self):
        with pytest.raises(EulerError):
            padic_params(1, q=7)

    def test_precision_loss_bounded(self):
        P = padic_params(5, q=1 + 2 * 25)
        assert P.ring.prec - twisted_hq_euler_number(P).absprec <= 5 * 2 + 2


class TestIdentities:
    @pytest.mark.parametrize("n", range(7))
    @pytest.mark.parametrize("x", [0, 1, 2, Fraction(2, 3)])
    def test_poly_from_numbers(self, n, x):
        P = padic_params(n, q=6, h=2)
        res = (twisted_hq_euler_poly(P, x) - poly_from_numbers(P, x)).min_valuation()
        assert res >= 12

    def test_poly_from_numbers_at_zero_is_number(self):
        P = padic_params(4)
        assert (poly_from_numbers(P, 0) - twisted_hq_euler_number(P)).min_valuation() >= 12

    @pytest.mark.parametrize("n", range(5))
    @pytest.mark.parametrize("d2", [1, 3])
    @pytest.mark.parametrize("x", [0, 1])
    def test_distribution_identity(self, n, d2, x):
        P = padic_params(n, q=6, h=1)
        res = (twisted_hq_euler_poly(P, x) - distribution_rhs(P, x, d2)).min_valuation()
        assert res >= 12

    def test_distribution_identity_p7_d5(self):
        P = padic_params(3, p=7, r=5, q=1 + 2 * 49, h=2)
        res = (twisted_hq_euler_poly(P, 1) - distribution_rhs(P, 1, 5)).min_valuation()
        assert res >= 12

    def test_distribution_rejects_even_or_p_divisible_modulus(self):
        P = padic_params(1)
        for bad in (2, 5):
            with pytest.raises(EulerError):
                distribution_rhs(P, 0, bad)


class TestGeneralized:
    def test_trivial_character_gives_plain_number(self):
        P = padic_params(3)
        chi = DirichletCharacter.trivial(1)
        assert (generalized_twisted_number(P, chi) - twisted_hq_euler_number(P)).min_valuation() >= 12

    def test_n_zero_trivial(self):
        P = padic_params(0, q=6, h=2)
        chi = DirichletCharacter.trivial(1)
        Rq = CycloRing(7)
        want = explicit_low_degree(0, 6, 2, Rq.root_of_unity(1), 0).embed(P.ring)
        assert (generalized_twisted_number(P, chi) - want).min_valuation() >= 12

    @pytest.mark.parametrize("n", range(5))
    def test_modulus_independence(self, n):
        chars = enumerate_characters(3)
        ring = ring_for(7, chars, 5, PREC)
        P = EulerParams(n, 1, 6, ring, ring.M // 7, 3)
        for chi in chars:
            a = generalized_twisted_number(P, chi, 3)
            for D in (9, 21):
                assert (a - generalized_twisted_number(P, chi, D)).min_valuation() >= 12

    def test_rejects_modulus_not_multiple_of_conductor(self):
        P = padic_params(1)
        with pytest.raises(EulerError):
            generalized_twisted_number(P, enumerate_characters(3)[1], 7)


class TestClassical:
    def test_w_one_values(self):
        nums = classical_twisted_numbers(3, CycloRing(1).one())
        assert [e.coeffs[0] for e in nums] == [1, Fraction(-1, 2), 0, Fraction(1, 4)]

    def test_w_one_matches_recurrence_oracle(self):
        # E_0 = 1 and E_k = -(1/2) sum_{j<k} C(k,j) E_j for w = 1
        E = [Fraction(1)]
        for k in range(1, 12):
            E.append(-sum(math.comb(k, j) * E[j] for j in range(k)) / 2)
        got = classical_twisted_numbers(11, CycloRing(1).one())
        assert [e.coeffs[0] for e in got] == E

    def test_twisted_match_generating_function(self):
        R = CycloRing(5)
        w = R.root_of_unity(2)
        got = classical_twisted_numbers(6, w)
        want = generating_function_numbers(w, DirichletCharacter.trivial(1), 1, 7)
        assert got == want

    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_generalized_match_generating_function(self, d):
        chars = enumerate_characters(d)
        R = ring_for(3, chars, None, None)
        w = R.root_of_unity(R.M // 3)
        for chi in chars:
            want = generating_function_numbers(w, chi, d, 6)
            for n in range(6):
                assert classical_generalized_numbers(n, w, chi, d) == want[n]

    def test_generalized_n_zero_closed_form(self):
        R = CycloRing(2 * 7 // math.gcd(2, 7))
        w = R.root_of_unity(2)
        chi = enumerate_characters(3)[1]
        expected = R.zero()
        for i in range(3):
            expected = expected + (chi.evaluate(i, R) * w**i).scale(2 * (-1) ** i)
        expected = expected * (w**3 + R.one()).invert()
        assert classical_generalized_numbers(0, w, chi, 3) == expected

    def test_padic_q_one_matches_embedded_rational(self):
        chars = enumerate_characters(3)
        Rq = ring_for(7, chars, None, None)
        Rp = ring_for(7, chars, 5, PREC)
        for n in range(5):
            for chi in chars:
                P = EulerParams(n, 1, 1, Rp, Rp.M // 7, 3)
                got = generalized_twisted_number(P, chi)
                prim = primitivize(chi)
                want = classical_generalized_numbers(n, Rq.root_of_unity(Rq.M // 7), prim,
                                                     prim.modulus)
                assert (got - want.embed(Rp)).min_valuation() >= 12

    @pytest.mark.parametrize("p", [5, 7])
    def test_q_to_one_convergence(self, p):
        ring = CycloRing(1, p, PREC)
        target = classical_twisted_numbers(3, CycloRing(1).one())
        for n in range(4):
            vals = []
            for a in (1, 2, 3):
                P = EulerParams(n, 1, 1 + p**a, ring)
                vals.append((twisted_hq_euler_number(P) - target[n].embed(ring)).min_valuation())
            assert vals == sorted(vals)
            # n = 0 is exact for every q since E_0 = [2]_q/(1 + q) = 1
            assert vals[0] < vals[-1] or vals[0] >= PREC

    def test_numbers_list(self):
        P = padic_params(0)
        nums = twisted_hq_euler_numbers(P, 3)
        assert len(nums) == 4
        assert (nums[3] - twisted_hq_euler_number(P.with_n(3))).is_zero()
