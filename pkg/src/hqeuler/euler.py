"""q-integers and twisted (h,q)-Euler numbers and polynomials.

Values live in a :class:`CycloRing`.  In p-adic mode q is an integer with
q = 1 (mod p), stored either exactly or as a residue mod p**q_prec; the
twisting root of unity is xi = x**xi_power.  At q = 1 the closed form has a
removable (1 - q)**(-n) singularity, so every entry point that admits q = 1
switches to the classical numbers obtained from the generating-function
recurrence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from .characters import DirichletCharacter, conductor, primitivize
from .cyclotomic import CycloElem, CycloRing
from .padic import PadicScalar, qpow_int, vp


class EulerError(ValueError):
    pass


# -- q-integers ---------------------------------------------------------------


def qbracket(x, q):
    """[x]_q = (1 - q**x)/(1 - q), with [x]_1 = x.

    ``q`` may be an int, Fraction, complex number or a PadicScalar; for a
    PadicScalar q the exponent may be any p-adic integer.
    """
    if isinstance(q, PadicScalar):
        from .padic import qpow
        one = PadicScalar.from_int(1, q.prime, max(q.precision, 1))
        if (one - q).is_zero:
            return x if isinstance(x, PadicScalar) else PadicScalar.from_rational(
                x, q.prime, q.precision)
        return (one - qpow(q, x)) / (one - q)
    if q == 1:
        return x
    if isinstance(q, (int, Fraction)) and isinstance(x, int):
        value = (1 - Fraction(q) ** x) / (1 - Fraction(q))
        return int(value) if value.denominator == 1 else value
    return (1 - q**x) / (1 - q)


def qbracket_neg(x, q):
    """[x]_{-q} = (1 - (-q)**x)/(1 + q)."""
    if isinstance(q, (int, Fraction)) and isinstance(x, int):
        value = (1 - Fraction(-q) ** x) / (1 + Fraction(q))
        return int(value) if value.denominator == 1 else value
    return (1 - (-q) ** x) / (1 + q)


def qint_residue(q: int, m: int, p: int, prec: int) -> int:
    """[m]_q mod p**prec for an integer q = 1 (mod p) and m >= 0."""
    if q == 1:
        return m % p**prec
    v = vp(q - 1, p)
    big = p ** (prec + v)
    num = (1 - pow(q, m, big)) % big
    return (num // p**v) * pow((1 - q) // p**v, -1, p**prec) % p**prec


# -- parameters ---------------------------------------------------------------


@dataclass(frozen=True)
class EulerParams:
    """(n, h, q, xi, d): degree, weight exponent, q, twist and the modulus of X_d.

    ``q`` is an integer (p-adic or rational mode) or a Fraction (rational
    mode).  ``q_prec`` is None when q is exact and otherwise the number of
    p-adic digits to which the stored residue represents q.
    """

    n: int
    h: int
    q: object
    ring: CycloRing
    xi_power: int = 0
    d: int = 1
    q_prec: Optional[int] = None
    allow_even_r: bool = False

    def __post_init__(self):
        if self.n < 0:
            raise EulerError(f"degree n must be >= 0, got {self.n}")
        ring = self.ring
        r = self.r
        if ring.padic:
            p = ring.prime
            if not isinstance(self.q, int):
                raise EulerError("p-adic mode needs an integer q")
            if (self.q - 1) % p:
                raise EulerError(f"q must be = 1 (mod p), got q={self.q}, p={p}")
            if math.gcd(r, p) != 1:
                raise EulerError(f"twist order r={r} must be prime to p={p}")
            if self.d % 2 == 0 or math.gcd(self.d, p) != 1:
                raise EulerError(f"d={self.d} must be odd and prime to p={p}")
        if r % 2 == 0 and not self.allow_even_r:
            raise EulerError(f"twist order r={r} must be odd (the denominators "
                             "1 + xi**k q**m can vanish mod p otherwise)")

    @property
    def r(self) -> int:
        return self.ring.M // math.gcd(self.ring.M, self.xi_power)

    @property
    def p(self) -> Optional[int]:
        return self.ring.prime

    @property
    def xi(self) -> CycloElem:
        return self.ring.root_of_unity(self.xi_power)

    @property
    def is_classical(self) -> bool:
        return self.q == 1

    def with_n(self, n: int) -> "EulerParams":
        return replace(self, n=n)

    def with_power(self, m: int) -> "EulerParams":
        """Parameters for q**m and xi**m."""
        if m == 1:
            return self
        if self.ring.padic:
            K = self.q_prec or 2 * self.ring.prec + 2 * vp(m, self.ring.prime)
            K = min(K, 2 * self.ring.prec + 2 * vp(m, self.ring.prime))
            q = pow(self.q, m, self.ring.prime**K) if self.q != 1 else 1
            qp = None if self.q == 1 else K
        else:
            q, qp = Fraction(self.q) ** m if self.q != 1 else 1, None
            if isinstance(q, Fraction) and q.denominator == 1:
                q = int(q)
        return replace(self, q=q, xi_power=self.xi_power * m, q_prec=qp)

    # -- scalar helpers in the ring's coefficient domain --

    def qpow(self, e):
        """q**e as an integer residue (p-adic mode) or an exact rational."""
        ring = self.ring
        if ring.padic:
            return qpow_int(self.q, e, ring.prime, ring.prec)
        if Fraction(e).denominator != 1:
            raise EulerError("rational mode only supports integral exponents of q")
        return Fraction(self.q) ** int(e)

    def one_minus_q(self):
        """1 - q as an exact Fraction or as a PadicScalar carrying q's precision."""
        if self.ring.padic and self.q_prec is not None:
            return PadicScalar.from_residue(1 - self.q, self.ring.prime, self.q_prec)
        return Fraction(1 - self.q)

    def q_integer(self, m: int):
        """[m]_q, as an exact value or a PadicScalar."""
        ring = self.ring
        if self.q == 1:
            return Fraction(m)
        if ring.padic:
            # [m]_q is a p-adic unit times p^v(m); a residue with twice the
            # working precision is exact for every product formed downstream
            p = ring.prime
            K = 2 * ring.prec
            if self.q_prec is not None:
                K = min(K, self.q_prec - vp(self.q - 1, p))
            return PadicScalar.from_int(qint_residue(self.q, m, p, K + vp(m, p)), p, K)
        return Fraction(qbracket(m, self.q))

    def two_q(self):
        """[2]_q = 1 + q."""
        if self.ring.padic and self.q_prec is not None:
            return PadicScalar.from_int(1 + self.q, self.ring.prime, self.q_prec)
        return Fraction(1 + self.q) if not isinstance(self.q, Fraction) else 1 + self.q


MeasureParams = EulerParams


def _inverse_scalar(c):
    return c.inverse() if isinstance(c, PadicScalar) else 1 / Fraction(c)


def unit_denominator_inverse(params: EulerParams, coeff, m) -> CycloElem:
    """1/(1 + xi**coeff * q**m) in the ring."""
    ring = params.ring
    elem = ring.one() + ring.root_of_unity(params.xi_power * coeff).scale(params.qpow(m))
    try:
        return elem.invert()
    except ValueError as exc:
        raise EulerError(f"denominator 1 + xi^{coeff} q^{m} is not a unit: {exc}") from exc


# -- twisted (h,q)-Euler polynomials --------------------------------------------


def _closed_form(params: EulerParams, x) -> CycloElem:
    """[2]_q/(1-q)^n * sum_j C(n,j) (-1)^j q^{xj} / (1 + xi q^{h+j})."""
    if params.q == 1:
        raise EulerError("the closed form divides by 1 - q; use the classical route at q = 1")
    ring = params.ring
    n, h = params.n, params.h
    total = ring.zero()
    for j in range(n + 1):
        inv = unit_denominator_inverse(params, 1, h + j)
        coeff = math.comb(n, j) * (-1) ** j
        term = inv.scale(params.qpow(Fraction(x) * j if not isinstance(x, PadicScalar)
                                     else x * j))
        total = total + term.scale(coeff)
    pref = params.two_q()
    omq = params.one_minus_q()
    scale = _inverse_scalar(omq ** n) if n else 1
    return total.scale(pref).scale(scale)


def twisted_hq_euler_poly(params: EulerParams, x) -> CycloElem:
    """E_{n,q,xi}^{(h)}(x); x is an int, a p-integral Fraction or a PadicScalar."""
    if params.q == 1:
        return classical_twisted_poly(params.n, params.xi, x, params.ring)
    return _closed_form(params, x)


def twisted_hq_euler_number(params: EulerParams) -> CycloElem:
    return twisted_hq_euler_poly(params, 0)


def twisted_hq_euler_numbers(params: EulerParams, n_max: int) -> list:
    return [twisted_hq_euler_number(params.with_n(k)) for k in range(n_max + 1)]


def poly_from_numbers(params: EulerParams, x) -> CycloElem:
    """sum_j C(n,j) q^{xj} [x]_q^{n-j} E_{j,q,xi}^{(h)}, from the numbers alone."""
    ring = params.ring
    n = params.n
    if params.q == 1:
        bracket = x
        qx = 1
    elif ring.padic:
        qx = params.qpow(x)
        p = ring.prime
        omq = params.one_minus_q()
        if qx == 1:
            bracket = Fraction(0)
        else:
            bracket = PadicScalar.from_residue(1 - qx, p, ring.prec) * _inverse_scalar(omq)
    else:
        qx = params.qpow(x)
        bracket = (1 - qx) / (1 - Fraction(params.q))
    total = ring.zero()
    for j in range(n + 1):
        E = twisted_hq_euler_number(params.with_n(j))
        qxj = qx**j if not ring.padic else pow(qx, j, ring.prime**ring.prec)
        weight = bracket ** (n - j) if n - j else 1
        total = total + E.scale(qxj).scale(math.comb(n, j)).scale(weight)
    return total


def _require_admissible_modulus(D: int, params: EulerParams, what: str):
    if D < 1 or D % 2 == 0:
        raise EulerError(f"{what}={D} must be a positive odd integer")
    if params.ring.padic and D % params.ring.prime == 0:
        raise EulerError(f"{what}={D} must be prime to p={params.ring.prime}")


def distribution_rhs(params: EulerParams, x, d2: int) -> CycloElem:
    """([2]_q/[2]_{q^d'}) [d']_q^n sum_{a<d'} (-1)^a xi^a q^{ha} E_{n,q^d',xi^d'}((x+a)/d')."""
    _require_admissible_modulus(d2, params, "d'")
    ring = params.ring
    sub = params.with_power(d2)
    total = ring.zero()
    for a in range(d2):
        y = (x + a) / Fraction(d2) if not isinstance(x, PadicScalar) else \
            (x + a) / PadicScalar.from_int(d2, ring.prime, ring.prec)
        E = twisted_hq_euler_poly(sub, y)
        w = ring.root_of_unity(params.xi_power * a).scale(params.qpow(params.h * a))
        total = total + (w * E).scale((-1) ** a)
    return total.scale(_prefactor(params, sub, d2))


def _prefactor(params: EulerParams, sub: EulerParams, D: int):
    """([2]_q/[2]_{q^D}) [D]_q^n as an exact rational or a PadicScalar."""
    two = params.two_q()
    two_sub = sub.two_q()
    bracket = params.q_integer(D)
    out = two * _inverse_scalar(two_sub)
    if params.n:
        out = out * bracket ** params.n
    return out


def generalized_twisted_number(params: EulerParams, chi: DirichletCharacter,
                               D: Optional[int] = None) -> CycloElem:
    """E_{n,q,xi,chi}^{(h)} through the distribution sum over a = 0..D-1.

    D must be odd, prime to p and a multiple of the conductor of chi.
    """
    if D is None:
        D = conductor(chi)
    _require_admissible_modulus(D, params, "D")
    if D % conductor(chi):
        raise EulerError(f"D={D} is not a multiple of the conductor {conductor(chi)}")
    if chi.prime is not None and chi.teich_power:
        raise EulerError("characters carrying an omega factor need the ball-sum route")
    prim = primitivize(chi)
    ring = params.ring
    if params.q == 1:
        return classical_generalized_numbers(params.n, params.xi, prim, D, ring)
    sub = params.with_power(D)
    total = ring.zero()
    for a in range(D):
        if not prim.is_unit(a):
            continue
        E = twisted_hq_euler_poly(sub, Fraction(a, D))
        w = ring.root_of_unity(params.xi_power * a + prim.monomial(a, ring.M))
        total = total + (w * E).scale(params.qpow(params.h * a)).scale((-1) ** a)
    return total.scale(_prefactor(params, sub, D))


# -- classical (q = 1) numbers --------------------------------------------------


def classical_twisted_numbers(n_max: int, w: CycloElem) -> list:
    """E_{0,w}, ..., E_{n_max,w} with 2/(w e^z + 1) = sum E_{n,w} z^n/n!.

    Uses E_0 = 2/(1+w) and (1+w) E_k = -w sum_{j<k} C(k,j) E_j.
    """
    ring = w.ring
    one_plus = ring.one() + w
    if one_plus.is_zero():
        raise EulerError("w = -1 makes the generating function singular")
    inv = one_plus.invert()
    out = [inv.scale(2)]
    factor = -(w * inv)
    for k in range(1, n_max + 1):
        acc = ring.zero()
        for j in range(k):
            acc = acc + out[j].scale(math.comb(k, j))
        out.append(factor * acc)
    return out


def classical_twisted_poly(n: int, w: CycloElem, x, ring: Optional[CycloRing] = None) -> CycloElem:
    """E_{n,w}(x) = sum_j C(n,j) x^{n-j} E_{j,w}."""
    if isinstance(x, PadicScalar):
        x = x.to_fraction()
    nums = classical_twisted_numbers(n, w)
    total = w.ring.zero()
    for j in range(n + 1):
        total = total + nums[j].scale(math.comb(n, j) * Fraction(x) ** (n - j))
    return total


def classical_generalized_numbers(n: int, w: CycloElem, chi: DirichletCharacter, d: int,
                                  ring: Optional[CycloRing] = None) -> CycloElem:
    """E_{n,w,chi} = sum_{i<d} (-1)^i chi(i) w^i sum_j C(n,j) i^{n-j} d^j E_{j,w^d}.

    This is d^n sum_i (-1)^i chi(i) w^i E_{n,w^d}(i/d) with the powers of d
    distributed so that no division by d occurs.
    """
    if d % 2 == 0:
        raise EulerError(f"d={d} must be odd")
    ring = w.ring
    wd = w**d
    nums = classical_twisted_numbers(n, wd)
    total = ring.zero()
    for i in range(d):
        if not chi.is_unit(i):
            continue
        inner = ring.zero()
        for j in range(n + 1):
            inner = inner + nums[j].scale(math.comb(n, j) * i ** (n - j) * d**j)
        val = chi.evaluate(i, ring) * (w**i) * inner
        total = total + val.scale((-1) ** i)
    return total
