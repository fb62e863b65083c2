"""Arithmetic in S[x]/Phi_M(x) for S = Z_p (fixed precision) or S = Q.

In p-adic mode an element is stored as ``p**shift * sum(c_i x**i)`` with the
integer coefficients known modulo ``p**(absprec - shift)``.  ``absprec`` is
the absolute precision of every coefficient; ``math.inf`` marks an exact
value.  Rational mode keeps Fraction coefficients and is always exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .padic import PadicError, PadicScalar, vp, vp_rational


class CyclotomicError(ValueError):
    pass


# -- polynomial helpers (ascending coefficient lists) -----------------------


def _trim(a: list) -> list:
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def poly_mul(a: Sequence, b: Sequence) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def poly_divmod_monic(a: Sequence, b: Sequence) -> tuple:
    """Quotient and remainder of ``a`` by a monic integer polynomial ``b``."""
    a = list(a)
    db = len(b) - 1
    if len(a) - 1 < db:
        return [0], _trim(a)
    quot = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if c:
            quot[k - db] = c
            for i in range(db + 1):
                a[k - db + i] -= c * b[i]
    return _trim(quot), _trim(a[:db] or [0])


@lru_cache(maxsize=None)
def cyclotomic_poly(M: int) -> tuple:
    """Coefficients of Phi_M, lowest degree first."""
    if M < 1:
        raise CyclotomicError(f"M must be positive, got {M}")
    num = [-1] + [0] * (M - 1) + [1]
    for k in range(1, M):
        if M % k == 0:
            num, rem = poly_divmod_monic(num, cyclotomic_poly(k))
            if any(rem):
                raise CyclotomicError("non-exact division while building Phi_M")
    return tuple(num)


def euler_phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def _field_ext_gcd(a: list, b: list, inv, norm):
    """Extended gcd over a field with coefficient inversion ``inv``.

    ``norm`` reduces a coefficient to canonical form.  Returns (g, s) with
    s*a = g (mod b) and g monic.
    """
    def clean(poly):
        return _trim([norm(c) for c in poly] or [0])

    r0, r1 = clean(a), clean(b)
    s0, s1 = [1], [0]
    while any(r1):
        lead_inv = inv(r1[-1])
        quot = [0] * max(1, len(r0) - len(r1) + 1)
        r = list(r0)
        while any(r) and len(r) >= len(r1):
            k = len(r) - len(r1)
            c = norm(r[-1] * lead_inv)
            quot[k] = c
            for i, y in enumerate(r1):
                r[k + i] = norm(r[k + i] - c * y)
            r = clean(r)
        r0, r1 = r1, r
        qs = poly_mul(quot, s1)
        width = max(len(s0), len(qs))
        s0, s1 = s1, clean([(s0[i] if i < len(s0) else 0) - (qs[i] if i < len(qs) else 0)
                            for i in range(width)])
    c = inv(r0[-1])
    return clean([x * c for x in r0]), clean([x * c for x in s0])


# -- rings and elements -----------------------------------------------------


class CycloRing:
    """S[x]/Phi_M with S = Z_p at ``prec`` digits, or S = Q when ``prime`` is None."""

    def __init__(self, M: int, prime: Optional[int] = None, prec: Optional[int] = None):
        if M < 1:
            raise CyclotomicError(f"M must be positive, got {M}")
        if prime is not None:
            if math.gcd(M, prime) != 1:
                raise CyclotomicError(f"p-adic mode needs gcd(M, p) = 1, got M={M}, p={prime}")
            if prec is None or prec < 1:
                raise CyclotomicError("p-adic mode needs a positive precision")
        self.M = M
        self.prime = prime
        self.prec = prec if prime is not None else None
        self.phi = cyclotomic_poly(M)
        self.degree = len(self.phi) - 1
        self._xpow = self._power_table()

    @property
    def padic(self) -> bool:
        return self.prime is not None

    def _key(self):
        return (self.M, self.prime, self.prec)

    def __eq__(self, other):
        return isinstance(other, CycloRing) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.padic:
            return f"CycloRing(M={self.M}, p={self.prime}, prec={self.prec})"
        return f"CycloRing(M={self.M}, rational)"

    def with_prec(self, prec: int) -> "CycloRing":
        return CycloRing(self.M, self.prime, prec)

    def _power_table(self) -> tuple:
        deg, phi = self.degree, self.phi
        rows = []
        cur = [1] + [0] * (deg - 1)
        for _ in range(self.M):
            rows.append(tuple(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                cur = [c - top * phi[i] for i, c in enumerate(cur)]
        return tuple(rows)

    # -- construction --

    def _default_absprec(self):
        return self.prec if self.padic else math.inf

    def element(self, coeffs: Sequence, shift: int = 0, absprec=None) -> "CycloElem":
        if absprec is None:
            absprec = self._default_absprec()
        return CycloElem(self, coeffs, shift, absprec)

    def zero(self) -> "CycloElem":
        return CycloElem(self, [0] * self.degree, 0, math.inf)

    def one(self) -> "CycloElem":
        return self.from_scalar(1)

    def from_scalar(self, c) -> "CycloElem":
        """Constant element from an int (exact), Fraction or PadicScalar."""
        if isinstance(c, (int, PadicScalar)) or not self.padic:
            return self.one_exact().scale(c)
        return self.element([1] + [0] * (self.degree - 1)).scale(c)

    def one_exact(self) -> "CycloElem":
        return CycloElem(self, [1] + [0] * (self.degree - 1), 0, math.inf)

    def root_of_unity(self, k: int, absprec=None) -> "CycloElem":
        return self.element(self._xpow[k % self.M], 0, absprec)

    def monomial_row(self, k: int) -> tuple:
        return self._xpow[k % self.M]

    def reduce_cyclic(self, vec: Sequence) -> list:
        """Map a coefficient vector in Z[x]/(x^M - 1) into the power basis."""
        out = [0] * self.degree
        for k, c in enumerate(vec):
            if c:
                row = self._xpow[k % self.M]
                for i, r in enumerate(row):
                    if r:
                        out[i] += c * r
        return out

    def from_cyclic(self, vec: Sequence, shift: int = 0, absprec=None) -> "CycloElem":
        return self.element(self.reduce_cyclic(vec), shift, absprec)

    def from_json(self, obj: dict) -> "CycloElem":
        if obj["M"] != self.M:
            raise CyclotomicError("modulus mismatch")
        return sum((self.root_of_unity(i).scale(PadicScalar.from_json(self.prime, c))
                    for i, c in enumerate(obj["coeffs"])), self.zero())


class CycloElem:
    __slots__ = ("ring", "coeffs", "shift", "absprec")

    def __init__(self, ring: CycloRing, coeffs: Sequence, shift: int = 0, absprec=math.inf):
        coeffs = list(coeffs)
        if len(coeffs) != ring.degree:
            raise CyclotomicError(f"expected {ring.degree} coefficients, got {len(coeffs)}")
        if ring.padic:
            if any(isinstance(c, Fraction) and c.denominator != 1 for c in coeffs):
                raise CyclotomicError("p-adic coefficients must be integers")
            coeffs = [int(c) for c in coeffs]
            if absprec != math.inf:
                rel = absprec - shift
                if rel <= 0:
                    coeffs = [0] * ring.degree
                else:
                    mod = ring.prime**rel
                    coeffs = [c % mod for c in coeffs]
        else:
            coeffs = [Fraction(c) for c in coeffs]
            shift, absprec = 0, math.inf
        self.ring = ring
        self.coeffs = tuple(coeffs)
        self.shift = shift
        self.absprec = absprec

    # -- inspection --

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def min_valuation(self):
        """Smallest coefficient valuation; a zero reports its known precision."""
        if not self.ring.padic:
            raise CyclotomicError("min_valuation needs p-adic mode")
        if self.is_zero():
            return self.absprec
        p = self.ring.prime
        return self.shift + min(vp(c, p) for c in self.coeffs if c)

    def coefficients(self) -> list:
        ring = self.ring
        if not ring.padic:
            return list(self.coeffs)
        p = ring.prime
        if self.absprec == math.inf:
            scale = Fraction(p) ** self.shift
            return [PadicScalar.from_rational(c * scale, p, ring.prec) if c
                    else PadicScalar.zero(p) for c in self.coeffs]
        return [PadicScalar.from_residue(c, p, int(self.absprec), self.shift)
                for c in self.coeffs]

    def to_json(self) -> dict:
        return {"M": self.ring.M, "coeffs": [c.to_json() for c in self.coefficients()]}

    def __repr__(self):
        if self.ring.padic:
            return (f"CycloElem(M={self.ring.M}, p^{self.shift}*{list(self.coeffs)}, "
                    f"absprec={self.absprec})")
        return f"CycloElem(M={self.ring.M}, {[str(c) for c in self.coeffs]})"

    # -- arithmetic --

    def _check(self, other: "CycloElem"):
        if other.ring.M != self.ring.M or other.ring.prime != self.ring.prime:
            raise CyclotomicError(f"ring mismatch: {self.ring} vs {other.ring}")

    def _lift(self, other):
        if isinstance(other, CycloElem):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, PadicScalar)):
            return self.ring.from_scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        ring = self.ring
        if not ring.padic:
            return CycloElem(ring, [a + b for a, b in zip(self.coeffs, other.coeffs)])
        p = ring.prime
        if self.is_zero() and self.absprec == math.inf:
            return other
        if other.is_zero() and other.absprec == math.inf:
            return self
        s = min(self.shift, other.shift)
        fa, fb = p ** (self.shift - s), p ** (other.shift - s)
        coeffs = [a * fa + b * fb for a, b in zip(self.coeffs, other.coeffs)]
        return CycloElem(ring, coeffs, s, min(self.absprec, other.absprec))

    __radd__ = __add__

    def __neg__(self):
        return CycloElem(self.ring, [-c for c in self.coeffs], self.shift, self.absprec)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PadicScalar)):
            return self.scale(other)
        if not isinstance(other, CycloElem):
            return NotImplemented
        self._check(other)
        ring = self.ring
        prod = poly_mul(self.coeffs, other.coeffs)
        coeffs = ring.reduce_cyclic(_fold(prod, ring.M))
        if not ring.padic:
            return CycloElem(ring, coeffs)
        va, vb = self.min_valuation(), other.min_valuation()
        absprec = min(self.absprec + vb, other.absprec + va)
        return CycloElem(ring, coeffs, self.shift + other.shift, absprec)

    __rmul__ = __mul__

    def scale(self, c) -> "CycloElem":
        """Multiply by an int, Fraction (both exact) or PadicScalar."""
        ring = self.ring
        if not ring.padic:
            if isinstance(c, PadicScalar):
                raise CyclotomicError("cannot scale a rational element by a p-adic scalar")
            c = Fraction(c)
            return CycloElem(ring, [x * c for x in self.coeffs])
        p = ring.prime
        if isinstance(c, PadicScalar):
            if c.prime != p:
                raise CyclotomicError("prime mismatch")
            if c.is_zero:
                va = self.min_valuation()
                return CycloElem(ring, [0] * ring.degree, 0, c.absprec + va)
            va = self.min_valuation()
            absprec = min(self.absprec + c.valuation, c.absprec + va)
            return CycloElem(ring, [x * c.unit for x in self.coeffs],
                             self.shift + c.valuation, absprec)
        c = Fraction(c)
        if c == 0:
            return ring.zero()
        v = vp_rational(c, p)
        u = c / Fraction(p) ** v
        rel = self.absprec - self.shift
        if rel == math.inf:
            if u.denominator != 1:
                raise CyclotomicError("exact element scaled by a non-integral unit; "
                                      "give the element a finite precision first")
            unit = u.numerator
        else:
            mod = p ** max(int(rel), 1)
            unit = u.numerator * pow(u.denominator, -1, mod) % mod
        return CycloElem(ring, [x * unit for x in self.coeffs], self.shift + v, self.absprec + v)

    def __pow__(self, e: int):
        if e < 0:
            return self.invert() ** (-e)
        result = self.ring.one_exact() if self.ring.padic else self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def with_absprec(self, absprec) -> "CycloElem":
        if not self.ring.padic:
            return self
        return CycloElem(self.ring, self.coeffs, self.shift, min(self.absprec, absprec))

    def invert(self) -> "CycloElem":
        ring = self.ring
        if self.is_zero():
            raise CyclotomicError("cannot invert zero")
        if not ring.padic:
            g, s = _field_ext_gcd(list(self.coeffs), list(ring.phi),
                                  lambda c: 1 / Fraction(c), Fraction)
            if len(g) > 1:
                raise CyclotomicError(f"not invertible: gcd with Phi_{ring.M} is {g}")
            return CycloElem(ring, _reduce_poly(s, ring))
        p = ring.prime
        absprec = ring.prec if self.absprec == math.inf else self.absprec
        v = self.min_valuation()
        rel = int(absprec - v)
        if rel <= 0:
            raise CyclotomicError("element is zero at its precision")
        base = [c // p ** (v - self.shift) for c in self.coeffs]
        g, s = _field_ext_gcd(base, list(ring.phi), lambda c: pow(c, -1, p),
                              lambda c: c % p)
        if len(g) > 1:
            raise CyclotomicError(
                f"not invertible: gcd of the reduction mod {p} with Phi_{ring.M} is {g}")
        y = [c % p for c in _reduce_poly(s, ring)]
        k = 1
        while k < rel:
            k = min(2 * k, rel)
            mod = p**k
            by = [c % mod for c in _reduce_poly(poly_mul(base, y), ring)]
            t = [(-c) % mod for c in by]
            t[0] += 2
            y = [c % mod for c in _reduce_poly(poly_mul(y, t), ring)]
        return CycloElem(ring, y, -v, rel - v)

    def __truediv__(self, other):
        other = self._lift(other)
        return self * other.invert()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, CycloElem)):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    def embed(self, target: CycloRing) -> "CycloElem":
        """Map an exact rational element into a p-adic ring with the same M."""
        if self.ring.padic or not target.padic or target.M != self.ring.M:
            raise CyclotomicError("embed maps rational mode to p-adic mode")
        p = target.prime
        nz = [c for c in self.coeffs if c]
        if not nz:
            return target.zero()
        v = min(vp_rational(c, p) for c in nz)
        mod = p ** (target.prec - v) if target.prec > v else 1
        coeffs = []
        for c in self.coeffs:
            u = c / Fraction(p) ** v
            coeffs.append(u.numerator * pow(u.denominator, -1, mod) % mod if c else 0)
        return CycloElem(target, coeffs, v, target.prec)


def _fold(vec: Sequence, M: int) -> list:
    out = [0] * M
    for i, c in enumerate(vec):
        out[i % M] += c
    return out


def _reduce_poly(poly: Sequence, ring: CycloRing) -> list:
    return ring.reduce_cyclic(_fold(poly, ring.M))


def residual_valuation(a: CycloElem, b: CycloElem):
    """min_valuation(a - b); the congruence gauge between two ring values."""
    return (a - b).min_valuation()


__all__ = [
    "CyclotomicError", "CycloRing", "CycloElem", "cyclotomic_poly", "euler_phi",
    "residual_valuation", "PadicError",
]
