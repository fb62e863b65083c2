"""Fixed-precision scalars in Q_p and the analytic maps built on them.

A :class:`PadicScalar` stores ``p**valuation * unit`` where ``unit`` is known
modulo ``p**precision``.  Exact zero has ``valuation == math.inf``; a value
that is zero only up to its precision keeps the valuation as the known lower
bound and ``precision == 0``.

The module also exposes integer kernels (``log_int``, ``exp_int``,
``qpow_int``, ``teichmuller_int``) working on residues mod ``p**A``; the
measure and l-function sums use those directly in their inner loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union


class PadicError(ValueError):
    """Domain or precision violation in p-adic arithmetic."""


class PadicZeroDivisionError(PadicError, ZeroDivisionError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def vp(n: int, p: int) -> Union[int, float]:
    """Valuation of an integer; ``inf`` for zero."""
    if n == 0:
        return math.inf
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_rational(x, p: int) -> Union[int, float]:
    x = Fraction(x)
    if x == 0:
        return math.inf
    return vp(x.numerator, p) - vp(x.denominator, p)


def floor_log(k: int, p: int) -> int:
    """Largest e with p**e <= k (k >= 1)."""
    e = 0
    while k >= p:
        k //= p
        e += 1
    return e


def _check_prime(p: int) -> None:
    if p < 3 or not is_prime(p):
        raise PadicError(f"p must be an odd prime, got {p}")


@dataclass(frozen=True)
class PadicScalar:
    prime: int
    valuation: Union[int, float]
    unit: int
    precision: int

    def __post_init__(self):
        if self.prime < 3 or self.prime % 2 == 0:
            raise PadicError(f"p must be an odd prime, got {self.prime}")
        if self.unit == 0:
            if self.precision != 0:
                raise PadicError("zero must carry precision 0")
        elif self.unit % self.prime == 0:
            raise PadicError("unit part must be prime to p")

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, p: int, absprec=math.inf) -> "PadicScalar":
        return cls(p, absprec, 0, 0)

    @classmethod
    def from_int(cls, n: int, p: int, prec: int) -> "PadicScalar":
        """``n`` with ``prec`` significant digits (a zero is O(p**prec))."""
        _check_prime(p)
        if n == 0:
            return cls.zero(p, prec)
        v = vp(n, p)
        return cls(p, v, (n // p**v) % p**prec, prec)

    @classmethod
    def from_rational(cls, x, p: int, prec: int) -> "PadicScalar":
        x = Fraction(x)
        if x.denominator == 1:
            return cls.from_int(x.numerator, p, prec)
        _check_prime(p)
        if x == 0:
            return cls.zero(p, prec)
        a, b = x.numerator, x.denominator
        va, vb = vp(a, p), vp(b, p)
        mod = p**prec
        u = (a // p**va) * pow(b // p**vb, -1, mod) % mod
        return cls(p, va - vb, u, prec)

    @classmethod
    def from_residue(cls, r: int, p: int, absprec: int, shift: int = 0) -> "PadicScalar":
        """The value ``p**shift * r`` where ``r`` is known mod ``p**(absprec - shift)``."""
        rel = absprec - shift
        if rel <= 0:
            return cls.zero(p, absprec)
        r %= p**rel
        if r == 0:
            return cls.zero(p, absprec)
        v = vp(r, p)
        return cls(p, shift + v, r // p**v, rel - v)

    @classmethod
    def from_json(cls, p: int, obj: dict) -> "PadicScalar":
        v = obj["valuation"]
        if v is None:
            return cls.zero(p)
        unit = sum(dig * p**i for i, dig in enumerate(obj["digits"]))
        return cls(p, v, unit, obj["precision"])

    # -- basic properties -------------------------------------------------

    @property
    def absprec(self) -> Union[int, float]:
        return self.valuation + self.precision

    @property
    def is_zero(self) -> bool:
        return self.unit == 0

    def to_int(self) -> int:
        """Integer representative; requires valuation >= 0."""
        if self.is_zero:
            return 0
        if self.valuation < 0:
            raise PadicError("value is not in Z_p")
        return self.unit * self.prime**self.valuation

    def to_fraction(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.prime) ** self.valuation

    def residue(self, k: int) -> int:
        """Reduction mod p**k of an element of Z_p known to at least that precision."""
        if self.absprec < k:
            raise PadicError(f"asked for {k} digits, only {self.absprec} known")
        return self.to_int() % self.prime**k

    def digits(self) -> list:
        out, u = [], self.unit
        for _ in range(self.precision):
            u, dig = divmod(u, self.prime)
            out.append(dig)
        return out

    def to_json(self) -> dict:
        if self.valuation == math.inf:
            return {"valuation": None, "digits": [], "precision": 0}
        return {"valuation": int(self.valuation), "digits": self.digits(),
                "precision": self.precision}

    def with_absprec(self, absprec) -> "PadicScalar":
        """Drop digits beyond ``absprec`` (never adds precision)."""
        if absprec >= self.absprec:
            return self
        if self.is_zero or absprec <= self.valuation:
            return PadicScalar.zero(self.prime, min(absprec, self.valuation))
        rel = int(absprec - self.valuation)
        return PadicScalar(self.prime, self.valuation, self.unit % self.prime**rel, rel)

    def __repr__(self) -> str:
        p = self.prime
        if self.valuation == math.inf:
            return f"PadicScalar(0, p={p})"
        if self.is_zero:
            return f"PadicScalar(O({p}^{self.valuation}))"
        return f"PadicScalar({p}^{self.valuation} * {self.unit} + O({p}^{self.absprec}))"

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PadicScalar):
            if other.prime != self.prime:
                raise PadicError("mixing different primes")
            return other
        if isinstance(other, (int, Fraction)):
            v = vp_rational(other, self.prime)
            if v == math.inf:
                return PadicScalar.zero(self.prime)
            if self.is_zero:
                prec = max(1, int(self.absprec - v)) if self.absprec != math.inf else 64
            else:
                prec = max(self.precision, int(self.absprec - v), 1)
            return PadicScalar.from_rational(other, self.prime, prec)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        A = min(self.absprec, other.absprec)
        if self.is_zero:
            return other.with_absprec(A)
        if other.is_zero:
            return self.with_absprec(A)
        p = self.prime
        v = min(self.valuation, other.valuation)
        s = self.unit * p ** (self.valuation - v) + other.unit * p ** (other.valuation - v)
        return PadicScalar.from_residue(s, p, A, shift=v)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero:
            return self
        return PadicScalar(self.prime, self.valuation,
                           (-self.unit) % self.prime**self.precision, self.precision)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero or other.is_zero:
            return PadicScalar.zero(self.prime, self.valuation + other.valuation)
        prec = min(self.precision, other.precision)
        return PadicScalar(self.prime, self.valuation + other.valuation,
                           self.unit * other.unit % self.prime**prec, prec)

    __rmul__ = __mul__

    def inverse(self) -> "PadicScalar":
        if self.is_zero:
            raise PadicZeroDivisionError(f"division by {self!r}")
        mod = self.prime**self.precision
        return PadicScalar(self.prime, -self.valuation, pow(self.unit, -1, mod), self.precision)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            prec = self.precision if not self.is_zero else 1
            return PadicScalar(self.prime, 0, 1, max(prec, 1))
        if self.is_zero:
            return PadicScalar.zero(self.prime, self.valuation * e)
        return PadicScalar(self.prime, self.valuation * e,
                           pow(self.unit, e, self.prime**self.precision), self.precision)


# -- integer kernels --------------------------------------------------------


@lru_cache(maxsize=4096)
def teichmuller_int(t: int, p: int, prec: int) -> int:
    """Teichmuller representative of ``t`` mod ``p**prec`` as t**(p**(prec-1))."""
    if t % p == 0:
        raise PadicError(f"teichmuller lift needs gcd(t, p) = 1, got t={t}")
    mod = p**prec
    return pow(t % mod, p ** (prec - 1), mod)


def log_int(x: int, p: int, A: int) -> int:
    """log(x) mod p**A for an integer x = 1 (mod p)."""
    mod = p**A
    y = (x - 1) % mod
    if y % p:
        raise PadicError("logarithm is only implemented on 1 + pZ_p")
    if y == 0:
        return 0
    vy = vp(y, p)
    K = 1
    while (K + 1) * vy - floor_log(K + 1, p) < A:
        K += 1
    big = p ** (A + floor_log(K, p))
    total, ypow = 0, 1
    for k in range(1, K + 1):
        ypow = ypow * y % big
        e = vp(k, p)
        term = (ypow // p**e) * pow(k // p**e, -1, mod)
        total += term if k % 2 else -term
    return total % mod


def exp_int(x: int, p: int, A: int) -> int:
    """exp(x) mod p**A for an integer x with v_p(x) >= 1."""
    mod = p**A
    x %= mod
    if x == 0:
        return 1 % mod
    if x % p:
        raise PadicError("exponential needs valuation >= 1")
    vx = vp(x, p)
    K = 1
    while (K + 1) * vx - Fraction(K, p - 1) < A:
        K += 1
    fact_v = [0] * (K + 1)
    for k in range(1, K + 1):
        fact_v[k] = fact_v[k - 1] + vp(k, p)
    big = p ** (A + fact_v[K])
    total, xpow, inv_fact = 1, 1, 1
    for k in range(1, K + 1):
        xpow = xpow * x % big
        e = vp(k, p)
        inv_fact = inv_fact * pow(k // p**e, -1, mod) % mod
        total += (xpow // p ** fact_v[k]) * inv_fact
    return total % mod


@lru_cache(maxsize=1024)
def _log_q(q: int, p: int, A: int) -> int:
    return log_int(q, p, A)


def qpow_int(q: int, x, p: int, A: int) -> int:
    """q**x mod p**A for an integer q = 1 (mod p).

    ``x`` may be an int, a Fraction, or a PadicScalar; non-integral exponents
    go through exp(x log q), and the representative of ``x`` is taken as exact.
    The exponent may have negative valuation as long as x*log(q) stays in pZ_p.
    """
    mod = p**A
    if isinstance(x, PadicScalar):
        x = x.to_fraction()
    x = Fraction(x)
    if x.denominator == 1:
        return pow(q, x.numerator, mod)
    if (q - 1) % p:
        raise PadicError("q**x for non-integral x needs q = 1 (mod p)")
    vden = vp(x.denominator, p)
    ext = max(0, vden)
    L = _log_q(q % p ** (A + ext), p, A + ext)
    t = L * x.numerator * pow(x.denominator // p**vden, -1, p ** (A + ext))
    t %= p ** (A + ext)
    if t % p ** (ext + 1):
        raise PadicError("x * log(q) leaves the convergence disc of exp")
    return exp_int(t // p**ext, p, A)


# -- scalar-level operations ------------------------------------------------


def teichmuller(t: int, p: int, P: int) -> PadicScalar:
    """The (p-1)-th root of unity congruent to ``t`` mod p, to ``P`` digits."""
    _check_prime(p)
    if P < 1:
        raise PadicError("precision must be at least 1")
    return PadicScalar.from_int(teichmuller_int(t, p, P), p, P)


def _require_principal_unit(x: PadicScalar, what: str) -> None:
    if x.is_zero or x.valuation != 0 or x.unit % x.prime != 1:
        raise PadicError(f"{what} must be = 1 (mod p), got {x!r}")


def iwasawa_log(x: PadicScalar) -> PadicScalar:
    """Logarithm on principal units 1 + pZ_p; the result lies in pZ_p."""
    _require_principal_unit(x, "log argument")
    A = int(x.absprec)
    return PadicScalar.from_residue(log_int(x.unit, x.prime, A), x.prime, A)


def padic_exp(x: PadicScalar) -> PadicScalar:
    """Exponential on pZ_p."""
    if x.valuation < 1:
        raise PadicError(f"exp needs valuation >= 1, got {x!r}")
    if x.absprec == math.inf:
        raise PadicError("exp of an exact zero needs a target precision")
    A = int(x.absprec)
    return PadicScalar.from_residue(exp_int(x.to_int(), x.prime, A), x.prime, A)


def qpow(q: PadicScalar, x) -> PadicScalar:
    """q**x = exp(x log q) for q in 1 + pZ_p.

    Non-negative and negative integers use repeated multiplication; other
    exponents (Fraction or PadicScalar) use the exp/log route.
    """
    _require_principal_unit(q, "q")
    if isinstance(x, int):
        return q**x
    if not isinstance(x, PadicScalar):
        x = PadicScalar.from_rational(x, q.prime, q.precision)
    if x.is_zero:
        return PadicScalar(q.prime, 0, 1, int(min(q.absprec, x.absprec)) or 1)
    return padic_exp(x * iwasawa_log(q))


def power_s(base: PadicScalar, s) -> PadicScalar:
    """base**s for base = 1 (mod p) and s in Z_p."""
    _require_principal_unit(base, "base")
    if isinstance(s, int):
        return base**s
    return qpow(base, s)


def q_integer(t: int, q: PadicScalar) -> PadicScalar:
    """[t]_q = (1 - q**t)/(1 - q) for an integer t, with [t]_1 = t."""
    one = PadicScalar.from_int(1, q.prime, max(q.precision, 1))
    diff = one - q
    if diff.is_zero:
        return PadicScalar.from_int(t, q.prime, q.precision)
    return (one - q**t) / diff


def angle_bracket(t: int, q: PadicScalar) -> PadicScalar:
    """<t>_q = [t]_q / omega(t), a principal unit for p not dividing t."""
    p = q.prime
    if t % p == 0:
        raise PadicError(f"<t>_q needs gcd(t, p) = 1, got t={t}")
    br = q_integer(t, q)
    return br / teichmuller(t, p, max(int(br.absprec), 1))
