"""The twisted (h,q) measure on X = lim Z/dp^N and its integrals.

For a ball a + D Z_p with D = d p^N the measure value is computed from the
expanded form

    mu(a + D Z_p) = [2]_q/(1-q)^n (-1)^a xi^a q^{ha}
                    * sum_j C(n,j) (-1)^j q^{ja} / (1 + xi^D q^{(h+j)D}),

which is a sum of terms coeff_j * (-1)^a xi^a w_j(a) with coefficients that
depend only on the level.  At q = 1 the same shape holds with
coeff_j = C(n,j) D^j E_{j,xi^D} and w_j(a) = a^{n-j}.  Integrals of
locally constant functions use that shape to accumulate one cyclic
coefficient vector per j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .characters import DirichletCharacter
from .cyclotomic import CycloElem
from .euler import (EulerParams, _inverse_scalar, classical_twisted_numbers,
                    twisted_hq_euler_poly, unit_denominator_inverse)
from .padic import PadicScalar


class MeasureError(ValueError):
    pass


@dataclass(frozen=True)
class Ball:
    """The compact open a + d p^N Z_p of X_d."""

    residue: int
    level: int
    d: int
    p: int

    def __post_init__(self):
        if self.level < 0:
            raise MeasureError("ball level must be >= 0")
        object.__setattr__(self, "residue", self.residue % self.size)

    @property
    def size(self) -> int:
        return self.d * self.p**self.level

    def children(self) -> list:
        return [Ball(self.residue + i * self.size, self.level + 1, self.d, self.p)
                for i in range(self.p)]


def _check_ball(params: EulerParams, ball: Ball):
    if ball.d != params.d or ball.p != params.p:
        raise MeasureError(f"ball lives in X_{ball.d} at p={ball.p}, "
                           f"measure is on X_{params.d} at p={params.p}")


@lru_cache(maxsize=512)
def _expansion(params: EulerParams, level: int) -> tuple:
    """Level coefficients (coeff_j) of the expanded measure formula."""
    ring = params.ring
    n, h = params.n, params.h
    D = params.d * params.p**level
    if params.q == 1:
        nums = classical_twisted_numbers(n, ring.root_of_unity(params.xi_power * D))
        return tuple(nums[j].scale(math.comb(n, j) * D**j) for j in range(n + 1))
    pref = params.two_q() * _inverse_scalar(params.one_minus_q() ** n)
    out = []
    for j in range(n + 1):
        inv = unit_denominator_inverse(params, D, (h + j) * D)
        out.append(inv.scale(pref).scale(math.comb(n, j) * (-1) ** j))
    return tuple(out)


def _weights(params: EulerParams, a: int) -> list:
    """w_j(a) for j = 0..n as integer residues (or exact values at q = 1)."""
    n = params.n
    if params.q == 1:
        return [a ** (n - j) for j in range(n + 1)]
    ring = params.ring
    mod = ring.prime**ring.prec
    qa = pow(params.q, a, mod)
    w = pow(params.q, params.h * a, mod)
    out = []
    for _ in range(n + 1):
        out.append(w)
        w = w * qa % mod
    return out


def mu_ball(params: EulerParams, ball: Ball) -> CycloElem:
    """mu_{n,xi,q}^{(h)}(ball) via the expanded formula."""
    _check_ball(params, ball)
    coeffs = _expansion(params, ball.level)
    a = ball.residue
    ring = params.ring
    total = ring.zero()
    for c, w in zip(coeffs, _weights(params, a)):
        total = total + c.scale(w)
    return (total * ring.root_of_unity(params.xi_power * a)).scale((-1) ** a)


def mu_ball_statement(params: EulerParams, ball: Ball) -> CycloElem:
    """Same value from [D]_q^n ([2]_q/[2]_{q^D}) (-xi)^a q^{ha} E_{n,q^D,xi^D}(a/D).

    The polynomial is evaluated at a/D, outside Z_p, so q^D is raised to a
    fractional power; precision drops by about n*(v(1-q) + N).
    """
    _check_ball(params, ball)
    D, a = ball.size, ball.residue
    ring = params.ring
    sub = params.with_power(D)
    E = twisted_hq_euler_poly(sub, Fraction(a, D))
    pref = params.two_q() * _inverse_scalar(sub.two_q())
    if params.n:
        pref = pref * params.q_integer(D) ** params.n
    w = ring.root_of_unity(params.xi_power * a).scale(params.qpow(params.h * a))
    return (w * E).scale(pref).scale((-1) ** a)


def mu_fermionic_ball(q, ball: Ball, prec: Optional[int] = None) -> PadicScalar:
    """mu_{-q}(a + D Z_p) = (-q)^a (1 + q)/(1 + q^D) for D odd."""
    p = ball.p
    if isinstance(q, PadicScalar):
        prec = int(q.absprec) if prec is None else prec
        q = q.to_int()
    if prec is None:
        raise MeasureError("an integer q needs an explicit precision")
    if (q - 1) % p:
        raise MeasureError(f"q must be = 1 (mod p), got {q}")
    mod = p**prec
    num = pow(-q, ball.residue, mod) * (1 + q) % mod
    den = (1 + pow(q, ball.size, mod)) % mod
    return PadicScalar.from_int(num * pow(den, -1, mod) % mod, p, prec)


def check_distribution(params: EulerParams, ball: Ball):
    """min_valuation of (sum over children) - (parent)."""
    parent = mu_ball(params, ball)
    children = params.ring.zero()
    for child in ball.children():
        children = children + mu_ball(params, child)
    return (children - parent).min_valuation()


def boundedness_probe(params: EulerParams, balls: Sequence[Ball]):
    """Smallest coefficient valuation of the measure over the given balls."""
    return min(mu_ball(params, b).min_valuation() for b in balls)


# -- integration of locally constant functions ----------------------------------


def _table_level(length: int, d: int, p: int) -> int:
    L, size = 0, d
    while size < length:
        size *= p
        L += 1
    if size != length:
        raise MeasureError(f"table length {length} is not d*p^L for d={d}, p={p}")
    return L


def _accumulate(params: EulerParams, N: int, residues, value_of) -> CycloElem:
    """sum over residues c of value_of(c) * mu(c + dp^N Z_p).

    ``value_of(c)`` returns None (value zero), a pair (k, t) meaning the
    integrand value t * x**k, or a CycloElem for general tables.
    """
    ring = params.ring
    coeffs = _expansion(params, N)
    M = ring.M
    n = params.n
    acc = [[0] * M for _ in range(n + 1)]
    general = []
    xi = params.xi_power
    for c in residues:
        val = value_of(c)
        if val is None:
            continue
        ws = _weights(params, c)
        sign = -1 if c & 1 else 1
        if isinstance(val, CycloElem):
            general.append((c, val, ws, sign))
            continue
        k, t = val
        k = (k + xi * c) % M
        st = sign * t
        for j in range(n + 1):
            acc[j][k] += st * ws[j]
    total = ring.zero()
    for j in range(n + 1):
        if general:
            part = ring.zero()
            for c, val, ws, sign in general:
                part = part + (val * ring.root_of_unity(xi * c)).scale(sign * ws[j])
            total = total + coeffs[j] * part
        if any(acc[j]):
            total = total + coeffs[j] * ring.from_cyclic(acc[j])
    return total


def _require_level(N: int, L: int):
    if N < 1:
        raise MeasureError("integrals are taken at level N >= 1")
    if N < L:
        raise MeasureError(f"level N={N} is below the table level L={L}")


def integrate_locally_constant(f: Sequence[CycloElem], params: EulerParams, N: int,
                               units_only: bool = False) -> CycloElem:
    """sum_{c < dp^N} f(c) mu(c + dp^N Z_p) for a table f of length d p^L."""
    p, d = params.p, params.d
    L = _table_level(len(f), d, p)
    _require_level(N, L)
    size = len(f)
    residues = range(d * p**N)
    if units_only:
        residues = [c for c in residues if c % p]

    def value_of(c):
        val = f[c % size]
        return None if val.is_zero() and val.absprec == math.inf else val

    return _accumulate(params, N, residues, value_of)


def integrate_over_units(f: Sequence[CycloElem], params: EulerParams, N: int) -> CycloElem:
    """Integral over X* = X - pX (residues prime to p)."""
    return integrate_locally_constant(f, params, N, units_only=True)


def integrate_character(params: EulerParams, chi: DirichletCharacter, N: int,
                        units_only: bool = False) -> CycloElem:
    """Integral of chi over X (or X*), with chi periodic mod its modulus.

    The modulus of chi must divide d p^N.
    """
    ring = params.ring
    p, d = params.p, params.d
    _require_level(N, 1 if chi.modulus % p == 0 else 0)
    D = d * p**N
    if D % chi.modulus:
        raise MeasureError(f"character modulus {chi.modulus} does not divide {D}")
    if chi.prime is not None and chi.teich_power and ring.prime != chi.prime:
        raise MeasureError("omega factor needs the ring prime")
    residues = range(D)
    if units_only:
        residues = [c for c in residues if c % p]
    prec = ring.prec
    M = ring.M

    def value_of(c):
        if not chi.is_unit(c):
            return None
        return chi.monomial(c, M), chi.teich_int(c, prec)

    return _accumulate(params, N, residues, value_of)


def character_table(chi: DirichletCharacter, params: EulerParams) -> list:
    """Values of chi on 0..d p^L - 1 with d p^L the smallest level multiple of its modulus."""
    p, d = params.p, params.d
    L = 0
    while (d * p**L) % chi.modulus:
        L += 1
    return [chi.evaluate(c, params.ring) for c in range(d * p**L)]


# -- identities -------------------------------------------------------------------


def check_scaling(params: EulerParams, ball: Ball):
    """Residual of mu(pU) = [p]_q^n ([2]_q/[2]_{q^p}) mu_{n,xi^p,q^p}(U)."""
    _check_ball(params, ball)
    p = params.p
    lhs = mu_ball(params, Ball(p * ball.residue, ball.level + 1, ball.d, p))
    sub = params.with_power(p)
    rhs = mu_ball(sub, ball)
    factor = params.two_q() * _inverse_scalar(sub.two_q())
    if params.n:
        factor = factor * params.q_integer(p) ** params.n
    return (lhs - rhs.scale(factor)).min_valuation()


def _density_factor(params: EulerParams, a: int):
    """[a]_q^n as an integer residue (or exact integer at q = 1)."""
    if params.q == 1:
        return a**params.n
    ring = params.ring
    p = ring.prime
    br = params.q_integer(a) if a else PadicScalar.zero(p)
    return br**params.n if params.n else 1


def check_density(params: EulerParams, a: int, levels: Sequence[int]) -> list:
    """v_N = min_valuation(mu(a + dp^N) - q^{(h-1)a} xi^a [a]_q^n mu_{-q}(a + dp^N))."""
    ring = params.ring
    p, d = params.p, params.d
    out = []
    for N in levels:
        ball = Ball(a, N, d, p)
        lhs = mu_ball(params, ball)
        prec = ring.prec
        if params.q == 1:
            fermi = PadicScalar.from_int((-1) ** ball.residue, p, prec)
        else:
            fermi = mu_fermionic_ball(params.q, ball, prec)
        rhs = ring.root_of_unity(params.xi_power * ball.residue).scale(fermi)
        rhs = rhs.scale(params.qpow((params.h - 1) * ball.residue))
        rhs = rhs.scale(_density_factor(params, ball.residue))
        out.append((lhs - rhs).min_valuation())
    return out


def check_density_relative(params: EulerParams, a: int, levels: Sequence[int]) -> list:
    """v_N = min_valuation(mu_n(a + dp^N) - [a]_q^n mu_0(a + dp^N)).

    This density of mu_n against the degree-0 measure holds for every odd
    twist order; it is the relation the interpolation argument relies on.
    """
    p, d = params.p, params.d
    base = params.with_n(0)
    out = []
    for N in levels:
        ball = Ball(a, N, d, p)
        lhs = mu_ball(params, ball)
        rhs = mu_ball(base, ball).scale(_density_factor(params, ball.residue))
        out.append((lhs - rhs).min_valuation())
    return out


def density_verdict(vals: Sequence, threshold) -> bool:
    nondecreasing = all(b >= a for a, b in zip(vals, vals[1:]))
    return nondecreasing and vals[-1] >= threshold


def check_fermionic_shift(f: Sequence[CycloElem], n_shift: int, d: int = 1,
                          p: Optional[int] = None):
    """Residual of I(f_n) - (-1)^n I(f) - 2 sum_{j<n} (-1)^{n-1-j} f(j) at q = 1.

    ``f`` is a level-L table (length d p^L) and f_n(t) = f(t + n).  I is
    the integral against the degree-0 untwisted measure at q = 1, which is
    the fermionic measure (-1)^a on balls.
    """
    if n_shift < 0:
        raise MeasureError("shift must be >= 0")
    if not f:
        raise MeasureError("empty table")
    ring = f[0].ring
    p = p or ring.prime
    L = _table_level(len(f), d, p)
    params = EulerParams(0, 1, 1, ring, 0, d)
    N = max(L, 1)
    size = len(f)
    shifted = [f[(c + n_shift) % size] for c in range(size)]
    lhs = integrate_locally_constant(shifted, params, N)
    rhs = integrate_locally_constant(f, params, N).scale((-1) ** n_shift)
    for j in range(n_shift):
        rhs = rhs + f[j % size].scale(2 * (-1) ** (n_shift - 1 - j))
    return (lhs - rhs).min_valuation()
