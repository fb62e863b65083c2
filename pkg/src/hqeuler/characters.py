"""Dirichlet characters with values in a cyclotomic ring.

A character's values on units are stored as angles in Q/Z: chi(a) is
exp(2*pi*i*angle), realized in a ring of modulus M as x**(M*angle).  A
character may also carry a power of the Teichmuller character omega mod p;
that factor is spelled out separately because its values are (p-1)-th roots
of unity in Z_p, which are scalars rather than elements of the x-basis.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple

from .cyclotomic import CycloElem, CycloRing
from .padic import PadicScalar, is_prime, teichmuller_int


class CharacterError(ValueError):
    pass


def _factor(n: int) -> dict:
    out, f = {}, 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _mult_order(g: int, n: int) -> int:
    k, x = 1, g % n
    while x != 1 % n:
        x = x * g % n
        k += 1
    return k


def _primitive_root(q: int) -> int:
    """A generator of (Z/q)^x for q an odd prime power."""
    phi = q - q // next(iter(_factor(q)))
    for g in range(2, q + 1):
        if math.gcd(g, q) == 1 and _mult_order(g, q) == phi:
            return g
    return 1


@lru_cache(maxsize=None)
def unit_group(D: int) -> tuple:
    """Generators of (Z/D)^x as a product of cyclic groups.

    Returns a tuple of (generator mod D, order) pairs and a discrete-log
    table mapping each unit mod D to its exponent vector.
    """
    if D < 1:
        raise CharacterError(f"modulus must be positive, got {D}")
    comps = []
    for q, e in sorted(_factor(D).items()):
        qe = q**e
        if q == 2:
            if e == 2:
                comps.append((qe, 3, 2))
            elif e >= 3:
                comps.append((qe, qe - 1, 2))
                comps.append((qe, 5, qe // 4))
        else:
            g = _primitive_root(qe)
            comps.append((qe, g, qe - qe // q))
    gens = []
    for qe, g, order in comps:
        # lift g mod qe to a unit mod D that is 1 on the other prime-power parts
        rest = D // qe
        if rest == 1:
            lift = g % D
        else:
            lift = (g * rest * pow(rest, -1, qe) + qe * pow(qe, -1, rest)) % D
        gens.append((lift, order))
    dlog = {}
    vecs = [()]
    vals = [1 % D]
    for g, order in gens:
        new_vecs, new_vals = [], []
        for vec, val in zip(vecs, vals):
            x = val
            for k in range(order):
                new_vecs.append(vec + (k,))
                new_vals.append(x)
                x = x * g % D
        vecs, vals = new_vecs, new_vals
    for vec, val in zip(vecs, vals):
        dlog[val] = vec
    return tuple(gens), dlog


@dataclass(frozen=True)
class DirichletCharacter:
    """A character mod ``modulus``, optionally times omega**teich_power mod ``prime``.

    ``angles`` maps each residue coprime to the Dirichlet part's modulus to
    its angle in [0, 1).  ``exponents`` records the choice on the fixed
    generators of (Z/base_modulus)^x.
    """

    base_modulus: int
    exponents: Tuple[int, ...]
    angles: Tuple[Optional[Fraction], ...] = field(repr=False, compare=False)
    prime: Optional[int] = None
    teich_power: int = 0

    @classmethod
    def from_exponents(cls, D: int, exponents, prime=None, teich_power=0):
        gens, dlog = unit_group(D)
        if len(exponents) != len(gens):
            raise CharacterError(f"need {len(gens)} exponents for modulus {D}")
        angles = [None] * D
        for a, vec in dlog.items():
            ang = sum(Fraction(e * k, order) for e, k, (_, order) in zip(exponents, vec, gens))
            angles[a] = ang - math.floor(ang)
        if prime is not None:
            teich_power %= prime - 1
        return cls(D, tuple(e % order for e, (_, order) in zip(exponents, gens)),
                   tuple(angles), prime, teich_power)

    @classmethod
    def trivial(cls, D: int = 1) -> "DirichletCharacter":
        return cls.from_exponents(D, [0] * len(unit_group(D)[0]))

    @property
    def modulus(self) -> int:
        if self.prime is None or self.teich_power == 0:
            return self.base_modulus
        return math.lcm(self.base_modulus, self.prime)

    @property
    def dirichlet_order(self) -> int:
        """Order of the part whose values live in the x-basis."""
        dens = [a.denominator for a in self.angles if a is not None]
        return math.lcm(1, *dens)

    @property
    def order(self) -> int:
        m = self.dirichlet_order
        if self.prime is not None and self.teich_power:
            m = math.lcm(m, (self.prime - 1) // math.gcd(self.prime - 1, self.teich_power))
        return m

    def angle(self, t: int) -> Optional[Fraction]:
        """Angle of the Dirichlet part at t, or None when t is not a unit."""
        return self.angles[t % self.base_modulus]

    def is_unit(self, t: int) -> bool:
        return math.gcd(t, self.modulus) == 1

    def monomial(self, t: int, M: int) -> Optional[int]:
        """Exponent k with chi_dirichlet(t) = x**k in a ring of modulus M."""
        if not self.is_unit(t):
            return None
        ang = self.angle(t)
        k = ang * M
        if k.denominator != 1:
            raise CharacterError(
                f"character of order {self.dirichlet_order} does not fit modulus M={M}")
        return int(k)

    def teich_int(self, t: int, prec: int) -> int:
        """omega(t)**teich_power mod p**prec (1 when there is no omega factor)."""
        if self.prime is None or self.teich_power == 0:
            return 1
        return pow(teichmuller_int(t, self.prime, prec), self.teich_power, self.prime**prec)

    def evaluate(self, t: int, ring: CycloRing) -> CycloElem:
        if not self.is_unit(t):
            return ring.zero()
        elem = ring.root_of_unity(self.monomial(t, ring.M))
        if self.prime is not None and self.teich_power:
            if ring.prime != self.prime:
                raise CharacterError("omega factor needs a p-adic ring over the same prime")
            w = PadicScalar.from_int(self.teich_int(t, ring.prec), ring.prime, ring.prec)
            elem = elem.scale(w)
        return elem

    def value_complex(self, t: int) -> complex:
        if self.prime is not None and self.teich_power:
            raise CharacterError("omega factor has no complex realization here")
        if not self.is_unit(t):
            return 0j
        return cmath.exp(2j * math.pi * float(self.angle(t)))

    def parity(self) -> int:
        """0 for even characters, 1 for odd ones."""
        m = self.modulus
        if m <= 2:
            return 0
        ang = self.angle(m - 1)
        par = 0 if ang == 0 else 1
        if self.prime is not None and self.teich_power % 2:
            par ^= 1
        return par

    def mul(self, other: "DirichletCharacter") -> "DirichletCharacter":
        if self.base_modulus != other.base_modulus:
            raise CharacterError("product needs equal Dirichlet moduli")
        if self.prime and other.prime and self.prime != other.prime:
            raise CharacterError("product needs the same omega prime")
        prime = self.prime or other.prime
        exps = [a + b for a, b in zip(self.exponents, other.exponents)]
        return DirichletCharacter.from_exponents(self.base_modulus, exps, prime,
                                                 self.teich_power + other.teich_power)

    def values_equal(self, other: "DirichletCharacter", prec: int = 8) -> bool:
        """Pointwise equality on units of lcm of the two moduli."""
        L = math.lcm(self.modulus, other.modulus)
        for t in range(L):
            if math.gcd(t, L) != 1:
                continue
            if self.angle(t) != other.angle(t):
                return False
            if self.teich_int(t, prec) != other.teich_int(t, prec):
                return False
        return True

    def describe(self) -> dict:
        return {"modulus": self.modulus, "exponents": list(self.exponents),
                "order": self.order, "conductor": conductor(self),
                "parity": self.parity(), "teich_power": self.teich_power}


def enumerate_characters(D: int, ring: Optional[CycloRing] = None) -> list:
    """All phi(D) characters mod D in a fixed order (lexicographic exponents).

    With a p-adic ``ring`` the modulus must be odd and prime to p, and every
    character order must divide the ring modulus M.
    """
    if ring is not None and ring.padic:
        p = ring.prime
        if D % 2 == 0 or math.gcd(D, p) != 1:
            raise CharacterError(f"modulus {D} must be odd and prime to p={p}")
    gens, _ = unit_group(D)
    out = [()]
    for _, order in gens:
        out = [e + (k,) for e in out for k in range(order)]
    chars = [DirichletCharacter.from_exponents(D, list(e)) for e in out]
    if ring is not None:
        bad = [c for c in chars if ring.M % c.dirichlet_order]
        if bad:
            listing = ", ".join(f"exponents {c.exponents} (order {c.order})" for c in bad)
            raise CharacterError(f"orders not dividing M={ring.M}: {listing}")
    return chars


def _induced_angles_trivial(chi: DirichletCharacter, f: int) -> bool:
    """Whether the Dirichlet part of chi is trivial on units = 1 mod f."""
    D = chi.base_modulus
    for a in range(1, D, f):
        if math.gcd(a, D) == 1 and chi.angles[a] != 0:
            return False
    return True


def _dirichlet_conductor(chi: DirichletCharacter) -> int:
    D = chi.base_modulus
    for f in range(1, D + 1):
        if D % f == 0 and _induced_angles_trivial(chi, f):
            return f
    return D


def conductor(chi: DirichletCharacter) -> int:
    f = _dirichlet_conductor(chi)
    if chi.prime is not None and chi.teich_power:
        p = chi.prime
        if f % p:
            f *= p
    return f


def primitivize(chi: DirichletCharacter) -> DirichletCharacter:
    """The primitive character inducing chi."""
    f = _dirichlet_conductor(chi)
    D = chi.base_modulus
    gens, _ = unit_group(f)
    exps = []
    for g, order in gens:
        lift = next(a for a in range(g, D * f + 1, f) if math.gcd(a, D) == 1)
        exps.append(int(chi.angle(lift) * order))
    prime = chi.prime if chi.teich_power else None
    return DirichletCharacter.from_exponents(f, exps, prime, chi.teich_power if prime else 0)


def teichmuller_character(p: int) -> DirichletCharacter:
    if p < 3 or not is_prime(p):
        raise CharacterError(f"p must be an odd prime, got {p}")
    return DirichletCharacter.from_exponents(1, [], p, 1)


def chi_n(chi: DirichletCharacter, n: int, p: int) -> DirichletCharacter:
    """chi * omega**(-n), a character mod lcm(modulus, p)."""
    if chi.base_modulus % p == 0:
        raise CharacterError(f"chi_n needs p={p} prime to the modulus {chi.base_modulus}")
    if chi.prime is not None and chi.prime != p:
        raise CharacterError("omega prime mismatch")
    base = DirichletCharacter.from_exponents(chi.base_modulus, list(chi.exponents), p,
                                             chi.teich_power - n)
    return _at_modulus(base, chi.base_modulus * p)


def _at_modulus(chi: DirichletCharacter, D: int) -> DirichletCharacter:
    """Induce the Dirichlet part of chi up to modulus D (a multiple of its modulus)."""
    if D == chi.base_modulus:
        return chi
    gens, _ = unit_group(D)
    exps = []
    for g, order in gens:
        ang = chi.angle(g % chi.base_modulus)
        exps.append(int(ang * order))
    return DirichletCharacter.from_exponents(D, exps, chi.prime, chi.teich_power)


def ring_for(r: int, chars, prime: Optional[int], prec: Optional[int]) -> CycloRing:
    """Smallest cyclotomic ring holding an r-th root of unity and all character values."""
    M = math.lcm(r, *[c.dirichlet_order for c in chars]) if chars else r
    return CycloRing(M, prime, prec)
