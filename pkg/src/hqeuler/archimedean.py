"""Complex q-series whose values at negative integers are twisted Euler numbers.

All functions use Python complex floats.  Series are truncated at K terms
with K doubled until a rigorous geometric tail bound drops below the
requested tolerance; the bound is returned with the value.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

from .characters import DirichletCharacter


class ArchimedeanError(ValueError):
    pass


@dataclass(frozen=True)
class ComplexSeriesSpec:
    """Parameters of the complex series: |q| < 1, Re(h) > 0 and a twist w."""

    q: complex
    h: complex = 1
    w: complex = 1
    chi: Optional[DirichletCharacter] = None
    K: Optional[int] = None
    tol: float = 1e-14

    def __post_init__(self):
        if not abs(self.q) < 1:
            raise ArchimedeanError(f"series need |q| < 1, got q={self.q}")
        if abs(self.q ** self.h) >= 1:
            raise ArchimedeanError("series need |q^h| < 1 for geometric decay")


@dataclass(frozen=True)
class SeriesValue:
    value: complex
    terms: int
    tail_bound: float


def root_of_unity(k: int, r: int) -> complex:
    return cmath.exp(2j * math.pi * k / r)


def qint(x, q) -> complex:
    """[x]_q = (1 - q^x)/(1 - q) with the principal branch of q^x."""
    return (1 - q**x) / (1 - q)


def _power(z: complex, s) -> complex:
    """z**(-s) with an exact integer power when s is an integer."""
    if isinstance(s, int) or (isinstance(s, float) and s.is_integer()):
        return z ** (-int(s))
    return cmath.exp(-s * cmath.log(z))


def _tail_bound(spec: ComplexSeriesSpec, s, K: int, shift: float) -> float:
    """Bound on |sum_{k >= K}| of [2]_q (-w)^k q^{hk} chi(k) / [k + x]_q^s."""
    q = spec.q
    ratio = abs(q**spec.h)
    aq = abs(q)
    m = K + shift
    lo = max((1 - aq**m) / abs(1 - q), 1e-300)
    hi = (1 + aq**m) / abs(1 - q)
    re_s = complex(s).real
    im_s = complex(s).imag
    bound_power = max(lo ** (-re_s), hi ** (-re_s)) * math.exp(math.pi * abs(im_s))
    return abs(1 + q) * bound_power * ratio**K / (1 - ratio)


def _summed(spec: ComplexSeriesSpec, s, x, start: int, with_chi: bool) -> SeriesValue:
    q, h, w = spec.q, spec.h, spec.w
    chi = spec.chi if with_chi else None
    if spec.K is not None:
        K = spec.K
    else:
        K = 16
        while _tail_bound(spec, s, K, complex(x).real) > spec.tol:
            K *= 2
            if K > 1 << 22:
                raise ArchimedeanError("tail bound does not reach the tolerance")
    total = 0j
    for k in range(start, K):
        c = chi.value_complex(k) if chi is not None else 1
        if c == 0:
            continue
        total += c * (-w) ** k * q ** (h * k) * _power(qint(k + x, q), s)
    return SeriesValue((1 + q) * total, K, _tail_bound(spec, s, K, complex(x).real))


def twisted_zeta_series(spec: ComplexSeriesSpec, s, x) -> SeriesValue:
    """[2]_q sum_{k >= 0} (-1)^k w^k q^{hk} / [k + x]_q^s."""
    if complex(x).imag == 0 and complex(x).real <= 0 and float(complex(x).real).is_integer():
        raise ArchimedeanError("x must not be zero or a negative integer")
    return _summed(spec, s, x, 0, False)


def twisted_l_series(spec: ComplexSeriesSpec, s) -> SeriesValue:
    """[2]_q sum_{k >= 1} chi(k) (-1)^k w^k q^{hk} / [k]_q^s."""
    return _summed(spec, s, 0, 1, spec.chi is not None)


def closed_form_poly(n: int, q, h, w, x) -> complex:
    """[2]_q/(1-q)^n sum_j C(n,j) (-1)^j q^{xj} / (1 + w q^{h+j})."""
    total = 0j
    for j in range(n + 1):
        total += math.comb(n, j) * (-1) ** j * q ** (x * j) / (1 + w * q ** (h + j))
    return (1 + q) * total / (1 - q) ** n


def closed_form_generalized(n: int, q, h, w, chi: DirichletCharacter, D: int) -> complex:
    """([2]_q/[2]_{q^D}) [D]_q^n sum_{a=1}^{D} (-1)^a w^a q^{ha} chi(a) E_{n,q^D,w^D}(a/D)."""
    if D % chi.modulus:
        raise ArchimedeanError(f"D={D} must be a multiple of the modulus {chi.modulus}")
    qD, wD = q**D, w**D
    total = 0j
    for a in range(1, D + 1):
        c = chi.value_complex(a)
        if c == 0:
            continue
        total += c * (-w) ** a * q ** (h * a) * closed_form_poly(n, qD, h, wD, a / D)
    return (1 + q) / (1 + qD) * qint(D, q) ** n * total


def classical_euler_zeta(s, K: int) -> SeriesValue:
    """2 sum_{k=1}^{K} (-1)^k / k^s for Re(s) > 1, with the alternating-series bound."""
    if complex(s).real <= 1:
        raise ArchimedeanError("the raw series is only used for Re(s) > 1")
    total = 0j
    for k in range(1, K + 1):
        total += (-1) ** k * k ** (-s)
    bound = 2 * (K + 1) ** (-complex(s).real)
    return SeriesValue(2 * total, K, bound)
