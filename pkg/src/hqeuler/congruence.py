"""Forward differences of the special values and Kummer-type congruences.

A ring value is = 0 (mod p^k) when every power-basis coefficient is, which
is the same as membership in p^k Z_p[x]/Phi_M since that basis is a Z_p
basis when p does not divide M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence, Union

from .cyclotomic import CycloElem
from .lfunction import LFunctionSpec, epsilon


class CongruenceError(ValueError):
    pass


Sequenceish = Union[Sequence, Mapping, Callable]


def _getter(seq: Sequenceish):
    if callable(seq):
        return seq

    def get(i):
        try:
            if i < 0:
                raise IndexError
            return seq[i]
        except (IndexError, KeyError):
            raise CongruenceError(f"sequence has no entry at index {i}") from None
    return get


def forward_difference(seq: Sequenceish, c: int, k: int, m: int):
    """Delta_c^k a_m = sum_j C(k,j) (-1)^{k-j} a_{m+jc}."""
    if c < 1 or k < 0:
        raise CongruenceError(f"need c >= 1 and k >= 0, got c={c}, k={k}")
    get = _getter(seq)
    total = None
    for j in range(k + 1):
        term = get(m + j * c) * (math.comb(k, j) * (-1) ** (k - j))
        total = term if total is None else total + term
    return total


def forward_difference_recursive(seq: Sequenceish, c: int, k: int, m: int):
    """Delta_c^k a_m computed as Delta_c applied k times."""
    if c < 1 or k < 0:
        raise CongruenceError(f"need c >= 1 and k >= 0, got c={c}, k={k}")
    get = _getter(seq)
    if k == 0:
        return get(m)
    return (forward_difference_recursive(get, c, k - 1, m + c)
            - forward_difference_recursive(get, c, k - 1, m))


@dataclass(frozen=True)
class CongruenceReport:
    kind: str
    p: int
    c: int
    k: int
    indices: tuple
    residuals: tuple
    bound: int
    integrality: tuple = field(default=())

    @property
    def passed(self) -> bool:
        return all(r >= self.bound for r in self.residuals)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"


def kummer_check(spec: LFunctionSpec, c: int, k: int, n_range: Sequence[int]) -> CongruenceReport:
    """min_valuation(Delta_c^k eps_n) for n in n_range; the bound is k."""
    p = spec.p
    if c < 1 or c % (p - 1):
        raise CongruenceError(f"c={c} must be a positive multiple of p-1={p - 1}")
    if k < 0:
        raise CongruenceError("k must be >= 0")
    n_range = tuple(n_range)
    eps = {}
    for n in n_range:
        for j in range(k + 1):
            idx = n + j * c
            if idx not in eps:
                eps[idx] = epsilon(idx, spec)
    residuals = tuple(forward_difference(eps, c, k, n).min_valuation() for n in n_range)
    integrality = tuple(eps[n].min_valuation() for n in n_range)
    return CongruenceReport("kummer", p, c, k, n_range, residuals, k, integrality)


def pair_congruence_check(spec: LFunctionSpec, n: int, n2: int,
                          allow_zero: bool = False) -> CongruenceReport:
    """min_valuation(eps_n - eps_n2) for n = n2 (mod p-1); the bound is 1."""
    p = spec.p
    low = 0 if allow_zero else 1
    if min(n, n2) < low:
        raise CongruenceError(f"indices must be >= {low}, got {n}, {n2}")
    if (n - n2) % (p - 1):
        raise CongruenceError(f"n={n} and n'={n2} must agree mod p-1={p - 1}")
    diff: CycloElem = epsilon(n, spec) - epsilon(n2, spec)
    res = diff.min_valuation()
    return CongruenceReport("pair", p, abs(n - n2), 1, (n, n2), (res,), 1)
