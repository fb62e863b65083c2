"""The p-adic twisted (h,q)-Euler l-function.

``l_p_riemann`` evaluates the integral of chi(t) <t>_q^{-s} against the
degree-0 twisted measure over X* by a level-N Riemann sum.  ``epsilon``
gives the value predicted at s = -n:

    eps_n = E_{n,q,xi,chi_n} - chi_n(p) [p]_q^n ([2]_q/[2]_{q^p}) E_{n,q^p,xi^p,chi_n}

with chi_n = chi omega^{-n} taken primitive, and the generalized numbers
computed exactly as level-1 integrals of chi_n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .characters import DirichletCharacter, chi_n, primitivize
from .cyclotomic import CycloElem
from .euler import EulerParams, _inverse_scalar, unit_denominator_inverse
from .measure import integrate_character
from .padic import PadicScalar, exp_int, log_int, teichmuller_int, vp


class LFunctionError(ValueError):
    pass


@dataclass(frozen=True)
class LFunctionSpec:
    """A character chi, the measure parameters (h, q, xi, d) and a target precision.

    ``params.n`` is ignored; chi is replaced by its primitive version and
    its conductor must divide d.
    """

    chi: DirichletCharacter
    params: EulerParams
    target: int = 12

    def __post_init__(self):
        if self.chi.prime is not None and self.chi.teich_power:
            raise LFunctionError("chi must be a plain Dirichlet character")
        prim = primitivize(self.chi)
        object.__setattr__(self, "chi", prim)
        object.__setattr__(self, "params", self.params.with_n(0))
        if self.params.d % prim.modulus:
            raise LFunctionError(f"conductor {prim.modulus} of chi does not divide "
                                 f"d={self.params.d}")
        if self.params.ring.M % prim.dirichlet_order:
            raise LFunctionError(f"ring modulus {self.params.ring.M} cannot hold "
                                 f"values of order {prim.dirichlet_order}")

    @property
    def p(self) -> int:
        return self.params.p


def twisted_character(spec: LFunctionSpec, n: int) -> DirichletCharacter:
    """The primitive character inducing chi omega^{-n}."""
    return primitivize(chi_n(spec.chi, n, spec.p))


def chi_n_at_p(spec: LFunctionSpec, n: int) -> CycloElem:
    """chi_n(p) through the primitive character."""
    prim = twisted_character(spec, n)
    return prim.evaluate(spec.p, spec.params.ring)


@lru_cache(maxsize=4096)
def generalized_number_via_balls(params: EulerParams, chi: DirichletCharacter) -> CycloElem:
    """E_{n,q,xi,chi}^{(h)} as the exact level-1 integral of chi over X."""
    return integrate_character(params, chi, 1)


@lru_cache(maxsize=4096)
def epsilon(n: int, spec: LFunctionSpec) -> CycloElem:
    """The predicted value l_p(-n, chi)."""
    if n < 0:
        raise LFunctionError("epsilon needs n >= 0")
    params = spec.params.with_n(n)
    p = spec.p
    chin = twisted_character(spec, n)
    first = generalized_number_via_balls(params, chin)
    at_p = chin.evaluate(p, params.ring)
    if at_p.is_zero():
        return first
    sub = params.with_power(p)
    second = generalized_number_via_balls(sub, chin)
    factor = params.two_q() * _inverse_scalar(sub.two_q())
    if n:
        factor = factor * params.q_integer(p) ** n
    return first - (at_p * second).scale(factor)


def l_p_closed_negative(n: int, spec: LFunctionSpec) -> CycloElem:
    """l_p(-n, chi) from the closed form; identical to :func:`epsilon`."""
    return epsilon(n, spec)


@dataclass(frozen=True)
class RiemannSum:
    value: CycloElem
    level: int
    stabilization: object = None

    @property
    def precision(self):
        """min(working precision, stabilization estimate)."""
        if self.stabilization is None:
            return self.value.absprec
        return min(self.value.absprec, self.stabilization)


@lru_cache(maxsize=64)
def _unit_table(p: int, q: int, q_prec: Optional[int], h: int, xi_power: int, M: int,
                chi: DirichletCharacter, D: int, prec: int) -> tuple:
    """Per-unit data for level D: (a, cyclic exponent, sign * q^{ha}, <a>_q)."""
    mod = p**prec
    out = []
    if q != 1:
        v = vp(q - 1, p)
        big = p ** (prec + v)
        inv_unit = pow((q - 1) // p**v, -1, mod)
        qa = 1
    qh = pow(q, h, mod) if q != 1 else 1
    qha = 1
    for a in range(D):
        if a:
            if q != 1:
                qa = qa * q % big
            qha = qha * qh % mod
        if a % p == 0 or not chi.is_unit(a):
            continue
        if q == 1:
            br = a % mod
        else:
            br = ((qa - 1) % big) // p**v * inv_unit % mod
        angle = br * pow(teichmuller_int(a % p, p, prec), -1, mod) % mod
        k = (xi_power * a + chi.monomial(a, M)) % M
        sign = -1 if a & 1 else 1
        out.append((k, sign * qha, angle))
    return tuple(out)


def _power_residue(base: int, s, p: int, prec: int) -> int:
    """base**s mod p**prec for base = 1 (mod p) and s in Z_p."""
    mod = p**prec
    if isinstance(s, int):
        return pow(base, s, mod)
    if isinstance(s, PadicScalar):
        s = s.to_fraction()
    s = Fraction(s)
    if s.denominator == 1:
        return pow(base, s.numerator, mod)
    if s.denominator % p == 0:
        raise LFunctionError("s must lie in Z_p")
    s_res = s.numerator * pow(s.denominator, -1, mod) % mod
    return exp_int(log_int(base, p, prec) * s_res % mod, p, prec)


def _raw_riemann(s, spec: LFunctionSpec, N: int) -> CycloElem:
    params = spec.params
    ring = params.ring
    p, d = params.p, params.d
    prec = ring.prec
    if N < 1:
        raise LFunctionError("Riemann sums need level N >= 1")
    D = d * p**N
    table = _unit_table(p, params.q, params.q_prec, params.h, params.xi_power, ring.M,
                        spec.chi, D, prec)
    mod = p**prec
    neg_s = -(s.to_fraction() if isinstance(s, PadicScalar) else s)
    acc = [0] * ring.M
    for k, w, angle in table:
        acc[k] += w * _power_residue(angle, neg_s, p, prec)
    total = ring.from_cyclic([c % mod for c in acc])
    inv0 = unit_denominator_inverse(params, D, params.h * D)
    return (total * inv0).scale(params.two_q())


def l_p_riemann(s, spec: LFunctionSpec, N: int) -> RiemannSum:
    """Level-N Riemann sum of the l-function at s, with v(S_N - S_{N-1})."""
    value = _raw_riemann(s, spec, N)
    stab = None
    if N >= 2:
        stab = (value - _raw_riemann(s, spec, N - 1)).min_valuation()
    return RiemannSum(value, N, stab)


@dataclass(frozen=True)
class InterpolationReport:
    n: int
    residuals: tuple
    threshold: int
    passed: bool


def interpolation_check(n: int, spec: LFunctionSpec, N_max: int = 5,
                        threshold: int = 3) -> InterpolationReport:
    """Compare Riemann sums at s = -n for N = 1..N_max with the closed form.

    PASS when the residual valuations never decrease and the last one is at
    least ``threshold``.
    """
    target = epsilon(n, spec)
    residuals = tuple((_raw_riemann(-n, spec, N) - target).min_valuation()
                      for N in range(1, N_max + 1))
    ok = all(b >= a for a, b in zip(residuals, residuals[1:])) and residuals[-1] >= threshold
    return InterpolationReport(n, residuals, threshold, ok)
