"""Exact cyclotomic values Phi_m(a), the reduced value Phi~_m(a) and the
structural checks around them (gcd with m, prime factors = 1 mod m,
pairwise coprimality, the Wieferich equivalence)."""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import arith
from .arith import Factorization, FactorizationTimeout, PrimeModulus


class StructuralViolation(ArithmeticError):
    """An identity that is a theorem failed to hold. Should never be raised."""


@dataclass(frozen=True)
class CyclotomicEvaluation:
    m: int
    a: int
    value: int
    gcd_with_m: int
    reduced: int


def _mobius_exponents(m: int):
    f = arith.factorize(m) if m > 1 else Factorization(1, ())
    primes = f.primes()
    # squarefree divisors e of m carry mu(e); d = m/e
    out = [(m, 1)]
    for q in primes:
        out += [(d // q, -s) for d, s in out]
    return out


def phi_m_eval(m: int, a: int) -> int:
    """Phi_m(a) as an exact integer via prod_{d|m} (a^d - 1)^mu(m/d)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if a == 1:
        raise ValueError("a = 1 makes a^d - 1 vanish")
    num, den = 1, 1
    for d, s in _mobius_exponents(m):
        t = a**d - 1
        if s > 0:
            num *= t
        else:
            den *= t
    val, r = divmod(num, den)
    if r:
        raise StructuralViolation(f"Moebius product for Phi_{m}({a}) not exact")
    return val


def cyclotomic_coefficients(m: int) -> list[int]:
    """Integer coefficients of Phi_m, lowest degree first, by polynomial division.

    Independent of phi_m_eval; used as a test oracle.
    """
    # x^m - 1 divided by Phi_d for every proper divisor d
    poly = [-1] + [0] * (m - 1) + [1]
    for d in arith.divisors(m).divisors if m > 1 else ():
        if d == m:
            continue
        poly = _polydiv_exact(poly, cyclotomic_coefficients(d))
    return poly


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + dn] // den[-1]
        out[i] = c
        for j, dc in enumerate(den):
            num[i + j] -= c * dc
    if any(num[:dn]):
        raise StructuralViolation("inexact polynomial division")
    return out


def poly_eval(coeffs: list[int], a: int) -> int:
    v = 0
    for c in reversed(coeffs):
        v = v * a + c
    return v


def _order_free_part(m: int, r: int) -> int:
    while m % r == 0:
        m //= r
    return m


def reduce(m: int, a: int) -> CyclotomicEvaluation:
    """Phi_m(a) together with g = gcd(Phi_m(a), m) and Phi_m(a)/g.

    g is either 1 or a prime r, and then m = r^e * o_r(a) with e >= 1.
    """
    if a < 2:
        raise ValueError("a must be >= 2")
    value = phi_m_eval(m, a)
    g = math.gcd(value, m)
    if g != 1:
        if not arith.is_prime(g):
            raise StructuralViolation(f"gcd(Phi_{m}({a}), {m}) = {g} is not prime")
        if a % g == 0 or _order_free_part(m, g) != arith.multiplicative_order(a, g):
            raise StructuralViolation(f"{m} is not {g}^e * o_{g}({a})")
    return CyclotomicEvaluation(m, a, value, g, value // g)


def reduced_value(m: int, a: int, convention: str = "gcd") -> int:
    """Phi~_m(a).

    ``convention="gcd"`` divides by gcd(Phi_m(a), m). ``"lemma"`` additionally
    halves Phi_1(a) = a - 1 for odd a, the reading used in the pairwise
    coprimality argument.
    """
    if convention not in ("gcd", "lemma"):
        raise ValueError(f"unknown convention {convention!r}")
    if m == 1 and convention == "lemma" and a % 2:
        return (a - 1) // 2
    return reduce(m, a).reduced


@dataclass
class FactorCheck:
    m: int
    a: int
    holds: bool
    factors: list[tuple[int, int]]
    unfactored: int = 1  # composite cofactor left when the budget ran out

    @property
    def complete(self):
        return self.unfactored == 1


def factor_congruence_check(m: int, a: int, budget: int = arith.RHO_BUDGET) -> FactorCheck:
    """Every prime factor of Phi~_m(a) is 1 mod m (m != 2)."""
    if m == 2:
        raise ValueError("m = 2 is excluded")
    red = reduce(m, a).reduced
    f = arith.factorize(red, budget=budget, partial=True) if red > 1 else Factorization(red, ())
    ok = all(ell % m == 1 % m for ell, _ in f.factors)
    return FactorCheck(m, a, ok, list(f.factors), f.cofactor)


@dataclass
class CoprimeReport:
    a: int
    m_max: int
    convention: str
    holds: bool  # True when no pair other than the documented exception shares a factor
    bad_pairs: list[tuple[int, int, int]]  # (m, m', gcd)
    exception_pairs: list[tuple[int, int, int]]


def pairwise_coprime_check(a: int, m_max: int, convention: str = "gcd") -> CoprimeReport:
    """gcd(Phi~_m(a), Phi~_m'(a)) = 1 for 1 <= m < m' <= m_max.

    Under the gcd convention the pair (1, 2) shares the factor 2 exactly when
    a = 3 mod 4. That pair is reported in ``exception_pairs`` and does not
    make ``holds`` false.
    """
    if a < 2 or m_max < 2:
        raise ValueError("need a >= 2 and m_max >= 2")
    vals = [reduced_value(m, a, convention) for m in range(1, m_max + 1)]
    bad, exc = [], []
    for i in range(m_max):
        for j in range(i + 1, m_max):
            g = math.gcd(vals[i], vals[j])
            if g != 1:
                rec = (i + 1, j + 1, g)
                (exc if (i, j) == (0, 1) and a % 4 == 3 and g == 2 else bad).append(rec)
    return CoprimeReport(a, m_max, convention, not bad, bad, exc)


def _phi_m_mod(m: int, a: int, n: int) -> int:
    """Phi_m(a) mod n, valid when every a^d - 1 in the denominator is a unit mod n
    or handled by the exact path."""
    num, den = 1, 1
    for d, s in _mobius_exponents(m):
        t = (pow(a, d, n) - 1) % n
        if s > 0:
            num = num * t % n
        else:
            den = den * t % n
    return num * pow(den, -1, n) % n


def wieferich_equivalence_check(a: int, p: int | PrimeModulus, exact_limit: int = 4096) -> bool:
    """q_p(a) = 0 if and only if p^2 divides Phi~_{o_p(a)}(a); returns that truth value.

    For orders above ``exact_limit`` Phi_m(a) is evaluated mod p^2: with
    m = o_p(a) coprime to p, p cannot divide a^d - 1 for a proper divisor d,
    so all denominators are units mod p^2 and gcd(Phi_m(a), m) = 1.
    """
    p = arith.as_prime(p)
    if a % p == 0:
        raise ValueError(f"{p} divides {a}")
    p2 = p * p
    lhs = pow(a, p - 1, p2) == 1
    o = arith.multiplicative_order(a, p)
    if o <= exact_limit and a >= 2:
        rhs = reduce(o, a).reduced % p2 == 0
    elif a == 1 or (a % p2) == 1:
        rhs = True
    else:
        rhs = _phi_m_mod(o, a % p2, p2) == 0
    if lhs != rhs:
        raise StructuralViolation(f"Wieferich equivalence fails at a={a}, p={p}")
    return lhs


__all__ = [
    "CyclotomicEvaluation",
    "CoprimeReport",
    "FactorCheck",
    "FactorizationTimeout",
    "StructuralViolation",
    "cyclotomic_coefficients",
    "factor_congruence_check",
    "pairwise_coprime_check",
    "phi_m_eval",
    "poly_eval",
    "reduce",
    "reduced_value",
    "wieferich_equivalence_check",
]
