"""Density products, prime sums and the thresholds derived from them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import arith, kernels
from ._pool import chunks, ordered_map
from .arith import PrimeModulus
from .cyclotomic import cyclotomic_coefficients
from .fermat import solutions_mod_p2
from .stats import E_INV, binomial_tail, log_height

EULER_GAMMA = 0.5772156649015329
DP_CONSTANT = 1.09125
S_SEGMENT = 2**24


@dataclass
class DensityReport:
    bound: int
    value: float
    reference: float | None
    terms_used: int
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class LocalDensityCoefficient:
    m: int
    p: int
    c_p: int


def c_p(m: int, p: int | PrimeModulus) -> LocalDensityCoefficient:
    """Number of A mod p^2 with p^2 | Phi_m(A), from the case analysis on p | m."""
    p = arith.as_prime(p)
    if m < 1:
        raise ValueError("m must be >= 1")
    if m % p == 0:
        c = 1 if (m, p) == (2, 2) else 0
    elif p % m == 1 % m:
        c = arith.euler_phi(m)
    else:
        c = 0
    return LocalDensityCoefficient(m, p, c)


def c_p_bruteforce(m: int, p: int | PrimeModulus) -> int:
    """Direct count of A in [1, p^2) with Phi_m(A) = 0 mod p^2."""
    p = arith.as_prime(p)
    if p > 1000:
        raise ValueError("brute force limited to p <= 1000")
    p2 = p * p
    coeffs = [c % p2 for c in cyclotomic_coefficients(m)]
    A = np.arange(1, p2, dtype=np.int64)
    acc = np.zeros_like(A)
    for c in reversed(coeffs):
        acc = (acc * A + c) % p2
    return int(np.count_nonzero(acc == 0))


def p_m_product(m: int, n_max: int = 2 * 10**6, backend=None) -> DensityReport:
    """prod (1 - phi(m)/p^2) over primes p = 1 + n m with 1 <= n <= n_max."""
    if m < 1:
        raise ValueError("m must be >= 1")
    k = backend or kernels.active
    f = arith.euler_phi(m)
    log_sum, used = k.progression_log_product(m, float(f), n_max)
    return DensityReport(n_max, math.exp(log_sum), None, int(used), {"m": m, "phi_m": f})


def local_solution_table(p: int | PrimeModulus) -> list[tuple[int, int]]:
    """(A, o_p(A)) for the p - 1 solutions A in [1, p^2) of q_p(A) = 0, by order then A."""
    p = arith.as_prime(p)
    if p > 10**4:
        raise ValueError("table limited to p <= 10**4")
    rows = [(A, arith.multiplicative_order(A % p, p)) for A in solutions_mod_p2(p)]
    return sorted(rows, key=lambda r: (r[1], r[0]))


def _log_terms(x: int, fn):
    """fsum of fn(primes) over all primes <= x, block by block."""
    parts, used = [], 0
    for block in arith.prime_blocks(2, x):
        pd = block.astype(np.float64)
        parts.append(math.fsum(fn(pd).tolist()))
        used += len(block)
    return math.fsum(parts), used


def dp_product(x: int) -> DensityReport:
    """prod_{p <= x} (1 - 1/p + 1/p^2), split as prod (1 - 1/p) * prod (1 + 1/(p(p-1))).

    ``extra`` carries both factors, the correction extrapolated with the tail
    sum_{p > x} 1/p^2 ~ 1/(x log x), and the comparator exp(-gamma) C/log x.
    """
    if x < 2:
        raise ValueError("x must be >= 2")
    log_full, used = _log_terms(x, lambda p: np.log1p(-1.0 / p + 1.0 / (p * p)))
    log_mertens, _ = _log_terms(x, lambda p: np.log1p(-1.0 / p))
    log_corr, _ = _log_terms(x, lambda p: np.log1p(1.0 / (p * (p - 1.0))))
    corr = math.exp(log_corr)
    corr_limit = corr * math.exp(1.0 / (x * math.log(x)))
    lx = math.log(x)
    extra = {
        "mertens_product": math.exp(log_mertens),
        "correction": corr,
        "correction_extrapolated": corr_limit,
        "gamma_comparator": math.exp(-EULER_GAMMA) * corr_limit / lx,
    }
    return DensityReport(x, math.exp(log_full), DP_CONSTANT / lx, used, extra)


def crt_exact_count(x: int) -> tuple[int, int]:
    """(count, modulus): residues mod prod p^2 with q_p(A) != 0 for every p <= x."""
    if x < 2:
        raise ValueError("x must be >= 2")
    count = modulus = 1
    for p in arith.prime_range(2, x):
        count *= p * p - p + 1
        modulus *= p * p
    return count, modulus


def dp_product_exact(x: int) -> Fraction:
    return Fraction(*crt_exact_count(x))


def survey_comparator(y: int, x: int) -> float:
    """Expected survey count y * 1.09 / log x, with the constant rounded as published."""
    return y * 1.09 / math.log(x)


def survey_nonzero(
    y: int, x: int, overrun: bool = False, threads: int = 1, chunk: int = 500, backend=None
) -> int:
    """Number of A in [2, y] with q_p(A) != 0 for every prime p <= x (multiples
    of p count as nonzero). Each A stops at its first zero quotient.

    ``overrun`` replays the original loop bounds: A runs over [2, y+1] and the
    first prime above x is tested too.
    """
    if y < 2 or x < 2:
        raise ValueError("need y, x >= 2")
    k = backend or kernels.active
    primes = arith.primes_between(2, x)
    a_hi = y
    if overrun:
        primes = np.append(primes, np.uint64(arith.next_prime(x)))
        a_hi = y + 1
    if len(primes) and int(primes[-1]) >= 2**32 and k.NAME == "compiled":
        k = kernels.get("python")
    return sum(ordered_map(lambda c: int(k.survey_nonzero(c[0], c[1], primes)), chunks(2, a_hi, chunk), threads))


def _loglog3(p: int) -> float:
    return math.log(math.log(math.log(p)))


def upsilon(p: int | PrimeModulus, budget: int = arith.RHO_BUDGET) -> float:
    """(2 log(p-1) - log sum_{d | p-1} phi(d)^2) / log p."""
    p = arith.as_prime(p)
    s = arith.phi_squared_sum(p, budget)
    return (2 * math.log(p - 1) - math.log(s)) / math.log(p)


def eta(p: int, C: float = 1.1) -> float:
    """C log log log p / log p."""
    if p < 17:
        raise ValueError("need p >= 17")
    return C * _loglog3(p) / math.log(p)


def eta_minus_upsilon(p: int | PrimeModulus, C: float = 1.1, budget: int = arith.RHO_BUDGET) -> float:
    p = arith.as_prime(p)
    return eta(p, C) - upsilon(p, budget)


def s_partial(x: int, segment: int = S_SEGMENT, threads: int = 1, backend=None) -> DensityReport:
    """S(x) = sum_{p <= x} (1/(p (p-1)^2)) sum_{d | p-1} phi(d)^2, with comparator
    (1/2) log log x. p - 1 is factored by a segmented sieve."""
    if x < 2:
        raise ValueError("x must be >= 2")
    k = backend or kernels.active
    small = arith.primes_upto(math.isqrt(x) + 1)
    spans = [(lo, min(lo + segment, x + 1)) for lo in range(2, x + 1, segment)]
    parts = list(ordered_map(lambda s: k.phi_square_segment(s[0], s[1], small), spans, threads))
    value = math.fsum(v for v, _ in parts)
    used = sum(int(c) for _, c in parts)
    ref = 0.5 * math.log(math.log(x)) if x > math.e else None
    return DensityReport(x, value, ref, used)


@dataclass
class SeriesSums:
    a: int
    bound: int
    binom_sum: float  # sum C(p-2, h)/p^h
    stirling_sum: float  # sum h/h!
    full_tail_sum: float  # sum P(X >= h), X ~ Bin(p-2, 1/p)
    limit_weighted_sum: float  # exp(-1) * binom_sum


def series_sums(a: int, bound: int) -> SeriesSums:
    """Sums over primes p <= bound with h = floor(log p / log a)."""
    if a < 2:
        raise ValueError("a must be >= 2")
    b, s, t = [], [], []
    for p in arith.prime_range(2, bound):
        h = log_height(p, a)
        if h > p - 2:
            b.append(0.0)
            t.append(0.0)
        else:
            lead = math.lgamma(p - 1) - math.lgamma(h + 1) - math.lgamma(p - 1 - h) - h * math.log(p)
            b.append(math.exp(lead))
            t.append(binomial_tail(p, h).prob)
        s.append(h / math.factorial(h))
    binom = math.fsum(b)
    return SeriesSums(a, bound, binom, math.fsum(s), math.fsum(t), E_INV * binom)


def p0_function(x: float, a: float, C: float) -> float:
    L = math.log
    llx, lla = L(L(x)), L(L(a))
    return (llx - lla - 1) / L(a) - (llx - lla) / L(x * x) - C


def p0_root(a: int, C: float, lo: float = 1e2, hi: float = 1e12, rtol: float = 1e-12) -> float:
    """Bisection root of p0_function on [lo, hi].

    Without a sign change the bracket is widened, first upward (hi * 10) and
    then downward towards e^e where log log log stays defined.
    """
    f = lambda x: p0_function(x, a, C)
    floor_x = math.exp(math.e) * (1 + 1e-9)
    flo, fhi = f(lo), f(hi)
    tries = 0
    while flo * fhi > 0:
        tries += 1
        if tries > 400:
            raise ValueError(f"no sign change found for a={a}, C={C}")
        if flo > 0 and fhi > 0:
            # f is positive at both ends: the root sits below lo
            hi, fhi = lo, flo
            lo = max(lo / 2, floor_x)
            flo = f(lo)
            if lo == floor_x and flo > 0:
                raise ValueError(f"no root above e^e for a={a}, C={C}")
        else:
            lo, flo = hi, fhi
            hi *= 10
            fhi = f(hi)
    while hi - lo > rtol * lo:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def p0_solver(a: int, C: float, lo: float = 1e2, hi: float = 1e12) -> int:
    """Smallest prime above the root of p0_function."""
    if a < 2 or C < 0:
        raise ValueError("need a >= 2")
    return arith.next_prime(math.floor(p0_root(a, C, lo, hi)))
