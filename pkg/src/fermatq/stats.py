"""Statistics of the lambda values and solution counts, and the binomial model
Bin(p-2, 1/p) that they are compared against."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from itertools import repeat

import numpy as np

from . import arith, kernels
from ._pool import ordered_map
from .arith import PrimeModulus
from .cyclotomic import StructuralViolation
from .fermat import lambda_values, zeros_in_range

E_INV = math.exp(-1.0)
# P(X = 0), P(X >= 1), P(X >= 2), P(X >= 3) for X ~ Poisson(1)
MODEL_CONSTANTS = (E_INV, 1 - E_INV, 1 - 2 * E_INV, 1 - 2.5 * E_INV)


def _primes_for(B: int, H: int, overrun: bool) -> np.ndarray:
    """(B, B+H] or, with ``overrun``, the primes a ``while(p < B+H)`` loop visits."""
    if overrun:
        return arith.loop_window(B, B + H)
    return arith.primes_between(B + 1, B + H)


@dataclass(frozen=True)
class ClassificationCounts:
    n0: int
    n1: int
    n2: int
    n3_plus: int
    n_total: int
    B: int
    H: int
    model: tuple = field(default=MODEL_CONSTANTS)

    def proportions(self) -> tuple[float, float, float, float]:
        """N0/N, (N1+N2+N3)/N, (N2+N3)/N, N3/N."""
        n = self.n_total
        return (self.n0 / n, (n - self.n0) / n, (self.n2 + self.n3_plus) / n, self.n3_plus / n)


def solution_counts(primes, threads: int = 1, batch: int = 256, backend=None) -> np.ndarray:
    """Number of z in [2, p) with q_p(z) = 0 for each prime (odd, < 2**31)."""
    primes = np.asarray(primes, dtype=np.uint64)
    if len(primes) == 0:
        return np.empty(0, dtype=np.int64)
    k = backend or kernels.active
    spf = arith.spf_table(int(primes.max()))
    parts = [primes[i : i + batch] for i in range(0, len(primes), batch)]
    return np.concatenate(list(ordered_map(lambda ps: k.zero_counts(ps, spf), parts, threads)))


def classify_primes(B: int, H: int, overrun: bool = False, threads: int = 1) -> ClassificationCounts:
    """Tally primes in (B, B+H] by their number of solutions in [2, p)."""
    if B < 2 or H < 1:
        raise ValueError("need B >= 2 and H >= 1")
    primes = _primes_for(B, H, overrun)
    odd = primes[primes > 2]
    counts = solution_counts(odd, threads)
    if len(odd) < len(primes):
        counts = np.concatenate([[0], counts])  # p = 2: [2, 2) is empty
    tally = np.bincount(np.minimum(counts, 3), minlength=4)
    return ClassificationCounts(int(tally[0]), int(tally[1]), int(tally[2]), int(tally[3]), len(primes), B, H)


def value_coverage(p: int | PrimeModulus) -> tuple[float, list[int]]:
    """u in [0, p) not of the form q_p(z) with z in [2, p), and their share of p - 1."""
    p = arith.as_prime(p)
    if p < 3:
        raise ValueError("p must be >= 3")
    q = kernels.active.quotient_table(p, arith.spf_table(p))
    hit = np.zeros(p, dtype=bool)
    hit[q[2:]] = True
    missing = np.flatnonzero(~hit).tolist()
    return len(missing) / (p - 1), missing


def lambda_multiplicity(p: int | PrimeModulus, v: int) -> list[int]:
    """All z in [2, p) with lambda(z) = v."""
    p = arith.as_prime(p)
    if not 0 <= v < p:
        raise ValueError("need 0 <= v < p")
    lam = lambda_values(p)
    z = np.flatnonzero(lam == v)
    return [int(x) for x in z if x >= 2]


@dataclass
class MultiplicitySurvey:
    B: int
    H: int
    threshold: int
    n_primes: int
    K: list[tuple[int, int]]  # (v, K_v)
    seed: int | None = None

    @property
    def ratio(self) -> float:
        return sum(k for _, k in self.K) / (len(self.K) * self.n_primes)


def multiplicity_survey(
    B: int,
    H: int,
    v_list,
    threshold: int = 4,
    overrun: bool = False,
    include_p: bool = False,
    seed: int | None = None,
) -> MultiplicitySurvey:
    """K_v = number of primes with at least ``threshold`` z in [2, p) having lambda(z) = v.

    ``include_p`` also counts z = p (lambda = p - 1), as the survey program's
    ``for(z=2, p, ...)`` does.
    """
    vs = [int(v) for v in v_list]
    primes = [int(p) for p in _primes_for(B, H, overrun) if p > 2]
    K = dict.fromkeys(vs, 0)
    for p in primes:
        lam = lambda_values(p)[2:]
        hist = np.bincount(lam, minlength=p)
        if include_p:
            hist[p - 1] += 1
        for v in K:
            if v < p and hist[v] >= threshold:
                K[v] += 1
    return MultiplicitySurvey(B, H, threshold, len(primes), [(v, K[v]) for v in vs], seed)


def random_multiplicity_survey(B: int, H: int, n_values: int = 50, v_max: int = 10**4, seed: int = 0, **kw):
    """multiplicity_survey on ``n_values`` v drawn uniformly from [0, v_max) with a fixed seed."""
    rng = np.random.default_rng(seed)
    return multiplicity_survey(B, H, rng.integers(0, v_max, n_values).tolist(), seed=seed, **kw)


def equidistribution_nt(B: int, t: float, overrun: bool = True) -> tuple[int, int, float]:
    """(N_t, N, N/t): solutions z in [2, p) with z < (p-1)/t against all solutions,
    summed over odd primes p < B (plus the first prime >= B with ``overrun``)."""
    if B < 2 or t < 1:
        raise ValueError("need B >= 2 and t >= 1")
    primes = arith.loop_window(1, B) if overrun else arith.primes_between(3, B - 1)
    n = nt = 0
    for p in primes.tolist():
        for z in zeros_in_range(p):
            n += 1
            if z < (p - 1) / t:
                nt += 1
    return nt, n, n / t


@dataclass(frozen=True)
class MomentReport:
    p: int
    n: int
    sigma: Decimal

    def __float__(self):
        return float(self.sigma)


def sigma_moment(p: int | PrimeModulus, n: int, digits: int = 40) -> MomentReport:
    """sigma_n(p) = 2(n+1)/(p-1)^(n+1) * sum_{z=1}^{(p-1)/2} lambda(z)^n.

    The power sum is an exact integer; the division runs at ``digits`` digits.
    """
    p = arith.as_prime(p)
    if n < 1:
        raise ValueError("n must be >= 1")
    lam = lambda_values(p)[1 : (p - 1) // 2 + 1].tolist()
    total = sum(map(pow, lam, repeat(n)))
    with localcontext() as ctx:
        ctx.prec = digits
        sigma = Decimal(2 * (n + 1) * total) / Decimal((p - 1) ** (n + 1))
    return MomentReport(p, n, sigma)


@dataclass(frozen=True)
class BinomialTail:
    p: int
    n: int
    prob: float


def _log_term(p: int, j: int) -> float:
    """log of C(p-2, j) p^-j (1 - 1/p)^(p-2-j)."""
    m = p - 2
    return (
        math.lgamma(m + 1) - math.lgamma(j + 1) - math.lgamma(m - j + 1)
        - j * math.log(p) + (m - j) * math.log1p(-1.0 / p)
    )


def binomial_tail(p: int, n: int) -> BinomialTail:
    """P(X >= n) for X ~ Bin(p-2, 1/p), summed upward from j = n."""
    if not 0 <= n <= p - 2:
        raise ValueError("need 0 <= n <= p-2")
    if n == 0:
        return BinomialTail(p, n, 1.0)
    t = math.exp(_log_term(p, n))
    terms = [t]
    for j in range(n, p - 2):
        t *= (p - 2 - j) / ((j + 1) * (p - 1))
        terms.append(t)
        if t < terms[0] * 1e-20:
            break
    return BinomialTail(p, n, min(1.0, math.fsum(terms)))


def tail_upper_bound_check(p: int, n: int) -> bool:
    """P(X >= n) < C(p-2, n)/p^n for n >= 1; raises StructuralViolation otherwise."""
    if n < 1:
        raise ValueError("the bound is strict only for n >= 1")
    tail = binomial_tail(p, n).prob
    log_bound = math.lgamma(p - 1) - math.lgamma(n + 1) - math.lgamma(p - 1 - n) - n * math.log(p)
    if not math.log(tail) < log_bound:
        raise StructuralViolation(f"tail bound fails at p={p}, n={n}")
    return True


def log_height(p: int, a: int) -> int:
    """h = floor(log p / log a), computed in integers."""
    h, x = 0, a
    while x <= p:
        h += 1
        x *= a
    return h


def ratio_encadre(p: int, a: int, method: str = "recurrence", backend=None) -> float:
    """Tail P(X >= h) divided by C(p-2, h)/p^h, with h = floor(log p/log a).

    ``recurrence`` runs the backward recurrence of the original program and
    multiplies by exp(-1). ``series`` divides the two quantities directly.
    """
    if a < 2 or p <= a:
        raise ValueError("need a >= 2 and p > a")
    h = log_height(p, a)
    if method == "recurrence":
        k = backend or kernels.active
        return E_INV * float(k.ratio_recurrence(p, h))
    if method == "series":
        log_lead = math.lgamma(p - 1) - math.lgamma(h + 1) - math.lgamma(p - 1 - h) - h * math.log(p)
        return binomial_tail(p, h).prob / math.exp(log_lead)
    raise ValueError(f"unknown method {method!r}")


def ratio_bounds(p: int, a: int) -> tuple[float, float]:
    """(lower, upper) = (exp(-1 + (h + 3/2)/p), 1)."""
    h = log_height(p, a)
    return math.exp(-1.0 + (h + 1.5) / p), 1.0


def epsilon_exponent(p: int, a: int) -> tuple[float, float]:
    """(probability, eps) with probability = P(X > h) = p^-(1+eps), h = floor(log p/log a).

    The sum being complemented runs over j = 0..h inclusive, as in the program
    that produced the published table.
    """
    if a < 2 or p <= a:
        raise ValueError("need a >= 2 and p > a")
    h = log_height(p, a)
    prob = binomial_tail(p, h + 1).prob
    return prob, -1.0 - math.log(prob) / math.log(p)
