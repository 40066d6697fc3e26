"""Integer and modular arithmetic shared by every experiment.

Primality is Miller-Rabin (deterministic below 2**64), prime ranges come
from a segmented numpy sieve, and factoring is trial division followed by
Pollard-Brent rho.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

from . import kernels

SIEVE_BLOCK = 2**20
RHO_BUDGET = 2**26
_MR_BASES_64 = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class FactorizationTimeout(ArithmeticError):
    """A composite cofactor survived Pollard-Brent within the iteration budget."""

    def __init__(self, cofactor: int, budget: int):
        super().__init__(f"rho budget {budget} exhausted on composite {cofactor}")
        self.cofactor = cofactor
        self.budget = budget


@dataclass(frozen=True)
class PrimeModulus:
    p: int
    p_squared: int = field(init=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        object.__setattr__(self, "p_squared", self.p * self.p)

    def __int__(self):
        return self.p


def as_prime(p: int | PrimeModulus) -> int:
    """Plain int from an int or a PrimeModulus, checking primality of ints."""
    if isinstance(p, PrimeModulus):
        return p.p
    p = int(p)
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return p


@dataclass(frozen=True)
class Factorization:
    value: int
    factors: tuple[tuple[int, int], ...]
    cofactor: int = 1  # unfactored composite left over in partial mode

    @property
    def complete(self) -> bool:
        return self.cofactor == 1

    def recombine(self) -> int:
        out = self.cofactor
        for p, e in self.factors:
            out *= p**e
        return out

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def __str__(self):
        parts = [f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors]
        if self.cofactor != 1:
            parts.append(f"[{self.cofactor}]")
        return " * ".join(parts) or "1"


@dataclass(frozen=True)
class DivisorSet:
    n: int
    divisors: tuple[int, ...]


def _miller_rabin(n: int, bases) -> bool:
    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    for a in bases:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(n: int) -> bool:
    """Deterministic below 2**64, 64 Miller-Rabin rounds (error < 2**-128) above."""
    n = int(n)
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < 1369:
        return True
    if n < 2**64:
        return _miller_rabin(n, _MR_BASES_64)
    rng = random.Random(n)
    return _miller_rabin(n, [rng.randrange(2, n - 1) for _ in range(64)])


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    n = int(n)
    if n < 2:
        return 2
    c = n + 1 if n % 2 == 0 else n + 2
    if n == 2:
        c = 3
    while not is_prime(c):
        c += 2
    return c


def primes_upto(n: int) -> np.ndarray:
    """All primes <= n as uint64, plain Eratosthenes."""
    if n < 2:
        return np.empty(0, dtype=np.uint64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for i in range(3, math.isqrt(n) + 1, 2):
        if sieve[i]:
            sieve[i * i :: 2 * i] = False
    return np.flatnonzero(sieve).astype(np.uint64)


def _segment(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """Primes in [lo, hi) given all primes up to sqrt(hi)."""
    seg = np.ones(hi - lo, dtype=bool)
    for q in base.tolist():
        if q * q >= hi:
            break
        start = max(q * q, -(-lo // q) * q)
        seg[start - lo :: q] = False
    if lo < 2:
        seg[: 2 - lo] = False
    return np.flatnonzero(seg).astype(np.uint64) + np.uint64(lo)


def prime_blocks(lo: int, hi: int, block: int = SIEVE_BLOCK) -> Iterator[np.ndarray]:
    """Primes in [lo, hi] as consecutive uint64 blocks of a segmented sieve."""
    lo, hi = max(int(lo), 2), int(hi)
    if hi < lo:
        return
    base = primes_upto(math.isqrt(hi) + 1)
    for start in range(lo, hi + 1, block):
        stop = min(start + block, hi + 1)
        yield _segment(start, stop, base)


def prime_range(lo: int, hi: int, block: int = SIEVE_BLOCK) -> Iterator[int]:
    """Primes in [lo, hi], ascending."""
    for arr in prime_blocks(lo, hi, block):
        yield from arr.tolist()


def primes_between(lo: int, hi: int, block: int = SIEVE_BLOCK) -> np.ndarray:
    """Primes in [lo, hi] as one uint64 array."""
    parts = list(prime_blocks(lo, hi, block))
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.uint64)


def loop_window(start: int, stop: int) -> np.ndarray:
    """Primes visited by ``p = start; while p < stop: p = nextprime(p + 2)``.

    That is every prime >= start + 2 up to and including the first prime
    >= stop (PARI's nextprime(n) is the least prime >= n).
    """
    arr = primes_between(start + 2, stop - 1)
    last = stop if is_prime(stop) else next_prime(stop)
    if start + 2 > last:
        last = start + 2 if is_prime(start + 2) else next_prime(start + 2)
        return np.array([last], dtype=np.uint64)
    return np.append(arr, np.uint64(last))


_spf_cache: np.ndarray | None = None


def spf_table(n: int) -> np.ndarray:
    """Smallest prime factor of k for 0 <= k <= n (uint32; spf[0]=0, spf[1]=1).

    The largest table built so far is cached and sliced for smaller requests.
    """
    global _spf_cache
    n = int(n)
    if _spf_cache is not None and len(_spf_cache) > n:
        return _spf_cache
    if n >= 2**32:
        raise MemoryError("smallest-prime-factor table limited to 32-bit entries")
    spf = np.zeros(n + 1, dtype=np.uint32)
    spf[1] = 1
    spf[2::2] = 2
    for q in range(3, math.isqrt(n) + 1, 2):
        if spf[q] == 0:
            sub = spf[q * q :: q]
            sub[sub == 0] = q
    zero = spf == 0
    spf[zero] = np.flatnonzero(zero).astype(np.uint32)
    _spf_cache = spf
    return spf


def pow_mod(base: int, exp: int, modulus: int) -> int:
    """base**exp mod modulus; 128-bit intermediates below 2**64, big ints above."""
    if modulus < 2:
        raise ValueError("modulus must be >= 2")
    if exp < 0:
        raise ValueError("negative exponent")
    if modulus < 2**64 and exp < 2**64:
        return int(kernels.active.powmod(int(base) % modulus, int(exp), int(modulus)))
    return pow(base, exp, modulus)


def _is_perfect_power(n: int) -> tuple[int, int] | None:
    for k in range(2, n.bit_length() + 1):
        r = round(n ** (1.0 / k)) if n < 2**1000 else _iroot(n, k)
        for c in (r - 1, r, r + 1):
            if c > 1 and c**k == n:
                return c, k
        if r < 2:
            break
    return None


def _iroot(n: int, k: int) -> int:
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def pollard_brent(n: int, budget: int = RHO_BUDGET, seed: int = 1) -> int | None:
    """A nontrivial factor of odd composite n, or None when the budget runs out."""
    rng = random.Random(seed)
    y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
    g = r = q = 1
    steps = 0
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        steps += r
        r *= 2
        if steps > budget:
            return None
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g if g != n else None


def _split(n: int, budget: int, out: dict, leftovers: list, partial: bool):
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    pp = _is_perfect_power(n)
    if pp is not None:
        base, k = pp
        sub: dict = {}
        _split(base, budget, sub, leftovers, partial)
        for p, e in sub.items():
            out[p] = out.get(p, 0) + e * k
        return
    d = None
    for seed in range(1, 9):
        d = pollard_brent(n, budget, seed)
        if d is not None:
            break
    if d is None:
        if partial:
            leftovers.append(n)
            return
        raise FactorizationTimeout(n, budget)
    _split(d, budget, out, leftovers, partial)
    _split(n // d, budget, out, leftovers, partial)


def factorize(n: int, budget: int = RHO_BUDGET, partial: bool = False) -> Factorization:
    """Complete factorization of n >= 1.

    Trial division up to 2**12, then Pollard-Brent on the cofactor with
    certified primes. With ``partial=True`` a stubborn composite is returned
    as ``cofactor`` instead of raising FactorizationTimeout.
    """
    n = int(n)
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    out: dict[int, int] = {}
    m = n
    for p in (2, 3, 5):
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    d, step = 7, 4
    while d < 4096 and d * d <= m:
        while m % d == 0:
            out[d] = out.get(d, 0) + 1
            m //= d
        d += step
        step = 6 - step
    leftovers: list[int] = []
    if m > 1:
        if d * d > m:
            out[m] = out.get(m, 0) + 1
        else:
            _split(m, budget, out, leftovers, partial)
    cof = math.prod(leftovers)
    return Factorization(n, tuple(sorted(out.items())), cof)


def _as_factorization(f: Factorization | int) -> Factorization:
    return f if isinstance(f, Factorization) else factorize(f)


def euler_phi(f: Factorization | int) -> int:
    f = _as_factorization(f)
    out = 1
    for p, e in f.factors:
        out *= (p - 1) * p ** (e - 1)
    return out


def moebius(n: int) -> int:
    if n < 1:
        raise ValueError("moebius needs n >= 1")
    f = factorize(n)
    if any(e > 1 for _, e in f.factors):
        return 0
    return -1 if len(f.factors) % 2 else 1


def divisors(f: Factorization | int) -> DivisorSet:
    f = _as_factorization(f)
    divs = [1]
    for p, e in f.factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return DivisorSet(f.value, tuple(sorted(divs)))


@lru_cache(maxsize=4096)
def _factor_p_minus_1(p: int) -> Factorization:
    return factorize(p - 1)


def multiplicative_order(a: int, p: int | PrimeModulus) -> int:
    """Least d >= 1 with a**d == 1 (mod p), found by stripping prime factors of p-1."""
    p = as_prime(p)
    a = int(a) % p
    if a == 0:
        raise ValueError(f"order of a multiple of {p} is undefined")
    d = p - 1
    for q, _ in _factor_p_minus_1(p).factors:
        while d % q == 0 and pow(a, d // q, p) == 1:
            d //= q
    return d


def phi_squared_sum(p: int | PrimeModulus, budget: int = RHO_BUDGET) -> int:
    """Sum of phi(d)**2 over the divisors d of p-1 (multiplicative in p-1)."""
    p = as_prime(p)
    total = 1
    for q, e in factorize(p - 1, budget).factors:
        s, pk = 1, 1
        for _ in range(e):
            s += (pk * (q - 1)) ** 2
            pk *= q
        total *= s
    return total
