"""Pure-Python fallback for the compiled kernels in ``_kernels.pyx``.

Same names, same signatures, same results. Only numpy is assumed; the
multiplicative sieve and the Fermat scans run as plain Python loops, so
expect roughly two orders of magnitude less throughput.
"""
import math

import numpy as np

NAME = "python"
MONTGOMERY_LIMIT = 2**31
WORD_PRIME_LIMIT = 2**32


def powmod(base, exp, modulus):
    return pow(int(base), int(exp), int(modulus))


def is_prime_u64(n):
    n = int(n)
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < 1369:
        return True
    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    for a in (2, 325, 9375, 28178, 450775, 9780504, 1795265022):
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


def _is_zero(a, p):
    if p == 2:
        return a & 3 == 1
    if a % p == 0:
        return False
    return pow(a, p - 1, p * p) == 1


def fermat_zero_scan(a, primes):
    a = int(a)
    hits = [p for p in map(int, primes) if _is_zero(a, p)]
    return np.array(hits, dtype=np.uint64)


def direct_zeros(p, lo, hi):
    p = int(p)
    if p < 3 or p >= WORD_PRIME_LIMIT:
        raise ValueError("p must be an odd prime below 2**32")
    p2 = p * p
    hits = [z for z in range(max(int(lo), 1), min(int(hi), p)) if pow(z, p - 1, p2) == 1]
    return np.array(hits, dtype=np.uint64)


def _check_table_args(p, spf):
    if p < 3 or p >= MONTGOMERY_LIMIT:
        raise ValueError("p must be an odd prime below 2**31")
    if len(spf) < p:
        raise ValueError("smallest-prime-factor table shorter than p")


def _quotients(p, spf):
    p2 = p * p
    q = [0] * p
    q[0] = -1
    s = spf[:p].tolist()
    for z in range(2, p):
        f = s[z]
        if f == z:
            q[z] = (pow(z, p - 1, p2) - 1) // p
        else:
            v = q[f] + q[z // f]
            q[z] = v - p if v >= p else v
    return q


def quotient_table(p, spf):
    p = int(p)
    _check_table_args(p, spf)
    return np.array(_quotients(p, spf), dtype=np.int64)


def lambda_table(p, spf):
    p = int(p)
    _check_table_args(p, spf)
    q = _quotients(p, spf)
    q[0] = 0
    return np.array([z * v % p for z, v in enumerate(q)], dtype=np.int64)


def zero_solutions(p, spf):
    q = quotient_table(p, spf)
    z = np.flatnonzero(q == 0)
    return z[z >= 2]


def zero_counts(primes, spf):
    out = []
    for p in map(int, primes):
        _check_table_args(p, spf)
        q = _quotients(p, spf)
        out.append(q.count(0) - 1)  # z = 1
    return np.array(out, dtype=np.int64)


def survey_nonzero(a_lo, a_hi, primes):
    plist = [int(p) for p in primes]
    count = 0
    for A in range(int(a_lo), int(a_hi) + 1):
        if not any(_is_zero(A, p) for p in plist):
            count += 1
    return count


def ratio_recurrence(p, h):
    p, h = int(p), int(h)
    S = 0.0
    pm1 = float(p - 1)
    for k in range(1, p - 1 - h):
        S = (S + 1.0) * k / (pm1 * (p - 1 - k))
    return S + 1.0


def progression_log_product(m, f, n_max):
    m, n_max = int(m), int(n_max)
    terms = []
    for n in range(1, n_max + 1):
        p = 1 + n * m
        if is_prime_u64(p):
            terms.append(math.log1p(-f / (float(p) * float(p))))
    return math.fsum(terms), len(terms)


def phi_square_segment(lo, hi, small_primes):
    lo, hi = int(lo), int(hi)
    if lo < 2 or hi <= lo:
        return 0.0, 0
    size = hi - lo
    comp = np.zeros(size, dtype=bool)
    rem = np.arange(lo - 1, hi - 1, dtype=np.uint64)
    g = np.ones(size, dtype=np.float64)
    nlo = lo - 1
    for q in map(int, small_primes):
        if q * q >= hi:
            break
        start = max(q * q, -(-lo // q) * q)
        comp[start - lo::q] = True
    for q in map(int, small_primes):
        if q * q > hi:
            break
        qk, pk, gprev = q, 1, 1.0
        while qk <= hi - 1:
            gcur = gprev + float(pk * (q - 1)) ** 2
            start = -(-nlo // qk) * qk
            sl = slice(start - nlo, None, qk)
            rem[sl] //= np.uint64(q)
            g[sl] *= gcur / gprev
            gprev = gcur
            pk *= q
            qk *= q
    keep = ~comp
    r = rem[keep].astype(np.float64)
    gk = g[keep] * np.where(r > 1, 1.0 + (r - 1.0) ** 2, 1.0)
    pd = np.arange(lo, hi, dtype=np.float64)[keep]
    terms = gk / (pd * (pd - 1.0) ** 2)
    return math.fsum(terms.tolist()), int(keep.sum())
