# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.

Every function here has a pure-Python twin in ``_pykernels`` with the same
signature and the same results; ``fermatq.kernels`` picks one at import.
Moduli are p**2 with p < 2**31 on the Montgomery path, so all residues fit
in an unsigned 64-bit word.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, uint32_t
from libc.math cimport log1p

cnp.import_array()

cdef extern from *:
    """
    #include <stdint.h>
    typedef unsigned __int128 fq_u128;

    static inline uint64_t fq_mulmod(uint64_t a, uint64_t b, uint64_t m) {
        return (uint64_t)(((fq_u128)a * b) % m);
    }

    static inline uint64_t fq_powmod(uint64_t b, uint64_t e, uint64_t m) {
        uint64_t r = 1 % m;
        b %= m;
        while (e) {
            if (e & 1) r = fq_mulmod(r, b, m);
            b = fq_mulmod(b, b, m);
            e >>= 1;
        }
        return r;
    }

    /* Montgomery arithmetic, R = 2^64, odd modulus n < 2^63. */
    typedef struct { uint64_t n, ninv, one; } fq_mont;

    static inline void fq_mont_init(fq_mont *M, uint64_t n) {
        uint64_t inv = n;
        for (int i = 0; i < 6; i++) inv *= 2 - n * inv;
        M->n = n;
        M->ninv = (uint64_t)0 - inv;
        M->one = ((uint64_t)0 - n) % n;
    }

    static inline uint64_t fq_redc(const fq_mont *M, fq_u128 T) {
        uint64_t m = (uint64_t)T * M->ninv;
        uint64_t t = (uint64_t)((T + (fq_u128)m * M->n) >> 64);
        return t >= M->n ? t - M->n : t;
    }

    static inline uint64_t fq_to_mont(const fq_mont *M, uint64_t x) {
        return (uint64_t)((((fq_u128)(x % M->n)) << 64) % M->n);
    }

    static inline uint64_t fq_mont_pow(const fq_mont *M, uint64_t xm, uint64_t e) {
        uint64_t r = M->one;
        int bit = 63;
        if (e == 0) return r;
        while (!((e >> bit) & 1)) bit--;
        r = xm;
        for (bit = bit - 1; bit >= 0; bit--) {
            r = fq_redc(M, (fq_u128)r * r);
            if ((e >> bit) & 1) r = fq_redc(M, (fq_u128)r * xm);
        }
        return r;
    }

    /* (a^(p-1) mod p^2 - 1) / p for p odd, p < 2^31, p not dividing a. */
    static inline uint64_t fq_quotient(const fq_mont *M, uint64_t p, uint64_t a) {
        uint64_t r = fq_redc(M, (fq_u128)fq_mont_pow(M, fq_to_mont(M, a), p - 1));
        return (r - 1) / p;
    }

    /* a^(p-1) == 1 mod p^2, any prime p < 2^32 and any 64-bit a. */
    static inline int fq_is_zero(uint64_t a, uint64_t p) {
        uint64_t n = p * p;
        if (p == 2) return (a & 3) == 1;
        if (a % p == 0) return 0;
        if (n < ((uint64_t)1 << 63)) {
            fq_mont M;
            fq_mont_init(&M, n);
            return fq_mont_pow(&M, fq_to_mont(&M, a), p - 1) == M.one;
        }
        return fq_powmod(a, p - 1, n) == 1;
    }

    static int fq_is_prime_u64(uint64_t n) {
        static const uint64_t small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
        static const uint64_t bases[] = {2, 325, 9375, 28178, 450775, 9780504, 1795265022};
        if (n < 2) return 0;
        for (int i = 0; i < 12; i++) {
            if (n == small[i]) return 1;
            if (n % small[i] == 0) return 0;
        }
        if (n < 1369) return 1;
        uint64_t d = n - 1;
        int s = 0;
        while (!(d & 1)) { d >>= 1; s++; }
        for (int i = 0; i < 7; i++) {
            uint64_t a = bases[i] % n;
            if (a == 0) continue;
            uint64_t x = fq_powmod(a, d, n);
            if (x == 1 || x == n - 1) continue;
            int comp = 1;
            for (int r = 1; r < s; r++) {
                x = fq_mulmod(x, x, n);
                if (x == n - 1) { comp = 0; break; }
            }
            if (comp) return 0;
        }
        return 1;
    }
    """
    ctypedef struct fq_mont:
        uint64_t n
        uint64_t ninv
        uint64_t one
    uint64_t fq_powmod(uint64_t b, uint64_t e, uint64_t m) nogil
    uint64_t fq_mulmod(uint64_t a, uint64_t b, uint64_t m) nogil
    void fq_mont_init(fq_mont *M, uint64_t n) nogil
    uint64_t fq_quotient(const fq_mont *M, uint64_t p, uint64_t a) nogil
    int fq_is_zero(uint64_t a, uint64_t p) nogil
    int fq_is_prime_u64(uint64_t n) nogil


NAME = "compiled"
MONTGOMERY_LIMIT = 2**31
WORD_PRIME_LIMIT = 2**32


def powmod(uint64_t base, uint64_t exp, uint64_t modulus):
    return fq_powmod(base, exp, modulus)


def is_prime_u64(uint64_t n):
    return bool(fq_is_prime_u64(n))


def fermat_zero_scan(uint64_t a, const uint64_t[::1] primes):
    """Primes p from ``primes`` with a**(p-1) == 1 (mod p**2)."""
    cdef Py_ssize_t i, k = 0, n = primes.shape[0]
    for i in range(n):
        if primes[i] >= WORD_PRIME_LIMIT:
            raise ValueError("compiled scan needs p < 2**32")
    out = np.empty(n, dtype=np.uint64)
    cdef uint64_t[::1] o = out
    with nogil:
        for i in range(n):
            if fq_is_zero(a, primes[i]):
                o[k] = primes[i]
                k += 1
    return out[:k].copy()


def direct_zeros(uint64_t p, uint64_t lo, uint64_t hi):
    """z in [lo, hi) with z**(p-1) == 1 (mod p**2), one powmod per z. Needs p < 2**32."""
    if p < 3 or p >= WORD_PRIME_LIMIT:
        raise ValueError("p must be an odd prime below 2**32")
    if lo < 1:
        lo = 1
    if hi > p:
        hi = p
    hits = []
    cdef uint64_t z, block = 1 << 20, b_lo = lo, b_hi
    cdef Py_ssize_t k
    buf = np.empty(block, dtype=np.uint64)
    cdef uint64_t[::1] o = buf
    while b_lo < hi:
        b_hi = min(b_lo + block, hi)
        k = 0
        with nogil:
            for z in range(b_lo, b_hi):
                if fq_is_zero(z, p):
                    o[k] = z
                    k += 1
        hits.extend(buf[:k].tolist())
        b_lo = b_hi
    return np.array(hits, dtype=np.uint64)


cdef void _fill_quotients(uint64_t p, const uint32_t[::1] spf, int64_t[::1] q) noexcept nogil:
    cdef fq_mont M
    cdef uint64_t z, s, v
    fq_mont_init(&M, p * p)
    q[0] = -1
    if p > 1:
        q[1] = 0
    for z in range(2, p):
        s = spf[z]
        if s == z:
            q[z] = <int64_t>fq_quotient(&M, p, z)
        else:
            v = <uint64_t>(q[s] + q[z // s])
            q[z] = <int64_t>(v - p if v >= p else v)


def _check_table_args(uint64_t p, spf):
    if p < 3 or p >= MONTGOMERY_LIMIT:
        raise ValueError("p must be an odd prime below 2**31")
    if spf.shape[0] < p:
        raise ValueError("smallest-prime-factor table shorter than p")


def quotient_table(uint64_t p, const uint32_t[::1] spf):
    """q_p(z) for z in [0, p) through the multiplicative sieve; entry 0 is -1."""
    _check_table_args(p, spf)
    out = np.empty(p, dtype=np.int64)
    cdef int64_t[::1] q = out
    with nogil:
        _fill_quotients(p, spf, q)
    return out


def lambda_table(uint64_t p, const uint32_t[::1] spf):
    """lambda(z) = z*q_p(z) mod p for z in [0, p); z + lambda(z)*p has quotient 0."""
    _check_table_args(p, spf)
    out = np.empty(p, dtype=np.int64)
    cdef int64_t[::1] q = out
    cdef uint64_t z
    with nogil:
        _fill_quotients(p, spf, q)
        q[0] = 0
        for z in range(1, p):
            q[z] = <int64_t>((z * <uint64_t>q[z]) % p)
    return out


def zero_solutions(uint64_t p, const uint32_t[::1] spf):
    """All z in [2, p) with q_p(z) == 0, ascending."""
    q = quotient_table(p, spf)
    z = np.flatnonzero(q == 0)
    return z[z >= 2]


def zero_counts(const uint64_t[::1] primes, const uint32_t[::1] spf):
    """Number of z in [2, p) with q_p(z) == 0, for each prime of ``primes``."""
    cdef Py_ssize_t i, n = primes.shape[0]
    cdef uint64_t p, z, pmax = 0
    cdef int64_t c
    for i in range(n):
        p = primes[i]
        _check_table_args(p, spf)
        if p > pmax:
            pmax = p
    buf = np.empty(pmax + 1, dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] q = buf
    cdef int64_t[::1] cnt = counts
    with nogil:
        for i in range(n):
            p = primes[i]
            _fill_quotients(p, spf, q)
            c = 0
            for z in range(2, p):
                if q[z] == 0:
                    c += 1
            cnt[i] = c
    return counts


def survey_nonzero(uint64_t a_lo, uint64_t a_hi, const uint64_t[::1] primes):
    """Count A in [a_lo, a_hi] with A**(p-1) != 1 mod p**2 for every listed prime.

    Primes are scanned in the given order and each A stops at its first zero.
    """
    cdef uint64_t A
    cdef Py_ssize_t i, n = primes.shape[0]
    cdef int64_t count = 0
    cdef int hit
    with nogil:
        for A in range(a_lo, a_hi + 1):
            hit = 0
            for i in range(n):
                if fq_is_zero(A, primes[i]):
                    hit = 1
                    break
            if not hit:
                count += 1
    return count


def ratio_recurrence(uint64_t p, uint64_t h):
    """Backward recurrence S <- (S+1) k / ((p-1)(p-1-k)) for k = 1..p-2-h, plus 1."""
    cdef double S = 0.0, pm1 = <double>(p - 1)
    cdef uint64_t k
    with nogil:
        for k in range(1, p - 1 - h):
            S = (S + 1.0) * <double>k / (pm1 * <double>(p - 1 - k))
    return S + 1.0


def progression_log_product(uint64_t m, double f, uint64_t n_max):
    """Kahan-summed log of prod (1 - f/p**2) over primes p = 1 + n*m, 1 <= n <= n_max."""
    cdef uint64_t n, p
    cdef double s = 0.0, c = 0.0, y, t, pd
    cdef int64_t used = 0
    with nogil:
        for n in range(1, n_max + 1):
            p = 1 + n * m
            if fq_is_prime_u64(p):
                pd = <double>p
                y = log1p(-f / (pd * pd)) - c
                t = s + y
                c = (t - s) - y
                s = t
                used += 1
    return s, used


def phi_square_segment(uint64_t lo, uint64_t hi, const uint64_t[::1] small_primes):
    """Sum over primes p in [lo, hi) of g(p-1) / (p (p-1)**2), g(n) = sum_{d|n} phi(d)**2.

    ``small_primes`` must contain every prime up to sqrt(hi). Returns (sum, count).
    """
    cdef Py_ssize_t size = hi - lo, i, j, nsp = small_primes.shape[0]
    if lo < 2 or hi <= lo:
        return 0.0, 0
    comp_a = np.zeros(size, dtype=np.uint8)       # compositeness of p = lo + i
    rem_a = np.arange(lo - 1, hi - 1, dtype=np.uint64)  # n = p - 1
    g_a = np.ones(size, dtype=np.float64)
    cdef unsigned char[::1] comp = comp_a
    cdef uint64_t[::1] rem = rem_a
    cdef double[::1] g = g_a
    cdef uint64_t q, qk, start, idx, nlo = lo - 1, pk, r
    cdef double gprev, gcur, term, s = 0.0, c = 0.0, y, t, pd, nd
    cdef int64_t used = 0
    with nogil:
        for j in range(nsp):
            q = small_primes[j]
            if q * q >= hi:
                break
            start = ((lo + q - 1) // q) * q
            if start < q * q:
                start = q * q
            idx = start - lo
            while idx < <uint64_t>size:
                comp[idx] = 1
                idx += q
        for j in range(nsp):
            q = small_primes[j]
            if q * q > hi:
                break
            qk = q
            pk = 1
            gprev = 1.0
            while qk <= hi - 1:
                gcur = gprev + <double>(pk * (q - 1)) * <double>(pk * (q - 1))
                start = ((nlo + qk - 1) // qk) * qk
                if start == 0:
                    start = qk
                idx = start - nlo
                while idx < <uint64_t>size:
                    rem[idx] //= q
                    g[idx] *= gcur / gprev
                    idx += qk
                gprev = gcur
                pk *= q
                if qk > (hi - 1) // q:
                    break
                qk *= q
        for i in range(size):
            if comp[i]:
                continue
            if lo + i < 2:
                continue
            r = rem[i]
            if r > 1:
                g[i] *= 1.0 + <double>(r - 1) * <double>(r - 1)
            pd = <double>(lo + i)
            nd = pd - 1.0
            term = g[i] / (pd * nd * nd)
            y = term - c
            t = s + y
            c = (t - s) - y
            s = t
            used += 1
    return s, used
