"""Fermat quotients q_p(a) = (a^(p-1) - 1)/p mod p and the solutions of q_p = 0."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import arith, kernels
from ._pool import chunks, ordered_map, progress
from .arith import PrimeModulus
from .cyclotomic import StructuralViolation, _phi_m_mod

# spf (uint32) + quotient table (int64) cost 12 bytes per z
SIEVE_LIMIT = 2**27
SEARCH_CHUNK = 2**22


@dataclass(frozen=True)
class FermatQuotientRecord:
    p: int
    a: int
    q: int


@dataclass(frozen=True)
class SolutionRecord:
    p: int
    z: int
    lam: int
    order: int

    @property
    def Z(self) -> int:
        return self.z + self.lam * self.p


@dataclass(frozen=True)
class LiftRecord:
    p: int
    z: int
    u: int
    Z: int
    lam: int


@dataclass(frozen=True)
class QuotientVariants:
    p: int
    a: int
    order: int
    t: int
    q: int
    q1: int  # (a^o - 1)/p mod p
    q2: int  # Phi_o(a)/p mod p
    agree: bool  # the three vanish together


@dataclass(frozen=True)
class CrtSolutionSet:
    primes: tuple[int, ...]
    modulus: int
    residues: list[int]


def _nonmultiple(a: int, p: int) -> None:
    if a % p == 0:
        raise ValueError(f"{p} divides {a}; quotient undefined")


def quotient(a: int, p: int) -> int:
    """q_p(a) in [0, p) for a plain prime int, no checks beyond p | a."""
    p2 = p * p
    return (pow(a, p - 1, p2) - 1) // p


def fermat_quotient(a: int, p: int | PrimeModulus) -> FermatQuotientRecord:
    p = arith.as_prime(p)
    _nonmultiple(a, p)
    return FermatQuotientRecord(p, a, quotient(a, p))


def is_zero(a: int, p: int) -> bool:
    """q_p(a) = 0, with multiples of p reported as nonzero."""
    return a % p != 0 and pow(a, p - 1, p * p) == 1


def quotient_variants(a: int, p: int | PrimeModulus) -> QuotientVariants:
    """q, q' = (a^o - 1)/p and q'' = Phi_o(a)/p, all mod p, with o = o_p(a).

    Raises StructuralViolation unless q = t*q' mod p where p - 1 = t*o.
    """
    p = arith.as_prime(p)
    _nonmultiple(a, p)
    p2 = p * p
    o = arith.multiplicative_order(a, p)
    t = (p - 1) // o
    q = quotient(a, p)
    q1 = (pow(a, o, p2) - 1) // p
    if a % p2 == 1:
        q2 = 0
    else:
        q2 = _phi_m_mod(o, a % p2, p2) // p
    if (q - t * q1) % p:
        raise StructuralViolation(f"q != t q' at a={a}, p={p}")
    # t = -1/o mod p
    if (t * o + 1) % p:
        raise StructuralViolation("t != -1/o mod p")
    agree = (q == 0) == (q1 == 0) == (q2 == 0)
    return QuotientVariants(p, a, o, t, q, q1, q2, agree)


def lift_to_solution(z: int, u: int, p: int | PrimeModulus) -> LiftRecord:
    """The unique Z in [1, p^2) with Z = z mod p and q_p(Z) = u."""
    p = arith.as_prime(p)
    if not 1 <= z < p or not 0 <= u < p:
        raise ValueError("need 1 <= z < p and 0 <= u < p")
    p2 = p * p
    Z = (pow(z, p, p2) - z * u * p) % p2
    return LiftRecord(p, z, u, Z, (Z - z) // p)


def _word_backend(k, largest: int):
    """The python twin when a compiled kernel would overflow on primes >= 2**32."""
    if largest >= 2**32 and k.NAME == "compiled":
        return kernels.get("python")
    return k


def _zero_scan(a: int, primes: np.ndarray, k) -> np.ndarray:
    if len(primes) == 0:
        return primes
    return _word_backend(k, int(primes[-1])).fermat_zero_scan(a, primes)


def _direct_zeros(p: int, backend=None) -> list[int]:
    k = backend or kernels.active
    if p < 2**32:
        return [int(z) for z in k.direct_zeros(p, 2, p)]
    p2 = p * p
    return [z for z in range(2, p) if pow(z, p - 1, p2) == 1]


def zeros_in_range(p: int, sieve_limit: int = SIEVE_LIMIT, backend=None) -> list[int]:
    """z in [2, p) with q_p(z) = 0, ascending."""
    if p < 3:
        return []
    k = backend or kernels.active
    if p >= sieve_limit or p >= k.MONTGOMERY_LIMIT:
        return _direct_zeros(p, k)
    return [int(z) for z in k.zero_solutions(p, arith.spf_table(p))]


def solutions_in_range(p: int | PrimeModulus, sieve_limit: int = SIEVE_LIMIT) -> list[SolutionRecord]:
    """All z in [2, p) with q_p(z) = 0 and their orders mod p.

    Multiplicative sieve below ``sieve_limit``: a powmod per prime z and
    q(uv) = q(u) + q(v) for composites. Direct powmod per z above it.
    """
    p = arith.as_prime(p)
    return [SolutionRecord(p, z, 0, arith.multiplicative_order(z, p)) for z in zeros_in_range(p, sieve_limit)]


def lambda_values(p: int, backend=None) -> np.ndarray:
    """lambda(z) = z*q_p(z) mod p for z in [0, p) (entry 0 unused, set to 0)."""
    if p == 2:
        return np.zeros(2, dtype=np.int64)
    if p < min(SIEVE_LIMIT, kernels.active.MONTGOMERY_LIMIT):
        k = backend or kernels.active
        return k.lambda_table(p, arith.spf_table(p))
    p2 = p * p
    return np.array([0] + [z * ((pow(z, p - 1, p2) - 1) // p) % p for z in range(1, p)], dtype=np.int64)


def solutions_mod_p2(p: int | PrimeModulus) -> list[int]:
    """The p - 1 residues Z in [1, p^2) with q_p(Z) = 0, ascending."""
    p = arith.as_prime(p)
    if p == 2:
        return [1]
    lam = lambda_values(p).tolist()
    return sorted(z + lam[z] * p for z in range(1, p))


def _crt_pair(r1: list[int], m1: int, r2: list[int], m2: int) -> list[int]:
    inv = pow(m1, -1, m2)
    return [x + m1 * ((y - x) * inv % m2) for x in r1 for y in r2]


def crt_solutions(primes) -> CrtSolutionSet:
    """All A mod prod p^2 with q_p(A) = 0 for every listed p."""
    ps = tuple(int(p) for p in primes)
    if len(set(ps)) != len(ps) or not ps:
        raise ValueError("need a nonempty list of distinct primes")
    res, mod = [0], 1
    for p in ps:
        arith.as_prime(p)
        res = _crt_pair(res, mod, solutions_mod_p2(p), p * p)
        mod *= p * p
    return CrtSolutionSet(ps, mod, sorted(res))


def orders_of_powers(g: int, p: int | PrimeModulus) -> list[int]:
    """o_p(g^i) for i = 1, 2, ... while g^i < p."""
    p = arith.as_prime(p)
    if g < 2:
        raise ValueError("g must be >= 2")
    _nonmultiple(g, p)
    out, x = [], g
    while x < p:
        out.append(arith.multiplicative_order(x, p))
        x *= g
    return out


def theta_offsets(a: int, p: int | PrimeModulus) -> list[tuple[int, int]]:
    """(j, theta_j) for 1 <= j < o_p(a), where a^j = a_j (1 + theta_j p) mod p^2
    and a_j = a^j mod p. Checks q(a_j) = j q(a) + theta_j mod p along the way."""
    p = arith.as_prime(p)
    _nonmultiple(a, p)
    p2 = p * p
    o = arith.multiplicative_order(a, p)
    qa = quotient(a, p)
    out = []
    aj2 = 1
    for j in range(1, o):
        aj2 = aj2 * a % p2
        aj = aj2 % p
        theta = (aj2 * pow(aj, -1, p2) % p2 - 1) // p
        if (quotient(aj, p) - j * qa - theta) % p:
            raise StructuralViolation(f"theta congruence fails at j={j}")
        out.append((j, theta))
    return out


def _scan_chunk(a, lo, hi, backend):
    primes = arith.primes_between(lo, hi)
    hits = _zero_scan(a, primes, backend)
    return int(hits[0]) if len(hits) else None


def _load_checkpoint(path, a, p_lo, p_hi):
    if path and os.path.exists(path):
        state = json.loads(Path(path).read_text())
        if (state.get("a"), state.get("p_lo"), state.get("p_hi")) == (a, p_lo, p_hi):
            return state
    return {"a": a, "p_lo": p_lo, "p_hi": p_hi, "cursor": p_lo, "found": None}


def _save_checkpoint(path, state):
    if path:
        tmp = f"{path}.tmp"
        Path(tmp).write_text(json.dumps(state))
        os.replace(tmp, path)


def first_solution_search(
    a: int,
    p_lo: int,
    p_hi: int,
    threads: int = 1,
    chunk: int = SEARCH_CHUNK,
    checkpoint: str | None = None,
    verbose: bool = False,
    backend=None,
) -> int | None:
    """Least prime p in [p_lo, p_hi] with p not dividing a and q_p(a) = 0.

    The range is cut into chunks scanned on a thread pool. Results are merged
    in chunk order, so the answer does not depend on ``threads``. With
    ``checkpoint`` the cursor is written to a JSON file after every chunk and
    a matching file is resumed from.
    """
    if not 2 <= p_lo <= p_hi:
        raise ValueError("need 2 <= p_lo <= p_hi")
    k = backend or kernels.active
    state = _load_checkpoint(checkpoint, a, p_lo, p_hi)
    if state["found"] is not None or state["cursor"] > p_hi:
        return state["found"]
    parts = chunks(state["cursor"], p_hi, chunk)
    for (lo, hi), hit in zip(parts, ordered_map(lambda c: _scan_chunk(a, c[0], c[1], k), parts, threads)):
        state["cursor"] = hi + 1
        state["found"] = hit
        _save_checkpoint(checkpoint, state)
        progress(f"first-zero a={a}: scanned to {hi}", verbose)
        if hit is not None:
            return hit
    return None


def verify_pair(a: int, p: int) -> bool:
    """Point check q_p(a) = 0 for a single (possibly large) prime."""
    return arith.is_prime(p) and is_zero(a, p)


def zero_pairs(a_lo: int, a_hi: int, p_bound: int) -> list[tuple[int, int]]:
    """(a, p) with a_lo <= a <= a_hi, p < p_bound prime, q_p(a) = 0; p = 2 included."""
    primes = arith.primes_between(2, p_bound - 1)
    k = kernels.active
    return [(a, int(p)) for a in range(a_lo, a_hi + 1) for p in _zero_scan(a, primes, k)]


def average_solution_count(
    a_lo: int, a_hi: int, p_bound: int, overrun: bool = False, threads: int = 1, backend=None
) -> Fraction:
    """Mean over a in [a_lo, a_hi] of the number of primes p < p_bound with q_p(a) = 0.

    p = 2 counts when a = 1 mod 4 and odd primes are scanned separately, as
    in the original averaging program. ``overrun=True`` also scans the first
    prime >= p_bound, which that program's loop reaches before stopping.
    """
    if not 2 <= a_lo <= a_hi:
        raise ValueError("need 2 <= a_lo <= a_hi")
    k = backend or kernels.active
    total = sum(1 for a in range(a_lo, a_hi + 1) if a % 4 == 1)
    last = p_bound - 1
    if overrun:
        last = p_bound if arith.is_prime(p_bound) else arith.next_prime(p_bound)

    def work(span):
        primes = arith.primes_between(max(span[0], 3), span[1])
        return sum(len(_zero_scan(a, primes, k)) for a in range(a_lo, a_hi + 1))

    if last >= 3:
        total += sum(ordered_map(work, chunks(3, last, SEARCH_CHUNK), threads))
    return Fraction(total, a_hi - a_lo + 1)
