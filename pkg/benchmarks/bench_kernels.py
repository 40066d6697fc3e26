"""Compare the compiled kernels with their pure-Python twins.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each case runs on both backends with identical inputs. Results must agree
before a timing is reported.
"""
import argparse
import time

import numpy as np

from fermatq import arith, kernels


def cases(quick):
    scale = 10 if quick else 1
    primes = arith.primes_upto(2 * 10**5 // scale)
    spf = arith.spf_table(10**5)
    small = arith.primes_upto(2000)
    p = 99991 if not quick else 9973
    return [
        ("fermat_zero_scan a=2", lambda k: k.fermat_zero_scan(2, primes)),
        ("quotient_table p=%d" % p, lambda k: k.quotient_table(p, spf)),
        ("lambda_table p=%d" % p, lambda k: k.lambda_table(p, spf)),
        ("direct_zeros p=%d" % p, lambda k: k.direct_zeros(p, 2, p)),
        ("ratio_recurrence p=1e6", lambda k: k.ratio_recurrence(1000003 // scale, 19)),
        ("phi_square_segment [2, 2e5)", lambda k: k.phi_square_segment(2, 2 * 10**5 // scale, small)[0]),
        ("survey_nonzero y=300", lambda k: k.survey_nonzero(2, 300 // scale, primes)),
    ]


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def same(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    if isinstance(a, float):
        return abs(a - b) <= 1e-12 * max(1.0, abs(a))
    return a == b


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args()

    if "compiled" not in kernels.available():
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")
    cc, py = kernels.get("compiled"), kernels.get("python")

    print(f"{'kernel':32s} {'compiled (s)':>13s} {'python (s)':>11s} {'speedup':>8s}")
    for name, fn in cases(args.quick):
        tc, rc = best_of(lambda: fn(cc), args.repeat)
        tp, rp = best_of(lambda: fn(py), 1)
        if not same(rc, rp):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:32s} {tc:13.4f} {tp:11.4f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
