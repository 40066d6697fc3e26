"""The compiled kernels and their pure-Python twins must agree exactly."""
import numpy as np
import pytest

from fermatq import arith, kernels

py = kernels.get("python")
needs_compiled = pytest.mark.skipif("compiled" not in kernels.available(), reason="extension not built")


@pytest.fixture(scope="module")
def cc():
    return kernels.get("compiled")


def test_backend_selection():
    assert kernels.active.NAME in kernels.available()
    assert kernels.get("python").NAME == "python"
    with pytest.raises(ValueError):
        kernels.get("fortran")


@needs_compiled
def test_powmod_and_primality(cc):
    for b, e, m in [(2, 1092, 1093**2), (3, 10**18, 2**63 - 25), (5, 0, 7), (12345, 67890, 2**64 - 59)]:
        assert cc.powmod(b, e, m) == py.powmod(b, e, m) == pow(b, e, m)
    for n in list(range(0, 3000)) + [2**61 - 1, 3825123056546413051, 2**64 - 59]:
        assert bool(cc.is_prime_u64(n)) == py.is_prime_u64(n) == arith.is_prime(n)


@needs_compiled
def test_zero_scan(cc):
    primes = arith.primes_upto(10**5)
    for a in (2, 3, 5, 7, 10, 66, 2**40 + 1):
        assert cc.fermat_zero_scan(a, primes).tolist() == py.fermat_zero_scan(a, primes).tolist()
    with pytest.raises(ValueError):
        cc.fermat_zero_scan(2, np.array([2**32 + 15], dtype=np.uint64))


@needs_compiled
def test_tables(cc):
    spf = arith.spf_table(5000)
    for p in arith.prime_range(3, 5000):
        assert np.array_equal(cc.quotient_table(p, spf), py.quotient_table(p, spf))
        assert np.array_equal(cc.lambda_table(p, spf), py.lambda_table(p, spf))
    ps = arith.primes_between(3, 5000)
    assert np.array_equal(cc.zero_counts(ps, spf), py.zero_counts(ps, spf))


@needs_compiled
def test_table_argument_checks(cc):
    spf = arith.spf_table(100)
    for k in (cc, py):
        with pytest.raises(ValueError):
            k.quotient_table(2, spf)
        with pytest.raises(ValueError):
            k.quotient_table(10007, spf[:50])


@needs_compiled
def test_direct_and_survey(cc):
    for p in (29, 1093, 10007):
        assert cc.direct_zeros(p, 2, p).tolist() == py.direct_zeros(p, 2, p).tolist()
    primes = arith.primes_upto(3000)
    assert cc.survey_nonzero(2, 400, primes) == py.survey_nonzero(2, 400, primes)


@needs_compiled
def test_float_kernels(cc):
    assert cc.ratio_recurrence(10007, 13) == pytest.approx(py.ratio_recurrence(10007, 13), rel=1e-12)
    a, n = cc.progression_log_product(40, 16.0, 10**4)
    b, m = py.progression_log_product(40, 16.0, 10**4)
    assert n == m and a == pytest.approx(b, rel=1e-12)
    small = arith.primes_upto(400)
    for lo, hi in [(2, 11), (2, 10**5), (777, 5000), (99991, 100003)]:
        x, i = cc.phi_square_segment(lo, hi, small)
        y, j = py.phi_square_segment(lo, hi, small)
        assert i == j and x == pytest.approx(y, rel=1e-12)
