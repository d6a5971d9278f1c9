import math

import gmpy2
import numpy as np
import pytest

from floorsum import primes
from floorsum.errors import BudgetExceededError, DomainError


def _naive_primes(limit):
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(limit ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve)


def test_primes_upto_matches_naive():
    assert np.array_equal(primes.primes_upto(10**4), _naive_primes(10**4))


def test_primes_in_open_closed_convention():
    got = primes.primes_in(10, 30)
    assert got.tolist() == [11, 13, 17, 19, 23, 29]
    # boundary: lo itself excluded, hi included
    assert primes.primes_in(2, 3).tolist() == [3]
    assert primes.primes_in(0, 2).tolist() == [2]


def test_segmented_matches_dense_across_boundary():
    lo, hi = 10**6 - 500, 10**6 + 500
    dense = _naive_primes(hi)
    expected = dense[(dense > lo) & (dense <= hi)]
    assert np.array_equal(primes.primes_in(lo, hi), expected)


def test_prime_count_between():
    assert primes.prime_count_between(0, 100) == 25
    assert primes.prime_count_between(100, 1000) == 168 - 25


def test_range_cap_budget():
    with pytest.raises(BudgetExceededError):
        primes.primes_in(0, 10**9, range_cap=10**6)


def test_degenerate_ranges():
    # (lo, hi] with hi <= lo is simply empty; callers lean on this for
    # prime windows that collapse at small n.
    assert primes.primes_in(10, 10).size == 0
    assert primes.primes_in(30, 10).size == 0
    with pytest.raises(DomainError):
        primes.primes_in(-1, 10)


def test_mangoldt_range_values():
    lam = primes.mangoldt_range(0, 16)
    # Lambda(t) = log p when t = p**k, else 0; aligned with t = 1..16
    expect = {2: np.log(2), 3: np.log(3), 4: np.log(2), 5: np.log(5),
              7: np.log(7), 8: np.log(2), 9: np.log(3), 11: np.log(11),
              13: np.log(13), 16: np.log(2)}
    for t in range(1, 17):
        assert lam[t - 1] == pytest.approx(expect.get(t, 0.0), abs=1e-15)


def test_mangoldt_chebyshev_identity():
    # sum_{t <= x} Lambda(t) = log lcm(1..x), an exact identity.
    lam = primes.mangoldt_range(0, 1000)
    expected = float(gmpy2.log(gmpy2.mpz(math.lcm(*range(1, 1001)))))
    assert lam.sum() == pytest.approx(expected, rel=1e-12)


def test_moebius_upto():
    mu = primes.moebius_upto(30)
    expect = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0, -1, 1, 1, 0, -1, 0,
              -1, 0, 1, 1, -1, 0, 0, 1, 0, 0, -1, -1]
    assert mu[1:31].tolist() == expect


def test_moebius_dirichlet_identity():
    # sum_{d | n} mu(d) = [n == 1]
    mu = primes.moebius_upto(2000)
    sums = np.zeros(2001, dtype=np.int64)
    for d in range(1, 2001):
        sums[d::d] += mu[d]
    assert sums[1] == 1
    assert not sums[2:].any()


def test_is_prime_spot():
    assert primes.is_prime(2)
    assert primes.is_prime(999983)
    assert not primes.is_prime(1)
    assert not primes.is_prime(999981)
