"""Prime generation and arithmetic-function tables.

All range queries use half-open intervals (lo, hi], matching how prime
ranges (X, X1] appear throughout the package.  Small ranges are served by
slicing a cached dense prime table that grows geometrically; large ranges
are sieved segment by segment against base primes up to sqrt(hi), so no
array of size hi is ever allocated.
"""

from __future__ import annotations

import math

import gmpy2
import numpy as np

from .errors import BudgetExceededError, DomainError

__all__ = [
    "DEFAULT_RANGE_CAP",
    "primes_upto",
    "primes_in",
    "prime_count_between",
    "mangoldt_range",
    "mangoldt_upto",
    "moebius_upto",
    "is_prime",
]

DEFAULT_RANGE_CAP = 1 << 40
_DENSE_MAX = 1 << 24  # beyond this, serve queries by segmented sieving

_dense_limit = 0
_dense_primes = np.empty(0, dtype=np.int64)


def _grow_dense(limit: int) -> None:
    global _dense_limit, _dense_primes
    limit = max(limit, 2 * _dense_limit, 1 << 10)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    _dense_primes = np.flatnonzero(sieve).astype(np.int64)
    _dense_limit = limit


def primes_upto(limit: int) -> np.ndarray:
    """All primes <= limit (a view into the shared cache; do not mutate)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    if limit > _dense_limit:
        _grow_dense(limit)
    return _dense_primes[: np.searchsorted(_dense_primes, limit, side="right")]


def _segmented_primes(lo: int, hi: int) -> np.ndarray:
    base = primes_upto(math.isqrt(hi))
    seg = np.ones(hi - lo, dtype=bool)  # positions for lo+1 .. hi
    for p in base:
        p = int(p)
        start = max(p * p, lo + 1 + (-(lo + 1)) % p)
        if start > hi:
            continue
        seg[start - lo - 1 :: p] = False
    if lo == 0:
        seg[0] = False  # n = 1
    return np.flatnonzero(seg).astype(np.int64) + lo + 1


def primes_in(lo: int, hi: int, *, range_cap: int = DEFAULT_RANGE_CAP) -> np.ndarray:
    """Primes p with lo < p <= hi, as an int64 array."""
    if lo < 0 or hi < 0:
        raise DomainError(f"negative range ({lo}, {hi}]")
    if hi > range_cap:
        raise BudgetExceededError(f"range endpoint {hi} exceeds cap {range_cap}")
    if hi <= lo or hi < 2:
        return np.empty(0, dtype=np.int64)
    lo = max(lo, 0)
    if hi <= max(_DENSE_MAX, _dense_limit):
        table = primes_upto(hi)
        return table[np.searchsorted(table, lo, side="right") :]
    return _segmented_primes(lo, hi)


def prime_count_between(lo: int, hi: int) -> int:
    """#{p prime : lo < p <= hi}."""
    return int(primes_in(lo, hi).size)


def mangoldt_range(lo: int, hi: int) -> np.ndarray:
    """von Mangoldt values for n in (lo, hi], as a float64 array."""
    if hi <= lo or lo < 0:
        raise DomainError(f"bad range ({lo}, {hi}]")
    size = hi - lo
    lam = np.zeros(size)
    composite = np.zeros(size, dtype=bool)
    base = primes_upto(math.isqrt(hi))
    for p in base:
        p = int(p)
        start = max(p * p, lo + 1 + (-(lo + 1)) % p)
        if start <= hi:
            composite[start - lo - 1 :: p] = True
    if lo == 0:
        composite[0] = True  # n = 1 carries no weight
    prime_pos = np.flatnonzero(~composite)
    lam[prime_pos] = np.log(prime_pos + lo + 1.0)
    for p in base:
        p = int(p)
        q = p * p
        logp = math.log(p)
        while q <= hi:
            if q > lo:
                lam[q - lo - 1] = logp
            q *= p
    return lam


def mangoldt_upto(limit: int) -> np.ndarray:
    """von Mangoldt values indexed 0..limit (entries 0 and 1 are zero)."""
    lam = np.zeros(limit + 1)
    if limit >= 2:
        lam[1:] = mangoldt_range(0, limit)
    return lam


def moebius_upto(limit: int) -> np.ndarray:
    """Moebius values indexed 0..limit as int8."""
    mu = np.ones(limit + 1, dtype=np.int8)
    mu[0] = 0
    for p in primes_upto(limit):
        p = int(p)
        mu[p::p] *= -1
        sq = p * p
        if sq <= limit:
            mu[sq::sq] = 0
    return mu


def is_prime(n: int) -> bool:
    return bool(gmpy2.is_prime(int(n)))
