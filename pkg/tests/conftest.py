"""Shared oracles and helpers.

The multiprecision oracles here are deliberately independent of the
package's own arithmetic: mpmath with inflated working precision and
exact big-integer root extraction double-check the certified layer
rather than re-deriving answers from it.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest

import gmpy2


def mp_floor_pow(m: int, c: Fraction, dps: int = 60) -> int:
    """floor(m**c) by mpmath at high precision, sanity-checked.

    Exact powers (m**a a perfect b-th power, like 1024**(13/10) = 2**13)
    are settled exactly: no floating precision separates them from the
    integer they equal.  Everything else raises the working precision
    until the power is convincingly far from the integers flanking it,
    so a rounding straddle cannot slip through silently.
    """
    root, exact = gmpy2.iroot(gmpy2.mpz(m) ** c.numerator, c.denominator)
    if exact:
        return int(root)
    while True:
        with mpmath.workdps(dps):
            value = mpmath.power(m, mpmath.mpf(c.numerator) / c.denominator)
            floor = int(mpmath.floor(value))
            if min(value - floor, floor + 1 - value) >= mpmath.mpf(10) ** (8 - dps):
                return floor
        dps *= 2


def iroot_floor_pow(m: int, c: Fraction) -> int:
    """Exact floor(m**(a/b)) as the integer b-th root of m**a."""
    root, _ = gmpy2.iroot(gmpy2.mpz(m) ** c.numerator, c.denominator)
    return int(root)


def mp_frac_pow(m: int, c: Fraction, dps: int = 60) -> mpmath.mpf:
    """{m**c} by mpmath, guarded against floor straddles like mp_floor_pow."""
    floor = mp_floor_pow(m, c, dps)
    with mpmath.workdps(dps):
        frac = mpmath.power(m, mpmath.mpf(c.numerator) / c.denominator) - floor
        # exact powers land a rounding error away from 0 on either side
        return frac if frac >= 0 else mpmath.mpf(0)


@pytest.fixture
def rundir(tmp_path):
    """A per-test output directory as a string path."""
    return str(tmp_path)
