"""Certified arithmetic for floors and fractional parts of power functions.

Every quantity of the form m**c, (n - p**c)**(1/c), and their floors and
fractional parts is computed as a two-sided enclosure using MPFR with
directed rounding (via gmpy2 contexts).  Floors are only reported when both
enclosure endpoints agree; otherwise precision escalates geometrically up to
a cap.  For rational exponents a/b there is an exact big-integer fallback
(k-th root extraction) that resolves floors even when the true power is an
integer, a case no finite-precision enclosure can decide.

Conventions:
- enclosures are closed intervals [lo, hi] guaranteed to contain the true
  real value;
- ``precision_bits`` on results is the *requested* target; internal
  computations carry guard bits so the contracted width bound
  width <= 2**(1 - precision_bits) * value holds;
- integer inputs are trusted to be exact (Python ints convert exactly).
"""

from __future__ import annotations

import logging
import numbers
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpfr, mpz

from .errors import DomainError, IndeterminateFloorError, PrecisionCapError
from .exponent import Exponent

__all__ = [
    "CertifiedValue",
    "FloorResult",
    "DEFAULT_START_PRECISION",
    "DEFAULT_PRECISION_CAP",
    "pow_enclosure",
    "floor_power",
    "floor_power_int",
    "frac_power",
    "residual_power",
    "residual_floor",
    "residual_frac",
    "floor_of_root",
    "exact_floor_pow",
    "count_powers_below",
    "least_power_reaching",
    "log_enclosure",
    "rational_pow_enclosure",
    "scale_enclosure",
    "directed_contexts",
    "escalation_stats",
    "reset_escalation_stats",
    "precision_cap",
    "set_precision_cap",
]

logger = logging.getLogger(__name__)

DEFAULT_START_PRECISION = 64
DEFAULT_PRECISION_CAP = 4096
_GUARD_BITS = 8

# Process-wide default cap, adjustable by front ends (worker processes
# inherit the default unless they call set_precision_cap themselves).
_PRECISION_CAP = DEFAULT_PRECISION_CAP


def precision_cap() -> int:
    return _PRECISION_CAP


def set_precision_cap(bits: int) -> None:
    """Set the default escalation ceiling for all certified computations."""
    global _PRECISION_CAP
    if not isinstance(bits, int) or bits < DEFAULT_START_PRECISION:
        raise DomainError(
            f"precision cap must be an integer >= {DEFAULT_START_PRECISION} "
            f"bits, got {bits}")
    _PRECISION_CAP = bits

# Escalation counters, useful for run manifests.  Plain dict: the library
# is single-threaded per process (worker processes keep their own copy).
_STATS = {"escalations": 0, "exact_root_fallbacks": 0, "indeterminate": 0}


def escalation_stats() -> dict:
    return dict(_STATS)


def reset_escalation_stats() -> None:
    for key in _STATS:
        _STATS[key] = 0


@lru_cache(maxsize=64)
def _ctxs(prec: int):
    """Directed-rounding context pair (round-down, round-up)."""
    down = gmpy2.context(precision=prec, round=gmpy2.RoundDown)
    up = gmpy2.context(precision=prec, round=gmpy2.RoundUp)
    return down, up


@lru_cache(maxsize=4096)
def _fraction_pair(num: int, den: int, prec: int):
    """Enclosure [lo, hi] of num/den at the given working precision."""
    down, up = _ctxs(prec)
    return down.div(mpz(num), mpz(den)), up.div(mpz(num), mpz(den))


def _as_comparable(x):
    """Convert an endpoint to something mpfr compares against exactly."""
    if isinstance(x, Fraction):
        return gmpy2.mpq(x.numerator, x.denominator)
    if isinstance(x, numbers.Real) or isinstance(x, (type(mpz(0)), type(mpfr(0)))):
        return x
    raise TypeError(f"cannot compare against {type(x).__name__}")


@dataclass(frozen=True)
class CertifiedValue:
    """Closed interval [lo, hi] certified to contain a real value."""

    lo: object  # mpfr
    hi: object  # mpfr
    precision_bits: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"inverted enclosure [{self.lo}, {self.hi}]")

    def width(self):
        _, up = _ctxs(self.precision_bits + _GUARD_BITS)
        return up.sub(self.hi, self.lo)

    def midpoint(self) -> float:
        return float(self.lo) / 2.0 + float(self.hi) / 2.0

    def contains(self, x) -> bool:
        x = _as_comparable(x)
        return self.lo <= x <= self.hi

    def certainly_below(self, x) -> bool:
        """True when the enclosed value is certainly < x."""
        return self.hi < _as_comparable(x)

    def certainly_above(self, x) -> bool:
        """True when the enclosed value is certainly > x."""
        return self.lo > _as_comparable(x)

    def floor_pair(self) -> tuple[int, int]:
        return int(gmpy2.floor(self.lo)), int(gmpy2.floor(self.hi))

    def __float__(self) -> float:
        return self.midpoint()

    def __repr__(self) -> str:
        return f"CertifiedValue({self.lo!r}, {self.hi!r}, bits={self.precision_bits})"


@dataclass(frozen=True)
class FloorResult:
    """Floor value, or None when undecided at the achieved precision."""

    value: int | None
    precision_bits: int

    @property
    def determinate(self) -> bool:
        return self.value is not None

    def expect(self) -> int:
        if self.value is None:
            raise IndeterminateFloorError(
                "floor undecided at precision cap", self.precision_bits
            )
        return self.value



def _cap(cap_bits: int | None) -> int:
    return _PRECISION_CAP if cap_bits is None else cap_bits


def _validate_positive_int(m, name="m") -> int:
    if not isinstance(m, (int, type(mpz(0)))):
        raise DomainError(f"{name} must be an integer, got {type(m).__name__}")
    if m < 1:
        raise DomainError(f"{name} must be >= 1, got {m}")
    return int(m)


def pow_enclosure(m, c, precision_bits: int = DEFAULT_START_PRECISION,
                  cap_bits: int | None = None) -> CertifiedValue:
    """Enclosure of m**c for integer m >= 1 and positive exponent c.

    Width obeys width <= 2**(1 - precision_bits) * m**c.  Requests beyond
    the cap raise PrecisionCapError carrying the at-cap enclosure.
    """
    m = _validate_positive_int(m)
    c = Exponent.coerce(c)
    cap_bits = _cap(cap_bits)
    if precision_bits < 2:
        raise DomainError(f"precision_bits must be >= 2, got {precision_bits}")
    if precision_bits > cap_bits:
        at_cap = pow_enclosure(m, c, cap_bits, cap_bits)
        raise PrecisionCapError(
            f"requested {precision_bits} bits exceeds cap {cap_bits}", at_cap
        )
    prec = precision_bits + _GUARD_BITS
    down, up = _ctxs(prec)
    c_lo, c_hi = _fraction_pair(c.numerator, c.denominator, prec)
    # m >= 1 so m**x is nondecreasing in x.
    lo = down.pow(m, c_lo)
    hi = up.pow(m, c_hi)
    return CertifiedValue(lo, hi, precision_bits)


def _pow_corners(base_lo, base_hi, exp_lo, exp_hi, prec: int):
    """Enclosure of x**e over x in [base_lo, base_hi] > 0, e in [exp_lo, exp_hi].

    x**e is monotone in each argument separately for x > 0, so the range
    over the rectangle is attained at corners.  For base >= 1 and e >= 0 it
    is nondecreasing in both, so two corner evaluations suffice.
    """
    down, up = _ctxs(prec)
    if base_lo >= 1 and exp_lo >= 0:
        return down.pow(base_lo, exp_lo), up.pow(base_hi, exp_hi)
    corners = ((base_lo, exp_lo), (base_lo, exp_hi), (base_hi, exp_lo), (base_hi, exp_hi))
    lo = min(down.pow(b, e) for b, e in corners)
    hi = max(up.pow(b, e) for b, e in corners)
    return lo, hi


def floor_power(m, c, *, start_bits: int = DEFAULT_START_PRECISION,
                cap_bits: int | None = None) -> FloorResult:
    """floor(m**c) with escalating precision and exact-root fallback.

    The enclosure endpoints must agree on the floor; if they straddle an
    integer and c = a/b admits exact root extraction, the floor is settled
    exactly as the integer b-th root of m**a.  Otherwise precision doubles
    up to the cap, and an undecided result is returned explicitly rather
    than guessed.
    """
    m = _validate_positive_int(m)
    c = Exponent.coerce(c)
    cap_bits = _cap(cap_bits)
    prec = start_bits
    while True:
        enc = pow_enclosure(m, c, prec, cap_bits)
        f_lo, f_hi = enc.floor_pair()
        if f_lo == f_hi:
            return FloorResult(f_lo, prec)
        if c.exact_root_available:
            _STATS["exact_root_fallbacks"] += 1
            root, _ = gmpy2.iroot(mpz(m) ** c.numerator, c.denominator)
            return FloorResult(int(root), prec)
        if prec >= cap_bits:
            _STATS["indeterminate"] += 1
            logger.info("floor undecided at cap: m=%d c=%s bits=%d", m, c, prec)
            return FloorResult(None, prec)
        prec = min(2 * prec, cap_bits)
        _STATS["escalations"] += 1
        if prec > 128:
            logger.info("precision escalation: m=%d c=%s -> %d bits", m, c, prec)


def floor_power_int(m, c, **kwargs) -> int:
    """floor(m**c) as a plain int; raises if undecided at the cap."""
    return floor_power(m, c, **kwargs).expect()


def frac_power(m, c, *, start_bits: int = DEFAULT_START_PRECISION,
               cap_bits: int | None = None) -> CertifiedValue:
    """Enclosure of the fractional part {m**c}, intersected with [0, 1]."""
    m = _validate_positive_int(m)
    c = Exponent.coerce(c)
    result = floor_power(m, c, start_bits=start_bits, cap_bits=cap_bits)
    k = result.expect()
    enc = pow_enclosure(m, c, result.precision_bits, cap_bits)
    down, up = _ctxs(result.precision_bits + _GUARD_BITS)
    lo = down.sub(enc.lo, mpz(k))
    hi = up.sub(enc.hi, mpz(k))
    zero, one = mpfr(0), mpfr(1)
    if lo < zero:
        lo = zero
    if hi > one:
        hi = one
    return CertifiedValue(lo, hi, result.precision_bits)


@lru_cache(maxsize=1024)
def _power_below_limit(n: int, c: Exponent) -> int:
    """Largest integer p with p**c < n (cached per (n, c))."""
    return count_powers_below(n, c)


def _certify_power_below(p: int, c: Exponent, n: int) -> None:
    """Raise DomainError unless p**c < n."""
    if p > _power_below_limit(n, c):
        raise DomainError(f"p**c >= n for p={p}, c={c}, n={n}")


def _residual_enclosure(n: int, p: int, c: Exponent,
                        precision_bits: int, cap_bits: int) -> CertifiedValue:
    """Enclosure of (n - p**c)**(1/c); domain p**c < n already certified.

    The base enclosure n - [p**c] must be certainly positive; if it is not
    at the requested precision the inner power escalates until it is (the
    domain guarantee means this terminates for any interior input).
    """
    gamma = c.reciprocal()
    prec_req = precision_bits + _GUARD_BITS
    prec_pow = precision_bits
    while True:
        enc = pow_enclosure(p, c, prec_pow, cap_bits)
        down, up = _ctxs(prec_req)
        base_lo = down.sub(mpz(n), enc.hi)
        base_hi = up.sub(mpz(n), enc.lo)
        if base_lo > 0:
            break
        if prec_pow >= cap_bits:
            raise PrecisionCapError(
                f"n - p**c not separated from 0 at cap (n={n}, p={p}, c={c})"
            )
        prec_pow = min(2 * prec_pow, cap_bits)
    g_lo, g_hi = _fraction_pair(gamma.numerator, gamma.denominator, prec_req)
    lo, hi = _pow_corners(base_lo, base_hi, g_lo, g_hi, prec_req)
    return CertifiedValue(lo, hi, precision_bits)


def residual_power(n, p, c, precision_bits: int = DEFAULT_START_PRECISION,
                   cap_bits: int | None = None) -> CertifiedValue:
    """Enclosure of (n - p**c)**(1/c), requiring p**c < n."""
    n = _validate_positive_int(n, "n")
    p = _validate_positive_int(p, "p")
    c = Exponent.coerce(c)
    _certify_power_below(p, c, n)
    return _residual_enclosure(n, p, c, precision_bits, _cap(cap_bits))


def residual_floor(n, p, c, *, start_bits: int = DEFAULT_START_PRECISION,
                   cap_bits: int | None = None) -> FloorResult:
    """floor((n - p**c)**(1/c)) by escalation.

    No exact fallback exists here (the base is irrational), so a floor that
    stays undecided at the cap is reported as such.  That requires
    p**c + k**c = n to hold exactly for some integer k, which cannot happen
    for the rational exponents used in practice.
    """
    n = _validate_positive_int(n, "n")
    p = _validate_positive_int(p, "p")
    c = Exponent.coerce(c)
    _certify_power_below(p, c, n)
    cap_bits = _cap(cap_bits)
    prec = start_bits
    while True:
        enc = _residual_enclosure(n, p, c, prec, cap_bits)
        f_lo, f_hi = enc.floor_pair()
        if f_lo == f_hi:
            return FloorResult(f_lo, prec)
        if prec >= cap_bits:
            _STATS["indeterminate"] += 1
            logger.info("residual floor undecided at cap: n=%d p=%d c=%s", n, p, c)
            return FloorResult(None, prec)
        prec = min(2 * prec, cap_bits)
        _STATS["escalations"] += 1


def residual_frac(n, p, c, *, start_bits: int = DEFAULT_START_PRECISION,
                  cap_bits: int | None = None) -> CertifiedValue:
    """Enclosure of {(n - p**c)**(1/c)}, intersected with [0, 1]."""
    n = _validate_positive_int(n, "n")
    p = _validate_positive_int(p, "p")
    c = Exponent.coerce(c)
    _certify_power_below(p, c, n)
    cap_bits = _cap(cap_bits)
    prec = start_bits
    while True:
        enc = _residual_enclosure(n, p, c, prec, cap_bits)
        f_lo, f_hi = enc.floor_pair()
        if f_lo == f_hi:
            break
        if prec >= cap_bits:
            _STATS["indeterminate"] += 1
            raise IndeterminateFloorError(
                f"residual floor undecided at cap (n={n}, p={p}, c={c})", prec
            )
        prec = min(2 * prec, cap_bits)
        _STATS["escalations"] += 1
    down, up = _ctxs(prec + _GUARD_BITS)
    lo = down.sub(enc.lo, mpz(f_lo))
    hi = up.sub(enc.hi, mpz(f_lo))
    zero, one = mpfr(0), mpfr(1)
    if lo < zero:
        lo = zero
    if hi > one:
        hi = one
    return CertifiedValue(lo, hi, prec)


# -- exact integer paths (rational exponents) --------------------------


def floor_of_root(q, a: int) -> int:
    """Exact floor(q**(1/a)) for rational q >= 0 and integer a >= 1."""
    if a < 1:
        raise DomainError(f"root order must be >= 1, got {a}")
    q = Fraction(q)
    if q < 0:
        raise DomainError(f"negative radicand {q}")
    num, den = q.numerator, q.denominator
    if num == 0:
        return 0
    k = int(gmpy2.iroot(mpz(num // den), a)[0])
    while mpz(k + 1) ** a * den <= num:
        k += 1
    while k > 0 and mpz(k) ** a * den > num:
        k -= 1
    return k


def exact_floor_pow(x, c) -> int:
    """Exact floor(x**c) for rational x >= 0 and rational c = a/b.

    Pure big-integer arithmetic: floor(x**(a/b)) = floor((x**a)**(1/b)).
    Intended as the independent oracle for enclosure-based floors and as
    the exact fallback where a power is an integer.
    """
    c = Exponent.coerce(c)
    x = Fraction(x)
    if x < 0:
        raise DomainError(f"negative base {x}")
    return floor_of_root(x ** c.numerator, c.denominator)


def count_powers_below(limit: int, c) -> int:
    """#{m >= 1 : m**c < limit} for integer limit >= 1."""
    limit = _validate_positive_int(limit, "limit")
    c = Exponent.coerce(c)
    if c.exact_root_available:
        # m**(a/b) < limit  iff  m**a <= limit**b - 1 (integers).
        return floor_of_root(mpz(limit) ** c.denominator - 1, c.numerator)
    # Escalation path: count = ceil(limit**(1/c)) - 1 in all cases (when
    # limit**(1/c) = k exactly, m < k means m <= k - 1 = ceil - 1 too).
    gamma = c.reciprocal()
    prec = DEFAULT_START_PRECISION
    while True:
        enc = pow_enclosure(limit, gamma, prec)
        c_lo = int(gmpy2.ceil(enc.lo))
        c_hi = int(gmpy2.ceil(enc.hi))
        if c_lo == c_hi:
            return c_lo - 1
        if prec >= DEFAULT_PRECISION_CAP:
            raise IndeterminateFloorError(
                f"count_powers_below undecided (limit={limit}, c={c})", prec
            )
        prec = min(2 * prec, DEFAULT_PRECISION_CAP)


def least_power_reaching(target: int, c) -> int:
    """Smallest m >= 1 with m**c >= target (ceil of target**(1/c))."""
    if target <= 1:
        return 1
    return count_powers_below(target, c) + 1


def log_enclosure(x: int, precision_bits: int = DEFAULT_START_PRECISION) -> CertifiedValue:
    """Enclosure of the natural log of a positive integer."""
    x = _validate_positive_int(x, "x")
    prec = precision_bits + _GUARD_BITS
    down, up = _ctxs(prec)
    return CertifiedValue(down.log(mpz(x)), up.log(mpz(x)), precision_bits)


def rational_pow_enclosure(x, e, precision_bits: int = DEFAULT_START_PRECISION) -> CertifiedValue:
    """Enclosure of x**e for rational x > 0 and rational e of either sign."""
    x = Fraction(x)
    e = Fraction(e)
    if x <= 0:
        raise DomainError(f"base must be positive, got {x}")
    prec = precision_bits + _GUARD_BITS
    b_lo, b_hi = _fraction_pair(x.numerator, x.denominator, prec)
    e_lo, e_hi = _fraction_pair(e.numerator, e.denominator, prec)
    lo, hi = _pow_corners(b_lo, b_hi, e_lo, e_hi, prec)
    return CertifiedValue(lo, hi, precision_bits)


def scale_enclosure(cv: CertifiedValue, q,
                    precision_bits: int | None = None) -> CertifiedValue:
    """Enclosure of q * v for positive rational q and enclosed v."""
    q = Fraction(q)
    if q <= 0:
        raise DomainError(f"scale must be positive, got {q}")
    bits = precision_bits if precision_bits is not None else cv.precision_bits
    down, up = _ctxs(bits + _GUARD_BITS)
    factor = gmpy2.mpq(q.numerator, q.denominator)
    return CertifiedValue(down.mul(cv.lo, factor), up.mul(cv.hi, factor), bits)


def directed_contexts(precision_bits: int):
    """(round-down, round-up) context pair for one-off interval steps.

    Callers composing their own interval arithmetic must round lower
    endpoints with the first context and upper endpoints with the second.
    """
    return _ctxs(precision_bits)
