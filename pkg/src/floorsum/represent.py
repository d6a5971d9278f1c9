"""Representations n = floor(m**c) + floor(p**c) with p prime.

The window criterion: put gamma = 1/c, X = (n/2)**gamma, and search primes
p in (X, X1].  A prime is accepted when both fractional parts fall in open
windows,

  plain variant:  X1 = (5/4) X,  delta = gamma * X**(1-c),
      {p**c} in (0, 1/2),
      {(n - p**c)**gamma} in (1 - (5/6) delta, 1 - (2/3) delta);

  tight variant:  eta = (log n)**(-2),  X1 = (1 + eta) X,
      {p**c} in (4 eta, 1 - 4 eta),
      {(n - p**c)**gamma} in (1 - delta - eta delta, 1 - delta + eta delta).

For an accepted prime, m = ceil((n - floor(p**c))**gamma) satisfies
floor(m**c) = n - floor(p**c), giving a representation.  Every membership
test is decided from certified enclosures with escalating precision; a
prime whose membership stays undecided at the cap is reported Uncertain,
never guessed.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from gmpy2 import mpfr

from . import primes
from .certified import (
    DEFAULT_PRECISION_CAP,
    DEFAULT_START_PRECISION,
    CertifiedValue,
    count_powers_below,
    directed_contexts,
    floor_of_root,
    floor_power_int,
    frac_power,
    least_power_reaching,
    rational_pow_enclosure,
    residual_frac,
    scale_enclosure,
)
from .errors import DomainError, IndeterminateFloorError
from .exponent import Exponent

__all__ = [
    "Variant",
    "ProblemParams",
    "Classification",
    "WindowOutcome",
    "WindowTally",
    "Representation",
    "derive_params",
    "check_window",
    "count_window_primes",
    "find_representation",
    "find_representation_bruteforce",
    "iter_representations",
    "verify_representation",
    "window_integer_existence",
]

logger = logging.getLogger(__name__)

_GUARD = 8
_INT_LIMIT = 1 << 127  # integer inputs beyond this are out of scope


class Variant(str, enum.Enum):
    PLAIN = "plain"
    TIGHT = "tight"


class Classification(enum.Enum):
    IN = "in"
    OUT = "out"
    UNCERTAIN = "uncertain"


@dataclass(frozen=True)
class WindowOutcome:
    classification: Classification
    precision_bits: int

    @property
    def is_in(self) -> bool:
        return self.classification is Classification.IN

    @property
    def is_out(self) -> bool:
        return self.classification is Classification.OUT

    @property
    def is_uncertain(self) -> bool:
        return self.classification is Classification.UNCERTAIN


@dataclass(frozen=True)
class ProblemParams:
    """Derived search parameters for one (n, c) instance."""

    n: int
    c: Exponent
    variant: Variant
    precision_bits: int
    X: CertifiedValue
    X1: CertifiedValue
    delta: CertifiedValue
    eta: CertifiedValue | None
    p_lo: int  # primes searched: p_lo < p <= p_hi, matching X < p <= X1
    p_hi: int

    @property
    def gamma(self) -> Fraction:
        return 1 / self.c.value

    def prime_range(self) -> tuple[int, int]:
        return self.p_lo, self.p_hi

    def search_primes(self):
        return primes.primes_in(self.p_lo, self.p_hi)


def _floor_scaled_pow(x: Fraction, e: Fraction, scale: Fraction = Fraction(1)) -> int:
    """Exact floor(scale * x**e) for positive rationals, e = b/a > 0."""
    a, b = e.denominator, e.numerator
    return floor_of_root(scale**a * x**b, a)


@lru_cache(maxsize=256)
def _delta_enclosure(n: int, c: Exponent, bits: int) -> CertifiedValue:
    """delta = gamma * X**(1-c) = gamma * (n/2)**((1-c)/c)."""
    gamma = 1 / c.value
    body = rational_pow_enclosure(Fraction(n, 2), (1 - c.value) / c.value, bits)
    return scale_enclosure(body, gamma, bits)


@lru_cache(maxsize=256)
def _eta_enclosure(n: int, bits: int) -> CertifiedValue:
    """eta = (log n)**(-2) as an enclosure."""
    down, up = directed_contexts(bits + _GUARD)
    log_lo, log_hi = down.log(n), up.log(n)
    den_lo = down.mul(log_lo, log_lo)
    den_hi = up.mul(log_hi, log_hi)
    return CertifiedValue(down.div(1, den_hi), up.div(1, den_lo), bits)


def derive_params(n, c, *, variant: str | Variant = Variant.PLAIN,
                  precision_bits: int = DEFAULT_START_PRECISION,
                  allow_degenerate: bool = False) -> ProblemParams:
    """Derive X, X1, delta (and eta for the tight variant) for (n, c).

    Requires n >= 2 and 1 < c < 3/2.  c = 1 makes delta = 1 exactly, which
    the window construction cannot use; it is admitted only under
    ``allow_degenerate`` so closed-form degenerate checks can build params.
    """
    if not isinstance(n, int) or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n}")
    if n > _INT_LIMIT:
        raise DomainError(f"n exceeds the 128-bit scope, got {n}")
    c = Exponent.coerce(c)
    variant = Variant(variant)
    degenerate = c.value == 1
    if degenerate and not allow_degenerate:
        raise DomainError("c = 1 is degenerate (delta = 1); pass allow_degenerate")
    if not degenerate and not (1 < c.value < Fraction(3, 2)):
        raise DomainError(f"c must satisfy 1 < c < 3/2, got {c.value}")

    gamma = 1 / c.value
    X = rational_pow_enclosure(Fraction(n, 2), gamma, precision_bits)

    eta = None
    if variant is Variant.TIGHT:
        eta = _eta_enclosure(n, precision_bits)
        X1, p_hi = _tight_upper_cutoff(n, c, precision_bits)
    else:
        X1 = scale_enclosure(X, Fraction(5, 4), precision_bits)
        p_hi = (_floor_scaled_pow(Fraction(n, 2), gamma, Fraction(5, 4))
                if c.exact_root_available else _floor_enclosure_pow(n, gamma, Fraction(5, 4)))

    p_lo = (_floor_scaled_pow(Fraction(n, 2), gamma)
            if c.exact_root_available else _floor_enclosure_pow(n, gamma, Fraction(1)))

    delta = _delta_enclosure(n, c, precision_bits)
    if not degenerate:
        bits = precision_bits
        while not delta.certainly_below(1):
            if delta.lo >= 1:
                raise DomainError(f"delta >= 1 for n={n}, c={c}")
            if bits >= DEFAULT_PRECISION_CAP:
                raise DomainError(f"delta < 1 undecidable at cap for n={n}, c={c}")
            bits = min(2 * bits, DEFAULT_PRECISION_CAP)
            delta = _delta_enclosure(n, c, bits)

    return ProblemParams(n=n, c=c, variant=variant, precision_bits=precision_bits,
                         X=X, X1=X1, delta=delta, eta=eta, p_lo=p_lo, p_hi=p_hi)


def _floor_enclosure_pow(n: int, gamma: Fraction, scale: Fraction) -> int:
    """floor(scale * (n/2)**gamma) by escalation (non-rational-root path)."""
    bits = DEFAULT_START_PRECISION
    while True:
        enc = scale_enclosure(rational_pow_enclosure(Fraction(n, 2), gamma, bits), scale, bits)
        f_lo, f_hi = enc.floor_pair()
        if f_lo == f_hi:
            return f_lo
        if bits >= DEFAULT_PRECISION_CAP:
            raise IndeterminateFloorError(
                f"floor of search bound undecided for n={n}", bits)
        bits = min(2 * bits, DEFAULT_PRECISION_CAP)


def _tight_upper_cutoff(n: int, c: Exponent, precision_bits: int):
    """X1 = (1 + eta) X and floor(X1) for the tight variant."""
    gamma = 1 / c.value
    bits = precision_bits
    while True:
        X = rational_pow_enclosure(Fraction(n, 2), gamma, bits)
        eta = _eta_enclosure(n, bits)
        down, up = directed_contexts(bits + _GUARD)
        lo = down.mul(X.lo, down.add(1, eta.lo))
        hi = up.mul(X.hi, up.add(1, eta.hi))
        X1 = CertifiedValue(lo, hi, bits)
        f_lo, f_hi = X1.floor_pair()
        if f_lo == f_hi:
            return X1, f_lo
        if bits >= DEFAULT_PRECISION_CAP:
            raise IndeterminateFloorError(
                f"floor((1+eta) X) undecided for n={n}", bits)
        bits = min(2 * bits, DEFAULT_PRECISION_CAP)


# -- window membership ---------------------------------------------------


def _window_bounds(params: ProblemParams, bits: int):
    """Endpoint enclosures ((f_lo, f_hi), (r_lo, r_hi)) at a precision.

    Endpoints are recomputed from (n, c) at the requested precision so the
    windows tighten along with the values they are compared against.
    """
    n, c = params.n, params.c
    down, up = directed_contexts(bits + _GUARD)
    delta = _delta_enclosure(n, c, bits)
    if params.variant is Variant.TIGHT:
        eta = _eta_enclosure(n, bits)
        four_eta = CertifiedValue(down.mul(4, eta.lo), up.mul(4, eta.hi), bits)
        f_lo = four_eta
        f_hi = CertifiedValue(down.sub(1, four_eta.hi), up.sub(1, four_eta.lo), bits)
        ed_lo = down.mul(eta.lo, delta.lo)
        ed_hi = up.mul(eta.hi, delta.hi)
        r_lo = CertifiedValue(down.sub(down.sub(1, delta.hi), ed_hi),
                              up.sub(up.sub(1, delta.lo), ed_lo), bits)
        r_hi = CertifiedValue(down.add(down.sub(1, delta.hi), ed_lo),
                              up.add(up.sub(1, delta.lo), ed_hi), bits)
    else:
        # 0 and 1/2 are exact in binary; width-zero endpoint enclosures.
        f_lo = CertifiedValue(mpfr(0), mpfr(0), bits)
        f_hi = CertifiedValue(mpfr("0.5"), mpfr("0.5"), bits)
        s56 = scale_enclosure(delta, Fraction(5, 6), bits)
        s23 = scale_enclosure(delta, Fraction(2, 3), bits)
        r_lo = CertifiedValue(down.sub(1, s56.hi), up.sub(1, s56.lo), bits)
        r_hi = CertifiedValue(down.sub(1, s23.hi), up.sub(1, s23.lo), bits)
    return (f_lo, f_hi), (r_lo, r_hi)


def _classify(value: CertifiedValue, lo_end: CertifiedValue,
              hi_end: CertifiedValue) -> Classification:
    """Three-way test of value against the open window (lo_end, hi_end)."""
    if value.lo > lo_end.hi and value.hi < hi_end.lo:
        return Classification.IN
    if value.hi <= lo_end.lo or value.lo >= hi_end.hi:
        return Classification.OUT
    return Classification.UNCERTAIN


def check_window(p: int, params: ProblemParams, *,
                 start_bits: int = DEFAULT_START_PRECISION,
                 cap_bits: int = DEFAULT_PRECISION_CAP) -> WindowOutcome:
    """Classify a prime against both windows with escalating precision.

    The {p**c} test runs first (it is cheaper and rejects most primes);
    the residual test only runs once the first coordinate is certainly
    inside.  A membership still straddling a window edge at the precision
    cap comes back Uncertain with the cap recorded.
    """
    if not (params.p_lo < p <= params.p_hi):
        raise DomainError(f"p={p} outside search range ({params.p_lo}, {params.p_hi}]")
    if not primes.is_prime(p):
        raise DomainError(f"p={p} is not prime")
    bits = start_bits
    while True:
        (f_lo, f_hi), (r_lo, r_hi) = _window_bounds(params, bits)
        first = _classify(frac_power(p, params.c, start_bits=bits, cap_bits=cap_bits),
                          f_lo, f_hi)
        if first is Classification.OUT:
            return WindowOutcome(Classification.OUT, bits)
        if first is Classification.IN:
            second = _classify(
                residual_frac(params.n, p, params.c, start_bits=bits, cap_bits=cap_bits),
                r_lo, r_hi)
            if second is not Classification.UNCERTAIN:
                return WindowOutcome(second, bits)
        if bits >= cap_bits:
            logger.info("window membership uncertain at cap: p=%d n=%d c=%s",
                        p, params.n, params.c)
            return WindowOutcome(Classification.UNCERTAIN, bits)
        bits = min(2 * bits, cap_bits)


@dataclass
class WindowTally:
    in_count: int = 0
    out_count: int = 0
    uncertain_count: int = 0
    in_primes: list = field(default_factory=list)
    uncertain_primes: list = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.in_count + self.out_count + self.uncertain_count


def count_window_primes(params: ProblemParams, *, collect: bool = False,
                        cap_bits: int = DEFAULT_PRECISION_CAP) -> WindowTally:
    """Tally In/Out/Uncertain over every prime in (X, X1].

    Uncertain primes are never silently dropped; they are tallied (and
    listed when ``collect`` is set) so callers can surface them.
    """
    tally = WindowTally()
    for p in params.search_primes():
        outcome = check_window(int(p), params, cap_bits=cap_bits)
        if outcome.is_in:
            tally.in_count += 1
            if collect:
                tally.in_primes.append(int(p))
        elif outcome.is_out:
            tally.out_count += 1
        else:
            tally.uncertain_count += 1
            tally.uncertain_primes.append(int(p))
    return tally


# -- constructing and verifying representations ---------------------------


@dataclass(frozen=True)
class Representation:
    n: int
    m: int
    p: int
    floor_m: int
    floor_p: int
    source: str  # "window" or "brute"

    def as_tuple(self) -> tuple[int, int]:
        return self.m, self.p


def verify_representation(n: int, m: int, p: int, c) -> bool:
    """Exact check that floor(m**c) + floor(p**c) == n.

    Floors come from the certified path (exact-root fallback included);
    an undecidable floor raises rather than returning a guess.
    """
    if not isinstance(n, int) or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n}")
    if not isinstance(m, int) or m < 1:
        raise DomainError(f"m must be an integer >= 1, got {m}")
    if not isinstance(p, int) or p < 2 or not primes.is_prime(p):
        raise DomainError(f"p must be prime, got {p}")
    c = Exponent.coerce(c)
    return floor_power_int(m, c) + floor_power_int(p, c) == n


def _candidate_for(n: int, p: int, c: Exponent) -> tuple[int, int] | None:
    """The unique m that could pair with p, or None.

    m must satisfy floor(m**c) = n - floor(p**c) =: R.  Powers m**c for
    c > 1 are spaced more than 1 apart, so the only candidate is the least
    m with m**c >= R; it works iff its floor equals R.
    """
    fp = floor_power_int(p, c)
    R = n - fp
    if R < 1:
        return None
    m = least_power_reaching(R, c)
    if floor_power_int(m, c) == R:
        return m, fp
    return None


def find_representation(n, c, *, variant: str | Variant = Variant.PLAIN,
                        allow_degenerate: bool = False) -> Representation | None:
    """Window-guided search for n = floor(m**c) + floor(p**c).

    Scans primes in (X, X1] in increasing order and returns the first
    prime the window criterion accepts, with its verified partner m.
    Returns None when no prime in the range is accepted (possible for
    small n; the bruteforce search has no such restriction).
    """
    c = Exponent.coerce(c)
    params = derive_params(n, c, variant=variant, allow_degenerate=allow_degenerate)
    for p in params.search_primes():
        p = int(p)
        outcome = check_window(p, params)
        if not outcome.is_in:
            continue
        candidate = _candidate_for(n, p, params.c)
        if candidate is None:
            logger.warning("accepted prime p=%d for n=%d yields no integer m", p, n)
            continue
        m, fp = candidate
        return Representation(n=n, m=m, p=p, floor_m=n - fp, floor_p=fp,
                              source="window")
    return None


def iter_representations(n, c):
    """Yield every (m, p) with floor(m**c) + floor(p**c) = n, p ascending.

    Exhaustive test oracle: tries each prime p with p**c < n.  For c > 1
    each p admits at most one m, so this enumerates all representations.
    """
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    c = Exponent.coerce(c)
    if n < 3:
        return    # floor(m**c) + floor(p**c) >= 1 + 2
    p_limit = count_powers_below(n, c)
    for p in primes.primes_in(1, p_limit):
        candidate = _candidate_for(n, int(p), c)
        if candidate is not None:
            yield candidate[0], int(p)


def find_representation_bruteforce(n, c) -> Representation | None:
    """First representation by direct search over all primes with p**c < n."""
    c = Exponent.coerce(c)
    for m, p in iter_representations(n, c):
        fp = floor_power_int(p, c)
        return Representation(n=n, m=m, p=p, floor_m=n - fp, floor_p=fp,
                              source="brute")
    return None


@dataclass
class ExistenceReport:
    """Outcome of the accepted-prime integer-existence audit for one n."""

    n: int
    tally: WindowTally
    violations: list  # accepted primes whose candidate m fails


def window_integer_existence(n, c, *, variant: str | Variant = Variant.PLAIN) -> ExistenceReport:
    """Audit: every In prime must yield an integer m with floor(m**c) = R.

    The criterion promises that acceptance implies an integer lands in
    [(n - floor(p**c))**gamma, (n + 1 - floor(p**c))**gamma); this audits
    that promise prime by prime.
    """
    c = Exponent.coerce(c)
    params = derive_params(n, c, variant=variant)
    tally = count_window_primes(params, collect=True)
    violations = [p for p in tally.in_primes if _candidate_for(n, p, c) is None]
    return ExistenceReport(n=n, tally=tally, violations=violations)
