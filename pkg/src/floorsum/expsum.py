"""Exponential sums over primes and integers, and the bound machinery
around them: derivative-test estimates, bilinear (type II) forms, shifted
averaging, near-integer counting, and the Vaughan decomposition of a
von Mangoldt phase sum into type I and type II pieces.

Phases are always f(t) = h t**c + j (n - t**c)**(1/c) with integer
frequencies (h, j); fractional parts come from the certified tables, so
each summand's phase carries an explicit worst-case error that the
result objects accumulate and report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from gmpy2 import mpq

from . import primes
from .certified import frac_power
from .errors import BudgetExceededError, DomainError
from .exponent import Exponent
from .phases import DEFAULT_TERM_BUDGET, PhaseTable, phase_table
from .represent import ProblemParams, derive_params

__all__ = [
    "ExpSumQuery",
    "ExpSumResult",
    "BoundReport",
    "exp_sum",
    "derivative_test_bound",
    "PhaseDerivatives",
    "phase_value",
    "phase_slope",
    "phase_derivatives",
    "CoeffFamily",
    "BilinearQuery",
    "BilinearResult",
    "bilinear_sum",
    "product_range",
    "weyl_shift_bound",
    "near_integer_count",
    "near_integer_bound",
    "VaughanComponent",
    "VaughanResult",
    "vaughan_decompose",
    "bound_sweep",
]

_BILINEAR_BUDGET = 100_000_000


# -- plain exponential sums ---------------------------------------------


@dataclass(frozen=True)
class ExpSumQuery:
    """One exponential sum: sum over t in (lo, hi] of w(t) e(f(t)).

    domain "primes" sums over primes (weight 1), "integers" over all
    integers (weight 1), "lambda" over integers with von Mangoldt weight.
    The zero frequency pair is rejected for the prime domain: that sum is
    plain prime counting, and asking for it through the oscillatory path
    is almost always a caller bug.  For the other domains (0, 0) is kept,
    since e.g. the recombination identity at (0, 0) is a useful check.
    """

    h: int
    j: int
    c: Exponent
    lo: int
    hi: int
    n: int | None = None
    domain: str = "primes"

    def __post_init__(self):
        if self.domain not in ("primes", "integers", "lambda"):
            raise DomainError(f"unknown summand domain {self.domain!r}")
        if not (0 <= self.lo < self.hi):
            raise DomainError(f"need 0 <= lo < hi, got ({self.lo}, {self.hi}]")
        if self.j != 0 and self.n is None:
            raise DomainError("j != 0 needs n for the residual phase")
        if (self.h, self.j) == (0, 0) and self.domain == "primes":
            raise DomainError("(h, j) = (0, 0) over primes is a prime count, "
                              "not an exponential sum")

    @classmethod
    def from_params(cls, params: ProblemParams, h: int, j: int,
                    domain: str = "primes") -> "ExpSumQuery":
        return cls(h=h, j=j, c=params.c, lo=params.p_lo, hi=params.p_hi,
                   n=params.n, domain=domain)


@dataclass(frozen=True)
class ExpSumResult:
    value: complex
    term_count: int
    phase_error: float   # bound on |computed - true| from table enclosures

    @property
    def magnitude(self) -> float:
        return abs(self.value)


def _phase_error_bound(table: PhaseTable, h: int, j: int,
                       weight_mass: float) -> float:
    # |e(x) - e(y)| <= 2 pi |x - y|; each phase is off by at most
    # (|h| + |j|) * max_frac_error.
    return 2.0 * math.pi * (abs(h) + abs(j)) * table.max_frac_error * weight_mass


def exp_sum(query: ExpSumQuery,
            max_terms: int = DEFAULT_TERM_BUDGET) -> ExpSumResult:
    """Evaluate the query's sum with an accumulated phase-error bound."""
    need_n = query.n if query.j != 0 else None
    table = phase_table(query.lo, query.hi, query.c, n=need_n,
                        domain=query.domain, max_terms=max_terms)
    value = table.phase_sum(query.h, query.j)
    mass = (float(table.weights.sum()) if table.weights is not None
            else table.term_count)
    return ExpSumResult(value=value, term_count=table.term_count,
                        phase_error=_phase_error_bound(table, query.h, query.j, mass))


@dataclass(frozen=True)
class BoundReport:
    """A measured quantity next to the bound expression it should obey."""

    measured: float
    bound_value: float
    term_count: int
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.bound_value < 0:
            raise DomainError(f"bound must be nonnegative, got {self.bound_value}")

    @property
    def ratio(self) -> float:
        """measured / bound; the implied constant this instance exhibits."""
        if self.bound_value == 0:
            return math.inf if self.measured else 0.0
        return self.measured / self.bound_value


def derivative_test_bound(big_f: float, length: float, delta: float) -> float:
    """Second/third-derivative-test bound for a length-N phase sum whose
    phase g satisfies |g''| ~ F/N**2 up to factors of delta:

        delta**(-1/2) * (F**(1/6) N**(1/2) + F**(-1/3) N).

    Requires 2 <= F <= N**(3/2) and 0 < delta <= 1; outside that range
    the estimate is not valid and the call errors out.
    """
    if not (big_f >= 2.0):
        raise DomainError(f"need F >= 2, got {big_f}")
    if not (big_f <= length ** 1.5):
        raise DomainError(f"need F <= N**(3/2), got F={big_f}, N={length}")
    if not (0.0 < delta <= 1.0):
        raise DomainError(f"need 0 < delta <= 1, got {delta}")
    return (big_f ** (1.0 / 6.0) * length ** 0.5
            + big_f ** (-1.0 / 3.0) * length) / math.sqrt(delta)


# -- phase derivatives (rescaled variables) ------------------------------


@dataclass(frozen=True)
class PhaseDerivatives:
    """Second and third derivatives of the rescaled phases.

    alpha(t) = x t**c + (1 - t**c)**(1/c)  and  beta(t) = t alpha'(t),
    for 0 < t < 1.  These drive the stationary-phase and derivative-test
    steps; closed forms below are checked against finite differences in
    the test suite.
    """

    alpha2: float
    alpha3: float
    beta2: float
    beta3: float


def phase_value(t, x: float, c) -> float | np.ndarray:
    c = float(Exponent.coerce(c).value)
    t = np.asarray(t, dtype=float)
    _check_unit_range(t)
    g = 1.0 / c
    val = x * t ** c + (1.0 - t ** c) ** g
    return float(val) if val.ndim == 0 else val


def phase_slope(t, x: float, c) -> float | np.ndarray:
    """alpha'(t) = t**(c-1) (c x - (1 - t**c)**(1/c - 1))."""
    c = float(Exponent.coerce(c).value)
    t = np.asarray(t, dtype=float)
    _check_unit_range(t)
    g = 1.0 / c
    val = t ** (c - 1.0) * (c * x - (1.0 - t ** c) ** (g - 1.0))
    return float(val) if val.ndim == 0 else val


def _check_unit_range(t: np.ndarray) -> None:
    if np.any(t <= 0.0) or np.any(t >= 1.0):
        raise DomainError("rescaled variable must satisfy 0 < t < 1")


def phase_derivatives(t: float, x: float, c) -> PhaseDerivatives:
    c = float(Exponent.coerce(c).value)
    ta = np.asarray(t, dtype=float)
    _check_unit_range(ta)
    t = float(ta)
    g = 1.0 / c
    tc = t ** c
    w = 1.0 - tc
    alpha2 = (c - 1.0) * t ** (c - 2.0) * (c * x - w ** (g - 2.0))
    alpha3 = (-(c - 1.0) * (2.0 * c - 1.0) * t ** (2.0 * c - 3.0) * w ** (g - 3.0)
              + (c - 2.0) / t * alpha2)
    beta2 = (c - 1.0) * t ** (c - 2.0) * (c * c * x
                                          - w ** (g - 3.0) * (c + (c - 1.0) * tc))
    beta3 = (-(c - 1.0) * (2.0 * c - 1.0) * t ** (2.0 * c - 3.0) * w ** (g - 4.0)
             * ((c - 1.0) * tc + 2.0 * c)
             + (c - 2.0) / t * beta2)
    return PhaseDerivatives(alpha2=alpha2, alpha3=alpha3, beta2=beta2, beta3=beta3)


def _raw_phase_third(t: np.ndarray, n: int, c: float, h: int, j: int) -> np.ndarray:
    """f'''(t) for f(t) = h t**c + j (n - t**c)**(1/c), unrescaled.

    Used for shifted-phase curvature diagnostics; validated against
    finite differences in the tests.
    """
    g = 1.0 / c
    w = n - t ** c
    lead = h * c * (c - 1.0) * (c - 2.0) * t ** (c - 3.0)
    a_prime = ((c - 2.0) * t ** (c - 3.0) * w ** (g - 1.0)
               + 3.0 * (c - 1.0) * t ** (2.0 * c - 3.0) * w ** (g - 2.0)
               + (2.0 * c - 1.0) * t ** (3.0 * c - 3.0) * w ** (g - 3.0))
    return lead - j * (c - 1.0) * a_prime


# -- bilinear forms ------------------------------------------------------


@dataclass(frozen=True)
class CoeffFamily:
    """Bounded coefficient sequences indexed by positive integers.

    kind "constant": a_m = 1.  kind "zero": a_m = 0.  kind "moebius":
    a_m = mu(m).  kind "random": a_m = e(u_m) with u_m drawn from a
    seeded generator; the value at index m depends only on the seed, not
    on the range requested, so results are reproducible.
    """

    kind: str
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("constant", "zero", "moebius", "random"):
            raise DomainError(f"unknown coefficient family {self.kind!r}")

    def values(self, lo: int, hi: int) -> np.ndarray:
        """Coefficients for indices in (lo, hi], as a complex array."""
        count = hi - lo
        if self.kind == "constant":
            return np.ones(count, dtype=complex)
        if self.kind == "zero":
            return np.zeros(count, dtype=complex)
        if self.kind == "moebius":
            return primes.moebius_upto(hi)[lo + 1:hi + 1].astype(complex)
        draws = np.random.default_rng(self.seed).random(hi + 1)
        return np.exp(2j * np.pi * draws[lo + 1:hi + 1])


@dataclass(frozen=True)
class BilinearQuery:
    """Double sum over dyadic blocks m in (m_lo, m_hi], k in (k_lo, k_hi]
    of a_m b_k e(f(mk)), restricted to products in the problem range.
    """

    m_lo: int
    m_hi: int
    k_lo: int
    k_hi: int
    h: int
    j: int
    n: int
    c: Exponent
    coeff_m: CoeffFamily = CoeffFamily("constant")
    coeff_k: CoeffFamily = CoeffFamily("constant")

    def __post_init__(self):
        for lo, hi, name in ((self.m_lo, self.m_hi, "m"), (self.k_lo, self.k_hi, "k")):
            if lo < 0 or hi < lo:
                raise DomainError(f"bad {name}-range ({lo}, {hi}]")
            if hi > lo and hi > 2 * max(lo, 1):
                raise DomainError(f"{name}-range ({lo}, {hi}] is not dyadic "
                                  "(upper end exceeds twice the lower)")


@dataclass(frozen=True)
class BilinearResult:
    value: complex
    term_count: int
    phase_error: float

    @property
    def magnitude(self) -> float:
        return abs(self.value)


def product_range(n: int, c) -> tuple[int, int]:
    """Integer bounds (x_lo, x_hi] of the product constraint X < mk <= X1."""
    params = derive_params(n, Exponent.coerce(c), allow_degenerate=True)
    return params.p_lo, params.p_hi


def _constrained_counts(q: BilinearQuery, x_lo: int, x_hi: int) -> np.ndarray:
    """Number of admissible k for each m in (m_lo, m_hi]."""
    if q.m_hi == q.m_lo:
        return np.zeros(0, dtype=np.int64)
    ms = np.arange(q.m_lo + 1, q.m_hi + 1, dtype=np.int64)
    k_floor = np.maximum(q.k_lo, x_lo // ms)
    k_ceil = np.minimum(q.k_hi, x_hi // ms)
    return np.maximum(k_ceil - k_floor, 0)


def bilinear_sum(query: BilinearQuery,
                 max_terms: int = _BILINEAR_BUDGET) -> BilinearResult:
    """Evaluate the constrained bilinear form term by term."""
    x_lo, x_hi = product_range(query.n, query.c)
    counts = _constrained_counts(query, x_lo, x_hi)
    total_terms = int(counts.sum())
    if total_terms > max_terms:
        raise BudgetExceededError(
            f"bilinear form has {total_terms} terms, budget is {max_terms}")
    if total_terms == 0:
        return BilinearResult(0j, 0, 0.0)

    table = phase_table(x_lo, x_hi, query.c, n=query.n, domain="integers",
                        max_terms=max_terms)
    a = query.coeff_m.values(query.m_lo, query.m_hi)
    value = 0j
    coeff_mass = 0.0
    for i, m in enumerate(range(query.m_lo + 1, query.m_hi + 1)):
        if counts[i] == 0 or a[i] == 0:
            continue
        k_floor = max(query.k_lo, x_lo // m)
        k_ceil = min(query.k_hi, x_hi // m)
        ks = np.arange(k_floor + 1, k_ceil + 1, dtype=np.int64)
        b = query.coeff_k.values(k_floor, k_ceil)
        fa, fb = table.lookup(m * ks)
        theta = query.h * fa + query.j * fb
        value += a[i] * np.sum(b * np.exp((2j * np.pi) * np.mod(theta, 1.0)))
        coeff_mass += abs(a[i]) * float(np.abs(b).sum())
    err = _phase_error_bound(table, query.h, query.j, coeff_mass)
    return BilinearResult(value=complex(value), term_count=total_terms,
                          phase_error=err)


def weyl_shift_bound(query: BilinearQuery, shift_cap: int,
                     eps: float = 0.005,
                     max_terms: int = _BILINEAR_BUDGET) -> BoundReport:
    """Shifted-averaging comparison for a bilinear form.

    Measures |S|**2 for the query and evaluates the right-hand side of
    the shift inequality

        |S|**2  <<  X**2/Q + (X/Q) sum_{0 < |q| <= Q} sum_{K < k <= 2K}
                    | sum_{m in I(k, q)} e( f(m(k+q)) - f(mk) ) |,

    where I(k, q) keeps m in its block with both products mk and m(k+q)
    inside the problem range.  The unshifted q = 0 layer contributes
    |I(k, 0)| exactly; both the full first-form average (including q = 0)
    and the final form above are reported.

    Preconditions: 1 <= Q and Q <= K X**(-eps) (shifts must stay well
    short of the inner block length).  Also reports the minimum modulus
    of the shifted phase's third derivative over the sampled blocks next
    to the margin delta0 = X**(-eps/10), the quantity whose uniform lower
    bound is the open question this comparison probes.
    """
    params = derive_params(query.n, query.c, allow_degenerate=True)
    x_lo, x_hi = params.p_lo, params.p_hi
    big_x = float(params.X)
    big_k = query.k_lo
    if shift_cap < 1:
        raise DomainError(f"shift cap must be >= 1, got {shift_cap}")
    if shift_cap > big_k * big_x ** (-eps):
        raise DomainError(
            f"shift cap {shift_cap} exceeds K X**(-eps) = "
            f"{big_k * big_x ** (-eps):.3f}; shifted blocks would leave the range")

    base = bilinear_sum(query, max_terms=max_terms)
    measured = base.magnitude ** 2

    table = phase_table(x_lo, x_hi, query.c, n=query.n, domain="integers",
                        max_terms=max_terms)
    cf = float(query.c.value)
    inner_all = 0.0
    inner_shifted = 0.0
    g3_abs_min = math.inf
    for q in range(-shift_cap, shift_cap + 1):
        for k in range(query.k_lo + 1, query.k_hi + 1):
            k2 = k + q
            if k2 <= 0:
                continue
            m_floor = max(query.m_lo, x_lo // k, x_lo // k2)
            m_ceil = min(query.m_hi, x_hi // k, x_hi // k2)
            if m_ceil <= m_floor:
                continue
            ms = np.arange(m_floor + 1, m_ceil + 1, dtype=np.int64)
            if q == 0:
                inner_all += ms.size
                continue
            fa1, fb1 = table.lookup(ms * k)
            fa2, fb2 = table.lookup(ms * k2)
            theta = query.h * (fa2 - fa1) + query.j * (fb2 - fb1)
            inner = abs(np.exp((2j * np.pi) * np.mod(theta, 1.0)).sum())
            inner_all += inner
            inner_shifted += inner
            mid = ms[ms.size // 2].astype(float)
            g3 = (k2 ** 3 * _raw_phase_third(mid * k2, query.n, cf, query.h, query.j)
                  - k ** 3 * _raw_phase_third(mid * k, query.n, cf, query.h, query.j))
            g3_abs_min = min(g3_abs_min, abs(float(g3)))

    first_form = (big_x / shift_cap) * inner_all
    final_form = big_x ** 2 / shift_cap + (big_x / shift_cap) * inner_shifted
    return BoundReport(
        measured=measured, bound_value=final_form, term_count=base.term_count,
        parameters={
            "Q": shift_cap, "K": big_k, "X": big_x, "eps": eps,
            "first_form": first_form,
            "delta0": big_x ** (-eps / 10.0),
            "g3_abs_min": g3_abs_min,
            "phase_error": base.phase_error,
        })


# -- near-integer counting ----------------------------------------------


def near_integer_bound(lo: int, hi: int, c, delta: float) -> float:
    """delta (X1 - X) + delta**(-1/2) X**(c/2) for the range (X, X1]."""
    cf = float(Exponent.coerce(c).value)
    return delta * (hi - lo) + delta ** -0.5 * lo ** (cf / 2.0)


def near_integer_count(lo: int, hi: int, c, delta,
                       margin: float = 1e-5) -> BoundReport:
    """Exact count of integers t in (lo, hi] with ||t**c|| < delta.

    A float64 prefilter discards points whose distance to the nearest
    integer exceeds delta by more than the margin (the float power error
    at these sizes is orders of magnitude below it); every surviving
    candidate is settled by certified comparison.  Candidates the
    certified arithmetic cannot settle at the precision cap are tallied
    separately in the report, never silently dropped.
    """
    c = Exponent.coerce(c)
    delta_frac = Fraction(delta) if not isinstance(delta, Fraction) else delta
    if not (0 < delta_frac < Fraction(1, 4)):
        raise DomainError(f"delta must lie in (0, 1/4), got {delta}")
    if not (2 <= lo < hi <= 2 * lo):
        raise DomainError(f"need a dyadic-or-shorter range 2 <= lo < hi <= 2 lo, "
                          f"got ({lo}, {hi}]")
    bound = near_integer_bound(lo, hi, c, float(delta_frac))

    if c.value == 1:
        # every t**1 is an integer, so every distance is 0 < delta
        return BoundReport(measured=float(hi - lo), bound_value=bound,
                           term_count=hi - lo,
                           parameters={"lo": lo, "hi": hi, "c": str(c.value),
                                       "delta": float(delta_frac),
                                       "undecidable": 0, "candidates": hi - lo})

    ts = np.arange(lo + 1, hi + 1, dtype=np.int64)
    fracs = np.mod(np.power(ts.astype(float), float(c.value)), 1.0)
    dist = np.minimum(fracs, 1.0 - fracs)
    candidates = ts[dist < float(delta_frac) + margin]

    d = mpq(delta_frac.numerator, delta_frac.denominator)
    count = 0
    undecidable = 0
    for t in candidates:
        bits = 64
        while True:
            enc = frac_power(int(t), c, start_bits=bits)
            if enc.hi < d or enc.lo > 1 - d:
                count += 1
                break
            if enc.lo >= d and enc.hi <= 1 - d:
                break
            if bits >= 4096:
                undecidable += 1
                break
            bits *= 2
    return BoundReport(measured=float(count), bound_value=bound,
                       term_count=hi - lo,
                       parameters={"lo": lo, "hi": hi, "c": str(c.value),
                                   "delta": float(delta_frac),
                                   "undecidable": undecidable,
                                   "candidates": int(candidates.size)})


# -- Vaughan decomposition ----------------------------------------------


@dataclass(frozen=True)
class VaughanComponent:
    """One dyadic block of one piece of the decomposition.

    kind "Ia": sum_{d in block, d <= v} mu(d) sum_k log(k) e(f(dk))
    kind "Ib": -sum_{q in block, q <= uv} w1(q) sum_k e(f(qk)),
               w1(q) = sum_{de = q, d <= v, e <= u} mu(d) Lambda(e)
    kind "II": sum_{m in block, m > u} Lambda(m) sum_{l > v} w2(l) e(f(ml)),
               w2(l) = sum_{b | l, b > v} mu(b)

    The inner variable always ranges over the values that keep the
    product inside (lo, hi].
    """

    kind: str
    outer_lo: int
    outer_hi: int
    inner_lo: int
    inner_hi: int
    value: complex
    terms: int


@dataclass(frozen=True)
class VaughanResult:
    components: tuple[VaughanComponent, ...]
    recombined: complex
    direct: complex
    u: int
    v: int

    @property
    def residue(self) -> float:
        """|recombined - direct|; zero up to phase rounding."""
        return abs(self.recombined - self.direct)

    def components_of_kind(self, kind: str) -> list[VaughanComponent]:
        return [comp for comp in self.components if comp.kind == kind]


def _dyadic_blocks(lo: int, hi: int):
    """Blocks (a, b] with b <= 2 max(a, 1) covering (lo, hi]."""
    a = lo
    size = 1
    while a < hi:
        b = min(a + size, hi, 2 * max(a, 1))
        yield a, b
        a = b
        size = max(b, 1)


def vaughan_decompose(lo: int, hi: int, h: int, j: int, n: int, c,
                      u: int | None = None, v: int | None = None,
                      max_terms: int = DEFAULT_TERM_BUDGET) -> VaughanResult:
    """Split sum over (lo, hi] of Lambda(t) e(f(t)) into type I/II blocks.

    Uses the identity, valid for t > u with any u, v >= 2,

        Lambda(t) = sum_{dk = t, d <= v} mu(d) log k
                  - sum_{qk = t, q <= uv} w1(q)
                  + sum_{mk = t, m > u} Lambda(m) w2(k),

    whose right side is evaluated block by block against the directly
    weighted sum.  Requires u v <= lo so that every summand exceeds u.
    """
    c = Exponent.coerce(c)
    if not (2 <= lo < hi):
        raise DomainError(f"need 2 <= lo < hi, got ({lo}, {hi}]")
    if u is None or v is None:
        cube = max(2, int(round(lo ** (1.0 / 3.0))))
        u = u if u is not None else cube
        v = v if v is not None else cube
    if u < 2 or v < 2:
        raise DomainError(f"cutoffs must be >= 2, got u={u}, v={v}")
    if u * v > lo:
        raise DomainError(f"identity needs u v <= lo, got {u}*{v} > {lo}")

    table = phase_table(lo, hi, c, n=n if j != 0 else None,
                        domain="integers", max_terms=max_terms)

    def phases(ts: np.ndarray) -> np.ndarray:
        fa, fb = table.lookup(ts)
        theta = h * fa
        if j != 0:
            theta = theta + j * fb
        return np.exp((2j * np.pi) * np.mod(theta, 1.0))

    lam_weights = primes.mangoldt_range(lo, hi)
    direct = complex((lam_weights * phases(table.values)).sum())

    mu_v = primes.moebius_upto(v)
    lam_u = primes.mangoldt_upto(u)
    w1 = np.zeros(u * v + 1)
    for d in range(1, v + 1):
        if mu_v[d]:
            w1[d * np.arange(1, u + 1)] += mu_v[d] * lam_u[1:]
    l_max = hi // (u + 1)
    mu_l = primes.moebius_upto(max(l_max, v))
    w2 = np.zeros(l_max + 1)
    for b in range(v + 1, l_max + 1):
        if mu_l[b]:
            w2[b::b] += mu_l[b]

    components = []

    def inner_products(outer: int, floor_extra: int = 0) -> np.ndarray:
        k_floor = max(lo // outer, floor_extra)
        k_ceil = hi // outer
        return np.arange(k_floor + 1, k_ceil + 1, dtype=np.int64)

    for a, b in _dyadic_blocks(0, v):
        value = 0j
        terms = 0
        k_span = [hi // max(a, 1), 0]
        for d in range(a + 1, b + 1):
            if not mu_v[d]:
                continue
            ks = inner_products(d)
            if ks.size == 0:
                continue
            value += mu_v[d] * np.sum(np.log(ks) * phases(d * ks))
            terms += ks.size
            k_span = [min(k_span[0], int(ks[0])), max(k_span[1], int(ks[-1]))]
        components.append(VaughanComponent(
            kind="Ia", outer_lo=a, outer_hi=b,
            inner_lo=k_span[0] if terms else 0, inner_hi=k_span[1],
            value=complex(value), terms=terms))

    for a, b in _dyadic_blocks(0, u * v):
        value = 0j
        terms = 0
        k_span = [hi // max(a, 1), 0]
        for q in range(a + 1, b + 1):
            if not w1[q]:
                continue
            ks = inner_products(q)
            if ks.size == 0:
                continue
            value -= w1[q] * np.sum(phases(q * ks))
            terms += ks.size
            k_span = [min(k_span[0], int(ks[0])), max(k_span[1], int(ks[-1]))]
        components.append(VaughanComponent(
            kind="Ib", outer_lo=a, outer_hi=b,
            inner_lo=k_span[0] if terms else 0, inner_hi=k_span[1],
            value=complex(value), terms=terms))

    m_max = hi // (v + 1)
    lam_m = primes.mangoldt_upto(max(m_max, u))
    for a, b in _dyadic_blocks(u, m_max):
        value = 0j
        terms = 0
        k_span = [hi // max(a, 1), 0]
        for m in range(a + 1, b + 1):
            if not lam_m[m]:
                continue
            ls = inner_products(m, floor_extra=v)
            if ls.size == 0:
                continue
            wl = w2[ls]
            live = wl != 0
            if not np.any(live):
                continue
            value += lam_m[m] * np.sum(wl[live] * phases(m * ls[live]))
            terms += int(live.sum())
            k_span = [min(k_span[0], int(ls[0])), max(k_span[1], int(ls[-1]))]
        components.append(VaughanComponent(
            kind="II", outer_lo=a, outer_hi=b,
            inner_lo=k_span[0] if terms else 0, inner_hi=k_span[1],
            value=complex(value), terms=terms))

    recombined = complex(sum(comp.value for comp in components))
    return VaughanResult(components=tuple(components), recombined=recombined,
                         direct=direct, u=u, v=v)


# -- parameter sweeps ----------------------------------------------------


def bound_sweep(ns, cs, eps: float = 0.005,
                max_terms: int = DEFAULT_TERM_BUDGET) -> list[BoundReport]:
    """Measured |exp_sum| against the target envelope X**(2-c-3eps) over
    the truncation grid 0 < |h| <= H, |j| <= J for each (n, c) pair."""
    reports = []
    for n in ns:
        for c in cs:
            c = Exponent.coerce(c)
            params = derive_params(n, c, allow_degenerate=True)
            x = float(params.X)
            cf = float(c.value)
            cap_h = max(1, int(x ** eps))
            cap_j = int(x ** (cf - 1.0 + eps))
            target = x ** (2.0 - cf - 3.0 * eps)
            for h in range(-cap_h, cap_h + 1):
                for j in range(-cap_j, cap_j + 1):
                    if (h, j) == (0, 0):
                        continue
                    query = ExpSumQuery.from_params(params, h, j)
                    result = exp_sum(query, max_terms=max_terms)
                    reports.append(BoundReport(
                        measured=result.magnitude, bound_value=target,
                        term_count=result.term_count,
                        parameters={"n": n, "c": str(c.value), "h": h, "j": j,
                                    "X": x, "eps": eps,
                                    "phase_error": result.phase_error}))
    return reports
