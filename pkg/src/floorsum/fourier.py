"""Fourier coefficients of the windows and the smoothed prime sums.

Coefficient convention: f_hat(m) = integral over one period of
f(t) e(-mt) dt with e(x) = exp(2 pi i x).  For a window built as
base((t - shift)/width) the substitution u = (t - shift)/width gives

    f_hat(m) = width * e(-m shift) * g_hat(m width),
    g_hat(theta) = integral_0^1 base(u) e(-theta u) du,

so every coefficient reduces to one oscillatory integral of the base
shape, evaluated by adaptive quadrature with an oscillatory weight (the
weighted rule tracks the oscillation no matter how narrow the window is,
which a plain adaptive rule can miss entirely).
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .bump import (BumpSpec, ConstantWindow, PeriodicWindow, ZeroWindow,
                   doubling_trapezoid, first_window, residual_window)
from .errors import DomainError
from .exponent import Exponent
from .phases import phase_table
from .represent import ProblemParams, Variant, derive_params
from . import primes

__all__ = [
    "FourierTable",
    "DecayFit",
    "ReconstructionResult",
    "fourier_coefficient",
    "build_table",
    "build_sparse_table",
    "verify_decay",
    "parseval_partial",
    "smoothed_sum",
    "main_term",
    "truncation_limits",
    "fourier_reconstruction",
    "MAX_DECAY_ORDER",
]

logger = logging.getLogger(__name__)

MAX_DECAY_ORDER = 8  # decay orders r are verified for r in {0..8} only
_QUAD_TOL = 1e-12
_MAX_TABLE_INDEX = 8192


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(message)
        self.achieved = achieved


@lru_cache(maxsize=1 << 16)
def _base_oscillatory(shape: BumpSpec, theta: float) -> tuple[complex, float]:
    """g_hat(theta) = integral_0^1 shape(u) e(-theta u) du, with error.

    Below two cycles the oscillatory weight buys nothing and the QUADPACK
    error estimate is overly pessimistic for endpoint-flat integrands, so
    the doubling trapezoid rule takes over there.
    """
    if abs(theta) < 2.0:
        value, err = doubling_trapezoid(
            lambda u: shape.eval(u) * np.exp(-2j * math.pi * theta * u))
        return complex(value), err
    w = 2.0 * math.pi * theta
    lim = max(100, int(abs(theta)) * 2 + 50)
    re, err_re = quad(shape.eval, 0.0, 1.0, weight="cos", wvar=w,
                      limit=lim, epsabs=1e-14, epsrel=1e-11)
    im, err_im = quad(shape.eval, 0.0, 1.0, weight="sin", wvar=w,
                      limit=lim, epsabs=1e-14, epsrel=1e-11)
    return complex(re, -im), err_re + err_im


def fourier_coefficient(window, m: int, tol: float = _QUAD_TOL) -> tuple[complex, float]:
    """(f_hat(m), error bound) for a periodic window.

    Raises QuadratureError when the quadrature error estimate exceeds the
    tolerance, carrying the achieved bound.
    """
    if isinstance(window, ZeroWindow):
        return 0.0 + 0.0j, 0.0
    if isinstance(window, ConstantWindow):
        return (1.0 + 0.0j, 0.0) if m == 0 else (0.0 + 0.0j, 0.0)
    if not isinstance(window, PeriodicWindow):
        raise DomainError(f"cannot integrate window of type {type(window).__name__}")
    g, g_err = _base_oscillatory(window.base, m * window.width)
    value = window.width * cmath.exp(-2j * math.pi * m * window.shift) * g
    error = window.width * g_err
    if error > tol:
        raise QuadratureError(
            f"coefficient quadrature reached only {error:.3e} (> {tol:.1e}) "
            f"for window {window.label!r}, m={m}", error)
    return value, error


@dataclass(frozen=True)
class FourierTable:
    """Coefficients f_hat(m) for m >= 0; negatives served by conjugation."""

    window: object
    indices: tuple[int, ...]          # stored nonnegative indices, ascending
    coefficients: dict[int, complex]
    errors: dict[int, float]

    def has(self, m: int) -> bool:
        return abs(m) in self.coefficients

    def coefficient(self, m: int) -> complex:
        # real window: f_hat(-m) is the conjugate of f_hat(m)
        if abs(m) not in self.coefficients:
            raise DomainError(f"table has no coefficient for |m| = {abs(m)}")
        value = self.coefficients[abs(m)]
        return value.conjugate() if m < 0 else value

    def error(self, m: int) -> float:
        if abs(m) not in self.errors:
            raise DomainError(f"table has no coefficient for |m| = {abs(m)}")
        return self.errors[abs(m)]

    @property
    def max_index(self) -> int:
        return self.indices[-1] if self.indices else -1

    def abs_sum_over(self, lo: int, hi: int) -> float:
        """Sum of |f_hat(m)| over stored indices lo <= m <= hi."""
        return float(sum(abs(self.coefficients[m]) for m in self.indices
                         if lo <= m <= hi))


def build_table(window, max_index: int, tol: float = _QUAD_TOL) -> FourierTable:
    """Contiguous coefficient table for 0 <= m <= max_index."""
    if max_index < 0 or max_index > _MAX_TABLE_INDEX:
        raise DomainError(f"table size {max_index} outside [0, {_MAX_TABLE_INDEX}]")
    return build_sparse_table(window, range(max_index + 1), tol)


def build_sparse_table(window, indices, tol: float = _QUAD_TOL) -> FourierTable:
    """Coefficient table over an arbitrary set of nonnegative indices.

    Sparse index grids keep decay fits affordable for very narrow windows,
    whose interesting frequency range m ~ 1/width is far beyond any
    affordable contiguous table.
    """
    idx = sorted({int(m) for m in indices})
    if idx and idx[0] < 0:
        raise DomainError("table indices must be nonnegative")
    coefficients, errors = {}, {}
    for m in idx:
        value, err = fourier_coefficient(window, m, tol)
        coefficients[m] = value
        errors[m] = err
    return FourierTable(window=window, indices=tuple(idx),
                        coefficients=coefficients, errors=errors)


@dataclass(frozen=True)
class DecayFit:
    """Smallest C with |f_hat(m)| <= C * scale * (1 + scale*|m|)**(-r)."""

    constant: float
    r: int
    scale: float
    argmax_index: int


def verify_decay(table: FourierTable, r: int, scale: float) -> DecayFit:
    """Fit the decay constant of order r at the given scale over the table."""
    if not isinstance(r, int) or not (0 <= r <= MAX_DECAY_ORDER):
        raise DomainError(f"decay order must be an integer in [0, {MAX_DECAY_ORDER}]")
    if scale <= 0:
        raise DomainError(f"scale must be positive, got {scale}")
    if not table.indices:
        raise DomainError("empty coefficient table")
    best, arg = -1.0, 0
    for m in table.indices:
        envelope = scale * (1.0 + scale * m) ** (-r)
        ratio = abs(table.coefficients[m]) / envelope
        if ratio > best:
            best, arg = ratio, m
    return DecayFit(constant=best, r=r, scale=scale, argmax_index=arg)


def parseval_partial(table: FourierTable, max_index: int) -> float:
    """Sum of |f_hat(m)|**2 over |m| <= max_index (conjugate symmetry)."""
    if table.max_index < max_index:
        raise DomainError(f"table covers only |m| <= {table.max_index}")
    total = abs(table.coefficients[0]) ** 2
    for m in table.indices:
        if 1 <= m <= max_index:
            total += 2.0 * abs(table.coefficients[m]) ** 2
    return total


# -- smoothed prime sums ------------------------------------------------


def _params_for(n, c, variant, allow_degenerate) -> ProblemParams:
    if isinstance(n, ProblemParams):
        return n
    return derive_params(n, Exponent.coerce(c), variant=variant,
                         allow_degenerate=allow_degenerate)


def smoothed_sum(n, c, phi=None, psi=None, *, variant: str | Variant = Variant.PLAIN,
                 allow_degenerate: bool = False) -> float:
    """Direct evaluation of sum over primes of phi({p**c}) psi({(n-p**c)**gamma}).

    Fractional parts come from the certified tables (float64 images of
    enclosures); window evaluation is vectorized float64.
    """
    params = _params_for(n, c, variant, allow_degenerate)
    phi = phi if phi is not None else first_window(params, variant=params.variant.value)
    psi = psi if psi is not None else residual_window(params)
    table = phase_table(params.p_lo, params.p_hi, params.c, n=params.n)
    if table.term_count == 0:
        return 0.0
    values = phi.eval(table.frac_pow) * psi.eval(table.frac_residual)
    return float(values.sum())


def main_term(params: ProblemParams, phi=None, psi=None) -> float:
    """phi_hat(0) psi_hat(0) (pi(X1) - pi(X)): the (H, J) = (0, 0) term."""
    phi = phi if phi is not None else first_window(params, variant=params.variant.value)
    psi = psi if psi is not None else residual_window(params)
    count = primes.prime_count_between(params.p_lo, params.p_hi)
    return phi.mass() * psi.mass() * count


def truncation_limits(params: ProblemParams, eps: float) -> tuple[int, int]:
    """(H, J) = (floor(X**eps), floor(X**(c - 1 + eps)))."""
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    x = float(params.X)
    return int(x ** eps), int(x ** (float(params.c) - 1.0 + eps))


@dataclass(frozen=True)
class ReconstructionResult:
    value: float
    tail_bound: float
    imag_residue: float   # |imaginary part| of the folded double sum
    H: int
    J: int
    r: int
    prime_count: int
    main_term: float


def _one_sided_tail(table: FourierTable, cutoff: int, fit: DecayFit) -> float:
    """Upper bound for sum of |f_hat(m)| over |m| > cutoff.

    Table entries cover cutoff < |m| <= max_index exactly; beyond the
    table, the fitted envelope C*scale*(1+scale*t)**(-r) integrates to
    C*(1+scale*M)**(1-r)/(r-1).
    """
    if fit.r < 2:
        raise DomainError("tail integration needs decay order r >= 2")
    in_table = 2.0 * table.abs_sum_over(cutoff + 1, table.max_index)
    m_edge = table.max_index
    beyond = 2.0 * fit.constant * (1.0 + fit.scale * m_edge) ** (1 - fit.r) / (fit.r - 1)
    return in_table + beyond


def fourier_reconstruction(n, c, table_phi: FourierTable, table_psi: FourierTable,
                           H: int, J: int, *, eps: float = 0.005,
                           variant: str | Variant = Variant.PLAIN,
                           allow_degenerate: bool = False) -> ReconstructionResult:
    """Truncated double Fourier expansion of the smoothed prime sum.

    Evaluates sum over |h| <= H, |j| <= J of
    phi_hat(h) psi_hat(j) sum_p e(h p**c + j (n - p**c)**gamma) and a
    rigorous tail bound for the neglected coefficient mass times the
    trivial bound (prime count) on each phase sum.  The decay order is
    r = ceil(1/eps) + 2 capped at the verified maximum order.
    """
    params = _params_for(n, c, variant, allow_degenerate)
    if table_phi.max_index <= H or table_psi.max_index <= J:
        raise DomainError("coefficient tables must extend beyond (H, J) "
                          "to certify the tail")
    r = min(math.ceil(1.0 / eps) + 2, MAX_DECAY_ORDER)
    scale_phi = 1.0
    delta = float(params.delta)
    scale_psi = delta * float(params.eta) if params.variant is Variant.TIGHT else delta

    ptable = phase_table(params.p_lo, params.p_hi, params.c, n=params.n)
    count = ptable.term_count
    total = 0.0 + 0.0j
    for h in range(-H, H + 1):
        coef_h = table_phi.coefficient(h)
        if coef_h == 0:
            continue
        for j in range(-J, J + 1):
            coef = coef_h * table_psi.coefficient(j)
            if coef == 0:
                continue
            total += coef * ptable.phase_sum(h, j)

    fit_phi = verify_decay(table_phi, r, scale_phi)
    fit_psi = verify_decay(table_psi, r, scale_psi)
    phi_tail = _one_sided_tail(table_phi, H, fit_phi)
    psi_tail = _one_sided_tail(table_psi, J, fit_psi)
    phi_all = abs(table_phi.coefficient(0)) + _one_sided_tail(table_phi, 0, fit_phi)
    psi_all = abs(table_psi.coefficient(0)) + _one_sided_tail(table_psi, 0, fit_psi)
    tail = count * (phi_tail * psi_all + phi_all * psi_tail)

    return ReconstructionResult(value=total.real, tail_bound=tail,
                                imag_residue=abs(total.imag), H=H, J=J, r=r,
                                prime_count=count,
                                main_term=main_term(params))
