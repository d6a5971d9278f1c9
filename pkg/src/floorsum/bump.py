"""Smooth compactly supported windows on the unit circle.

Two base shapes on [0, 1], both built from the kernel exp(-1/x):

- the normalized bump  psi0(u) = C * exp(-1/(u(1-u))),  C = 1/I0, with
  I0 = integral of exp(-1/(u(1-u))) over (0,1), so psi0 has unit mass;
- a smoothed plateau (trapezoid): the product of a rising and a falling
  smoothstep sigma(x) = g(x)/(g(x) + g(1-x)), g(x) = exp(-1/x), which is
  exactly 0 outside (0, 1), exactly 1 on [edge, 1-edge], and infinitely
  differentiable everywhere (all derivatives of g vanish at 0+).

A PeriodicWindow is the 1-periodic extension of base((t - shift)/width).
Choosing shift and width places the window supports used by the search:

  first window, plain:    bump, shift 0, width 1/2           (psi0(2t))
  residual window, plain: bump, shift 1 - (5/6) delta, width delta/6
  first window, tight:    plateau pinched between the indicators of
                          [6 eta, 1 - 6 eta] and [4 eta, 1 - 4 eta]
  residual window, tight: bump, shift 1 - delta - eta delta, width 2 eta delta
  near-zero majorant:     plateau between indicators of [-delta, delta]
                          and [-2 delta, 2 delta] (support wraps through 0)

All evaluation is float64 and vectorized; geometry (shift, width) is the
float64 image of the certified parameters that defined it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .errors import DomainError

__all__ = [
    "NORMALIZATION_INTEGRAL",
    "BumpSpec",
    "NORMALIZED_BUMP",
    "PeriodicWindow",
    "ZeroWindow",
    "ConstantWindow",
    "psi0_eval",
    "smoothstep",
    "first_window",
    "residual_window",
    "near_zero_window",
]

# I0 = integral_0^1 exp(-1/(t(1-t))) dt.  Frozen from adaptive quadrature
# (abserr ~ 8e-17); the test suite recomputes it independently.
NORMALIZATION_INTEGRAL = 0.007029858406609657


def _kernel_ratio(x: np.ndarray) -> np.ndarray:
    """smoothstep sigma(x): 0 for x <= 0, 1 for x >= 1, smooth ramp between."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    out[x >= 1.0] = 1.0
    mid = (x > 0.0) & (x < 1.0)
    if np.any(mid):
        xm = x[mid]
        g1 = np.exp(-1.0 / xm)
        g2 = np.exp(-1.0 / (1.0 - xm))
        out[mid] = g1 / (g1 + g2)
    return out


def smoothstep(x):
    """sigma(x) as a float for scalars, array for arrays."""
    arr = _kernel_ratio(np.asarray(x, dtype=float))
    return float(arr) if np.ndim(x) == 0 else arr


def _raw_bump(u: np.ndarray) -> np.ndarray:
    """exp(-1/(u(1-u))) on (0,1), exactly 0 elsewhere (endpoints included)."""
    u = np.asarray(u, dtype=float)
    out = np.zeros(u.shape)
    inside = (u > 0.0) & (u < 1.0)
    if np.any(inside):
        ui = u[inside]
        out[inside] = np.exp(-1.0 / (ui * (1.0 - ui)))
    return out


@dataclass(frozen=True)
class BumpSpec:
    """A base shape on [0, 1]: normalized bump or smoothed plateau.

    kind "normalized": unit-mass bump, normalization_constant = 1/I0.
    kind "plateau": value exactly 1 on [edge, 1-edge], 0 outside (0, 1);
    sandwiched between the indicators of those two intervals.
    """

    kind: str
    edge: float = 0.0

    def __post_init__(self):
        if self.kind not in ("normalized", "plateau"):
            raise DomainError(f"unknown bump kind {self.kind!r}")
        if self.kind == "plateau" and not (0.0 < self.edge < 0.5):
            raise DomainError(f"plateau edge must be in (0, 1/2), got {self.edge}")

    @property
    def normalization_constant(self) -> float:
        return 1.0 / NORMALIZATION_INTEGRAL if self.kind == "normalized" else 1.0

    def eval(self, u):
        arr = np.asarray(u, dtype=float)
        if self.kind == "normalized":
            vals = _raw_bump(arr) / NORMALIZATION_INTEGRAL
        else:
            vals = _kernel_ratio(arr / self.edge) * _kernel_ratio((1.0 - arr) / self.edge)
        return float(vals) if np.ndim(u) == 0 else vals

    def mass(self) -> float:
        """Integral over [0, 1]; exact closed forms for both kinds.

        The plateau's two ramps are point-symmetric (sigma(x) + sigma(1-x)
        = 1), so each ramp integrates to edge/2 and the total is 1 - edge.
        """
        return 1.0 if self.kind == "normalized" else 1.0 - self.edge

    def squared_mass(self) -> float:
        """Integral of the square over [0, 1] (adaptive quadrature, cached)."""
        return _squared_mass(self)


def doubling_trapezoid(fn, tol: float = 1e-15):
    """(integral over [0,1], error estimate) by step-halving trapezoid.

    Sound for integrands that are smooth on [0, 1] with all derivatives
    vanishing at both endpoints (every shape here, and their squares and
    modulations): Euler-Maclaurin correction terms all vanish, so the
    rule converges faster than any power of the step and the change under
    one halving is a conservative error estimate.
    """
    n = 512
    u = np.linspace(0.0, 1.0, n + 1)
    prev = np.trapezoid(fn(u), dx=1.0 / n)
    while n < (1 << 17):
        n *= 2
        u = np.linspace(0.0, 1.0, n + 1)
        cur = np.trapezoid(fn(u), dx=1.0 / n)
        gap = abs(cur - prev)
        if gap <= tol:
            return cur, gap + tol
        prev = cur
    return prev, gap + tol


@lru_cache(maxsize=64)
def _squared_mass(spec: BumpSpec) -> float:
    val, err = doubling_trapezoid(lambda u: spec.eval(u) ** 2)
    if err > 1e-10:
        raise ArithmeticError(f"squared-mass quadrature error {err} too large")
    return float(val)


NORMALIZED_BUMP = BumpSpec("normalized")


def psi0_eval(t, spec: BumpSpec = NORMALIZED_BUMP):
    """The base shape's value at t (0 outside [0, 1])."""
    return spec.eval(t)


@dataclass(frozen=True)
class PeriodicWindow:
    """1-periodic extension of base((t - shift)/width), width in (0, 1]."""

    base: BumpSpec
    shift: float
    width: float
    label: str = ""

    def __post_init__(self):
        if not (0.0 < self.width <= 1.0):
            raise DomainError(f"window width must be in (0, 1], got {self.width}")

    def eval(self, t):
        arr = np.asarray(t, dtype=float)
        u = np.mod(arr - self.shift, 1.0) / self.width
        vals = self.base.eval(u)
        return float(vals) if np.ndim(t) == 0 else vals

    def support(self) -> tuple[float, float]:
        """Base-period support (shift, shift + width); may extend past 1,
        in which case the window wraps around 0."""
        return (self.shift, self.shift + self.width)

    def mass(self) -> float:
        """Integral over one period: the 0th Fourier coefficient."""
        return self.width * self.base.mass()

    def l2_norm_squared(self) -> float:
        """Integral of the square over one period."""
        return self.width * self.base.squared_mass()


class ZeroWindow:
    """Identically zero window (trivial-case plumbing)."""

    label = "zero"
    width = 1.0
    shift = 0.0

    def eval(self, t):
        arr = np.zeros(np.shape(t))
        return float(arr) if np.ndim(t) == 0 else arr

    def mass(self) -> float:
        return 0.0

    def l2_norm_squared(self) -> float:
        return 0.0


class ConstantWindow:
    """Identically one window (counting measure)."""

    label = "one"
    width = 1.0
    shift = 0.0

    def eval(self, t):
        arr = np.ones(np.shape(t))
        return float(arr) if np.ndim(t) == 0 else arr

    def mass(self) -> float:
        return 1.0

    def l2_norm_squared(self) -> float:
        return 1.0


# -- the concrete windows of the search --------------------------------


def first_window(params=None, *, variant: str = "plain",
                 eta: float | None = None) -> PeriodicWindow:
    """Window for {p**c}.

    Plain: psi0(2t), the unit bump squeezed onto (0, 1/2).
    Tight: a plateau majorized by the indicator of [4 eta, 1 - 4 eta] and
    majorizing the indicator of [6 eta, 1 - 6 eta].
    """
    if variant == "plain":
        return PeriodicWindow(NORMALIZED_BUMP, 0.0, 0.5, "first-plain")
    if variant == "tight":
        if eta is None:
            if params is None or params.eta is None:
                raise DomainError("tight first window needs eta (or tight params)")
            eta = float(params.eta)
        if not (0.0 < eta < 1.0 / 12.0):
            raise DomainError(f"tight window needs 0 < eta < 1/12, got {eta}")
        width = 1.0 - 8.0 * eta
        shape = BumpSpec("plateau", edge=2.0 * eta / width)
        return PeriodicWindow(shape, 4.0 * eta, width, "first-tight")
    raise DomainError(f"unknown variant {variant!r}")


def residual_window(params, *, variant: str | None = None) -> PeriodicWindow:
    """Window for {(n - p**c)**gamma}; geometry from the derived params."""
    variant = variant or params.variant.value
    return residual_window_for_delta(float(params.delta), variant=variant,
                                     eta=None if params.eta is None
                                     else float(params.eta))


def residual_window_for_delta(delta: float, *, variant: str = "plain",
                              eta: float | None = None) -> PeriodicWindow:
    """Residual window built from a bare window width.

    Same geometry as residual_window but parameterized directly, for
    studying the delta-dependence of the coefficients without fixing n.
    """
    if not (0.0 < delta < 1.0):
        raise DomainError(f"window width must lie in (0, 1), got {delta}")
    if variant == "plain":
        return PeriodicWindow(NORMALIZED_BUMP, 1.0 - 5.0 * delta / 6.0,
                              delta / 6.0, "residual-plain")
    if variant == "tight":
        if eta is None:
            raise DomainError("tight residual window needs eta")
        if not (0.0 < 2.0 * eta * delta < 1.0):
            raise DomainError(f"tight width 2*eta*delta must lie in (0, 1), "
                              f"got {2.0 * eta * delta}")
        return PeriodicWindow(NORMALIZED_BUMP, 1.0 - delta - eta * delta,
                              2.0 * eta * delta, "residual-tight")
    raise DomainError(f"unknown variant {variant!r}")


def near_zero_window(delta: float) -> PeriodicWindow:
    """Plateau majorant of the indicator of ||t|| < delta.

    Exactly 1 on [-delta, delta] (mod 1), 0 outside (-2 delta, 2 delta):
    summing it over values t dominates the count of ||t|| < delta.
    """
    if not (0.0 < delta < 0.25):
        raise DomainError(f"near-zero window needs 0 < delta < 1/4, got {delta}")
    shape = BumpSpec("plateau", edge=0.25)
    return PeriodicWindow(shape, -2.0 * delta, 4.0 * delta, "near-zero")
