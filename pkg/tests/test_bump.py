import math

import mpmath
import numpy as np
import pytest

from floorsum import bump
from floorsum.errors import DomainError


class TestRawBump:
    def test_zero_outside_open_interval(self):
        t = np.array([-1.0, 0.0, 1.0, 2.0])
        assert not bump.psi0_eval(t).any()

    def test_symmetric_and_positive_inside(self):
        t = np.linspace(0.01, 0.99, 99)
        vals = bump.psi0_eval(t)
        assert (vals > 0).all()
        assert np.allclose(vals, bump.psi0_eval(1.0 - t), rtol=1e-14)

    def test_peak_at_center(self):
        center = bump.psi0_eval(np.array([0.5]))[0]
        off = bump.psi0_eval(np.array([0.3, 0.7]))
        assert (off < center).all()

    def test_normalization_against_mpmath(self):
        # I0 = integral of exp(-1/(t(1-t))) dt on (0,1), frozen constant.
        with mpmath.workdps(40):
            i0 = mpmath.quad(lambda t: mpmath.exp(-1 / (t * (1 - t))), [0, 1])
        assert bump.NORMALIZATION_INTEGRAL == pytest.approx(float(i0),
                                                            rel=1e-13)

    def test_unit_mass(self):
        # Riemann check that psi0 integrates to 1 after normalization.
        t = np.linspace(0.0, 1.0, 200001)
        mass = np.trapezoid(bump.psi0_eval(t), t)
        assert mass == pytest.approx(1.0, abs=1e-10)


class TestBumpSpec:
    def test_normalized_mass_exact(self):
        assert bump.NORMALIZED_BUMP.mass() == 1.0

    def test_plateau_mass_exact(self):
        spec = bump.BumpSpec("plateau", edge=0.125)
        assert spec.mass() == 1.0 - 0.125

    def test_plateau_shape(self):
        spec = bump.BumpSpec("plateau", edge=0.25)
        t = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
        vals = spec.eval(t)
        assert vals[0] == 0.0 and vals[4] == 0.0
        assert vals[2] == 1.0
        # smoothstep complementarity sigma(x) + sigma(1-x) = 1
        x = np.linspace(0.01, 0.99, 51)
        s = bump.smoothstep(x)
        assert np.allclose(s + bump.smoothstep(1.0 - x), 1.0, atol=1e-15)

    def test_plateau_edge_validation(self):
        with pytest.raises(DomainError):
            bump.BumpSpec("plateau", edge=0.6)

    def test_squared_mass_cached_and_positive(self):
        a = bump.NORMALIZED_BUMP.squared_mass()
        assert a > 1.0  # |psi0|_2^2 > (integral psi0)^2 = 1 by Cauchy-Schwarz
        assert bump.NORMALIZED_BUMP.squared_mass() == a


class TestDoublingTrapezoid:
    def test_smooth_periodic_integrand_is_machine_exact(self):
        value, err = bump.doubling_trapezoid(
            lambda t: bump.psi0_eval(t) * np.cos(2 * np.pi * t))
        with mpmath.workdps(30):
            c = 1 / mpmath.quad(lambda t: mpmath.exp(-1 / (t * (1 - t))), [0, 1])
            oracle = mpmath.quad(
                lambda t: c * mpmath.exp(-1 / (t * (1 - t)))
                * mpmath.cos(2 * mpmath.pi * t), [0, 1])
        assert value == pytest.approx(float(oracle), abs=1e-14)
        assert err < 1e-13

    def test_reports_error_estimate(self):
        _, err = bump.doubling_trapezoid(lambda t: bump.psi0_eval(t))
        assert 0 <= err < 1e-12


class TestPeriodicWindow:
    def test_eval_wraps_mod_one(self):
        w = bump.PeriodicWindow(bump.NORMALIZED_BUMP, 0.9, 0.2)
        inside = w.eval(np.array([0.95, 0.0, 0.05, 1.95, -1.05]))
        assert (inside[:3] > 0).all()
        assert inside[3] > 0 and inside[4] > 0  # periodicity

    def test_mass_scales_with_width(self):
        w = bump.PeriodicWindow(bump.NORMALIZED_BUMP, 0.0, 0.5)
        assert w.mass() == 0.5

    def test_support(self):
        w = bump.PeriodicWindow(bump.NORMALIZED_BUMP, 0.25, 0.5)
        lo, hi = w.support()
        assert (lo, hi) == (0.25, 0.75)

    def test_zero_and_constant_windows(self):
        z = bump.ZeroWindow()
        k = bump.ConstantWindow()
        t = np.linspace(0, 1, 11)
        assert not z.eval(t).any()
        assert (k.eval(t) == 1.0).all()
        assert z.mass() == 0.0 and k.mass() == 1.0


class TestWindowConstructors:
    def test_first_window_plain(self):
        w = bump.first_window()
        assert w.support() == (0.0, 0.5)
        assert w.mass() == 0.5

    def test_first_window_tight_plateau_bounds(self):
        eta = 0.01
        w = bump.first_window(variant="tight", eta=eta)
        t = np.linspace(0, 1, 100001)
        vals = w.eval(t)
        # majorized by indicator of [4 eta, 1 - 4 eta]
        outside = (t < 4 * eta - 1e-12) | (t > 1 - 4 * eta + 1e-12)
        assert np.all(vals[outside] == 0.0)
        # majorizes indicator of [6 eta, 1 - 6 eta]
        inner = (t >= 6 * eta) & (t <= 1 - 6 * eta)
        assert np.all(vals[inner] >= 1.0 - 1e-12)
        assert np.all(vals <= 1.0 + 1e-15)

    def test_first_window_tight_needs_eta(self):
        with pytest.raises(DomainError):
            bump.first_window(variant="tight")

    def test_residual_window_for_delta_geometry(self):
        delta = 1e-2
        w = bump.residual_window_for_delta(delta)
        lo, hi = w.support()
        assert lo == pytest.approx(1.0 - 5 * delta / 6, abs=1e-15)
        assert hi == pytest.approx(1.0 - 4 * delta / 6, abs=1e-15)
        assert w.mass() == pytest.approx(delta / 6, abs=1e-18)

    def test_residual_window_tight_width(self):
        delta, eta = 1e-3, 0.02
        w = bump.residual_window_for_delta(delta, variant="tight", eta=eta)
        assert w.width == pytest.approx(2 * eta * delta, abs=1e-18)

    def test_near_zero_window_majorizes(self):
        delta = 0.05
        w = bump.near_zero_window(delta)
        t = np.linspace(-0.5, 0.5, 20001)
        vals = w.eval(t)
        on_core = np.abs(t) <= delta
        off_support = np.abs(t) >= 2 * delta
        assert np.all(vals[on_core] >= 1.0 - 1e-12)
        assert np.all(vals[off_support] == 0.0)
        with pytest.raises(DomainError):
            bump.near_zero_window(0.3)
