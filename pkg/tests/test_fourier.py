import cmath
import math

import mpmath
import numpy as np
import pytest

from floorsum import bump, fourier
from floorsum.errors import DomainError
from floorsum.represent import derive_params


def mp_window_coefficient(window, m, dps=30):
    """Independent oracle: direct mpmath quadrature of the mapped window."""
    shape = window.base
    with mpmath.workdps(dps):
        if shape.kind == "normalized":
            c = 1 / mpmath.quad(lambda t: mpmath.exp(-1 / (t * (1 - t))), [0, 1])
            base = lambda u: c * mpmath.exp(-1 / (u * (1 - u)))
        else:
            e = shape.edge
            def g(x):
                return mpmath.exp(-1 / x) if x > 0 else mpmath.mpf(0)
            def sigma(x):
                return g(x) / (g(x) + g(1 - x))
            def base(u):
                if u <= 0 or u >= 1:
                    return mpmath.mpf(0)
                if u < e:
                    return sigma(u / e)
                if u > 1 - e:
                    return sigma((1 - u) / e)
                return mpmath.mpf(1)
        def integrand(u):
            t = window.shift + window.width * u
            return base(u) * mpmath.e ** (-2j * mpmath.pi * m * t)
        val = mpmath.quad(integrand, [0, 0.5, 1]) * window.width
        return complex(val)


class TestCoefficientValues:
    def test_phi_zero_is_half(self):
        phi = bump.first_window()
        value, err = fourier.fourier_coefficient(phi, 0)
        assert value.real == pytest.approx(0.5, abs=1e-12)
        assert abs(value.imag) < 1e-15
        assert err < 1e-12

    def test_psi_zero_is_sixth_of_delta(self):
        for delta in (1e-2, 1e-3):
            psi = bump.residual_window_for_delta(delta)
            value, _ = fourier.fourier_coefficient(psi, 0)
            assert value.real == pytest.approx(delta / 6.0, rel=1e-10)

    @pytest.mark.parametrize("m", [1, 2, 5, 17])
    def test_matches_mpmath_oracle(self, m):
        phi = bump.first_window()
        value, err = fourier.fourier_coefficient(phi, m)
        oracle = mp_window_coefficient(phi, m)
        assert cmath.isclose(value, oracle, abs_tol=5e-13)

    def test_plateau_window_against_oracle(self):
        w = bump.first_window(variant="tight", eta=0.02)
        for m in (0, 1, 3):
            value, _ = fourier.fourier_coefficient(w, m)
            oracle = mp_window_coefficient(w, m)
            assert cmath.isclose(value, oracle, abs_tol=5e-12)

    def test_hermitian_symmetry(self):
        phi = bump.first_window()
        plus, _ = fourier.fourier_coefficient(phi, 7)
        minus, _ = fourier.fourier_coefficient(phi, -7)
        assert cmath.isclose(minus, plus.conjugate(), rel_tol=1e-14)

    def test_degenerate_windows(self):
        z, err = fourier.fourier_coefficient(bump.ZeroWindow(), 3)
        assert z == 0 and err == 0.0
        one, _ = fourier.fourier_coefficient(bump.ConstantWindow(), 0)
        assert one == 1.0
        none, _ = fourier.fourier_coefficient(bump.ConstantWindow(), 4)
        assert none == 0


class TestTables:
    def test_build_table_contiguous_and_hermitian(self):
        phi = bump.first_window()
        table = fourier.build_table(phi, 16)
        assert table.indices == tuple(range(17))
        assert table.max_index == 16
        c3 = table.coefficient(3)
        assert table.coefficient(-3) == c3.conjugate()
        assert table.error(3) < 1e-12

    def test_missing_index_raises(self):
        table = fourier.build_table(bump.first_window(), 4)
        with pytest.raises(DomainError):
            table.coefficient(9)

    def test_parseval_partial_converges_to_l2_norm(self):
        phi = bump.first_window()
        table = fourier.build_table(phi, 200)
        partial = fourier.parseval_partial(table, 200)
        l2 = phi.l2_norm_squared()
        assert partial == pytest.approx(l2, rel=1e-12)
        # and partial sums are monotone nondecreasing toward it
        assert fourier.parseval_partial(table, 20) <= partial + 1e-18

    def test_abs_sum_over(self):
        table = fourier.build_table(bump.first_window(), 32)
        total = sum(abs(table.coefficient(m)) for m in range(5, 33))
        assert table.abs_sum_over(5, 32) == pytest.approx(total, rel=1e-14)


class TestDecay:
    def test_decay_fit_orders(self):
        phi = bump.first_window()
        table = fourier.build_table(phi, 64)
        for r in (2, 3, 5):
            fit = fourier.verify_decay(table, r, scale=1.0)
            assert fit.constant > 0 and fit.r == r
            # the fitted constant actually bounds every tabulated entry
            for m in table.indices:
                bound = fit.constant * (1 + m) ** -r
                assert abs(table.coefficient(m)) <= bound * (1 + 1e-12)

    def test_c3_stability_across_delta(self):
        # The residual window's third-order decay constant, measured in
        # units of the window width, is delta-independent up to the
        # continuum limit; x2 agreement is the contract.
        fits = {}
        for delta in (1e-2, 1e-3):
            psi = bump.residual_window_for_delta(delta)
            idx = sorted({int(round(s / delta)) for s in np.linspace(0, 6, 25)}
                         | {0, 1})
            table = fourier.build_sparse_table(psi, idx)
            fits[delta] = fourier.verify_decay(table, 3, scale=delta).constant
        hi, lo = max(fits.values()), min(fits.values())
        assert hi / lo < 2.0

    def test_rejects_bad_order(self):
        table = fourier.build_table(bump.first_window(), 4)
        with pytest.raises(DomainError):
            fourier.verify_decay(table, 11, scale=1.0)
        with pytest.raises(DomainError):
            fourier.verify_decay(table, 3, scale=-1.0)


class TestSmoothedSums:
    def test_smoothed_sum_positive_at_desk_scale(self):
        value = fourier.smoothed_sum(2 * 10**6, "21/20")
        assert value > 0

    def test_main_term_formula(self):
        params = derive_params(2 * 10**6, "21/20")
        got = fourier.main_term(params)
        from floorsum.primes import prime_count_between
        count = prime_count_between(params.p_lo, params.p_hi)
        expect = 0.5 * (float(params.delta) / 6.0) * count
        assert got == pytest.approx(expect, rel=1e-12)

    def test_truncation_limits(self):
        params = derive_params(2 * 10**6, "21/20")
        h_lim, j_lim = fourier.truncation_limits(params, 0.005)
        x = float(params.X)
        assert h_lim == int(x ** 0.005)
        assert j_lim == int(x ** (float(params.c) - 1.0 + 0.005))
        with pytest.raises(DomainError):
            fourier.truncation_limits(params, 0.0)

    def test_reconstruction_within_tail(self):
        n, c = 2 * 10**6, "21/20"
        params = derive_params(n, c)
        h_lim, j_lim = fourier.truncation_limits(params, 0.005)
        phi_table = fourier.build_table(bump.first_window(), max(h_lim + 8, 32))
        psi_table = fourier.build_table(
            bump.residual_window(params), max(j_lim + 8, 32))
        rec = fourier.fourier_reconstruction(n, c, phi_table, psi_table,
                                             h_lim, j_lim)
        direct = fourier.smoothed_sum(n, c)
        assert abs(direct - rec.value) <= rec.tail_bound
        assert rec.H == h_lim and rec.J == j_lim
        assert rec.imag_residue < 1e-9
