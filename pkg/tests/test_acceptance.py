"""Full-scale acceptance checks for the laboratory as a whole.

Each check prints one PASS line stating what was measured and the
tolerance it met (the -rP flag in the project pytest config surfaces
those lines in the run log).  The per-module suites cover the fine
grain; these tests exercise the advertised end-to-end contracts at
their full desk-scale sizes, so this file is the slow part of the
suite (a few minutes in total).
"""

import json
import math
import time
from fractions import Fraction

import gmpy2
import mpmath
import numpy as np
import pytest

from floorsum import certified, cli
from floorsum.bump import first_window, residual_window_for_delta
from floorsum.certified import floor_power
from floorsum.exponent import Exponent
from floorsum.expsum import (near_integer_count, phase_derivatives,
                             phase_slope, vaughan_decompose)
from floorsum.fourier import (build_sparse_table, build_table,
                              fourier_coefficient, fourier_reconstruction,
                              smoothed_sum, truncation_limits, verify_decay)
from floorsum.represent import (derive_params, find_representation,
                                find_representation_bruteforce,
                                verify_representation,
                                window_integer_existence)
from floorsum.scan import exceptional_counts, scan_segment


def _ok(num: int, label: str, detail: str) -> None:
    print(f"PASS acceptance {num:02d} [{label}]: {detail}")


@pytest.fixture
def restored_precision_cap():
    cap = certified.precision_cap()
    yield
    certified.set_precision_cap(cap)


def test_01_certified_floors_match_exact_roots():
    """floor_power agrees with integer root extraction on every m <= 10^6."""
    t0 = time.perf_counter()
    mismatches = 0
    for text in ("3/2", "4/3", "6/5", "21/20"):
        c = Exponent.coerce(text)
        b, a = c.numerator, c.denominator
        for m in range(1, 10**6 + 1):
            got = floor_power(m, c).value
            want = int(gmpy2.iroot(gmpy2.mpz(m) ** b, a)[0])
            if got != want:
                mismatches += 1
    elapsed = time.perf_counter() - t0
    assert mismatches == 0
    assert elapsed <= 120.0
    _ok(1, "floor-oracle",
        f"4x10^6 certified floors vs exact k-th roots, {mismatches} mismatches "
        f"(tolerance: exact equality), {elapsed:.0f}s <= 120s")


def test_02_representation_soundness_and_dominance():
    """Finder outputs verify exactly; window success implies brute success."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(90210)
    c = Exponent.coerce("21/20")
    window_hits = brute_hits = 0
    for n in rng.integers(2, 10**6 + 1, size=10**4):
        n = int(n)
        windowed = find_representation(n, c)
        brute = find_representation_bruteforce(n, c)
        if windowed is not None:
            assert windowed.n == n
            assert verify_representation(n, windowed.m, windowed.p, c)
            window_hits += 1
            assert brute is not None, f"window found n={n} but brute did not"
        if brute is not None:
            assert brute.n == n
            assert verify_representation(n, brute.m, brute.p, c)
            brute_hits += 1
    elapsed = time.perf_counter() - t0
    assert elapsed <= 300.0
    _ok(2, "representation",
        f"10^4 random n <= 10^6 at c=21/20: {window_hits} window hits, "
        f"{brute_hits} brute hits, every output verified exactly, window "
        f"success => brute success (tolerance: exact), {elapsed:.0f}s <= 300s")


def test_03_accepted_primes_always_yield_integers():
    """Every prime the window criterion accepts produces a partner m."""
    rng = np.random.default_rng(424242)
    accepted = violations = 0
    for n in rng.integers(10**5, 2 * 10**6 + 1, size=500):
        report = window_integer_existence(int(n), "21/20")
        accepted += report.tally.in_count
        violations += len(report.violations)
    assert violations == 0
    _ok(3, "window-criterion",
        f"500 n in [10^5, 2x10^6] at c=21/20: {accepted} accepted primes, "
        f"{violations} without an integer partner (tolerance: zero violations)")


def test_04_fourier_anchors_and_decay_stability():
    """Zeroth coefficients hit their closed forms; decay constant is scale-free."""
    phi0, _ = fourier_coefficient(first_window(), 0)
    assert abs(phi0.real - 0.5) <= 1e-10
    assert abs(phi0.imag) <= 1e-10

    constants = {}
    fractions_of_period = (0.02, 0.04, 0.08, 0.15, 0.3, 0.5,
                           0.8, 1.2, 1.8, 2.5, 3.5, 5.0)
    for delta, stretch in ((1e-2, 1.0), (1e-3, 1.37)):
        psi = residual_window_for_delta(delta)
        psi0, _ = fourier_coefficient(psi, 0)
        assert abs(psi0 - delta / 6.0) <= 1e-10 * (delta / 6.0)
        # Log-spaced indices out to several window periods; the two grids
        # are deliberately incommensurate so the fits share no integrals.
        idx = {0} | {int(round(6.0 / delta * f * stretch))
                     for f in fractions_of_period}
        fit = verify_decay(build_sparse_table(psi, idx), 3, delta)
        assert math.isfinite(fit.constant) and fit.constant > 0.0
        constants[delta] = fit.constant
    ratio = constants[1e-2] / constants[1e-3]
    assert 0.5 <= ratio <= 2.0
    _ok(4, "fourier-anchors",
        f"phi_hat(0) = 0.5 (1e-10 abs), psi_hat(0) = delta/6 (1e-10 rel) at "
        f"delta = 1e-2 and 1e-3; order-3 decay constants "
        f"{constants[1e-2]:.3f} vs {constants[1e-3]:.3f}, ratio "
        f"{ratio:.3f} within [1/2, 2]")


def test_05_reconstruction_within_tail_bound():
    """Truncated Fourier expansion stays within its certified tail."""
    c = Exponent.coerce("21/20")
    params = derive_params(2 * 10**6, c)
    H, J = truncation_limits(params, 0.005)
    smoothed = smoothed_sum(params, c)
    table_phi = build_table(first_window(), 8)
    table_psi = build_table(residual_window_for_delta(float(params.delta)), 8)
    rec = fourier_reconstruction(params, c, table_phi, table_psi, H, J,
                                 eps=0.005)
    gap = abs(smoothed - rec.value)
    assert smoothed > 0.0
    assert gap <= rec.tail_bound
    assert rec.imag_residue <= 1e-9
    _ok(5, "reconstruction",
        f"n=2x10^6 c=21/20 (H,J)=({H},{J}): smoothed {smoothed:.2f} > 0, "
        f"|smoothed - reconstruction| = {gap:.2f} <= tail bound "
        f"{rec.tail_bound:.2f} (tolerance: the computed tail)")


def test_06_derivative_closed_forms_match_finite_differences():
    """Closed-form phase derivatives track multiprecision finite differences."""
    mpmath.mp.dps = 40
    worst = 0.0
    points = 0
    for c in np.linspace(1.02, 1.48, 10):
        ce = mpmath.mpf(float(c))
        ge = 1 / ce
        for x in np.geomspace(10.0, 230.0, 10):
            xe = mpmath.mpf(float(x))

            def alpha(t, xe=xe, ce=ce, ge=ge):
                return xe * t**ce + (1 - t**ce) ** ge

            for t in np.linspace(0.1, 0.45, 10):
                te = mpmath.mpf(float(t))
                a1 = mpmath.diff(alpha, te, 1)
                a2 = mpmath.diff(alpha, te, 2)
                a3 = mpmath.diff(alpha, te, 3)
                a4 = mpmath.diff(alpha, te, 4)
                d = phase_derivatives(float(t), float(x), float(c))
                slope = phase_slope(float(t), float(x), float(c))
                # beta = t alpha', so by the product rule
                # beta'' = 2 alpha'' + t alpha''' and
                # beta''' = 3 alpha''' + t alpha''''.
                pairs = ((slope, a1), (d.alpha2, a2), (d.alpha3, a3),
                         (d.beta2, 2 * a2 + te * a3),
                         (d.beta3, 3 * a3 + te * a4))
                for got, want in pairs:
                    want = float(want)
                    worst = max(worst, abs(got - want) / abs(want))
                points += 1
    assert points == 1000
    assert worst <= 1e-6
    _ok(6, "phase-derivatives",
        f"five closed forms on a 10^3-point (t, x, c) grid, worst relative "
        f"gap {worst:.2e} <= 1e-6 against dps-40 finite differences")


def test_07_vaughan_recombination():
    """Type I/II pieces recombine to the direct von Mangoldt sum."""
    worst = 0.0
    for X in (10**3, 10**4):
        n = 2 * int((2 * X) ** 1.2) + 2
        for h, j in ((1, 0), (0, 1), (1, 1)):
            res = vaughan_decompose(X, 2 * X, h, j, n, "6/5")
            worst = max(worst, abs(res.residue))
    assert worst <= 1e-6
    _ok(7, "vaughan",
        f"recombined vs direct sums over (X, 2X] at X = 10^3, 10^4 and "
        f"(h, j) in {{(1,0), (0,1), (1,1)}}, c = 6/5: worst |residue| "
        f"{worst:.2e} <= 1e-6 absolute")


def test_08_near_integer_counts_within_bound():
    """Exact near-integer counts sit under the bound and match a tally."""
    t0 = time.perf_counter()
    c = Exponent.coerce("13/10")
    details = []
    for X in (10**4, 10**5, 10**6):
        delta = Fraction(round(X ** (1.0 - 1.3) * 10**12), 10**12)
        rep = near_integer_count(X, 2 * X, c, delta)
        assert rep.parameters["undecidable"] == 0
        assert rep.measured <= 10.0 * rep.bound_value
        details.append(f"{rep.measured:.0f} <= 10 x {rep.bound_value:.0f}")
        if X == 10**4:
            with mpmath.workdps(50):
                ce = mpmath.mpf(13) / 10
                dmp = mpmath.mpf(delta.numerator) / delta.denominator
                tally = sum(1 for t in range(X + 1, 2 * X + 1)
                            if min(mpmath.frac(mpmath.mpf(t) ** ce),
                                   1 - mpmath.frac(mpmath.mpf(t) ** ce)) < dmp)
            assert tally == int(rep.measured)
    elapsed = time.perf_counter() - t0
    assert elapsed <= 180.0
    _ok(8, "near-integer",
        f"c=13/10, delta=X^(-3/10), X = 10^4, 10^5, 10^6: measured within "
        f"10x the bound ({'; '.join(details)}), dps-50 tally matches exactly "
        f"at X=10^4, {elapsed:.0f}s <= 180s")


def _primes_upto(limit: int) -> np.ndarray:
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p::p] = False
    return np.flatnonzero(mask)


def _sweep_exceptional(x_max: int, c: Exponent) -> list[int]:
    """Per-n brute-force sweep: n is exceptional iff no (m, p) pair works."""
    b, a = c.numerator, c.denominator
    floors = []
    t = 1
    while True:
        f = int(gmpy2.iroot(gmpy2.mpz(t) ** b, a)[0])
        if f > x_max - 1:
            break
        floors.append(f)
        t += 1
    m_floors = set(floors)
    prime_floors = [floors[p - 1] for p in _primes_upto(len(floors))]
    return [n for n in range(1, x_max + 1)
            if not any((n - fp) in m_floors for fp in prime_floors if fp < n)]


def test_09_scanner_matches_per_n_sweep():
    """Segmented scan equals the direct sweep; tilings agree; c=1 gives 2."""
    counts = {}
    for text in ("21/20", "6/5", "13/10"):
        c = Exponent.coerce(text)
        seg = scan_segment(0, 10**4, c)
        expected = _sweep_exceptional(10**4, c)
        assert seg.exceptional_values().tolist() == expected
        counts[text] = len(expected)

    full = scan_segment(0, 10**4, "6/5").exceptional_values()
    for cuts in ((0, 2500, 5000, 7500, 10**4), (0, 1, 3000, 9999, 10**4)):
        tiled = np.concatenate([
            scan_segment(lo, hi, "6/5").exceptional_values()
            for lo, hi in zip(cuts, cuts[1:])])
        assert np.array_equal(tiled, full)

    degenerate = scan_segment(0, 10**4, "1")
    assert degenerate.exceptional_values().tolist() == [1, 2]
    _ok(9, "scanner",
        f"scan of (0, 10^4] equals the per-n sweep exactly for c = 21/20, "
        f"6/5, 13/10 (counts {counts['21/20']}, {counts['6/5']}, "
        f"{counts['13/10']}); two tilings reproduce the one-shot scan; "
        f"c = 1 leaves exactly {{1, 2}} (tolerance: exact)")


def test_10_exceptional_count_trend():
    """Counts are monotone, density falls by decade, slope is reported."""
    report = exceptional_counts(10**6, "13/10")
    xs = [x for x, _ in report.checkpoints]
    counts = [e for _, e in report.checkpoints]
    assert xs == [10, 10**2, 10**3, 10**4, 10**5, 10**6]
    assert all(a <= b for a, b in zip(counts, counts[1:]))
    density = {x: e / x for x, e in report.checkpoints}
    assert density[10**6] < density[10**5]
    assert report.fitted_slope is not None
    assert math.isfinite(report.fitted_slope)
    assert report.theorem2_exponent == pytest.approx(9 / 13, rel=1e-12)
    assert "asymptotic" in report.note
    _ok(10, "trend",
        f"c=13/10 to x=10^6: counts {counts} monotone, density "
        f"{density[10**5]:.2e} -> {density[10**6]:.2e} strictly falling, "
        f"fitted slope {report.fitted_slope:.4f} reported beside the proved "
        f"exponent {report.theorem2_exponent:.4f} with the asymptotic caveat")


def test_11_byte_identical_reruns(tmp_path, restored_precision_cap):
    """Worker count does not change bytes; manifests replay exactly."""
    base = ["scan", "--c", "13/10", "--x-max", "50000",
            "--segment-size", "8192"]
    for name, workers in (("w1", "1"), ("w2", "2")):
        out = tmp_path / name
        assert cli.main(base + ["--workers", workers,
                                "--output-dir", str(out)]) == 0
    manifest = json.loads((tmp_path / "w1" / "manifest.json").read_text())
    data_files = manifest["outputs"]
    assert data_files
    for fname in data_files:
        assert ((tmp_path / "w1" / fname).read_bytes()
                == (tmp_path / "w2" / fname).read_bytes())

    replay = tmp_path / "replay"
    argv = cli.replay_argv(manifest) + ["--output-dir", str(replay)]
    assert cli.main(argv) == 0
    for fname in data_files:
        assert ((replay / fname).read_bytes()
                == (tmp_path / "w1" / fname).read_bytes())
    _ok(11, "determinism",
        f"scan to 5x10^4: workers 1 vs 2 and a manifest replay all "
        f"reproduce {data_files} byte for byte (tolerance: identical bytes)")
