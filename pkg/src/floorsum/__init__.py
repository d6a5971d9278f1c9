"""Desk-scale laboratory for representations n = [m^c] + [p^c], p prime.

The package splits into five layers:

- certified: directed-rounding interval arithmetic for floors and
  fractional parts of m**c with exact big-integer fallback;
- represent: window-guided and brute-force representation search;
- bump, fourier, phases: smooth periodic windows, their certified
  Fourier coefficients, and phase tables for the smoothed counts;
- expsum: exponential-sum experiments (derivative tests, bilinear
  forms, Weyl shifts, near-integer counts, type I/II decompositions);
- scan, reports, cli: segmented exceptional-set scans and the
  command-line front end with reproducible manifests.
"""

from .bump import (BumpSpec, ConstantWindow, PeriodicWindow, ZeroWindow,
                   first_window, near_zero_window, psi0_eval, residual_window,
                   residual_window_for_delta)
from .certified import (count_powers_below, floor_of_root, floor_power,
                        frac_power, pow_enclosure)
from .errors import (BudgetExceededError, DomainError,
                     IndeterminateFloorError, PrecisionCapError,
                     SegmentAborted)
from .exponent import Exponent
from .expsum import (BilinearQuery, BoundReport, CoeffFamily, ExpSumQuery,
                     ExpSumResult, VaughanResult, bilinear_sum, bound_sweep,
                     derivative_test_bound, exp_sum, near_integer_bound,
                     near_integer_count, phase_derivatives, vaughan_decompose,
                     weyl_shift_bound)
from .fourier import (DecayFit, FourierTable, QuadratureError,
                      build_sparse_table, build_table, fourier_coefficient,
                      fourier_reconstruction, main_term, parseval_partial,
                      smoothed_sum, truncation_limits, verify_decay)
from .represent import (ProblemParams, Representation, Variant, WindowTally,
                        check_window, count_window_primes, derive_params,
                        find_representation, find_representation_bruteforce,
                        iter_representations, verify_representation,
                        window_integer_existence)
from .scan import (ScanReport, ScanSegment, exceptional_counts, fit_exponent,
                   scan_segment)

__version__ = "0.1.0"

__all__ = [
    "BilinearQuery", "BoundReport", "BudgetExceededError", "BumpSpec",
    "CoeffFamily", "ConstantWindow", "DecayFit", "DomainError", "Exponent",
    "ExpSumQuery", "ExpSumResult", "FourierTable",
    "IndeterminateFloorError", "PeriodicWindow", "PrecisionCapError",
    "ProblemParams", "QuadratureError", "Representation", "ScanReport",
    "ScanSegment", "SegmentAborted", "VaughanResult", "Variant",
    "WindowTally", "ZeroWindow", "bilinear_sum", "bound_sweep",
    "build_sparse_table", "build_table", "check_window", "count_powers_below",
    "count_window_primes", "derivative_test_bound", "derive_params",
    "exceptional_counts", "exp_sum", "find_representation",
    "find_representation_bruteforce", "first_window", "fit_exponent",
    "floor_of_root", "floor_power", "fourier_coefficient",
    "fourier_reconstruction", "frac_power", "iter_representations",
    "main_term", "near_integer_bound", "near_integer_count",
    "near_zero_window", "parseval_partial", "phase_derivatives",
    "pow_enclosure", "psi0_eval", "residual_window",
    "residual_window_for_delta", "scan_segment", "smoothed_sum",
    "truncation_limits", "vaughan_decompose", "verify_decay",
    "verify_representation", "weyl_shift_bound", "window_integer_existence",
    "__version__",
]
