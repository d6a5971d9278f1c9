"""Command-line entry point.

Subcommands map one-to-one onto the library surfaces: represent, scan,
expsum, bilinear, sdelta, fourier, vaughan, window-census.  Every run
writes a manifest.json beside its data files; repeating a run with the
manifest's config reproduces the data files byte for byte (wall-clock
columns only appear under --timing, which trades that guarantee away).

Exit codes: 0 success, 2 invalid configuration, 3 arithmetic
indeterminacy (a certified computation refused to decide), 4 budget
exceeded.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import logging
import os
import sys
import time
from fractions import Fraction

from . import __version__, certified
from .bump import first_window, residual_window, residual_window_for_delta
from .errors import (BudgetExceededError, DomainError, IndeterminateFloorError,
                     PrecisionCapError, SegmentAborted)
from .exponent import Exponent
from .expsum import (BilinearQuery, CoeffFamily, bilinear_sum, bound_sweep,
                     near_integer_count, vaughan_decompose, weyl_shift_bound)
from .fourier import QuadratureError, build_table, fourier_coefficient
from .represent import (count_window_primes, derive_params,
                        find_representation, find_representation_bruteforce,
                        verify_representation)
from .reports import (write_checkpoint_table, write_lines, write_manifest,
                      write_table)
from .scan import DEFAULT_SEGMENT_SIZE, exceptional_counts

__all__ = ["main"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INDETERMINATE = 3
EXIT_BUDGET = 4

_OUTPUT_DIR_ENV = "FLOORSUM_OUTPUT_DIR"


def _parse_c(text: str) -> Exponent:
    """Exact exponent from a rational ("21/20") or decimal ("1.05") string."""
    try:
        c = Exponent.from_string(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(
            f"cannot parse exponent {text!r}: {exc}") from exc
    if not (1 <= c.value < 2):
        raise argparse.ArgumentTypeError(
            f"exponent must satisfy 1 <= c < 2 (c = 1 runs the degenerate "
            f"integer split), got {text}")
    return c


def _theorem1_warning(c: Exponent, eps: float | None) -> None:
    bound = Fraction(16, 15)
    if c.value >= bound:
        logger.warning("c = %s is outside the proven range c < 16/15; "
                       "results are exploratory", c.value)
    elif eps is not None:
        cap = (bound - c.value) / 2
        if not (0 < Fraction(eps).limit_denominator(10**9) < cap):
            logger.warning("eps = %s is outside (0, (16/15 - c)/2) = (0, %s); "
                           "sweep proceeds anyway", eps, float(cap))


def _read_config_file(path: str) -> dict[str, str]:
    """Simple KEY=VALUE defaults file; blank lines and # comments ignored."""
    values: dict[str, str] = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise DomainError(f"cannot read config file {path}: {exc}") from exc
    with fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected KEY=VALUE, got "
                                  f"{line!r}")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


class _Run:
    """Output-directory bookkeeping shared by all subcommands."""

    def __init__(self, args: argparse.Namespace, subcommand: str):
        self.args = args
        self.subcommand = subcommand
        self.dir = args.output_dir or os.environ.get(_OUTPUT_DIR_ENV) or "."
        os.makedirs(self.dir, exist_ok=True)
        self.fmt = args.format
        self.outputs: list[str] = []
        self.timing: dict[str, float] = {}
        self.started = _dt.datetime.now(_dt.timezone.utc).isoformat()
        if args.precision_cap is not None:
            certified.set_precision_cap(args.precision_cap)
        certified.reset_escalation_stats()

    def path(self, name: str) -> str:
        return os.path.join(self.dir, name)

    def table(self, name: str, columns: list[str], rows: list[dict]) -> str:
        if self.args.timing:
            columns = [*columns, "wall_time_s"]
        out = write_table(self.path(f"{name}.{self.fmt}"), columns, rows, self.fmt)
        self.outputs.append(os.path.basename(out))
        return out

    def add_output(self, path: str) -> None:
        self.outputs.append(os.path.basename(path))

    def finish(self, config: dict) -> None:
        # format and timing change the output bytes, so they belong in the
        # config echo: replaying the manifest must reproduce them.
        config = {**config, "format": self.fmt, "timing": self.args.timing,
                  "precision_cap": self.args.precision_cap}
        finished = _dt.datetime.now(_dt.timezone.utc).isoformat()
        path = write_manifest(
            self.path("manifest.json"), subcommand=self.subcommand,
            config=config, version=__version__, started=self.started,
            finished=finished, timing=self.timing,
            escalation=certified.escalation_stats(), outputs=self.outputs)
        logger.info("manifest written to %s", path)

    def stamp(self, row: dict, elapsed: float) -> dict:
        if self.args.timing:
            row["wall_time_s"] = round(elapsed, 3)
        return row


def _config_echo(args: argparse.Namespace, keys: list[str]) -> dict:
    echo = {}
    for key in keys:
        value = getattr(args, key)
        if isinstance(value, Exponent):
            value = str(value.value)
        elif isinstance(value, Fraction):
            value = str(value)
        echo[key] = value
    return echo


# -- subcommands ---------------------------------------------------------


def cmd_represent(args) -> int:
    run = _Run(args, "represent")
    t0 = time.perf_counter()
    results = {}
    if args.method in ("window", "both"):
        if args.n >= 3:
            results["window"] = find_representation(
                args.n, args.c, variant=args.variant,
                allow_degenerate=args.c.value == 1)
        else:
            results["window"] = None
    if args.method in ("brute", "both"):
        results["brute"] = find_representation_bruteforce(args.n, args.c)
    elapsed = time.perf_counter() - t0

    rows = []
    for method, rep in results.items():
        if rep is None:
            print(f"{method}: none")
            rows.append(run.stamp({"method": method, "found": False}, elapsed))
        else:
            ok = verify_representation(rep.n, rep.m, rep.p, args.c)
            print(f"{method}: n={rep.n} m={rep.m} p={rep.p} "
                  f"[m^c]={rep.floor_m} [p^c]={rep.floor_p} verified={ok}")
            rows.append(run.stamp({"method": method, "found": True, "m": rep.m,
                                   "p": rep.p, "floor_m": rep.floor_m,
                                   "floor_p": rep.floor_p, "verified": ok},
                                  elapsed))
    if args.method == "both":
        w, b = results["window"], results["brute"]
        if w is not None and b is None:
            print("DISAGREEMENT: window found a pair but brute force did not")
            return EXIT_INDETERMINATE
        print(f"agreement: window={'found' if w else 'none'}, "
              f"brute={'found' if b else 'none'} "
              f"(window success implies brute success holds)")
    run.table("represent", ["method", "found", "m", "p", "floor_m", "floor_p",
                            "verified"], rows)
    run.timing["represent"] = elapsed
    run.finish(_config_echo(args, ["n", "c", "method", "variant"]))
    return EXIT_OK


def cmd_scan(args) -> int:
    run = _Run(args, "scan")
    resume_path = run.path("scan_resume.bin") if args.resume else None
    t0 = time.perf_counter()
    report = exceptional_counts(
        args.x_max, args.c,
        checkpoints=args.checkpoints, segment_size=args.segment_size,
        workers=args.workers, resume_path=resume_path)
    run.timing["scan"] = time.perf_counter() - t0

    out = write_checkpoint_table(run.path(f"checkpoints.{run.fmt}"), report,
                                 run.fmt)
    run.add_output(out)
    if report.exceptional_list is not None:
        run.add_output(write_lines(run.path("exceptional.txt"),
                                   report.exceptional_list))
    slope = (f"{report.fitted_slope:.4f}" if report.fitted_slope is not None
             else "not fittable")
    print(f"E_c({args.x_max}) = {report.checkpoints[-1][1]}  "
          f"largest exception: {report.largest_exception}")
    print(f"fitted slope: {slope}  proved exponent: "
          f"{report.theorem2_exponent:.4f}")
    print(f"note: {report.note}")
    if report.aborted_segments:
        print(f"aborted segments: {report.aborted_segments}")
    run.finish(_config_echo(args, ["c", "x_max", "segment_size", "workers",
                                   "checkpoints", "resume"]))
    return EXIT_OK


def cmd_expsum(args) -> int:
    run = _Run(args, "expsum")
    for c in args.c:
        _theorem1_warning(c, args.eps)
    t0 = time.perf_counter()
    reports = bound_sweep(args.n, args.c, eps=args.eps)
    elapsed = time.perf_counter() - t0
    rows = [run.stamp({"n": r.parameters["n"], "c": r.parameters["c"],
                       "h": r.parameters["h"], "j": r.parameters["j"],
                       "X": r.parameters["X"], "eps": r.parameters["eps"],
                       "measured": r.measured, "bound": r.bound_value,
                       "ratio": r.ratio, "terms": r.term_count,
                       "phase_error": r.parameters["phase_error"]},
                      elapsed) for r in reports]
    run.table("expsum", ["n", "c", "h", "j", "X", "eps", "measured", "bound",
                         "ratio", "terms", "phase_error"], rows)
    worst = max(rows, key=lambda row: row["ratio"]) if rows else None
    print(f"{len(rows)} sums; worst measured/bound = "
          f"{worst['ratio']:.6f} at n={worst['n']}, c={worst['c']}, "
          f"(h, j) = ({worst['h']}, {worst['j']})" if worst else "no sums")
    run.timing["sweep"] = elapsed
    run.finish({"n": args.n, "c": [str(c.value) for c in args.c],
                "eps": args.eps})
    return EXIT_OK


def cmd_bilinear(args) -> int:
    run = _Run(args, "bilinear")
    query = BilinearQuery(
        m_lo=args.m_lo, m_hi=args.m_hi, k_lo=args.k_lo, k_hi=args.k_hi,
        h=args.h, j=args.j, n=args.n, c=args.c,
        coeff_m=CoeffFamily(args.coeff_m, seed=args.seed),
        coeff_k=CoeffFamily(args.coeff_k, seed=args.seed + 1))
    t0 = time.perf_counter()
    result = bilinear_sum(query)
    row = {"n": args.n, "c": str(args.c.value), "m_lo": args.m_lo,
           "m_hi": args.m_hi, "k_lo": args.k_lo, "k_hi": args.k_hi,
           "h": args.h, "j": args.j, "coeff_m": args.coeff_m,
           "coeff_k": args.coeff_k, "seed": args.seed,
           "re": result.value.real, "im": result.value.imag,
           "magnitude": result.magnitude, "terms": result.term_count,
           "phase_error": result.phase_error}
    columns = list(row)
    print(f"bilinear sum = {result.value:.6f} (|S| = {result.magnitude:.6f}, "
          f"{result.term_count} terms)")
    if args.weyl_q is not None:
        report = weyl_shift_bound(query, args.weyl_q, eps=args.eps)
        row.update({"weyl_q": args.weyl_q, "weyl_measured": report.measured,
                    "weyl_bound": report.bound_value,
                    "weyl_ratio": report.ratio,
                    "weyl_first_form": report.parameters["first_form"],
                    "g3_abs_min": report.parameters["g3_abs_min"],
                    "delta0": report.parameters["delta0"]})
        columns = list(row)
        print(f"shift comparison: |S|^2 = {report.measured:.4f} vs bound "
              f"{report.bound_value:.4f} (ratio {report.ratio:.6f})")
    elapsed = time.perf_counter() - t0
    run.table("bilinear", columns, [run.stamp(row, elapsed)])
    run.timing["bilinear"] = elapsed
    run.finish(_config_echo(args, ["n", "c", "m_lo", "m_hi", "k_lo", "k_hi",
                                   "h", "j", "coeff_m", "coeff_k", "seed",
                                   "weyl_q", "eps"]))
    return EXIT_OK


def cmd_sdelta(args) -> int:
    run = _Run(args, "sdelta")
    hi = args.x + (args.x // 4)
    delta = Fraction(args.delta) if args.delta else \
        Fraction(args.x) ** (1 - args.c.value)
    t0 = time.perf_counter()
    report = near_integer_count(args.x, hi, args.c, delta)
    elapsed = time.perf_counter() - t0
    row = run.stamp({"x": args.x, "x1": hi, "c": str(args.c.value),
                     "delta": float(delta), "count": int(report.measured),
                     "bound": report.bound_value, "ratio": report.ratio,
                     "undecidable": report.parameters["undecidable"],
                     "candidates": report.parameters["candidates"]}, elapsed)
    run.table("sdelta", ["x", "x1", "c", "delta", "count", "bound", "ratio",
                         "undecidable", "candidates"], [row])
    print(f"count = {int(report.measured)} over ({args.x}, {hi}], "
          f"bound = {report.bound_value:.3f}, ratio = {report.ratio:.4f}")
    run.timing["sdelta"] = elapsed
    run.finish(_config_echo(args, ["x", "c", "delta"]))
    return EXIT_OK


def cmd_fourier(args) -> int:
    run = _Run(args, "fourier")
    if args.window == "phi":
        if args.n is not None:
            window = first_window(derive_params(args.n, args.c,
                                                variant=args.variant),
                                  variant=args.variant)
        elif args.variant == "plain":
            window = first_window(None, variant="plain")
        else:
            raise DomainError("the tight first window needs --n to set eta")
    else:
        if args.delta is not None:
            window = residual_window_for_delta(args.delta, variant=args.variant,
                                               eta=args.eta)
        elif args.n is not None:
            window = residual_window(derive_params(args.n, args.c,
                                                   variant=args.variant))
        else:
            raise DomainError("psi needs --delta or --n")
    t0 = time.perf_counter()
    if args.index is not None:
        indices = [args.index]
        value, err = fourier_coefficient(window, args.index)
        table = None
    else:
        table = build_table(window, args.max_index)
        indices = list(table.indices)
    elapsed = time.perf_counter() - t0
    rows = []
    for m in indices:
        value, err = ((table.coefficient(m), table.error(m)) if table
                      else fourier_coefficient(window, m))
        rows.append(run.stamp({"window": args.window, "index": m,
                               "re": value.real, "im": value.imag,
                               "error": err}, elapsed))
        if len(indices) == 1:
            print(f"{args.window}_hat({m}) = {value.real:+.12f}{value.imag:+.12f}i "
                  f"(error <= {err:.2e})")
    run.table("fourier", ["window", "index", "re", "im", "error"], rows)
    if table is not None:
        print(f"{len(rows)} coefficients written (window {args.window}, "
              f"support width {window.width:.6g})")
    run.timing["fourier"] = elapsed
    run.finish(_config_echo(args, ["window", "variant", "n", "c", "delta",
                                   "eta", "index", "max_index"]))
    return EXIT_OK


def cmd_vaughan(args) -> int:
    run = _Run(args, "vaughan")
    hi = 2 * args.x
    n = args.n if args.n is not None else _default_vaughan_n(hi, args.c)
    t0 = time.perf_counter()
    result = vaughan_decompose(args.x, hi, args.h, args.j, n, args.c,
                               u=args.u, v=args.v)
    elapsed = time.perf_counter() - t0
    rows = [run.stamp({"kind": comp.kind, "outer_lo": comp.outer_lo,
                       "outer_hi": comp.outer_hi, "inner_lo": comp.inner_lo,
                       "inner_hi": comp.inner_hi, "re": comp.value.real,
                       "im": comp.value.imag, "terms": comp.terms}, elapsed)
            for comp in result.components]
    run.table("vaughan", ["kind", "outer_lo", "outer_hi", "inner_lo",
                          "inner_hi", "re", "im", "terms"], rows)
    print(f"direct     = {result.direct:.8f}")
    print(f"recombined = {result.recombined:.8f}")
    print(f"residue    = {result.residue:.3e}  (u = {result.u}, v = {result.v}, "
          f"{len(result.components)} components)")
    run.timing["vaughan"] = elapsed
    run.finish(_config_echo(args, ["x", "c", "h", "j", "n", "u", "v"]))
    return EXIT_OK


def _default_vaughan_n(hi: int, c: Exponent) -> int:
    """Smallest convenient n with n > hi**c so residual phases exist."""
    from .certified import rational_pow_enclosure

    enc = rational_pow_enclosure(Fraction(hi), c.value, 64)
    return 2 * (int(enc.hi) + 1)


def cmd_window_census(args) -> int:
    run = _Run(args, "window-census")
    params = derive_params(args.n, args.c, variant=args.variant)
    t0 = time.perf_counter()
    tally = count_window_primes(params, collect=args.collect)
    elapsed = time.perf_counter() - t0
    row = run.stamp({"n": args.n, "c": str(args.c.value),
                     "variant": args.variant, "p_lo": params.p_lo,
                     "p_hi": params.p_hi, "in": tally.in_count,
                     "out": tally.out_count,
                     "uncertain": tally.uncertain_count}, elapsed)
    run.table("census", ["n", "c", "variant", "p_lo", "p_hi", "in", "out",
                         "uncertain"], [row])
    if args.collect and tally.in_primes:
        run.add_output(write_lines(run.path("accepted_primes.txt"),
                                   tally.in_primes))
    print(f"primes in ({params.p_lo}, {params.p_hi}]: {tally.in_count} in, "
          f"{tally.out_count} out, {tally.uncertain_count} uncertain")
    run.timing["census"] = elapsed
    run.finish(_config_echo(args, ["n", "c", "variant", "collect"]))
    return EXIT_OK


# -- parser ---------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--c", type=_parse_c,
                     help="exponent, exact rational '21/20' or decimal '1.05'")


# Flags every subcommand insists on; enforced after the config file has
# had its chance to supply them, which argparse's required= cannot do.
_REQUIRED = {
    "represent": ("c", "n"),
    "scan": ("c", "x_max"),
    "expsum": ("c", "n"),
    "bilinear": ("c", "n", "m_lo", "m_hi", "k_lo", "k_hi", "h", "j"),
    "sdelta": ("c", "x"),
    "fourier": ("window",),
    "vaughan": ("c", "x", "h", "j"),
    "window-census": ("c", "n"),
}


def _global_options(parser: argparse.ArgumentParser, *,
                    suppress: bool = False) -> None:
    """Options accepted both before and after the subcommand.

    The copies attached to subparsers default to SUPPRESS so that a flag
    given only before the subcommand is not clobbered by the subparser's
    defaults.
    """
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--config", default=default(None),
                        help="KEY=VALUE defaults file")
    parser.add_argument("--output-dir", default=default(None),
                        help=f"data/manifest directory (default: "
                             f"${_OUTPUT_DIR_ENV} or '.')")
    parser.add_argument("--format", choices=("csv", "jsonl"),
                        default=default("csv"))
    parser.add_argument("--timing", action="store_true",
                        default=default(False),
                        help="add wall-clock columns (breaks byte-level "
                             "reproducibility)")
    parser.add_argument("--precision-cap", type=int, default=default(None),
                        help="escalation ceiling in bits for certified "
                             "arithmetic (default 4096)")
    parser.add_argument("--log-level", default=default("warning"),
                        choices=("debug", "info", "warning", "error"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floorsum",
        description="Laboratory for representations n = [m^c] + [p^c] and "
                    "the exponential-sum machinery behind them.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    _global_options(parser)
    shared = argparse.ArgumentParser(add_help=False)
    _global_options(shared, suppress=True)
    subs = parser.add_subparsers(dest="subcommand", required=True,
                                 parser_class=lambda **kw: argparse.ArgumentParser(
                                     parents=[shared], **kw))

    rep = subs.add_parser("represent", help="find one representation of n")
    _add_common(rep)
    rep.add_argument("--n", type=int)
    rep.add_argument("--method", choices=("window", "brute", "both"),
                     default="both")
    rep.add_argument("--variant", choices=("plain", "tight"), default="plain")
    rep.set_defaults(func=cmd_represent)

    scan = subs.add_parser("scan", help="exceptional-set scan up to x-max")
    _add_common(scan)
    scan.add_argument("--x-max", type=int)
    scan.add_argument("--segment-size", type=int, default=DEFAULT_SEGMENT_SIZE)
    scan.add_argument("--workers", type=int, default=None)
    scan.add_argument("--checkpoints", type=_int_list, default=None,
                      help="comma-separated x values (default: decades)")
    scan.add_argument("--resume", action="store_true",
                      help="continue from scan_resume.bin in the output dir")
    scan.set_defaults(func=cmd_scan)

    exps = subs.add_parser("expsum", help="exponential-sum bound sweep")
    exps.add_argument("--c", type=_parse_c, action="append",
                      help="repeatable")
    exps.add_argument("--n", type=int, action="append", help="repeatable")
    exps.add_argument("--eps", type=float, default=0.005)
    exps.set_defaults(func=cmd_expsum)

    bil = subs.add_parser("bilinear", help="constrained bilinear form")
    _add_common(bil)
    bil.add_argument("--n", type=int)
    for name in ("m-lo", "m-hi", "k-lo", "k-hi", "h", "j"):
        bil.add_argument(f"--{name}", type=int)
    bil.add_argument("--coeff-m", default="constant",
                     choices=("constant", "zero", "moebius", "random"))
    bil.add_argument("--coeff-k", default="constant",
                     choices=("constant", "zero", "moebius", "random"))
    bil.add_argument("--seed", type=int, default=0)
    bil.add_argument("--weyl-q", type=int, default=None,
                     help="also run the shift comparison with this Q")
    bil.add_argument("--eps", type=float, default=0.005)
    bil.set_defaults(func=cmd_bilinear)

    sd = subs.add_parser("sdelta", help="near-integer count over (X, 5X/4]")
    _add_common(sd)
    sd.add_argument("--x", type=int)
    sd.add_argument("--delta", type=Fraction, default=None,
                    help="default X**(1-c)")
    sd.set_defaults(func=cmd_sdelta)

    fou = subs.add_parser("fourier", help="window Fourier coefficients")
    fou.add_argument("--window", choices=("phi", "psi"))
    fou.add_argument("--variant", choices=("plain", "tight"), default="plain")
    fou.add_argument("--c", type=_parse_c, default=None)
    fou.add_argument("--n", type=int, default=None)
    fou.add_argument("--delta", type=float, default=None)
    fou.add_argument("--eta", type=float, default=None)
    group = fou.add_mutually_exclusive_group()
    group.add_argument("--index", type=int)
    group.add_argument("--max-index", type=int)
    fou.set_defaults(func=cmd_fourier)

    vau = subs.add_parser("vaughan", help="type I/II decomposition check")
    _add_common(vau)
    vau.add_argument("--x", type=int, help="sum runs over (x, 2x]")
    vau.add_argument("--h", type=int)
    vau.add_argument("--j", type=int)
    vau.add_argument("--n", type=int, default=None,
                     help="residual modulus (default: derived from 2x)")
    vau.add_argument("--u", type=int, default=None)
    vau.add_argument("--v", type=int, default=None)
    vau.set_defaults(func=cmd_vaughan)

    cen = subs.add_parser("window-census", help="classify primes in (X, X1]")
    _add_common(cen)
    cen.add_argument("--n", type=int)
    cen.add_argument("--variant", choices=("plain", "tight"), default="plain")
    cen.add_argument("--collect", action="store_true",
                     help="also write accepted_primes.txt")
    cen.set_defaults(func=cmd_window_census)
    return parser


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part]


def _walk_parsers(parser: argparse.ArgumentParser):
    stack = [parser]
    while stack:
        current = stack.pop()
        yield current
        for action in current._actions:
            if isinstance(action, argparse._SubParsersAction):
                stack.extend(action.choices.values())


def _all_actions(parser: argparse.ArgumentParser) -> dict[str, argparse.Action]:
    """dest -> action over the main parser and every subparser."""
    actions: dict[str, argparse.Action] = {}
    for current in _walk_parsers(parser):
        for action in current._actions:
            if not isinstance(action, argparse._SubParsersAction) and \
                    action.dest not in ("help", "version", argparse.SUPPRESS):
                actions.setdefault(action.dest, action)
    return actions


def _convert_config_value(action: argparse.Action, raw: str):
    """Apply a flag's type/choices rules to a value from the config file."""
    if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
        lowered = raw.lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise DomainError(f"{action.dest}: expected a boolean, got {raw!r}")
    value = action.type(raw) if callable(action.type) else raw
    if action.choices is not None and value not in action.choices:
        raise DomainError(f"{action.dest}: {value!r} is not one of "
                          f"{sorted(action.choices)}")
    if isinstance(action, argparse._AppendAction):
        return [value]
    return value


def _apply_config(parser: argparse.ArgumentParser, path: str) -> None:
    actions = _all_actions(parser)
    converted = {}
    for key, raw in _read_config_file(path).items():
        if key not in actions:
            raise DomainError(f"unknown config key {key!r} in {path}")
        try:
            converted[key] = _convert_config_value(actions[key], raw)
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise DomainError(f"config key {key!r}: {exc}") from exc
    # Subparsers parse into a fresh namespace, so the defaults must be
    # planted on every parser, not just the top-level one.
    for current in _walk_parsers(parser):
        current.set_defaults(**converted)


def _check_required(parser: argparse.ArgumentParser,
                    args: argparse.Namespace) -> None:
    missing = [name.replace("_", "-")
               for name in _REQUIRED.get(args.subcommand, ())
               if getattr(args, name) in (None, [])]
    if missing:
        raise DomainError(
            f"{args.subcommand} needs --" + ", --".join(missing) +
            " (on the command line or in the config file)")
    if args.subcommand == "fourier" and \
            (args.index is None) == (args.max_index is None):
        raise DomainError("fourier needs exactly one of --index/--max-index")


def replay_argv(manifest: dict) -> list[str]:
    """Rebuild the command line a manifest describes.

    The caller appends its own --output-dir; running the result writes
    data files byte-identical to the original run's (the determinism
    contract; wall-clock timing columns are reproduced only in the sense
    of being present, their values are not deterministic).
    """
    argv = [manifest["subcommand"]]
    for key, value in sorted(manifest["config"].items()):
        flag = "--" + key.replace("_", "-")
        if value is None:
            continue
        if isinstance(value, bool):
            if value:
                argv.append(flag)
        elif key == "checkpoints":
            argv.extend([flag, ",".join(str(v) for v in value)])
        elif isinstance(value, list):
            for item in value:
                argv.extend([flag, str(item)])
        else:
            argv.extend([flag, str(value)])
    return argv


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        if "--config" in argv and argv.index("--config") + 1 < len(argv):
            _apply_config(parser, argv[argv.index("--config") + 1])
        args = parser.parse_args(argv)
        _check_required(parser, args)
        logging.basicConfig(level=args.log_level.upper(),
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except DomainError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IndeterminateFloorError, PrecisionCapError, SegmentAborted,
            QuadratureError) as exc:
        print(f"arithmetic indeterminacy: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
