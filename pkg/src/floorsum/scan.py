"""Segmented scanner for the exceptional set: integers with no
representation n = [m**c] + [p**c] (m a positive integer, p prime).

The scan inverts the representation map instead of testing each n: for
every prime p (in ascending floor order) it marks all sums
[p**c] + [m**c] landing in the segment, where the admissible m form one
contiguous run because m -> [m**c] is strictly increasing.  Run
endpoints come from certified root extraction and are then re-verified
against the exactly computed floor table, so the achievability bit
vector is exact, never probabilistic.

Floors [t**c] are produced in bulk by float64 powers with an exact-repair
pass: any value whose fractional part sits within a safety margin of an
integer is recomputed with certified arithmetic.  The float error at
these magnitudes is orders of magnitude below the margin, so non-suspect
floors are already exact.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import primes
from .certified import count_powers_below, floor_power
from .errors import DomainError, IndeterminateFloorError, PrecisionCapError, SegmentAborted
from .exponent import Exponent

__all__ = [
    "ScanSegment",
    "ScanReport",
    "FitResult",
    "power_floors",
    "scan_segment",
    "exceptional_counts",
    "fit_exponent",
    "DEFAULT_SEGMENT_SIZE",
    "RETENTION_CAP",
    "SCAN_RANGE_CAP",
]

logger = logging.getLogger(__name__)

DEFAULT_SEGMENT_SIZE = 1 << 22
RETENTION_CAP = 1_000_000
SCAN_RANGE_CAP = 1 << 34          # bulk float64 floors need t**c < 2**52
_FLOAT_FRAC_MARGIN = 1e-5


def power_floors(count: int, c: Exponent) -> np.ndarray:
    """Exact [t**c] for t = 1..count as an int64 array.

    Bulk float64 evaluation with certified repair of suspicious entries
    (fractional part within the margin of 0 or 1), then monotonicity and
    bracketing checks on the result.
    """
    if count <= 0:
        return np.zeros(0, dtype=np.int64)
    cf = float(c.value)
    ts = np.arange(1.0, count + 1.0)
    vals = np.power(ts, cf)
    if vals[-1] >= 2.0 ** 52:
        raise DomainError(f"floors beyond 2**52 need the certified path "
                          f"(count={count}, c={cf})")
    floors = np.floor(vals).astype(np.int64)
    frac = vals - floors
    suspect = np.flatnonzero((frac < _FLOAT_FRAC_MARGIN)
                             | (frac > 1.0 - _FLOAT_FRAC_MARGIN))
    for i in suspect:
        floors[i] = floor_power(int(i) + 1, c).expect()
    if np.any(np.diff(floors) < (1 if cf > 1 else 0)):
        raise SegmentAborted(0, count, "floor table lost monotonicity")
    return floors


@dataclass(frozen=True)
class ScanSegment:
    """Achievability over (lo, hi]: bit i covers n = lo + 1 + i."""

    lo: int
    hi: int
    achievable: np.ndarray

    @property
    def exceptional_count(self) -> int:
        return int(self.achievable.size - self.achievable.sum())

    def exceptional_values(self) -> np.ndarray:
        return self.lo + 1 + np.flatnonzero(~self.achievable)


def _run_start(limit: int, c: Exponent, floors: np.ndarray) -> int:
    """Least m with [m**c] > limit, certified then verified on the table."""
    if limit < 1:
        return 1
    m = count_powers_below(limit + 1, c) + 1
    if m <= floors.size and floors[m - 1] <= limit:
        raise SegmentAborted(0, 0, f"run start {m} disagrees with floor table")
    if m >= 2 and floors[m - 2] > limit:
        raise SegmentAborted(0, 0, f"run start {m} not minimal")
    return m


def scan_segment(lo: int, hi: int, c, *,
                 floors: np.ndarray | None = None) -> ScanSegment:
    """Exact achievability bit vector for (lo, hi]."""
    c = Exponent.coerce(c)
    if not (0 <= lo < hi <= SCAN_RANGE_CAP):
        raise DomainError(f"bad segment ({lo}, {hi}]")
    try:
        m_cap = count_powers_below(hi, c)       # largest m with [m**c] <= hi - 1
        if floors is None:
            floors = power_floors(m_cap, c)
        elif floors.size < m_cap:
            raise DomainError(f"floor table covers {floors.size} < {m_cap} values")
        achievable = np.zeros(hi - lo, dtype=bool)
        for p in primes.primes_in(0, m_cap):
            fp = int(floors[p - 1])
            if fp > hi - 1:
                break
            m_start = _run_start(lo - fp, c, floors)
            m_end = count_powers_below(hi - fp + 1, c)   # largest [m**c] <= hi - fp
            if m_end < m_start:
                continue
            if floors[m_end - 1] > hi - fp or (m_end < floors.size
                                               and floors[m_end] <= hi - fp):
                raise SegmentAborted(lo, hi, f"run end {m_end} disagrees "
                                             "with floor table")
            achievable[floors[m_start - 1:m_end] + (fp - lo - 1)] = True
        return ScanSegment(lo=lo, hi=hi, achievable=achievable)
    except (IndeterminateFloorError, PrecisionCapError) as exc:
        raise SegmentAborted(lo, hi, f"indeterminate floor: {exc}") from exc


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residuals: tuple[float, ...]   # log10 E - fit, per checkpoint used


@dataclass(frozen=True)
class ScanReport:
    c: Exponent
    x_max: int
    checkpoints: tuple[tuple[int, int], ...]   # (x, E_c(x)) cumulative
    exceptional_list: tuple[int, ...] | None   # None once past retention cap
    largest_exception: int | None
    fitted_slope: float | None
    fit: FitResult | None
    aborted_segments: tuple[tuple[int, int], ...]
    note: str

    @property
    def theorem2_exponent(self) -> float:
        """3 (1 - 1/c), the proved exponent for the exceptional count."""
        return float(3 * (1 - Fraction(1, 1) / self.c.value))


def fit_exponent(checkpoints, window: tuple[int, int] | None = None) -> FitResult:
    """Least-squares slope of log10 E against log10 x over a window.

    Accepts a ScanReport or an iterable of (x, count) pairs; only
    checkpoints with nonzero counts inside the window enter the fit,
    and fewer than 3 such points is an error ("exceptional set empty in
    window" when every count is zero).
    """
    if isinstance(checkpoints, ScanReport):
        checkpoints = checkpoints.checkpoints
    pts = [(x, e) for x, e in checkpoints
           if window is None or window[0] <= x <= window[1]]
    live = [(x, e) for x, e in pts if e > 0]
    if not live and pts:
        raise DomainError("exceptional set empty in window")
    if len(live) < 3:
        raise DomainError(f"need at least 3 nonzero checkpoints to fit a "
                          f"slope, have {len(live)}")
    lx = np.log10([x for x, _ in live])
    le = np.log10([e for _, e in live])
    slope, intercept = np.polyfit(lx, le, 1)
    residuals = tuple(float(r) for r in le - (slope * lx + intercept))
    return FitResult(slope=float(slope), intercept=float(intercept),
                     residuals=residuals)


_SCAN_NOTE = ("fitted slope is a finite-range trend indicator only: the "
              "bound E_c(x) << x**(3(1-1/c)+eps) is asymptotic and carries "
              "an ineffective constant, so no desk-scale scan can confirm "
              "or refute it")


def _default_checkpoints(x_max: int) -> list[int]:
    grid = []
    x = 10
    while x < x_max:
        grid.append(x)
        x *= 10
    grid.append(x_max)
    return grid


def _scan_task(args: tuple[int, int, str]) -> tuple[int, int, int, list[int], bool]:
    """Worker body: (lo, hi, count, exceptional values, aborted)."""
    lo, hi, c_text = args
    c = Exponent.from_string(c_text)
    try:
        seg = scan_segment(lo, hi, c)
    except SegmentAborted:
        return lo, hi, 0, [], True
    return lo, hi, seg.exceptional_count, seg.exceptional_values().tolist(), False


class _Resume:
    """Atomic binary checkpoint for interrupted scans.

    Layout: an 8-byte magic-plus-version header, then little-endian
    unsigned 64-bit fields throughout: c numerator, c denominator, x_max
    (the identity key), done_through, running count, largest+1 (0 before
    any exception is seen), a retained flag, the aborted-segment count
    followed by (lo, hi) pairs, the checkpoint count followed by
    (x, count) pairs, and, when the retained flag is set, the exceptional
    value count followed by the values themselves.
    """

    MAGIC = b"FSMSCAN1"

    def __init__(self, path: str | None, c: Exponent, x_max: int):
        self.path = path
        self.key = (c.value.numerator, c.value.denominator, x_max)

    def load(self) -> dict | None:
        if not self.path or not os.path.exists(self.path):
            return None
        with open(self.path, "rb") as fh:
            raw = fh.read()
        if len(raw) < 8 or raw[:8] != self.MAGIC:
            raise DomainError(f"resume file {self.path} has an unrecognized "
                              f"header; refusing to resume from it")
        fields = np.frombuffer(raw, dtype="<u8", offset=8)
        pos = 0

        def take(count: int) -> np.ndarray:
            nonlocal pos
            if pos + count > len(fields):
                raise DomainError(f"resume file {self.path} is truncated")
            out = fields[pos:pos + count]
            pos += count
            return out

        key = tuple(int(v) for v in take(3))
        if key != self.key:
            raise DomainError(
                f"resume file {self.path} was written for "
                f"c={key[0]}/{key[1]}, x_max={key[2]}; this run has "
                f"c={self.key[0]}/{self.key[1]}, x_max={self.key[2]}")
        done_through, running, largest_plus1, retained = \
            (int(v) for v in take(4))
        aborted = [(int(lo), int(hi))
                   for lo, hi in take(2 * int(take(1)[0])).reshape(-1, 2)]
        partial = {int(x): int(count)
                   for x, count in take(2 * int(take(1)[0])).reshape(-1, 2)}
        values = ([int(v) for v in take(int(take(1)[0]))]
                  if retained else None)
        return {"done_through": done_through, "running": running,
                "largest": largest_plus1 - 1 if largest_plus1 else None,
                "values": values, "aborted": aborted, "partial": partial}

    def save(self, state: dict) -> None:
        if not self.path:
            return
        values = state["values"]
        fields = [*self.key, state["done_through"], state["running"],
                  0 if state["largest"] is None else state["largest"] + 1,
                  0 if values is None else 1,
                  len(state["aborted"])]
        for lo, hi in state["aborted"]:
            fields.extend((lo, hi))
        fields.append(len(state["partial"]))
        for x in sorted(state["partial"]):
            fields.extend((x, state["partial"][x]))
        if values is not None:
            fields.append(len(values))
            fields.extend(values)
        tmp = f"{self.path}.tmp"
        with open(tmp, "wb") as fh:
            fh.write(self.MAGIC)
            fh.write(np.asarray(fields, dtype="<u8").tobytes())
        os.replace(tmp, self.path)


def exceptional_counts(x_max: int, c, checkpoints=None, *,
                       segment_size: int = DEFAULT_SEGMENT_SIZE,
                       workers: int | None = None,
                       resume_path: str | None = None,
                       retention_cap: int = RETENTION_CAP) -> ScanReport:
    """Cumulative E_c(x) at each checkpoint, by segmented scan.

    Segments are independent work units (optionally spread over a process
    pool) merged in range order, so the report is identical at any worker
    count.  Aborted segments are recorded and their counts never
    fabricated; checkpoints at or beyond an aborted segment are lower
    bounds and the report says so in its note.
    """
    c = Exponent.coerce(c)
    if not (2 <= x_max <= SCAN_RANGE_CAP):
        raise DomainError(f"x_max must lie in [2, {SCAN_RANGE_CAP}]")
    grid = sorted(set(checkpoints)) if checkpoints else _default_checkpoints(x_max)
    if any(not (0 < x <= x_max) for x in grid):
        raise DomainError(f"checkpoints must lie in (0, {x_max}]")
    if grid[-1] != x_max:
        grid.append(x_max)

    bounds = sorted({0, x_max, *grid,
                     *range(segment_size, x_max, segment_size)})
    tasks = [(bounds[i], bounds[i + 1], str(c.value))
             for i in range(len(bounds) - 1)]

    resume = _Resume(resume_path, c, x_max)
    state = resume.load() if resume_path else None
    done_through = 0
    running = 0
    values: list[int] | None = []
    largest: int | None = None
    aborted: list[tuple[int, int]] = []
    partial: dict[int, int] = {}
    if state:
        done_through = state["done_through"]
        running = state["running"]
        values = state["values"]          # None once the cap was passed
        largest = state["largest"]
        aborted = [tuple(seg) for seg in state["aborted"]]
        partial = {int(k): v for k, v in state["partial"].items()}
        logger.info("resuming scan at %d with %d exceptions so far",
                    done_through, running)
    pending = [t for t in tasks if t[0] >= done_through]
    grid_set = set(grid)

    def reduce_one(lo: int, hi: int, count: int, vals: list[int],
                   was_aborted: bool) -> None:
        nonlocal running, values, largest, done_through
        if was_aborted:
            aborted.append((lo, hi))
            logger.warning("segment (%d, %d] aborted; counts beyond %d are "
                           "lower bounds", lo, hi, lo)
        else:
            running += count
            if vals:
                largest = max(largest or 0, vals[-1])
                if values is not None:
                    values.extend(vals)
                    if len(values) > retention_cap:
                        values = None
        done_through = hi
        if hi in grid_set:
            partial[hi] = running
        resume.save({"done_through": done_through, "running": running,
                     "values": values, "largest": largest,
                     "aborted": aborted, "partial": partial})

    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for result in pool.map(_scan_task, pending):
                reduce_one(*result)
    else:
        for task in pending:
            reduce_one(*_scan_task(task))

    marks = tuple((x, partial[x]) for x in grid)
    note = _SCAN_NOTE
    if aborted:
        note += ("; aborted segments: "
                 + ", ".join(f"({lo}, {hi}]" for lo, hi in aborted)
                 + " (affected checkpoints are lower bounds)")
    try:
        fit = fit_exponent(marks)
    except DomainError:
        fit = None
    return ScanReport(c=c, x_max=x_max, checkpoints=marks,
                      exceptional_list=tuple(values) if values is not None else None,
                      largest_exception=largest,
                      fitted_slope=fit.slope if fit else None, fit=fit,
                      aborted_segments=tuple(aborted), note=note)
