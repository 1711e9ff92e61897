"""Unrolled one-step schedules and the subsequence pressure bound.

Sampling a scenery and replacing each level-i system by its U_i single-map
steps followed by V_i full-branching steps yields a non-autonomous system
whose step-n partition sum has the closed form

    log sum over level-n refined words of (ratio)^t = (d*B_n - t*n) * log 2,

where B_n counts the branching steps among the first n.  A
:class:`BranchProfile` is the run-length encoding of that schedule and
answers cumulative-length and branch-count queries in hybrid arithmetic.

The decisive moments are the "special times" m = j_{b-1} + U at the end of
the record symbol's single-map run: there the normalized exponent d*B_m/m
collapses, which is what drives the limit-set dimension to zero.  A true
liminf is not computable at a finite horizon; everything here is evaluated
exactly along the special-time subsequence and reported as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .frame import Frame
from .numerics import HybridNumber, ZERO, exp2_saturating
from .sampler import RecordSequences, SceneryPath

_LN2 = math.log(2.0)

#: Slack added to the right-hand side when checking the per-time bound.
BOUND_TOL = 1e-12


class CoverageError(ValueError):
    """A query beyond the profile's covered schedule."""


@dataclass(frozen=True)
class ProfileRun:
    """One scenery symbol unrolled: single-map steps, then branching steps.

    Cumulative fields are accumulated forward during the build so that run
    boundaries never involve subtraction of near-equal log magnitudes.
    """

    symbol: int
    flat_len: HybridNumber      # U at this level
    branch_len: HybridNumber    # V at this level
    j_start: HybridNumber       # schedule length before this run
    j_end: HybridNumber         # schedule length through this run
    branch_start: HybridNumber  # branching steps before this run
    branch_end: HybridNumber    # branching steps through this run


@dataclass(frozen=True, eq=False)
class BranchProfile:
    """Run-length encoding of an unrolled schedule for one scenery prefix."""

    d: int
    runs: tuple[ProfileRun, ...]

    @property
    def run_count(self) -> int:
        return len(self.runs)

    def coverage(self) -> HybridNumber:
        """Total refined steps covered."""
        return self.runs[-1].j_end if self.runs else ZERO

    def j_of_run(self, i: int) -> HybridNumber:
        """Cumulative schedule length after run i; j(0) = 0."""
        if i == 0:
            return ZERO
        if not 1 <= i <= len(self.runs):
            raise CoverageError(f"profile has {len(self.runs)} runs, run {i} requested")
        return self.runs[i - 1].j_end

    def branch_upto_run(self, i: int) -> HybridNumber:
        """Branching steps among the first i runs."""
        if i == 0:
            return ZERO
        if not 1 <= i <= len(self.runs):
            raise CoverageError(f"profile has {len(self.runs)} runs, run {i} requested")
        return self.runs[i - 1].branch_end

    def branch_count_at(self, m: HybridNumber | int) -> HybridNumber:
        """B_m: branching steps among the first m refined steps.

        Exact for exact m; for log-form m the within-run offset is formed by
        log-space subtraction and clamped to the run, so the documented
        hybrid error bounds apply.
        """
        if isinstance(m, int):
            m = HybridNumber.from_int(m)
        if m.is_zero:
            return ZERO
        if not self.runs or m > self.runs[-1].j_end:
            raise CoverageError("queried step lies beyond the covered schedule")
        lo, hi = 0, len(self.runs) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if self.runs[mid].j_end < m:
                lo = mid + 1
            else:
                hi = mid
        run = self.runs[lo]
        offset = m.sub(run.j_start)  # steps taken inside this run, >= 1
        if offset <= run.flat_len:
            return run.branch_start
        inside = offset.sub(run.flat_len)
        if inside >= run.branch_len:
            return run.branch_end
        return run.branch_start.add(inside)


def build_branch_profile(path: SceneryPath, frame: Frame, d: int) -> BranchProfile:
    """Unroll a scenery prefix against a frame.

    Raises :class:`~rifs_lab.frame.FrameDepthError` naming the offending
    symbol when the frame cannot provide a level (explicit frames past their
    depth, generated frames past representable magnitude).
    """
    if d < 1:
        raise ValueError("ambient dimension d must be >= 1")
    runs: list[ProfileRun] = []
    j = ZERO
    b = ZERO
    for i, s in enumerate(path.symbols, start=1):
        try:
            lvl = frame.entry(int(s))
        except Exception as exc:
            raise type(exc)(f"position {i} (symbol {int(s)}): {exc}") from exc
        j_start, b_start = j, b
        j = j.add(lvl.u).add(lvl.v)
        b = b.add(lvl.v)
        runs.append(ProfileRun(int(s), lvl.u, lvl.v, j_start, j, b_start, b))
    return BranchProfile(d=d, runs=tuple(runs))


def refined_log_sum(profile: BranchProfile, m: HybridNumber | int, t: float) -> float:
    """Natural log of the step-m partition sum: (d*B_m - t*m) * ln 2.

    Exact in float terms while the quantities fit; for astronomically large
    m the value saturates to +-inf with the sign settled in log2 space.
    """
    if t < 0:
        raise ValueError("the exponent t must be >= 0")
    if isinstance(m, int):
        m = HybridNumber.from_int(m)
    if m.is_zero:
        raise CoverageError("partition sums start at step 1")
    bm = profile.branch_count_at(m)
    d = profile.d
    if m.log2 <= 980 and (bm.is_zero or bm.log2 <= 980):
        return (d * bm.to_float() - t * m.to_float()) * _LN2
    pos = -math.inf if bm.is_zero else math.log2(d) + bm.log2
    neg = -math.inf if t == 0.0 else math.log2(t) + m.log2
    return math.inf if pos >= neg else -math.inf


def coarse_log_sum(profile: BranchProfile, n_runs: int, t: float) -> float:
    """Aggregate n-symbol partition sum: sum over runs of per-level fitness.

    Equals :func:`refined_log_sum` at m = j_n; kept separate as a cross-check
    between the aggregate and unrolled views of the same system.
    """
    if not 0 <= n_runs <= profile.run_count:
        raise CoverageError(f"profile has {profile.run_count} runs")
    total = 0.0
    for run in profile.runs[:n_runs]:
        u = run.flat_len.to_float()
        v = run.branch_len.to_float()
        total += (-t * u + (profile.d - t) * v) * _LN2
    return total


@dataclass(frozen=True, eq=False)
class SpecialTime:
    """The refined step at the end of a record symbol's single-map run."""

    n: int                  # index into the record sequence, 1-based
    record_pos: int         # b_n
    record_symbol: int      # scenery value at b_n
    j_before: HybridNumber  # schedule length before the record's run
    m: HybridNumber         # j_before + U at the record's level


@dataclass(frozen=True)
class SpecialTimesResult:
    times: tuple[SpecialTime, ...]
    truncated: bool  # profile ended before some record position


def special_times(profile: BranchProfile, seqs: RecordSequences) -> SpecialTimesResult:
    """One special time per record pair the profile covers."""
    times: list[SpecialTime] = []
    truncated = False
    for n, pair in enumerate(seqs.pairs, start=1):
        b = pair.position
        if b > profile.run_count:
            truncated = True
            break
        j_before = profile.j_of_run(b - 1)
        run = profile.runs[b - 1]
        times.append(
            SpecialTime(
                n=n,
                record_pos=b,
                record_symbol=run.symbol,
                j_before=j_before,
                m=j_before.add(run.flat_len),
            )
        )
    return SpecialTimesResult(times=tuple(times), truncated=truncated)


@dataclass(frozen=True)
class BoundCheck:
    """Per-time comparison of the normalized log sum against its budget.

    ``lhs`` is (1/m) log of the step-m partition sum and ``rhs`` is
    -t*log2 + j_before*log2/m.  ``ratio`` is U_record/j_before (inf at the
    first record, whose prefix is empty); it blowing up is what crushes the
    exponent.
    """

    lhs: float
    rhs: float
    holds: bool
    ratio: float
    exponent: float  # d*B_m/m at this time

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "ratio": self.ratio if math.isfinite(self.ratio) else repr(self.ratio),
            "exponent": self.exponent,
        }


def _log2_quotient(num: HybridNumber, den: HybridNumber) -> float:
    """num/den as a float via log2 space; 0.0 for a zero numerator."""
    if num.is_zero:
        return 0.0
    return 2.0 ** (num.log2 - den.log2)


def time_exponent(profile: BranchProfile, st: SpecialTime) -> float:
    """d*B_m/m at a special time.

    B_m here is the branching total of the runs before the record: the
    record's own run contributes only single-map steps up to m.
    """
    bm = profile.branch_upto_run(st.record_pos - 1)
    if bm.is_zero:
        return 0.0
    return profile.d * _log2_quotient(bm, st.m)


def subsequence_bound_check(profile: BranchProfile, st: SpecialTime, t: float) -> BoundCheck:
    """Check (1/m) log sum <= -t log2 + j_before log2 / m at one special time."""
    if t < 0:
        raise ValueError("the exponent t must be >= 0")
    e = time_exponent(profile, st)
    lhs = (e - t) * _LN2
    rhs = (-t + _log2_quotient(st.j_before, st.m)) * _LN2
    run = profile.runs[st.record_pos - 1]
    if st.j_before.is_zero:
        ratio = math.inf
    else:
        ratio = exp2_saturating(run.flat_len.log2 - st.j_before.log2)
    return BoundCheck(lhs=lhs, rhs=rhs, holds=lhs <= rhs + BOUND_TOL, ratio=ratio, exponent=e)


def ratio_floor_holds(profile: BranchProfile, st: SpecialTime, frame: Frame) -> bool:
    """Exact check of U_record/j_before >= V_{record-1}/2 (records past the first).

    Compared as 2*U_record >= j_before * V_{record-1} in hybrid arithmetic,
    so it is exact while the operands are exact.
    """
    if st.record_symbol < 2:
        raise ValueError("the floor involves the level below the record; need symbol >= 2")
    if st.j_before.is_zero:
        return True
    u_rec = profile.runs[st.record_pos - 1].flat_len
    v_prev = frame.entry(st.record_symbol - 1).v
    return u_rec.scale(2) >= st.j_before.mul(v_prev)


class InconclusiveEstimateError(RuntimeError):
    """No special time was computable at this horizon."""


def dim_upper_estimate(profile: BranchProfile, seqs: RecordSequences,
                       t_tol: float = 1e-9) -> float:
    """Subsequence upper-bound estimate: min over special times of d*B_m/m.

    At each time m the normalized log sum (d*B_m/m - t) log 2 crosses zero
    at exactly t = d*B_m/m, so the crossing exponent has a closed form and
    ``t_tol`` only caps the reported precision (the result is well inside
    it).  This is a finite-horizon proxy, exact along the special-time
    subsequence; it is an upper-bound witness, not a liminf.
    """
    if t_tol <= 0:
        raise ValueError("t_tol must be positive")
    result = special_times(profile, seqs)
    if not result.times:
        raise InconclusiveEstimateError(
            "no special times: records outran the covered schedule"
        )
    return min(time_exponent(profile, st) for st in result.times)
