"""Concrete geometry on [0,1]^d: cylinder cubes, covers, and point export.

Every map in play halves the cube and translates by half a 0/1 vector, so a
depth-m cylinder is the dyadic cube whose corner numerator in coordinate l
is the binary number reading bit l of the word's steps from most to least
significant.  Corners stay exact integers until emission.
"""

from __future__ import annotations

import io
import itertools
from dataclasses import dataclass

from .numerics import HybridNumber
from .pressure import BranchProfile, CoverageError

#: Default ceiling on enumerated words (not on depth: single-map runs are free).
DEFAULT_BUDGET = 2 ** 20


class BudgetError(RuntimeError):
    """Enumeration would exceed the word budget."""

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"enumeration needs {required} words, budget is {budget}; "
            f"rerun with a budget of at least {required}"
        )


class UnsupportedDimensionError(ValueError):
    """Point export beyond 3 coordinates."""


@dataclass(frozen=True)
class DyadicCube:
    """corner/2^level + [0, 2^-level]^d."""

    level: int
    corner: tuple[int, ...]

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("cube level must be nonnegative")
        top = 1 << self.level
        if any(not 0 <= c < top for c in self.corner):
            raise ValueError("corner numerators must lie in [0, 2^level)")

    @property
    def d(self) -> int:
        return len(self.corner)

    @property
    def side(self) -> float:
        return 2.0 ** (-self.level)

    def parent(self) -> "DyadicCube":
        if self.level == 0:
            raise ValueError("the unit cube has no parent")
        return DyadicCube(self.level - 1, tuple(c >> 1 for c in self.corner))


@dataclass(frozen=True)
class CylinderCode:
    """A refined word: one 0/1 vector per step, with per-step alphabet flags.

    Steps flagged as single-map (corner-only) must carry the all-zero
    vector; full steps may carry any vector in {0,1}^d.
    """

    word: tuple[tuple[int, ...], ...]
    full_step: tuple[bool, ...]

    def __post_init__(self):
        if len(self.word) != len(self.full_step):
            raise ValueError("one alphabet flag per step is required")
        if not self.word:
            raise ValueError("codes have at least one step")
        d = len(self.word[0])
        for k, (vec, full) in enumerate(zip(self.word, self.full_step), start=1):
            if len(vec) != d:
                raise ValueError(f"step {k}: mixed dimensions in word")
            if any(bit not in (0, 1) for bit in vec):
                raise ValueError(f"step {k}: entries must be bits")
            if not full and any(vec):
                raise ValueError(f"step {k}: single-map step must use the zero vector")

    @property
    def depth(self) -> int:
        return len(self.word)

    @property
    def d(self) -> int:
        return len(self.word[0])


def cylinder_to_cube(code: CylinderCode) -> DyadicCube:
    """Image of the unit cube under the word's composition.

    Bit l of step k contributes 2^(depth-k) to coordinate l's corner
    numerator: earlier steps are more significant.
    """
    m = code.depth
    corner = [0] * code.d
    for k, vec in enumerate(code.word, start=1):
        w = 1 << (m - k)
        for l, bit in enumerate(vec):
            if bit:
                corner[l] += w
    return DyadicCube(level=m, corner=tuple(corner))


def step_flags(profile: BranchProfile, depth: int) -> list[bool]:
    """Branching flag for refined steps 1..depth; needs exact run lengths."""
    if depth < 1:
        raise CoverageError("depth must be >= 1")
    flags: list[bool] = []
    for run in profile.runs:
        if not (run.flat_len.is_exact and run.branch_len.is_exact):
            raise CoverageError(
                "step enumeration needs exact run lengths; the schedule has "
                "been promoted to log form at this depth"
            )
        flags.extend([False] * run.flat_len.as_int())
        flags.extend([True] * run.branch_len.as_int())
        if len(flags) >= depth:
            return flags[:depth]
    raise CoverageError(
        f"profile covers {len(flags)} refined steps, depth {depth} requested"
    )


def enumerate_cylinders(
    profile: BranchProfile, depth: int, budget: int = DEFAULT_BUDGET
) -> list[DyadicCube]:
    """All depth-m cylinder cubes in lexicographic word order.

    The word count is 2^(d*B_m); the budget guards that count, not the
    depth, since single-map runs extend words for free.
    """
    flags = step_flags(profile, depth)
    d = profile.d
    branching = sum(flags)
    required = 2 ** (d * branching)
    if required > budget:
        raise BudgetError(required, budget)

    weights = [1 << (depth - k) for k in range(1, depth + 1)]
    base = tuple(0 for _ in range(d))
    corners: list[tuple[int, ...]] = [base]
    vectors = list(itertools.product((0, 1), repeat=d))
    for k, full in enumerate(flags):
        if not full:
            continue
        w = weights[k]
        corners = [
            tuple(c[l] + vec[l] * w for l in range(d))
            for c in corners
            for vec in vectors
        ]
    return [DyadicCube(level=depth, corner=c) for c in corners]


def osc_check(cubes: list[DyadicCube]) -> bool:
    """Pairwise-disjoint interiors: same-level dyadic cubes, distinct corners."""
    if not cubes:
        return True
    level = cubes[0].level
    if any(c.level != level for c in cubes):
        raise ValueError("cubes must share one level")
    return len({c.corner for c in cubes}) == len(cubes)


def box_exponents(
    profile: BranchProfile, depths: list[HybridNumber | int]
) -> list[tuple[HybridNumber | int, float]]:
    """(m, d*B_m/m) per requested depth, via log2 space for large m.

    B_m <= m always, so the result is clamped into [0, d]; the clamp only
    acts when log2 magnitudes are so large that their float ulp exceeds the
    true gap.
    """
    out = []
    for m in depths:
        hm = HybridNumber.from_int(m) if isinstance(m, int) else m
        bm = profile.branch_count_at(hm)
        e = 0.0 if bm.is_zero else profile.d * 2.0 ** (bm.log2 - hm.log2)
        out.append((m, min(e, float(profile.d))))
    return out


def emit_points(cubes: list[DyadicCube]) -> str:
    """CSV of cube corners and side lengths for external plotting (d <= 3)."""
    if not cubes:
        return "x,side\n"
    d = cubes[0].d
    if d > 3:
        raise UnsupportedDimensionError(f"point export supports d <= 3, got d = {d}")
    header = ",".join(["x", "y", "z"][:d]) + ",side"
    buf = io.StringIO()
    buf.write(header + "\n")
    for cube in cubes:
        scale = 2.0 ** (-cube.level)
        coords = ",".join(repr(c * scale) for c in cube.corner)
        buf.write(f"{coords},{cube.side!r}\n")
    return buf.getvalue()
