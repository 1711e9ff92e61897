"""Random iterated function systems: probability vectors plus indexed map families.

Map families are stored as (log2 ratio, multiplicity) aggregates, never as
individual maps: the counterexample family has 2**(d*V_i) maps at level i,
so explicit enumeration is impossible beyond the first couple of levels, and
every formula downstream depends only on the multiset of ratios.  Geometry
(translation vectors, cylinder cubes) lives in :mod:`rifs_lab.cover`.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass

import numpy as np

from .frame import Frame, frame_from_doc
from .numerics import HybridNumber

#: Basel constant, the normalizer of the inverse-square probability vector.
INVERSE_SQUARE_C = math.pi ** 2 / 6

_PROB_SUM_TOL = 1e-12


class SpecValidationError(ValueError):
    """A config document that does not describe a valid system."""


def zeta_probability(n: int) -> float:
    """p_n = 1 / (C n^2) with C = pi^2/6, good to ~1e-16 relative."""
    if n < 1:
        raise ValueError("symbols are 1-indexed")
    return 1.0 / (INVERSE_SQUARE_C * n * n)


def zeta_tail(n: int) -> float:
    """Tail mass sum(p_k for k > n); lies strictly between 1/(C(n+1)) and 1/(Cn)."""
    if n < 0:
        raise ValueError("tail index must be nonnegative")
    if n == 0:
        return 1.0
    if n <= 10_000:
        partial = math.fsum(1.0 / (k * k) for k in range(1, n + 1))
        return (INVERSE_SQUARE_C - partial) / INVERSE_SQUARE_C
    # Euler-Maclaurin tail of sum 1/k^2: 1/n - 1/(2n^2) + 1/(6n^3) - 1/(30n^5)
    x = 1.0 / n
    tail2 = x - x * x / 2.0 + x ** 3 / 6.0 - x ** 5 / 30.0
    return tail2 / INVERSE_SQUARE_C


class ProbVector:
    """Probability vector over symbols 1, 2, ...

    Either a finite list or the inverse-square law p_n = 1/(C n^2).  The
    prefix CDF is cached and recomputed from scratch on growth so its values
    are a deterministic function of the requested length alone.
    """

    def __init__(self, kind: str, values: tuple[float, ...] | None = None):
        if kind not in ("finite", "inverse_square"):
            raise SpecValidationError(f"unknown probability kind {kind!r}")
        if kind == "finite":
            if not values:
                raise SpecValidationError("finite probabilities need at least one entry")
            if any(p < 0 for p in values):
                raise SpecValidationError("probabilities must be nonnegative")
            if not any(p > 0 for p in values):
                raise SpecValidationError("probabilities must not all be zero")
            total = math.fsum(values)
            if abs(total - 1.0) > _PROB_SUM_TOL:
                raise SpecValidationError(f"probabilities sum != 1 (got {total!r})")
        else:
            values = None
        self.kind = kind
        self.values = tuple(float(p) for p in values) if values is not None else None
        self._cdf: np.ndarray | None = None
        self._lock = threading.Lock()

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def probability(self, n: int) -> float:
        if n < 1:
            raise ValueError("symbols are 1-indexed")
        if self.kind == "inverse_square":
            return zeta_probability(n)
        return self.values[n - 1] if n <= len(self.values) else 0.0

    def support(self) -> list[int]:
        """Symbols with positive probability; finite kind only."""
        if self.kind != "finite":
            raise SpecValidationError("inverse-square support is all of the naturals")
        return [i + 1 for i, p in enumerate(self.values) if p > 0]

    def prefix_cdf(self, n: int) -> np.ndarray:
        """CDF over symbols 1..n, grown (never shrunk) on demand."""
        if self.kind == "finite":
            n = len(self.values)
        with self._lock:
            if self._cdf is None or len(self._cdf) < n:
                if self.kind == "finite":
                    self._cdf = np.cumsum(np.asarray(self.values, dtype=np.float64))
                else:
                    k = np.arange(1, n + 1, dtype=np.float64)
                    self._cdf = np.cumsum(1.0 / (INVERSE_SQUARE_C * k * k))
            return self._cdf[:n]

    def to_doc(self) -> dict:
        if self.kind == "finite":
            return {"kind": "finite", "values": list(self.values)}
        return {"kind": "inverse_square"}


@dataclass(frozen=True)
class MapAggregate:
    """A bundle of ``multiplicity`` similarity maps sharing one ratio."""

    log2_ratio: float
    multiplicity: int


@dataclass(frozen=True, eq=False)
class IFSDescriptor:
    """Metric description of one IFS: ratio aggregates or a frame level.

    Frame-generated descriptors carry the level data instead of aggregates:
    level i consists of 2**(d*V_i) maps, all with ratio 2**-(U_i+V_i), and
    those exponents outgrow floats long before the counts do.
    """

    aggregates: tuple[MapAggregate, ...] = ()
    frame: Frame | None = None
    level: int = 0
    d: int = 0

    @property
    def is_frame_generated(self) -> bool:
        return self.frame is not None

    @property
    def u(self) -> HybridNumber:
        return self.frame.entry(self.level).u

    @property
    def v(self) -> HybridNumber:
        return self.frame.entry(self.level).v

    def ratio_log2_magnitude(self) -> HybridNumber:
        """|log2 ratio| as a hybrid number (frame-generated: U_i + V_i)."""
        if not self.is_frame_generated:
            raise SpecValidationError("explicit descriptors carry per-aggregate ratios")
        return self.u.add(self.v)

    def map_count(self) -> HybridNumber:
        """Total number of maps.

        For frame-generated descriptors this is 2**(d*V_i), which stops being
        representable even in log form once V_i leaves float range; levels
        that deep raise rather than silently saturate.
        """
        if not self.is_frame_generated:
            return HybridNumber.from_int(sum(a.multiplicity for a in self.aggregates))
        v = self.v
        if v.is_exact and self.d * v.as_int() <= 64 * 1024:
            return HybridNumber.from_int(1 << (self.d * v.as_int()))
        vf = v.to_float()
        if not math.isfinite(self.d * vf):
            raise SpecValidationError(
                f"map count at level {self.level} exceeds representable range"
            )
        return HybridNumber.from_log2(self.d * vf)

    def max_log2_ratio(self) -> float:
        """log2 of the largest contraction ratio (the one closest to 1)."""
        if self.is_frame_generated:
            return -self.ratio_log2_magnitude().to_float()
        return max(a.log2_ratio for a in self.aggregates)


def counterexample_ifs(frame: Frame, d: int, i: int) -> IFSDescriptor:
    """Level-i member of the frame family on [0,1]^d.

    U_i single-map (corner) composition steps followed by V_i full-branching
    steps: 2**(d*V_i) maps, every one with contraction ratio 2**-(U_i+V_i).
    """
    if d < 1:
        raise SpecValidationError("ambient dimension d must be >= 1")
    if i < 1:
        raise SpecValidationError("family levels are 1-indexed")
    frame.entry(i)  # raises FrameDepthError when unavailable
    return IFSDescriptor(frame=frame, level=i, d=d)


@dataclass(frozen=True, eq=False)
class RIFSSpec:
    """A probability vector plus an indexed family of IFS descriptors."""

    probabilities: ProbVector
    kind: str  # "explicit" | "frame"
    ifs: tuple[IFSDescriptor, ...] = ()
    frame: Frame | None = None
    d: int = 0
    eta: float = 0.0

    @property
    def is_frame_family(self) -> bool:
        return self.kind == "frame"

    def descriptor(self, i: int) -> IFSDescriptor:
        if self.kind == "frame":
            return counterexample_ifs(self.frame, self.d, i)
        if not 1 <= i <= len(self.ifs):
            raise SpecValidationError(
                f"family has {len(self.ifs)} systems, index {i} requested"
            )
        return self.ifs[i - 1]

    def similarity_exponent(self, i: int) -> float:
        """d*V_i / (U_i + V_i) for frame families: the per-level exponent.

        Lies in (0, d) and, for minimal frames where V_i = i*U_i, equals
        d*i/(i+1), increasing to d.
        """
        if not self.is_frame_family:
            raise SpecValidationError("similarity exponents are a frame-family notion")
        desc = self.descriptor(i)
        denom = desc.u.add(desc.v)
        return self.d * (2.0 ** (desc.v.log2 - denom.log2))


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of the shared-alphabet check behind the dimension formula."""

    holds: bool
    reasons: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"holds": self.holds, "reasons": list(self.reasons)}


def check_bowen_hypothesis(spec: RIFSSpec, probe_levels: int = 8) -> HypothesisReport:
    """Do all systems carrying positive probability share one index set?

    With aggregate storage the checkable proxy is an equal total map count
    under a consistent indexing.  The ratio-boundedness condition for
    genuinely infinite alphabets cannot be instantiated here and is reported
    as not applicable.
    """
    reasons: list[str] = []
    if spec.is_frame_family:
        depth = max(2, min(probe_levels, max(len(spec.frame), 2)))
        base = spec.descriptor(1)
        for i in range(2, depth + 1):
            other = spec.descriptor(i)
            if other.v != base.v:
                reasons.append(
                    f"map counts differ between levels 1 and {i} "
                    f"({_count_label(base)} vs {_count_label(other)})"
                )
                break
        holds = not reasons
        if holds:
            reasons.append("probed levels share one map count; deeper levels unchecked")
    else:
        support = (
            spec.probabilities.support()
            if spec.probabilities.is_finite
            else list(range(1, len(spec.ifs) + 1))
        )
        counts = {}
        for i in support:
            counts[i] = sum(a.multiplicity for a in spec.descriptor(i).aggregates)
        distinct = sorted(set(counts.values()))
        if len(distinct) > 1:
            pairs = sorted(counts.items())
            reasons.append(
                "map counts differ across positive-probability systems: "
                + ", ".join(f"#{i}: {c}" for i, c in pairs)
            )
        holds = not reasons
    reasons.append("infinite-alphabet ratio condition: not applicable to finite systems")
    return HypothesisReport(holds=holds, reasons=tuple(reasons))


def _count_label(desc: IFSDescriptor) -> str:
    try:
        count = desc.map_count()
        if count.is_exact and count.as_int().bit_length() <= 64:
            return str(count.as_int())
        return f"2^{count.log2:.6g}"
    except SpecValidationError:
        return f"2^(d*V_{desc.level})"


# -- config ingestion and serialization ------------------------------------


def _default_eta(max_log2_ratio: float) -> float:
    # Halfway between the largest ratio and 1; strictly dominates every map.
    return (1.0 + 2.0 ** max_log2_ratio) / 2.0


def validate_spec(doc: dict) -> RIFSSpec:
    """Build an :class:`RIFSSpec` from a config document, enforcing invariants.

    Expected shape::

        {"probabilities": {"kind": "finite", "values": [...]} | {"kind": "inverse_square"},
         "family": {"kind": "explicit", "ifs": [{"maps": [{"log2_ratio": r,
                                                           "multiplicity": m}, ...]}, ...]}
                  | {"kind": "frame", "frame": <frame doc>, "d": k},
         "eta": <optional float>}
    """
    if not isinstance(doc, dict):
        raise SpecValidationError("config must be a JSON object")
    try:
        prob_doc = doc["probabilities"]
        family_doc = doc["family"]
    except KeyError as exc:
        raise SpecValidationError(f"config missing section {exc}") from exc

    if not isinstance(prob_doc, dict) or "kind" not in prob_doc:
        raise SpecValidationError("'probabilities' needs a 'kind'")
    if prob_doc["kind"] == "finite":
        values = prob_doc.get("values")
        if not isinstance(values, list):
            raise SpecValidationError("finite probabilities need a 'values' list")
        probs = ProbVector("finite", tuple(float(v) for v in values))
    else:
        probs = ProbVector(str(prob_doc["kind"]))

    if not isinstance(family_doc, dict) or "kind" not in family_doc:
        raise SpecValidationError("'family' needs a 'kind'")
    fam_kind = family_doc["kind"]

    if fam_kind == "explicit":
        raw_ifs = family_doc.get("ifs")
        if not isinstance(raw_ifs, list) or not raw_ifs:
            raise SpecValidationError("explicit family needs a nonempty 'ifs' list")
        if probs.kind == "inverse_square":
            raise SpecValidationError(
                "inverse-square probabilities put mass on every level; "
                "only a frame family provides one"
            )
        descriptors = []
        for idx, entry in enumerate(raw_ifs, start=1):
            maps = entry.get("maps") if isinstance(entry, dict) else None
            if not isinstance(maps, list) or not maps:
                raise SpecValidationError(f"system #{idx} needs a nonempty 'maps' list")
            aggs = []
            for m in maps:
                try:
                    r = float(m["log2_ratio"])
                    mult = int(m["multiplicity"])
                except (KeyError, TypeError, ValueError) as exc:
                    raise SpecValidationError(
                        f"system #{idx}: maps need 'log2_ratio' and 'multiplicity'"
                    ) from exc
                if r >= 0:
                    raise SpecValidationError(
                        f"system #{idx}: not a contraction (log2_ratio = {r})"
                    )
                if mult < 1:
                    raise SpecValidationError(f"system #{idx}: multiplicity must be >= 1")
                aggs.append(MapAggregate(r, mult))
            if sum(a.multiplicity for a in aggs) < 2:
                raise SpecValidationError(f"system #{idx}: needs at least 2 maps")
            descriptors.append(IFSDescriptor(aggregates=tuple(aggs)))
        if len(probs.values) > len(descriptors) and any(
            p > 0 for p in probs.values[len(descriptors):]
        ):
            raise SpecValidationError(
                "probability vector puts mass beyond the last system"
            )
        max_ratio = max(d.max_log2_ratio() for d in descriptors)
        eta = float(doc["eta"]) if "eta" in doc else _default_eta(max_ratio)
        if not 0.0 < eta < 1.0:
            raise SpecValidationError(f"eta must lie in (0, 1), got {eta}")
        if 2.0 ** max_ratio >= eta:
            raise SpecValidationError(
                f"eta = {eta} does not dominate the largest ratio 2^{max_ratio}"
            )
        return RIFSSpec(probabilities=probs, kind="explicit",
                        ifs=tuple(descriptors), eta=eta)

    if fam_kind == "frame":
        if "frame" not in family_doc:
            raise SpecValidationError("frame family needs a 'frame' document")
        frame = frame_from_doc(family_doc["frame"])
        d = family_doc.get("d")
        if not isinstance(d, int) or d < 1:
            raise SpecValidationError("frame family needs an integer dimension d >= 1")
        max_ratio = -(frame.entry(1).u.add(frame.entry(1).v).to_float())
        eta = float(doc["eta"]) if "eta" in doc else _default_eta(max_ratio)
        if not 0.0 < eta < 1.0:
            raise SpecValidationError(f"eta must lie in (0, 1), got {eta}")
        if probs.is_finite and len(probs.support()) > len(frame) and not frame.is_generated:
            raise SpecValidationError(
                "probability support extends beyond the explicit frame depth"
            )
        return RIFSSpec(probabilities=probs, kind="frame", frame=frame, d=d, eta=eta)

    raise SpecValidationError(f"unknown family kind {fam_kind!r}")


def spec_to_doc(spec: RIFSSpec) -> dict:
    """Inverse of :func:`validate_spec`; round-trips all fields bit-exactly."""
    doc: dict = {"probabilities": spec.probabilities.to_doc(), "eta": spec.eta}
    if spec.kind == "explicit":
        doc["family"] = {
            "kind": "explicit",
            "ifs": [
                {"maps": [
                    {"log2_ratio": a.log2_ratio, "multiplicity": a.multiplicity}
                    for a in desc.aggregates
                ]}
                for desc in spec.ifs
            ],
        }
    else:
        doc["family"] = {"kind": "frame", "frame": spec.frame.to_doc(), "d": spec.d}
    return doc


def load_spec(text: str) -> RIFSSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecValidationError(f"config is not valid JSON: {exc}") from exc
    return validate_spec(doc)
