"""Scenery sampling and prefix statistics.

Sceneries are i.i.d. symbol sequences drawn by inverse CDF from a
:class:`~rifs_lab.rifs.ProbVector`.  Sampling is a pure function of
(seed, probabilities, length): the PCG64 stream is fixed by the seed and the
CDF is a deterministic function of its length, so regeneration is
bit-identical.  Tail draws past the symbol cap abort loudly instead of
being approximated.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .rifs import ProbVector, zeta_tail

#: Hard ceiling on sampled symbols; overridable via RIFS_LAB_MAX_SYMBOL.
DEFAULT_MAX_SYMBOL = 10 ** 6

_CDF_START = 1024


class RareTailError(RuntimeError):
    """A uniform draw landed beyond the CDF of the configured symbol cap."""

    def __init__(self, variate: float, cap: int):
        self.variate = variate
        self.cap = cap
        super().__init__(
            f"uniform draw {variate!r} falls in the tail beyond symbol {cap} "
            f"(tail mass ~{zeta_tail(cap):.3e}); raise RIFS_LAB_MAX_SYMBOL to allow"
        )


def max_symbol_cap() -> int:
    raw = os.environ.get("RIFS_LAB_MAX_SYMBOL")
    if raw is None:
        return DEFAULT_MAX_SYMBOL
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValueError(f"RIFS_LAB_MAX_SYMBOL must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise ValueError("RIFS_LAB_MAX_SYMBOL must be positive")
    return cap


@dataclass(frozen=True, eq=False)
class SceneryPath:
    """Finite prefix of a sampled scenery with its seed provenance."""

    symbols: np.ndarray  # int64, values >= 1
    seed: int

    def __post_init__(self):
        self.symbols.setflags(write=False)

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def horizon(self) -> int:
        return len(self.symbols)

    def symbol(self, i: int) -> int:
        """1-indexed access."""
        return int(self.symbols[i - 1])

    @cached_property
    def prefix_sums(self) -> np.ndarray:
        return np.cumsum(self.symbols)

    @cached_property
    def prefix_means(self) -> np.ndarray:
        return self.prefix_sums / np.arange(1, len(self.symbols) + 1)

    def prefix(self, k: int) -> "SceneryPath":
        if not 1 <= k <= len(self.symbols):
            raise ValueError(f"prefix length {k} outside 1..{len(self.symbols)}")
        return SceneryPath(self.symbols[:k], self.seed)


def sample_scenery(
    probs: ProbVector,
    length: int,
    seed: int,
    max_symbol: int | None = None,
) -> SceneryPath:
    """Draw ``length`` i.i.d. symbols by inverse CDF.

    For the inverse-square vector the prefix CDF is extended by doubling
    until it covers the largest uniform variate in the batch; a draw that
    would need a symbol past the cap raises :class:`RareTailError` naming
    the variate.
    """
    if length < 1:
        raise ValueError("scenery length must be >= 1")
    cap = max_symbol_cap() if max_symbol is None else max_symbol
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random(length)

    if probs.is_finite:
        cdf = probs.prefix_cdf(len(probs.values))
        # Draws past the accumulated total (possible when the vector sums to
        # 1 - epsilon) collapse onto the last symbol.
        symbols = np.searchsorted(cdf, u, side="left") + 1
        symbols = np.minimum(symbols, len(cdf))
    else:
        umax = float(u.max())
        n = min(_CDF_START, cap)
        while True:
            cdf = probs.prefix_cdf(n)
            if umax <= cdf[-1]:
                break
            if n >= cap:
                raise RareTailError(umax, cap)
            n = min(2 * n, cap)
        symbols = np.searchsorted(cdf, u, side="left") + 1
    return SceneryPath(symbols.astype(np.int64), seed)


def domination_start(path: SceneryPath) -> int:
    """Smallest N with prefix_sum(n) >= n for every n from N to the horizon.

    Symbols here are integers >= 1, which forces prefix sums to dominate
    their length everywhere, so N = 1; the scan stays general for other
    observable streams.  The guarantee is horizon-limited by construction.
    """
    sums = path.prefix_sums
    idx = np.arange(1, len(sums) + 1)
    bad = np.nonzero(sums < idx)[0]
    n = int(bad[-1]) + 2 if len(bad) else 1
    if np.all(path.symbols >= 1) and n != 1:
        raise AssertionError("prefix sums of symbols >= 1 must dominate from n = 1")
    return n


@dataclass(frozen=True)
class RecordPair:
    """One step of the record recursion.

    ``position`` is the first index achieving the running maximum over the
    window [1, window]; the value there sets the next window size.
    """

    window: int    # a_n
    position: int  # b_n


@dataclass(frozen=True)
class RecordSequences:
    """Windows and record positions extracted from a scenery prefix.

    Every returned pair n satisfies four clauses:
      1. position_n <= window_n, and window_1 is the domination start;
      2. the symbol at position_n is >= window_n;
      3. position_n is the first argmax over [1, window_n], so everything
         strictly before it is strictly smaller;
      4. windows and positions are strictly increasing across pairs.

    ``degenerate`` marks a prefix whose recursion stalled (repeated argmax or
    a window outrunning the running maximum) before ``count`` pairs; the
    returned pairs still satisfy all four clauses.  ``truncated`` marks a
    window that outran the horizon.
    """

    start: int
    pairs: tuple[RecordPair, ...]
    degenerate: bool
    truncated: bool


def record_sequences(path: SceneryPath, count: int) -> RecordSequences:
    """Greedy record recursion: window_1 = N, position = first argmax,
    next window = symbol at the record + 1."""
    if count < 1:
        raise ValueError("count must be >= 1")
    start = domination_start(path)
    sym = path.symbols
    horizon = len(sym)
    pairs: list[RecordPair] = []
    a = start
    prev_b = 0
    degenerate = truncated = False
    while len(pairs) < count:
        if a > horizon:
            truncated = True
            break
        b = int(np.argmax(sym[:a])) + 1
        value = int(sym[b - 1])
        if b <= prev_b or value < a:
            degenerate = True
            break
        pairs.append(RecordPair(window=a, position=b))
        prev_b = b
        a = value + 1
    return RecordSequences(
        start=start, pairs=tuple(pairs), degenerate=degenerate, truncated=truncated
    )


def birkhoff_average(path: SceneryPath, observable: Callable[[int], float]) -> np.ndarray:
    """Prefix means (1/n) * sum(f(symbol_k) for k <= n) for n = 1..horizon."""
    sym = path.symbols
    uniq, inverse = np.unique(sym, return_inverse=True)
    values = np.asarray([float(observable(int(s))) for s in uniq])[inverse]
    return np.cumsum(values) / np.arange(1, len(sym) + 1)


def scenery_csv(path: SceneryPath) -> str:
    """CSV with one row per prefix: n, symbol, prefix_sum, prefix_mean."""
    sums = path.prefix_sums
    buf = io.StringIO()
    buf.write("n,omega_n,prefix_sum,prefix_mean\n")
    for i, (s, ps) in enumerate(zip(path.symbols, sums), start=1):
        buf.write(f"{i},{int(s)},{int(ps)},{float(ps) / i!r}\n")
    return buf.getvalue()
