"""Intervals, partitions, sample-point rules and the fixed-order reduction.

Everything here is immutable; partitions keep their breakpoints in a
read-only numpy array so cells can be handed to vectorized code directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidArgument

# distinct breakpoints closer than this (relative to |I|) form a degenerate cell
DEGENERATE_REL = 1e-15


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise InvalidArgument(f"interval bounds must be finite, got [{lo}, {hi}]")
        if lo > hi:
            raise InvalidArgument(f"interval lo > hi: [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __str__(self):
        return f"[{self.lo!r}, {self.hi!r}]"


class Partition:
    """Ordered breakpoints ``x_0 < x_1 < ... < x_n`` of a base interval."""

    __slots__ = ("base", "_x")

    def __init__(self, base: Interval, breakpoints):
        x = np.array(breakpoints, dtype=float)
        if x.ndim != 1 or x.size < 2:
            raise InvalidArgument("a partition needs at least two breakpoints")
        if x[0] != base.lo or x[-1] != base.hi:
            raise InvalidArgument(
                f"breakpoints must start at {base.lo!r} and end at {base.hi!r}"
            )
        gaps = np.diff(x)
        if np.any(gaps <= 0):
            raise InvalidArgument("breakpoints must be strictly increasing")
        if np.any(gaps < DEGENERATE_REL * base.width()):
            raise InvalidArgument("degenerate cell: breakpoints closer than 1e-15*|I|")
        x.flags.writeable = False
        self.base = base
        self._x = x

    @property
    def breakpoints(self) -> np.ndarray:
        return self._x

    @property
    def n(self) -> int:
        return self._x.size - 1

    @property
    def lo(self) -> np.ndarray:
        return self._x[:-1]

    @property
    def hi(self) -> np.ndarray:
        return self._x[1:]

    def widths(self) -> np.ndarray:
        return np.diff(self._x)

    @property
    def mesh(self) -> float:
        return float(np.max(self.widths()))

    def cell(self, k: int) -> Interval:
        return Interval(self._x[k], self._x[k + 1])

    def cells(self):
        return [self.cell(k) for k in range(self.n)]

    def refines(self, other: "Partition") -> bool:
        return self.base == other.base and bool(np.all(np.isin(other._x, self._x)))

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.base == other.base and np.array_equal(self._x, other._x)

    def __hash__(self):
        return hash((self.base, self._x.tobytes()))

    def __repr__(self):
        return f"Partition(base={self.base}, n={self.n}, mesh={self.mesh:.3g})"


def uniform_partition(base: Interval, n: int) -> Partition:
    """Split ``base`` into ``n`` equal cells; the last breakpoint is ``base.hi`` exactly."""
    if int(n) != n or n < 1:
        raise InvalidArgument(f"n must be a positive integer, got {n!r}")
    n = int(n)
    x = base.lo + base.width() * (np.arange(n + 1) / n)
    x[0] = base.lo
    x[-1] = base.hi
    return Partition(base, x)


def common_refinement(p: Partition, q: Partition) -> Partition:
    if p.base != q.base:
        raise InvalidArgument(f"partitions of different intervals: {p.base} vs {q.base}")
    # np.union1d sorts and drops exact duplicates
    return Partition(p.base, np.union1d(p.breakpoints, q.breakpoints))


@dataclass(frozen=True)
class SamplePointRule:
    kind: str
    seed: Optional[int] = None

    KINDS = ("left", "right", "mid", "seeded")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InvalidArgument(f"unknown sample-point rule {self.kind!r}")
        if (self.kind == "seeded") != (self.seed is not None):
            raise InvalidArgument("a seed is required for, and only for, the seeded rule")

    @classmethod
    def parse(cls, text: str) -> "SamplePointRule":
        """Parse ``left``, ``right``, ``mid`` or ``seeded:<int>``."""
        name, _, arg = text.strip().lower().partition(":")
        if name == "seeded":
            try:
                return cls("seeded", int(arg))
            except ValueError:
                raise InvalidArgument(f"bad seed in rule {text!r}") from None
        if arg:
            raise InvalidArgument(f"rule {name!r} takes no argument")
        return cls(name)

    def __str__(self):
        return f"seeded:{self.seed}" if self.kind == "seeded" else self.kind


LEFT = SamplePointRule("left")
RIGHT = SamplePointRule("right")
MID = SamplePointRule("mid")


def seeded(seed: int) -> SamplePointRule:
    return SamplePointRule("seeded", int(seed))


_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)


def _splitmix64(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = z + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def unit_hash(seed: int, index, lo, hi) -> np.ndarray:
    """Deterministic pseudo-uniform values in [0, 1) keyed on seed, index and cell bounds."""
    lo = np.ascontiguousarray(lo, dtype=float)
    hi = np.ascontiguousarray(hi, dtype=float)
    idx = np.asarray(index, dtype=np.int64).astype(np.uint64)
    z = _splitmix64(np.full(lo.shape, np.uint64(seed & 0xFFFFFFFFFFFFFFFF)))
    z = _splitmix64(z ^ idx)
    z = _splitmix64(z ^ lo.view(np.uint64))
    z = _splitmix64(z ^ hi.view(np.uint64))
    return (z >> np.uint64(11)).astype(float) * 2.0**-53


def sample_points(rule: SamplePointRule, lo, hi, index=None) -> np.ndarray:
    """Vectorized ``sample_point`` over cells ``[lo[k], hi[k]]``."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if rule.kind == "left":
        return lo.copy()
    if rule.kind == "right":
        return hi.copy()
    if rule.kind == "mid":
        return np.minimum(np.maximum(0.5 * (lo + hi), lo), hi)
    if index is None:
        index = np.arange(lo.size)
    u = unit_hash(rule.seed, index, lo, hi)
    return np.minimum(lo + u * (hi - lo), hi)


def sample_point(rule: SamplePointRule, cell_index: int, cell: Interval) -> float:
    return float(sample_points(rule, [cell.lo], [cell.hi], [cell_index])[0])


def pairwise_sum(values) -> float:
    """Sum in a fixed binary-tree order.

    The tree depends only on ``len(values)``, so the result is bit-identical
    however the per-cell terms were produced.
    """
    a = np.asarray(values, dtype=float).ravel()
    if a.size == 0:
        return 0.0
    while a.size > 1:
        if a.size & 1:
            a = np.append(a, 0.0)
        a = a[0::2] + a[1::2]
    return float(a[0])
