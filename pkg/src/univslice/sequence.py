"""Canonical sorted-sequence model and the two partitioning paradigms."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import EmptyInput, NotStrictlyIncreasing, UniverseTooSmall

MAX_U32 = 2**32 - 1


@dataclass(frozen=True, eq=False)
class SortedSequence:
    """Strictly increasing 32-bit integers with an inclusive bound ``u``.

    Build through :func:`validate_sequence`; the constructor trusts its
    input. ``values`` is a read-only ``uint32`` array.
    """

    values: np.ndarray
    u: int

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SortedSequence):
            return NotImplemented
        return self.u == other.u and np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        return f"SortedSequence(n={self.n}, u={self.u})"


def validate_sequence(raw: Sequence[int] | np.ndarray, u: int | None = None) -> SortedSequence:
    """Check ``raw`` and wrap it. ``u`` defaults to the maximum value."""
    arr = np.asarray(raw)
    if arr.size == 0:
        raise EmptyInput("sequence must hold at least one value")
    if arr.ndim != 1:
        raise ValueError("sequence must be one-dimensional")
    if arr.dtype.kind not in "iu":
        raise TypeError(f"integer values required, got {arr.dtype}")
    if arr.dtype.kind == "i" and arr.min() < 0:
        raise ValueError("values must be non-negative")
    if int(arr.max()) > MAX_U32:
        raise ValueError("values must fit in 32 bits")
    values = arr.astype(np.uint32)
    bad = np.flatnonzero(values[1:] <= values[:-1])
    if bad.size:
        raise NotStrictlyIncreasing(int(bad[0]) + 1)
    last = int(values[-1])
    if u is None:
        u = last
    if u > MAX_U32:
        raise UniverseTooSmall(f"universe {u} exceeds 2^32 - 1")
    if u < last:
        raise UniverseTooSmall(f"universe {u} below maximum value {last}")
    values.setflags(write=False)
    return SortedSequence(values, int(u))


@dataclass(frozen=True)
class Partitioning:
    parts: list[np.ndarray]
    mode: Literal["by-cardinality", "by-universe"]
    parameter: int
    sizes: list[int] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "sizes", [len(p) for p in self.parts])

    def __len__(self) -> int:
        return len(self.parts)

    def as_lists(self) -> list[list[int]]:
        return [p.tolist() for p in self.parts]

    def flatten(self) -> np.ndarray:
        if not self.parts:
            return np.empty(0, dtype=np.uint32)
        return np.concatenate(self.parts)


def partition_by_cardinality(seq: SortedSequence, block: int) -> Partitioning:
    """Consecutive groups of ``block`` values; only the last may be shorter."""
    if block < 1:
        raise ValueError("partition size must be positive")
    v = seq.values
    parts = [v[i:i + block] for i in range(0, len(v), block)]
    return Partitioning(parts, "by-cardinality", block)


def partition_by_universe(seq: SortedSequence, span: int) -> Partitioning:
    """Group values by ``value // span``; empty spans are kept."""
    if span < 1:
        raise ValueError("span must be positive")
    count = -(-(seq.u + 1) // span)
    bounds = np.arange(count + 1, dtype=np.int64) * span
    cuts = np.searchsorted(seq.values, bounds, side="left")
    v = seq.values
    parts = [v[cuts[k]:cuts[k + 1]] for k in range(count)]
    return Partitioning(parts, "by-universe", span)


def density(seq: SortedSequence) -> float:
    """List size over its maximum value; the list ``<0>`` counts as 1.0."""
    last = int(seq.values[-1])
    if last == 0:
        return 1.0
    return seq.n / last
