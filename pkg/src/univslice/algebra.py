"""Representation-generic intersection drivers.

Two paradigms: candidate propagation over value cursors (lists split by
cardinality, probed with ``next_geq``) and partition matching over
partition cursors (lists split by universe, intersected container by
container).
"""
from __future__ import annotations

from bisect import bisect_left
from typing import Any, Callable, Protocol, Sequence

import numpy as np

from .errors import BufferTooSmall


class ValueCursor(Protocol):
    def next(self) -> int | None: ...

    def next_geq(self, x: int) -> int | None: ...

    def current(self) -> int | None: ...


class PartitionCursor(Protocol):
    def id(self) -> int: ...

    def next(self) -> None: ...

    def advance(self, target: int) -> None: ...

    def at_end(self) -> bool: ...

    def payload(self) -> Any: ...


class ListPartitionCursor:
    """Partition cursor over a sorted id list; the payload is the position."""

    def __init__(self, ids: Sequence[int]):
        self._ids = ids
        self._pos = 0

    def id(self) -> int:
        return self._ids[self._pos]

    def next(self) -> None:
        self._pos += 1

    def advance(self, target: int) -> None:
        self._pos = bisect_left(self._ids, target, self._pos)

    def at_end(self) -> bool:
        return self._pos >= len(self._ids)

    def payload(self) -> int:
        return self._pos


class SuccessorCursor:
    """Value cursor on top of any representation exposing ``next_geq``."""

    def __init__(self, rep):
        self._rep = rep
        self._cur: int | None = None
        self._started = False

    def current(self) -> int | None:
        return self._cur

    def next(self) -> int | None:
        if not self._started:
            self._started = True
            self._cur = self._rep.next_geq(0)
        elif self._cur is not None:
            self._cur = self._rep.next_geq(self._cur + 1)
        return self._cur

    def next_geq(self, x: int) -> int | None:
        if self._started and self._cur is None:
            return None
        if self._started and x <= self._cur:
            return self._cur
        self._started = True
        self._cur = self._rep.next_geq(x)
        return self._cur


def intersect_by_candidate(shorter: ValueCursor, longer: ValueCursor, out: np.ndarray) -> int:
    """Intersect two value cursors by candidate propagation.

    The candidate starts at the first value of ``shorter``; ``longer`` is
    probed with ``next_geq``. A match is emitted and the candidate moves to
    the next value of ``shorter``; a miss makes the returned value the new
    candidate, which ``shorter`` must then reach.
    """
    cap = len(out)
    found = []
    candidate = shorter.next()
    while candidate is not None:
        z = longer.next_geq(candidate)
        if z is None:
            break
        if z == candidate:
            if len(found) == cap:
                raise BufferTooSmall(f"intersection exceeds output capacity {cap}")
            found.append(candidate)
            candidate = shorter.next()
        else:
            candidate = shorter.next_geq(z)
    out[:len(found)] = found
    return len(found)


def _emit(out: np.ndarray, size: int, values: np.ndarray) -> int:
    end = size + len(values)
    if end > len(out):
        raise BufferTooSmall(f"result exceeds output capacity {len(out)}")
    out[size:end] = values
    return end


def intersect_by_partition(
    left: PartitionCursor,
    right: PartitionCursor,
    container_and: Callable[[Any, Any], np.ndarray],
    out: np.ndarray,
) -> int:
    """Intersect matching partitions; non-matching ids are skipped."""
    size = 0
    while not left.at_end() and not right.at_end():
        id_l, id_r = left.id(), right.id()
        if id_l == id_r:
            size = _emit(out, size, container_and(left.payload(), right.payload()))
            left.next()
            right.next()
        elif id_l < id_r:
            left.advance(id_r)
        else:
            right.advance(id_l)
    return size


def union_by_partition(
    left: PartitionCursor,
    right: PartitionCursor,
    container_or: Callable[[Any, Any], np.ndarray],
    decode_left: Callable[[Any], np.ndarray],
    decode_right: Callable[[Any], np.ndarray],
    out: np.ndarray,
) -> int:
    """Merge partitions by id; unmatched partitions are decoded as-is."""
    size = 0
    while not left.at_end() and not right.at_end():
        id_l, id_r = left.id(), right.id()
        if id_l == id_r:
            size = _emit(out, size, container_or(left.payload(), right.payload()))
            left.next()
            right.next()
        elif id_l < id_r:
            size = _emit(out, size, decode_left(left.payload()))
            left.next()
        else:
            size = _emit(out, size, decode_right(right.payload()))
            right.next()
    while not left.at_end():
        size = _emit(out, size, decode_left(left.payload()))
        left.next()
    while not right.at_end():
        size = _emit(out, size, decode_right(right.payload()))
        right.next()
    return size
