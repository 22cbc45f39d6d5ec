"""Two-container universe partitioning: 2^16-span chunks as arrays or bitmaps.

Serialized layout (little-endian)::

    [chunk count - 1 : u16]
    chunk count x [id : u16][cardinality - 1 : u16]
    payloads in id order: 2 * cardinality bytes of sorted u16 values when
    cardinality < 4096, otherwise an 8192-byte bitmap
"""
from __future__ import annotations

from bisect import bisect_left

import numpy as np

from . import kernels as K
from ._common import SetOps, check_capacity
from .algebra import ListPartitionCursor, intersect_by_partition, union_by_partition
from .errors import IndexOutOfBounds, MalformedBuffer
from .sequence import SortedSequence

CHUNK_SPAN = 1 << 16
ARRAY_LIMIT = 4096
BITMAP_BYTES = CHUNK_SPAN // 8

_HEADER = np.dtype([("id", "<u2"), ("card", "<u2")])


def container_bytes(card):
    return 2 * card if card < ARRAY_LIMIT else BITMAP_BYTES


class RoaringLiteSet(SetOps):
    def __init__(self, buf: bytes, u: int | None = None, *, _trusted: bool = False):
        self._buf = bytes(buf)
        self._u8 = np.frombuffer(self._buf, dtype=np.uint8)
        if len(self._buf) < 2:
            raise MalformedBuffer("buffer shorter than the chunk count")
        m = int(self._u8[:2].view("<u2")[0]) + 1
        end = 2 + 4 * m
        if len(self._buf) < end:
            raise MalformedBuffer("buffer truncated inside the chunk headers")
        h = np.frombuffer(self._buf, dtype=_HEADER, count=m, offset=2)
        self.m = m
        self.ids = h["id"].astype(np.int64)
        self.cards = h["card"].astype(np.int64) + 1
        sizes = np.where(self.cards < ARRAY_LIMIT, 2 * self.cards, BITMAP_BYTES)
        self.offsets = end + np.r_[0, np.cumsum(sizes)[:-1]]
        self.n = int(self.cards.sum())
        self._ids_l = self.ids.tolist()
        self._cards_l = self.cards.tolist()
        self._offs_l = self.offsets.tolist()
        if not _trusted:
            self._validate(end + int(sizes.sum()))
        self._max = int(self._chunk_values(m - 1)[-1])
        self.u = self._max if u is None else u

    def _validate(self, expected: int):
        if expected != len(self._buf):
            raise MalformedBuffer(f"containers imply {expected} bytes, buffer has {len(self._buf)}")
        if self.m > 1 and np.any(np.diff(self.ids) <= 0):
            raise MalformedBuffer("chunk ids not strictly increasing")
        for k in range(self.m):
            if self.is_bitmap(k):
                pc = int(np.bitwise_count(self._bitmap(k)).sum())
                if pc != self._cards_l[k]:
                    raise MalformedBuffer(f"chunk {k}: bitmap popcount {pc} != cardinality")
            elif self._cards_l[k] > 1 and np.any(np.diff(self._array(k).astype(np.int64)) <= 0):
                raise MalformedBuffer(f"chunk {k}: array not strictly increasing")

    @classmethod
    def build(cls, seq: SortedSequence) -> "RoaringLiteSet":
        v = seq.values.astype(np.int64)
        cid = v >> 16
        starts = np.flatnonzero(np.r_[True, cid[1:] != cid[:-1]])
        cards = np.diff(np.r_[starts, len(v)])
        head = np.zeros(len(starts), dtype=_HEADER)
        head["id"] = cid[starts]
        head["card"] = cards - 1
        parts = [np.array([len(starts) - 1], dtype="<u2").tobytes(), head.tobytes()]
        for s, c in zip(starts.tolist(), cards.tolist()):
            low = v[s:s + c] & 0xFFFF
            if c < ARRAY_LIMIT:
                parts.append(low.astype("<u2").tobytes())
            else:
                parts.append(K.positions_to_bitmap(low, BITMAP_BYTES).tobytes())
        return cls(b"".join(parts), seq.u, _trusted=True)

    @classmethod
    def deserialize(cls, buf: bytes, u: int | None = None) -> "RoaringLiteSet":
        return cls(buf, u)

    def serialize(self) -> bytes:
        return self._buf

    def size_bytes(self) -> int:
        return len(self._buf)

    def is_bitmap(self, k: int) -> bool:
        return self._cards_l[k] >= ARRAY_LIMIT

    def _array(self, k: int) -> np.ndarray:
        return np.frombuffer(self._buf, dtype="<u2", count=self._cards_l[k], offset=self._offs_l[k])

    def _bitmap(self, k: int) -> np.ndarray:
        return self._u8[self._offs_l[k]:self._offs_l[k] + BITMAP_BYTES]

    def _words(self, k: int) -> np.ndarray:
        return K.words_at(self._buf, self._offs_l[k], BITMAP_BYTES // 8)

    def _chunk_low(self, k: int) -> np.ndarray:
        if self.is_bitmap(k):
            return K.bitmap_positions_i64(self._bitmap(k))
        return self._array(k).astype(np.int64)

    def _chunk_values(self, k: int) -> np.ndarray:
        return (self._ids_l[k] << 16) + self._chunk_low(k)

    def _as_bitmap(self, k: int) -> np.ndarray:
        if self.is_bitmap(k):
            return self._bitmap(k)
        return K.positions_to_bitmap(self._array(k), BITMAP_BYTES)

    def decode(self, out: np.ndarray) -> int:
        check_capacity(out, self.n)
        pos = 0
        for k in range(self.m):
            vals = self._chunk_values(k)
            out[pos:pos + len(vals)] = vals
            pos += len(vals)
        return pos

    def access(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexOutOfBounds(f"index {i} outside [0, {self.n})")
        k = 0
        for c in self._cards_l:
            if i < c:
                break
            i -= c
            k += 1
        base = self._ids_l[k] << 16
        if self.is_bitmap(k):
            return base + K.bitmap_select(self._words(k), i)
        off = self._offs_l[k] + 2 * i
        return base + int.from_bytes(self._buf[off:off + 2], "little")

    def next_geq(self, x: int) -> int | None:
        if x > self._max:
            return None
        x = max(x, 0)
        hi = x >> 16
        k = bisect_left(self._ids_l, hi)
        if self._ids_l[k] == hi:
            low = x & 0xFFFF
            if self.is_bitmap(k):
                z = K.bitmap_next_geq(self._words(k), low)
            else:
                arr = self._array(k)
                p = int(np.searchsorted(arr, low))
                z = int(arr[p]) if p < len(arr) else None
            if z is not None:
                return (hi << 16) + z
            k += 1
        base = self._ids_l[k] << 16
        if self.is_bitmap(k):
            return base + K.bitmap_first(self._words(k))
        return base + int.from_bytes(self._buf[self._offs_l[k]:self._offs_l[k] + 2], "little")

    def partitions(self) -> ListPartitionCursor:
        return ListPartitionCursor(self._ids_l)

    def intersect(self, other: "RoaringLiteSet", out: np.ndarray) -> int:
        check_capacity(out, min(self.n, other.n))
        return intersect_by_partition(self.partitions(), other.partitions(),
                                      lambda i, j: _container_and(self, i, other, j), out)

    def union(self, other: "RoaringLiteSet", out: np.ndarray) -> int:
        check_capacity(out, self.n + other.n)
        return union_by_partition(self.partitions(), other.partitions(),
                                  lambda i, j: _container_or(self, i, other, j),
                                  self._chunk_values, other._chunk_values, out)

    def container_kinds(self) -> list[str]:
        return ["bitmap" if self.is_bitmap(k) else "array" for k in range(self.m)]

    def __repr__(self) -> str:
        return f"RoaringLiteSet(n={self.n}, chunks={self.m}, bytes={len(self._buf)})"


def _container_and(a: RoaringLiteSet, i: int, b: RoaringLiteSet, j: int) -> np.ndarray:
    base = a._ids_l[i] << 16
    ba, bb = a.is_bitmap(i), b.is_bitmap(j)
    if ba and bb:
        words = a._words(i) & b._words(j)
        return base + K.bitmap_positions_i64(words.view(np.uint8))
    if ba or bb:
        bitmap, arr = (a._bitmap(i), b._array(j)) if ba else (b._bitmap(j), a._array(i))
        vals = arr.astype(np.int64)
        return base + vals[(bitmap[vals >> 3] >> (vals & 7)) & 1 == 1]
    return base + np.intersect1d(a._array(i), b._array(j), assume_unique=True).astype(np.int64)


def _container_or(a: RoaringLiteSet, i: int, b: RoaringLiteSet, j: int) -> np.ndarray:
    base = a._ids_l[i] << 16
    if a.is_bitmap(i) or b.is_bitmap(j):
        words = a._as_bitmap(i).view("<u8") | b._as_bitmap(j).view("<u8")
        return base + K.bitmap_positions_i64(words.view(np.uint8))
    return base + np.union1d(a._array(i), b._array(j)).astype(np.int64)
