"""Elias-Fano lists split into fixed partitions of 128 values.

Serialized layout (little-endian u32 unless noted)::

    [n][partition count P][P skip pointers][P payload offsets][payloads]

Partition ``j`` stores its values relative to ``skip[j-1] + 1`` (0 for
the first). A payload is the low-bit stream (``nP * phi`` bits, element
``i`` at bit ``i * phi``) followed by the high-bit stream (element ``i``
sets bit ``(v_i >> phi) + i``), padded to a whole byte.
"""
from __future__ import annotations

import struct
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from ._common import SetOps, check_capacity
from .algebra import intersect_by_candidate
from .bits import MASK64, select_in_word
from .errors import IndexOutOfBounds, MalformedBuffer
from .kernels import ctz
from .sequence import SortedSequence

PARTITION_SIZE = 128


def low_width(n: int, u: int) -> int:
    """``max(0, floor(log2(u / n)))`` in exact integer arithmetic."""
    return max(0, (u // n).bit_length() - 1)


def ef_bit_size(n: int, u: int, phi: int | None = None) -> int:
    if phi is None:
        phi = low_width(n, u)
    return n * phi + n + ((u + (1 << phi) - 1) >> phi)


@dataclass(frozen=True)
class EfPartition:
    n: int
    base: int
    u: int
    phi: int
    payload: bytes

    @property
    def bit_size(self) -> int:
        return ef_bit_size(self.n, self.u, self.phi)

    @property
    def low_bits(self) -> int:
        return int.from_bytes(self.payload, "little") & ((1 << (self.n * self.phi)) - 1)

    @property
    def high_bits(self) -> int:
        return int.from_bytes(self.payload, "little") >> (self.n * self.phi)

    def decode_relative(self) -> np.ndarray:
        return _decode_payload(np.frombuffer(self.payload, dtype=np.uint8), self.n, self.u, self.phi)


def ef_encode_partition(values, u: int | None = None, base: int = 0) -> EfPartition:
    """Encode strictly increasing relative values whose maximum is ``u``."""
    v = np.asarray(values, dtype=np.int64)
    n = len(v)
    if u is None:
        u = int(v[-1])
    if n == 0 or int(v[-1]) != u:
        raise ValueError("partition must be non-empty with maximum equal to its universe")
    phi = low_width(n, u)
    nbits = ef_bit_size(n, u, phi)
    bits = np.zeros(-(-nbits // 8) * 8, dtype=np.uint8)
    if phi:
        bits[:n * phi] = ((v[:, None] >> np.arange(phi)) & 1).ravel()
    bits[n * phi + (v >> phi) + np.arange(n)] = 1
    return EfPartition(n, base, u, phi, np.packbits(bits, bitorder="little").tobytes())


def _decode_payload(payload: np.ndarray, n: int, u: int, phi: int) -> np.ndarray:
    nbits = ef_bit_size(n, u, phi)
    bits = np.unpackbits(payload, bitorder="little", count=nbits)
    high = np.flatnonzero(bits[n * phi:]) - np.arange(n)
    if phi == 0:
        return high
    low = bits[:n * phi].reshape(n, phi).astype(np.int64) @ (np.int64(1) << np.arange(phi, dtype=np.int64))
    return (high << phi) | low


def ef_decode_partition(part: EfPartition) -> np.ndarray:
    return part.decode_relative()


class PcEfList(SetOps):
    def __init__(self, n: int, skip: np.ndarray, offsets: np.ndarray, payload: bytes, u: int | None = None):
        self.n = n
        self.skip = skip
        self.offsets = offsets
        self.payload = payload
        self.u = int(skip[-1]) if u is None else u
        self._skip_l = skip.tolist()
        self._offs_l = offsets.tolist() + [len(payload)]
        self._u8 = np.frombuffer(payload, dtype=np.uint8)

    @classmethod
    def build(cls, seq: SortedSequence) -> "PcEfList":
        v = seq.values.astype(np.int64)
        chunks = [v[i:i + PARTITION_SIZE] for i in range(0, len(v), PARTITION_SIZE)]
        skip = np.array([int(c[-1]) for c in chunks], dtype=np.uint32)
        payloads, offsets, pos = [], [], 0
        base = 0
        for c in chunks:
            part = ef_encode_partition(c - base, base=base)
            offsets.append(pos)
            payloads.append(part.payload)
            pos += len(part.payload)
            base = int(c[-1]) + 1
        return cls(len(v), skip, np.array(offsets, dtype=np.uint32), b"".join(payloads), seq.u)

    @property
    def num_partitions(self) -> int:
        return len(self._skip_l)

    def _params(self, j: int) -> tuple[int, int, int, int]:
        """(count, base, relative universe, phi) of partition ``j``."""
        nP = PARTITION_SIZE if j < len(self._skip_l) - 1 else self.n - PARTITION_SIZE * j
        base = 0 if j == 0 else self._skip_l[j - 1] + 1
        u = self._skip_l[j] - base
        return nP, base, u, low_width(nP, u)

    def partition(self, j: int) -> EfPartition:
        nP, base, u, phi = self._params(j)
        return EfPartition(nP, base, u, phi, self.payload[self._offs_l[j]:self._offs_l[j + 1]])

    def partitions(self) -> list[EfPartition]:
        return [self.partition(j) for j in range(self.num_partitions)]

    def _partition_values(self, j: int) -> np.ndarray:
        nP, base, u, phi = self._params(j)
        return base + _decode_payload(self._u8[self._offs_l[j]:self._offs_l[j + 1]], nP, u, phi)

    def size_bytes(self) -> int:
        return 8 * self.num_partitions + len(self.payload)

    def serialize(self) -> bytes:
        head = struct.pack("<II", self.n, self.num_partitions)
        return head + self.skip.astype("<u4").tobytes() + self.offsets.astype("<u4").tobytes() + self.payload

    @classmethod
    def deserialize(cls, buf: bytes, u: int | None = None) -> "PcEfList":
        if len(buf) < 8:
            raise MalformedBuffer("buffer shorter than the list header")
        n, P = struct.unpack_from("<II", buf)
        if n == 0 or P != -(-n // PARTITION_SIZE):
            raise MalformedBuffer(f"{P} partitions cannot hold {n} values")
        if len(buf) < 8 + 8 * P:
            raise MalformedBuffer("buffer truncated inside the skip pointers")
        skip = np.frombuffer(buf, dtype="<u4", count=P, offset=8).astype(np.uint32)
        offsets = np.frombuffer(buf, dtype="<u4", count=P, offset=8 + 4 * P).astype(np.uint32)
        if P > 1 and np.any(np.diff(skip.astype(np.int64)) <= 0):
            raise MalformedBuffer("skip pointers not strictly increasing")
        lst = cls(n, skip, offsets, bytes(buf[8 + 8 * P:]), u)
        pos = 0
        for j in range(P):
            nP, _, uP, phi = lst._params(j)
            if uP < nP - 1:
                raise MalformedBuffer(f"partition {j}: {nP} values cannot fit below {uP + 1}")
            want = -(-ef_bit_size(nP, uP, phi) // 8)
            if lst._offs_l[j] != pos or lst._offs_l[j + 1] - pos != want:
                raise MalformedBuffer(f"partition {j}: payload size or offset mismatch")
            pos += want
        return lst

    # queries

    def decode(self, out: np.ndarray) -> int:
        check_capacity(out, self.n)
        for j in range(self.num_partitions):
            vals = self._partition_values(j)
            out[PARTITION_SIZE * j:PARTITION_SIZE * j + len(vals)] = vals
        return self.n

    def access(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexOutOfBounds(f"index {i} outside [0, {self.n})")
        j, r = divmod(i, PARTITION_SIZE)
        nP, base, _, phi = self._params(j)
        word = int.from_bytes(self.payload[self._offs_l[j]:self._offs_l[j + 1]], "little")
        high = word >> (nP * phi)
        left = r
        pos = 0
        while True:
            w = high & MASK64
            pc = w.bit_count()
            if left < pc:
                pos += select_in_word(w, left)
                break
            left -= pc
            high >>= 64
            pos += 64
        low = (word >> (r * phi)) & ((1 << phi) - 1)
        return base + (((pos - r) << phi) | low)

    def next_geq(self, x: int) -> int | None:
        if x > self._skip_l[-1]:
            return None
        j = bisect_left(self._skip_l, x)
        nP, base, _, phi = self._params(j)
        rel = max(0, x - base)
        word = int.from_bytes(self.payload[self._offs_l[j]:self._offs_l[j + 1]], "little")
        high = word >> (nP * phi)
        h = rel >> phi
        start = 0
        if h:
            # skip h zeros of the high stream: everything before has a smaller high part
            left, pos, rest = h - 1, 0, high
            while True:
                zeros = ~rest & MASK64
                pc = zeros.bit_count()
                if left < pc:
                    start = pos + select_in_word(zeros, left) + 1
                    break
                left -= pc
                rest >>= 64
                pos += 64
        i = start - h
        rest = high >> start
        pos = start
        mask = (1 << phi) - 1
        while True:
            step = ctz(rest)
            pos += step
            value = ((pos - i) << phi) | ((word >> (i * phi)) & mask)
            if value >= rel:
                return base + value
            rest >>= step + 1
            pos += 1
            i += 1

    def cursor(self) -> "PcEfCursor":
        return PcEfCursor(self)

    def intersect(self, other: "PcEfList", out: np.ndarray) -> int:
        check_capacity(out, min(self.n, other.n))
        shorter, longer = (self, other) if self.n <= other.n else (other, self)
        return intersect_by_candidate(shorter.cursor(), longer.cursor(), out)

    def union(self, other: "PcEfList", out: np.ndarray) -> int:
        check_capacity(out, self.n + other.n)
        ca, cb = self.cursor(), other.cursor()
        a, b = ca.next(), cb.next()
        found = []
        while a is not None and b is not None:
            if a < b:
                found.append(a)
                a = ca.next()
            elif b < a:
                found.append(b)
                b = cb.next()
            else:
                found.append(a)
                a, b = ca.next(), cb.next()
        while a is not None:
            found.append(a)
            a = ca.next()
        while b is not None:
            found.append(b)
            b = cb.next()
        out[:len(found)] = found
        return len(found)

    def __repr__(self) -> str:
        return f"PcEfList(n={self.n}, partitions={self.num_partitions}, bytes={self.size_bytes()})"


class PcEfCursor:
    """Forward-only cursor; a partition is decoded when the cursor enters it."""

    def __init__(self, lst: PcEfList):
        self._lst = lst
        self._j = -1
        self._vals: list[int] = []
        self._pos = -1
        self._done = False

    def _enter(self, j: int) -> bool:
        if j >= self._lst.num_partitions:
            self._done = True
            return False
        self._j = j
        self._vals = self._lst._partition_values(j).tolist()
        self._pos = 0
        return True

    def current(self) -> int | None:
        if self._done or self._pos < 0:
            return None
        return self._vals[self._pos]

    def next(self) -> int | None:
        if self._done:
            return None
        self._pos += 1
        if self._pos >= len(self._vals) and not self._enter(self._j + 1):
            return None
        return self._vals[self._pos]

    def next_geq(self, x: int) -> int | None:
        if self._done:
            return None
        skip = self._lst._skip_l
        if self._j < 0 or x > skip[self._j]:
            j = bisect_left(skip, x, max(self._j, 0))
            if not self._enter(j):
                return None
        lo = max(self._pos, 0)
        self._pos = bisect_left(self._vals, x, lo)
        return self._vals[self._pos]
