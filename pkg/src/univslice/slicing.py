"""Recursive universe slicing: 2^16-span chunks, 2^8-span blocks.

Byte layout (little-endian)::

    [m - 1 : u16]
    H1: m x [id : u16][cardinality - 1 : u16][payload bytes : u16][type : u8][blocks - 1 : u8]
    payloads in chunk-id order

A full chunk has no payload, a dense chunk is an 8192-byte bitmap, and a
sparse chunk is its block header H2 (``blocks x [id : u8][cardinality - 1 : u8]``)
followed by block payloads: a 32-byte bitmap when the block holds at
least 31 values, otherwise the sorted low bytes. Empty chunks and blocks
are not stored.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field

import numpy as np

from . import kernels as K
from ._common import SetOps, check_capacity
from .algebra import ListPartitionCursor, intersect_by_partition, union_by_partition
from .errors import IndexOutOfBounds, MalformedBuffer
from .sequence import SortedSequence

CHUNK_SPAN = 1 << 16
BLOCK_SPAN = 1 << 8
CHUNK_BITMAP_BYTES = CHUNK_SPAN // 8
BLOCK_BITMAP_BYTES = BLOCK_SPAN // 8
SPARSE_BLOCK_LIMIT = BLOCK_SPAN // 8 - 1  # c < 31 -> byte array
DENSE_CHUNK_CARD = CHUNK_SPAN // 2
RANK_SAMPLE = 32

FULL, DENSE, SPARSE = 1, 2, 3
TYPE_NAMES = {FULL: "full", DENSE: "dense", SPARSE: "sparse"}

H1_DTYPE = np.dtype([("id", "<u2"), ("card", "<u2"), ("nbytes", "<u2"), ("type", "u1"), ("blocks", "u1")])


def block_cost(c):
    """Payload bytes of a block holding ``c`` values (scalar or array)."""
    return np.where(c < SPARSE_BLOCK_LIMIT, c, BLOCK_BITMAP_BYTES) if isinstance(c, np.ndarray) else (
        c if c < SPARSE_BLOCK_LIMIT else BLOCK_BITMAP_BYTES)


def _run_starts(keys: np.ndarray) -> np.ndarray:
    return np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])


def _exclusive_cumsum(a: np.ndarray) -> np.ndarray:
    out = np.zeros(len(a), dtype=np.int64)
    np.cumsum(a[:-1], out=out[1:])
    return out


@dataclass(frozen=True)
class Breakdown:
    """Integers covered and bytes spent per container category."""

    coverage: dict[str, int]
    bytes: dict[str, int]
    n: int = field(default=0)

    def coverage_fractions(self) -> dict[str, float]:
        return {k: v / self.n for k, v in self.coverage.items()}

    def byte_fractions(self) -> dict[str, float]:
        total = sum(self.bytes.values())
        return {k: v / total for k, v in self.bytes.items()}


class _Blocks:
    """H2 of one sparse chunk: array views plus Python lists for scalar probes."""

    __slots__ = ("ids", "cards", "offs", "ids_b", "cards_l", "offs_l")

    def __init__(self, ids: np.ndarray, cards: np.ndarray, offs: np.ndarray):
        self.ids, self.cards, self.offs = ids, cards, offs
        self.ids_b = ids.astype(np.uint8).tobytes()
        self.cards_l = cards.tolist()
        self.offs_l = offs.tolist()


def _encode(values: np.ndarray) -> bytes:
    v = values.astype(np.int64)
    n = len(v)
    cstart = _run_starts(v >> 16)
    chunk_ids = v[cstart] >> 16
    cards = np.diff(np.r_[cstart, n])
    m = len(cstart)
    chunk_of_value = np.repeat(np.arange(m), cards)

    bstart = _run_starts(v >> 8)
    bcards = np.diff(np.r_[bstart, n])
    chunk_of_block = chunk_of_value[bstart]
    bcost = block_cost(bcards)
    nblocks = np.bincount(chunk_of_block, minlength=m)
    sparse_bytes = 2 * nblocks + np.bincount(chunk_of_block, weights=bcost, minlength=m).astype(np.int64)

    types = np.full(m, SPARSE, dtype=np.uint8)
    types[(cards >= DENSE_CHUNK_CARD) | (sparse_bytes >= CHUNK_BITMAP_BYTES)] = DENSE
    types[cards == CHUNK_SPAN] = FULL
    nbytes = np.select([types == FULL, types == DENSE], [0, CHUNK_BITMAP_BYTES], sparse_bytes)

    header_end = 2 + 8 * m
    chunk_off = header_end + _exclusive_cumsum(nbytes)
    buf = np.zeros(header_end + int(nbytes.sum()), dtype=np.uint8)
    buf[0:2] = np.array([m - 1], dtype="<u2").view(np.uint8)
    h1 = np.zeros(m, dtype=H1_DTYPE)
    h1["id"] = chunk_ids
    h1["card"] = cards - 1
    h1["nbytes"] = nbytes
    h1["type"] = types
    h1["blocks"] = np.where(types == SPARSE, nblocks - 1, 0)
    buf[2:header_end] = h1.view(np.uint8)

    low16 = v & 0xFFFF
    vtype = types[chunk_of_value]
    dense_v = vtype == DENSE
    if dense_v.any():
        pos = chunk_off[chunk_of_value[dense_v]] + (low16[dense_v] >> 3)
        np.bitwise_or.at(buf, pos, (1 << (low16[dense_v] & 7)).astype(np.uint8))

    sparse_b = types[chunk_of_block] == SPARSE
    if sparse_b.any():
        first_block = _exclusive_cumsum(nblocks)
        j = np.arange(len(bstart)) - first_block[chunk_of_block]
        h2 = chunk_off[chunk_of_block] + 2 * j
        buf[h2[sparse_b]] = (v[bstart] >> 8)[sparse_b] & 0xFF
        buf[h2[sparse_b] + 1] = bcards[sparse_b] - 1
        gcum = _exclusive_cumsum(bcost)
        boff = chunk_off[chunk_of_block] + 2 * nblocks[chunk_of_block] + gcum - gcum[first_block[chunk_of_block]]

        block_of_value = np.repeat(np.arange(len(bstart)), bcards)
        in_sparse = sparse_b[block_of_value]
        arr_v = in_sparse & (bcards[block_of_value] < SPARSE_BLOCK_LIMIT)
        rank = np.arange(n) - bstart[block_of_value]
        buf[(boff[block_of_value] + rank)[arr_v]] = (v & 0xFF)[arr_v]
        bmp_v = in_sparse & ~arr_v
        if bmp_v.any():
            low8 = v[bmp_v] & 0xFF
            np.bitwise_or.at(buf, boff[block_of_value[bmp_v]] + (low8 >> 3), (1 << (low8 & 7)).astype(np.uint8))
    return buf.tobytes()


class SlicedSet(SetOps):
    """Immutable sliced representation of a sorted sequence.

    The byte buffer is the whole stored state. Header arrays, the
    cumulative-cardinality directory and the flattened table of all H2
    entries are derived views rebuilt on load.
    """

    def __init__(self, buf: bytes, u: int | None = None, *, _trusted: bool = False):
        self._buf = bytes(buf)
        self._u8 = np.frombuffer(self._buf, dtype=np.uint8)
        self._parse_h1()
        if not _trusted:
            self._validate_chunks()
        self._index_blocks()
        if not _trusted:
            self._validate_blocks()
        last = self._chunk_last(self.m - 1)
        self.u = last if u is None else u
        self._max = last

    @classmethod
    def build(cls, seq: SortedSequence) -> "SlicedSet":
        return cls(_encode(seq.values), seq.u, _trusted=True)

    @classmethod
    def deserialize(cls, buf: bytes, u: int | None = None) -> "SlicedSet":
        return cls(buf, u)

    def serialize(self) -> bytes:
        return self._buf

    def size_bytes(self) -> int:
        return len(self._buf)

    def _parse_h1(self):
        if len(self._buf) < 2:
            raise MalformedBuffer("buffer shorter than the chunk count")
        m = int(self._u8[:2].view("<u2")[0]) + 1
        end = 2 + 8 * m
        if len(self._buf) < end:
            raise MalformedBuffer(f"buffer truncated inside H1 ({len(self._buf)} < {end} bytes)")
        h1 = np.frombuffer(self._buf, dtype=H1_DTYPE, count=m, offset=2)
        self.m = m
        self.ids = h1["id"].astype(np.int64)
        self.cards = h1["card"].astype(np.int64) + 1
        self.nbytes = h1["nbytes"].astype(np.int64)
        self.types = h1["type"].copy()
        self.nblocks = np.where(self.types == SPARSE, h1["blocks"].astype(np.int64) + 1, 0)
        self.offsets = end + _exclusive_cumsum(self.nbytes)
        self.n = int(self.cards.sum())
        self._vstart = _exclusive_cumsum(self.cards)
        self._ids_l = self.ids.tolist()
        self._cards_l = self.cards.tolist()
        self._types_l = self.types.tolist()
        self._offs_l = self.offsets.tolist()
        csum = np.r_[0, np.cumsum(self.cards)]
        self._rank_dir = csum[::RANK_SAMPLE][: -(-m // RANK_SAMPLE)].tolist()
        self._h2: dict[int, _Blocks] = {}

    def _index_blocks(self):
        """Flatten every H2 entry into global arrays, in value order."""
        nb = self.nblocks
        self._bfirst = _exclusive_cumsum(nb)
        chunk = np.repeat(np.arange(self.m), nb)
        j = np.arange(len(chunk)) - self._bfirst[chunk]
        h2 = self.offsets[chunk] + 2 * j
        self.blk_chunk = chunk
        self.blk_id = self._u8[h2].astype(np.int64)
        self.blk_card = self._u8[h2 + 1].astype(np.int64) + 1
        self.blk_key = (self.ids[chunk] << 8) | self.blk_id
        cost = block_cost(self.blk_card)
        gc = _exclusive_cumsum(cost)
        gv = _exclusive_cumsum(self.blk_card)
        first = self._bfirst[chunk]
        self.blk_off = self.offsets[chunk] + 2 * nb[chunk] + gc - gc[first]
        # rank of each block's first value inside its chunk
        self.blk_rank = gv - gv[first]
        self._blk_cost = cost

    def _validate_chunks(self):
        end = int(self.offsets[-1] + self.nbytes[-1])
        if end != len(self._buf):
            raise MalformedBuffer(f"payload sizes imply {end} bytes, buffer has {len(self._buf)}")
        if self.m > 1 and np.any(np.diff(self.ids) <= 0):
            raise MalformedBuffer("chunk ids not strictly increasing")
        t, card, nb = self.types, self.cards, self.nbytes
        bad = np.flatnonzero((t < FULL) | (t > SPARSE))
        if bad.size:
            raise MalformedBuffer(f"chunk {bad[0]}: unknown type {t[bad[0]]}")
        full = t == FULL
        bad = np.flatnonzero(full & ((card != CHUNK_SPAN) | (nb != 0)))
        if bad.size:
            raise MalformedBuffer(f"chunk {bad[0]}: bad full chunk header")
        dense = np.flatnonzero(t == DENSE)
        if dense.size:
            if np.any(nb[dense] != CHUNK_BITMAP_BYTES) or np.any(card[dense] == CHUNK_SPAN):
                raise MalformedBuffer("dense chunk with a bad size or cardinality")
            rows = K.gather_rows(self._u8, self.offsets[dense], CHUNK_BITMAP_BYTES)
            if np.any(np.bitwise_count(rows).sum(axis=1) != card[dense]):
                raise MalformedBuffer("dense chunk bitmap popcount differs from its cardinality")
        sp = t == SPARSE
        if np.any(sp & ((card >= DENSE_CHUNK_CARD) | (nb >= CHUNK_BITMAP_BYTES) | (nb < 2 * self.nblocks))):
            raise MalformedBuffer("sparse chunk violates size rules")

    def _validate_blocks(self):
        if not len(self.blk_chunk):
            return
        ch = self.blk_chunk
        same = ch[1:] == ch[:-1]
        if np.any(same & (np.diff(self.blk_id) <= 0)):
            raise MalformedBuffer("block ids not strictly increasing within a chunk")
        sp = np.flatnonzero(self.types == SPARSE)
        card_sum = np.bincount(ch, weights=self.blk_card, minlength=self.m)
        byte_sum = 2 * self.nblocks + np.bincount(ch, weights=self._blk_cost, minlength=self.m)
        if np.any(card_sum[sp] != self.cards[sp]):
            raise MalformedBuffer("block cardinalities do not sum to the chunk cardinality")
        if np.any(byte_sum[sp] != self.nbytes[sp]):
            raise MalformedBuffer("sparse chunk encoded size mismatch")
        arr = self.blk_card < SPARSE_BLOCK_LIMIT
        if (~arr).any():
            rows = K.gather_rows(self._u8, self.blk_off[~arr], BLOCK_BITMAP_BYTES)
            if np.any(np.bitwise_count(rows).sum(axis=1) != self.blk_card[~arr]):
                raise MalformedBuffer("block bitmap popcount mismatch")
        if arr.any():
            vals, row = K.gather_arrays(self._u8, self.blk_off[arr], self.blk_card[arr])
            if np.any((np.diff(vals) <= 0) & (row[1:] == row[:-1])):
                raise MalformedBuffer("block array not strictly increasing")

    # per-chunk views

    def _blocks(self, k: int) -> _Blocks:
        blk = self._h2.get(k)
        if blk is None:
            s = slice(int(self._bfirst[k]), int(self._bfirst[k] + self.nblocks[k]))
            blk = self._h2[k] = _Blocks(self.blk_id[s], self.blk_card[s], self.blk_off[s])
        return blk

    def _chunk_words(self, k: int) -> np.ndarray:
        return K.words_at(self._buf, self._offs_l[k], CHUNK_BITMAP_BYTES // 8)

    def _chunk_bitmap(self, k: int) -> np.ndarray:
        off = self._offs_l[k]
        return self._u8[off:off + CHUNK_BITMAP_BYTES]

    def _decode_blocks(self, ids, cards, offs) -> np.ndarray:
        """Low 16 bits of all values in the given blocks, in block order."""
        out = np.empty(int(cards.sum()), dtype=np.int64)
        _fill_blocks(self._u8, ids, cards, offs, _exclusive_cumsum(cards), out)
        return out

    def _chunk_low(self, k: int) -> np.ndarray:
        t = self._types_l[k]
        if t == FULL:
            return np.arange(CHUNK_SPAN, dtype=np.int64)
        if t == DENSE:
            return K.bitmap_positions_i64(self._chunk_bitmap(k))
        blk = self._blocks(k)
        return self._decode_blocks(blk.ids, blk.cards, blk.offs)

    def _chunk_values(self, k: int) -> np.ndarray:
        return (self._ids_l[k] << 16) + self._chunk_low(k)

    def _sparse_as_bitmap(self, k: int) -> np.ndarray:
        bits = np.zeros(CHUNK_SPAN, dtype=np.uint8)
        bits[self._chunk_low(k)] = 1
        return np.packbits(bits, bitorder="little")

    def _chunk_last(self, k: int) -> int:
        base = self._ids_l[k] << 16
        t = self._types_l[k]
        if t == FULL:
            return base + CHUNK_SPAN - 1
        if t == DENSE:
            words = self._chunk_words(k)
            w = int(np.flatnonzero(words)[-1])
            return base + 64 * w + int(words[w]).bit_length() - 1
        blk = self._blocks(k)
        c, off = blk.cards_l[-1], blk.offs_l[-1]
        if c < SPARSE_BLOCK_LIMIT:
            low = self._buf[off + c - 1]
        else:
            low = int.from_bytes(self._buf[off:off + BLOCK_BITMAP_BYTES], "little").bit_length() - 1
        return base + (blk.ids_b[-1] << 8) + low

    def _chunk_first(self, k: int) -> int:
        base = self._ids_l[k] << 16
        t = self._types_l[k]
        if t == FULL:
            return base
        if t == DENSE:
            return base + K.bitmap_first(self._chunk_words(k))
        blk = self._blocks(k)
        return base + (blk.ids_b[0] << 8) + self._block_first(blk.cards_l[0], blk.offs_l[0])

    def _block_first(self, c: int, off: int) -> int:
        if c < SPARSE_BLOCK_LIMIT:
            return self._buf[off]
        return K.ctz(int.from_bytes(self._buf[off:off + BLOCK_BITMAP_BYTES], "little"))

    # batched views over many chunks or blocks at once

    def _decode_chunks(self, sel: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        """Values of chunks ``sel`` (ascending indices), in increasing order."""
        cards = self.cards[sel]
        start = _exclusive_cumsum(cards)
        if out is None:
            out = np.empty(int(cards.sum()), dtype=np.int64)
        t = self.types[sel]
        base = self.ids[sel] << 16
        full = t == FULL
        if full.any():
            span = np.arange(CHUNK_SPAN)
            out[(start[full][:, None] + span).ravel()] = (base[full][:, None] + span).ravel()
        dense = t == DENSE
        if dense.any():
            rows = K.gather_rows(self._u8, self.offsets[sel][dense], CHUNK_BITMAP_BYTES)
            r, col = np.nonzero(np.unpackbits(rows, axis=1, bitorder="little"))
            rank = np.arange(len(r)) - _exclusive_cumsum(cards[dense])[r]
            out[start[dense][r] + rank] = base[dense][r] | col
        sparse = t == SPARSE
        if sparse.any():
            local = np.zeros(self.m, dtype=np.int64)
            local[sel] = start
            mark = np.zeros(self.m, dtype=bool)
            mark[sel[sparse]] = True
            b = np.flatnonzero(mark[self.blk_chunk])
            bstart = local[self.blk_chunk[b]] + self.blk_rank[b]
            _fill_blocks(self._u8, self.blk_key[b], self.blk_card[b], self.blk_off[b], bstart, out)
        return out

    def _block_values(self, b: np.ndarray) -> np.ndarray:
        """Values of global blocks ``b`` (ascending), in increasing order."""
        cards = self.blk_card[b]
        out = np.empty(int(cards.sum()), dtype=np.int64)
        _fill_blocks(self._u8, self.blk_key[b], cards, self.blk_off[b], _exclusive_cumsum(cards), out)
        return out

    def _chunk_rows(self, sel: np.ndarray) -> np.ndarray:
        """8192-byte bitmaps of dense or sparse chunks ``sel``."""
        rows = np.zeros((len(sel), CHUNK_BITMAP_BYTES), dtype=np.uint8)
        dense = self.types[sel] == DENSE
        if dense.any():
            rows[dense] = K.gather_rows(self._u8, self.offsets[sel][dense], CHUNK_BITMAP_BYTES)
        sparse = np.flatnonzero(~dense)
        if sparse.size:
            vals = self._decode_chunks(sel[sparse]) & 0xFFFF
            row = sparse[np.repeat(np.arange(len(sparse)), self.cards[sel[sparse]])]
            bits = np.zeros((len(sel), CHUNK_SPAN), dtype=np.uint8)
            bits[row, vals] = 1
            rows[sparse] = np.packbits(bits[sparse], axis=1, bitorder="little")
        return rows

    def _block_rows(self, b: np.ndarray) -> np.ndarray:
        return _block_rows(self, self.blk_off[b], self.blk_card[b])

    # queries

    def decode(self, out: np.ndarray) -> int:
        check_capacity(out, self.n)
        out[:self.n] = self._decode_chunks(np.arange(self.m))
        return self.n

    def access(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexOutOfBounds(f"index {i} outside [0, {self.n})")
        g = bisect_right(self._rank_dir, i) - 1
        k = g * RANK_SAMPLE
        acc = self._rank_dir[g]
        cards = self._cards_l
        while acc + cards[k] <= i:
            acc += cards[k]
            k += 1
        r = i - acc
        base = self._ids_l[k] << 16
        t = self._types_l[k]
        if t == FULL:
            return base + r
        if t == DENSE:
            return base + K.bitmap_select(self._chunk_words(k), r)
        blk = self._blocks(k)
        j = 0
        for c in blk.cards_l:
            if r < c:
                break
            r -= c
            j += 1
        c, off = blk.cards_l[j], blk.offs_l[j]
        base += blk.ids_b[j] << 8
        if c < SPARSE_BLOCK_LIMIT:
            return base + self._buf[off + r]
        return base + K.bitmap_select(K.words_at(self._buf, off, 4), r)

    def next_geq(self, x: int) -> int | None:
        if x > self._max:
            return None
        if x < 0:
            x = 0
        hi = x >> 16
        k = bisect_left(self._ids_l, hi)
        if self._ids_l[k] == hi:
            low = self._chunk_next_geq(k, x & 0xFFFF)
            if low is not None:
                return (hi << 16) + low
            k += 1
        return self._chunk_first(k)

    def _chunk_next_geq(self, k: int, low: int) -> int | None:
        t = self._types_l[k]
        if t == FULL:
            return low
        if t == DENSE:
            return K.bitmap_next_geq(self._chunk_words(k), low)
        blk = self._blocks(k)
        b = low >> 8
        j = bisect_left(blk.ids_b, b)
        if j < len(blk.ids_b) and blk.ids_b[j] == b:
            c, off = blk.cards_l[j], blk.offs_l[j]
            lo = low & 0xFF
            if c < SPARSE_BLOCK_LIMIT:
                p = bisect_left(self._buf, lo, off, off + c)
                if p < off + c:
                    return (b << 8) | self._buf[p]
            else:
                rest = int.from_bytes(self._buf[off:off + BLOCK_BITMAP_BYTES], "little") >> lo
                if rest:
                    return (b << 8) | (lo + K.ctz(rest))
            j += 1
        if j == len(blk.ids_b):
            return None
        return (blk.ids_b[j] << 8) | self._block_first(blk.cards_l[j], blk.offs_l[j])

    def partitions(self) -> ListPartitionCursor:
        return ListPartitionCursor(self._ids_l)

    def intersect(self, other: "SlicedSet", out: np.ndarray, mode: str = "batched") -> int:
        """Sorted intersection into ``out``.

        ``mode`` picks the execution strategy; all give identical output:

        - ``"batched"``: chunk and block ids of the whole set are paired in
          one sorted merge, and each container pairing runs as one bulk
          kernel over every pair of that kind.
        - ``"vector"`` / ``"scalar"``: the chunk-by-chunk partition-matching
          driver, with array x array blocks sent one pair at a time through
          the all-versus-all or the scalar small-array kernel.
        """
        check_capacity(out, min(self.n, other.n))
        if mode == "batched":
            res = _and_batched(self, other)
            out[:len(res)] = res
            return len(res)
        if mode not in ("vector", "scalar"):
            raise ValueError(f"unknown intersection mode {mode!r}")
        vectorized = mode == "vector"
        return intersect_by_partition(
            self.partitions(), other.partitions(),
            lambda i, j: _chunk_and(self, i, other, j, vectorized), out)

    def union(self, other: "SlicedSet", out: np.ndarray, mode: str = "batched") -> int:
        """Sorted union into ``out``; ``mode`` is ``"batched"`` or ``"driver"``."""
        check_capacity(out, self.n + other.n)
        if mode == "batched":
            res = _or_batched(self, other)
            out[:len(res)] = res
            return len(res)
        if mode != "driver":
            raise ValueError(f"unknown union mode {mode!r}")
        return union_by_partition(
            self.partitions(), other.partitions(),
            lambda i, j: _chunk_or(self, i, other, j),
            self._chunk_values, other._chunk_values, out)

    # accounting

    def chunk_descriptors(self) -> list[dict]:
        return [
            {"id": self._ids_l[k], "cardinality": self._cards_l[k], "encoded_bytes": int(self.nbytes[k]),
             "type": TYPE_NAMES[self._types_l[k]], "block_count": int(self.nblocks[k])}
            for k in range(self.m)
        ]

    def block_descriptors(self, k: int) -> list[dict]:
        if self._types_l[k] != SPARSE:
            return []
        blk = self._blocks(k)
        return [{"id": b, "cardinality": c, "kind": "sparse" if c < SPARSE_BLOCK_LIMIT else "dense"}
                for b, c in zip(blk.ids_b, blk.cards_l)]

    def space_breakdown(self) -> Breakdown:
        full, dense = self.types == FULL, self.types == DENSE
        arr = self.blk_card < SPARSE_BLOCK_LIMIT
        sb = int(self.blk_card[arr].sum())
        cov = {"FC": int(self.cards[full].sum()), "DC": int(self.cards[dense].sum()),
               "DB": int(self.blk_card[~arr].sum()), "SB": sb}
        size = {"H": 2 + 8 * self.m + 2 * len(self.blk_card), "FC": 0,
                "DC": CHUNK_BITMAP_BYTES * int(dense.sum()),
                "DB": BLOCK_BITMAP_BYTES * int((~arr).sum()), "SB": sb}
        return Breakdown(cov, size, self.n)

    def __repr__(self) -> str:
        return f"SlicedSet(n={self.n}, chunks={self.m}, bytes={len(self._buf)})"


def _fill_blocks(u8, keys, cards, offs, start, out):
    """Write each block's values (``key << 8 | low``) at ``out[start + rank]``."""
    arr = cards < SPARSE_BLOCK_LIMIT
    if arr.any():
        vals, row = K.gather_arrays(u8, offs[arr], cards[arr])
        rank = np.arange(len(vals)) - _exclusive_cumsum(cards[arr])[row]
        out[start[arr][row] + rank] = (keys[arr][row] << 8) | vals
    if (~arr).any():
        rows = K.gather_rows(u8, offs[~arr], BLOCK_BITMAP_BYTES)
        r, col = np.nonzero(np.unpackbits(rows, axis=1, bitorder="little"))
        rank = np.arange(len(r)) - _exclusive_cumsum(cards[~arr])[r]
        out[start[~arr][r] + rank] = (keys[~arr][r] << 8) | col


_EMPTY = np.empty(0, dtype=np.int64)


def _finish(parts) -> np.ndarray:
    return np.sort(np.concatenate(parts)) if parts else _EMPTY


# whole-set kernels: one bulk step per container pairing kind

def _and_batched(a: SlicedSet, b: SlicedSet) -> np.ndarray:
    common, ia, ib = np.intersect1d(a.ids, b.ids, assume_unique=True, return_indices=True)
    if not common.size:
        return _EMPTY
    ta, tb = a.types[ia], b.types[ib]
    parts = []
    fa = ta == FULL
    fb = (tb == FULL) & ~fa
    if fa.any():
        parts.append(b._decode_chunks(ib[fa]))
    if fb.any():
        parts.append(a._decode_chunks(ia[fb]))
    dd = (ta == DENSE) & (tb == DENSE)
    if dd.any():
        rows = K.gather_rows(a._u8, a.offsets[ia[dd]], CHUNK_BITMAP_BYTES)
        rows &= K.gather_rows(b._u8, b.offsets[ib[dd]], CHUNK_BITMAP_BYTES)
        parts.append(K.rows_to_values(rows, common[dd], 16))
    for d, di, s, si in ((a, ia, b, ib), (b, ib, a, ia)):
        sel = (d.types[di] == DENSE) & (s.types[si] == SPARSE)
        if sel.any():
            parts.append(_dense_and_sparse_batched(d, di[sel], s, si[sel]))
    if len(a.blk_key) and len(b.blk_key):
        parts.append(_sparse_and_sparse_batched(a, b))
    return _finish([p for p in parts if len(p)])


def _dense_and_sparse_batched(d: SlicedSet, di, s: SlicedSet, si) -> np.ndarray:
    # each sparse-side block is masked against its 32-byte slice of the dense bitmap
    doff = np.full(s.m, -1, dtype=np.int64)
    doff[si] = d.offsets[di]
    blk = np.flatnonzero(doff[s.blk_chunk] >= 0)
    slice_off = doff[s.blk_chunk[blk]] + s.blk_id[blk] * BLOCK_BITMAP_BYTES
    cards, offs, keys = s.blk_card[blk], s.blk_off[blk], s.blk_key[blk]
    arr = cards < SPARSE_BLOCK_LIMIT
    parts = []
    if (~arr).any():
        rows = K.gather_rows(s._u8, offs[~arr], BLOCK_BITMAP_BYTES)
        rows &= K.gather_rows(d._u8, slice_off[~arr], BLOCK_BITMAP_BYTES)
        parts.append(K.rows_to_values(rows, keys[~arr], 8))
    if arr.any():
        vals, row = K.gather_arrays(s._u8, offs[arr], cards[arr])
        hit = (d._u8[slice_off[arr][row] + (vals >> 3)] >> (vals & 7)) & 1 == 1
        parts.append((keys[arr][row[hit]] << 8) | vals[hit])
    return np.concatenate(parts)


def _sparse_and_sparse_batched(a: SlicedSet, b: SlicedSet) -> np.ndarray:
    # block keys (chunk id << 8 | block id) only exist inside sparse chunks
    keys, ja, jb = np.intersect1d(a.blk_key, b.blk_key, assume_unique=True, return_indices=True)
    if not keys.size:
        return _EMPTY
    ca, cb = a.blk_card[ja], b.blk_card[jb]
    oa, ob = a.blk_off[ja], b.blk_off[jb]
    da, db = ca >= SPARSE_BLOCK_LIMIT, cb >= SPARSE_BLOCK_LIMIT
    parts = []
    sel = da & db
    if sel.any():
        rows = K.gather_rows(a._u8, oa[sel], BLOCK_BITMAP_BYTES) & K.gather_rows(b._u8, ob[sel], BLOCK_BITMAP_BYTES)
        parts.append(K.rows_to_values(rows, keys[sel], 8))
    sel = ~da & ~db
    if sel.any():
        # array x array: merge the keyed values of all pairs in one sorted pass
        va, ra = K.gather_arrays(a._u8, oa[sel], ca[sel])
        vb, rb = K.gather_arrays(b._u8, ob[sel], cb[sel])
        k = keys[sel]
        parts.append(np.intersect1d((k[ra] << 8) | va, (k[rb] << 8) | vb, assume_unique=True))
    for side, x, ox, y, cy, oy in ((da & ~db, a, oa, b, cb, ob), (~da & db, b, ob, a, ca, oa)):
        if side.any():
            vals, row = K.gather_arrays(y._u8, oy[side], cy[side])
            hit = (x._u8[ox[side][row] + (vals >> 3)] >> (vals & 7)) & 1 == 1
            parts.append((keys[side][row[hit]] << 8) | vals[hit])
    return np.concatenate(parts)


def _or_batched(a: SlicedSet, b: SlicedSet) -> np.ndarray:
    common, ia, ib = np.intersect1d(a.ids, b.ids, assume_unique=True, return_indices=True)
    parts = []
    for s, matched in ((a, ia), (b, ib)):
        only = np.ones(s.m, dtype=bool)
        only[matched] = False
        if only.any():
            parts.append(s._decode_chunks(np.flatnonzero(only)))
    if common.size:
        ta, tb = a.types[ia], b.types[ib]
        full = (ta == FULL) | (tb == FULL)
        if full.any():
            parts.append(((common[full] << 16)[:, None] + np.arange(CHUNK_SPAN)).ravel())
        dn = ~full & ((ta == DENSE) | (tb == DENSE))
        if dn.any():
            rows = a._chunk_rows(ia[dn]) | b._chunk_rows(ib[dn])
            parts.append(K.rows_to_values(rows, common[dn], 16))
        ss = (ta == SPARSE) & (tb == SPARSE)
        if ss.any():
            parts.append(_sparse_or_sparse_batched(a, ia[ss], b, ib[ss]))
    return _finish([p for p in parts if len(p)])


def _sparse_or_sparse_batched(a: SlicedSet, ia, b: SlicedSet, ib) -> np.ndarray:
    blocks = []
    for s, sel in ((a, ia), (b, ib)):
        mark = np.zeros(s.m, dtype=bool)
        mark[sel] = True
        blocks.append(np.flatnonzero(mark[s.blk_chunk]))
    ba, bb = blocks
    keys, ja, jb = np.intersect1d(a.blk_key[ba], b.blk_key[bb], assume_unique=True, return_indices=True)
    parts = []
    for s, blk, matched in ((a, ba, ja), (b, bb, jb)):
        only = np.ones(len(blk), dtype=bool)
        only[matched] = False
        if only.any():
            parts.append(s._block_values(blk[only]))
    if keys.size:
        ga, gb = ba[ja], bb[jb]
        ca, cb = a.blk_card[ga], b.blk_card[gb]
        arr = (ca < SPARSE_BLOCK_LIMIT) & (cb < SPARSE_BLOCK_LIMIT)
        if arr.any():
            parts.append(np.union1d(a._block_values(ga[arr]), b._block_values(gb[arr])))
        if (~arr).any():
            rows = a._block_rows(ga[~arr]) | b._block_rows(gb[~arr])
            parts.append(K.rows_to_values(rows, keys[~arr], 8))
    return np.concatenate(parts)


# chunk-level kernels for the partition-matching driver; absolute values, increasing

def _chunk_and(a: SlicedSet, i: int, b: SlicedSet, j: int, vectorized: bool) -> np.ndarray:
    ta, tb = a._types_l[i], b._types_l[j]
    base = a._ids_l[i] << 16
    if ta == FULL:
        return b._chunk_values(j)
    if tb == FULL:
        return a._chunk_values(i)
    if ta == DENSE and tb == DENSE:
        words = a._chunk_words(i) & b._chunk_words(j)
        return base + K.bitmap_positions_i64(words.view(np.uint8))
    if ta == DENSE:
        return base + _dense_and_sparse(a._chunk_bitmap(i), b, j)
    if tb == DENSE:
        return base + _dense_and_sparse(b._chunk_bitmap(j), a, i)
    return base + _sparse_and_sparse(a, i, b, j, vectorized)


def _dense_and_sparse(bitmap: np.ndarray, s: SlicedSet, k: int) -> np.ndarray:
    blk = s._blocks(k)
    slices = bitmap.reshape(BLOCK_SPAN, BLOCK_BITMAP_BYTES)[blk.ids]
    arr = blk.cards < SPARSE_BLOCK_LIMIT
    parts = []
    if (~arr).any():
        rows = K.gather_rows(s._u8, blk.offs[~arr], BLOCK_BITMAP_BYTES) & slices[~arr]
        parts.append(K.rows_to_values(rows, blk.ids[~arr], 8))
    if arr.any():
        vals, row = K.gather_arrays(s._u8, blk.offs[arr], blk.cards[arr])
        hit = K.bit_test(slices[arr], row, vals)
        parts.append((blk.ids[arr][row[hit]] << 8) | vals[hit])
    return np.sort(np.concatenate(parts))


def _sparse_and_sparse(a: SlicedSet, i: int, b: SlicedSet, j: int, vectorized: bool) -> np.ndarray:
    ba, bb = a._blocks(i), b._blocks(j)
    ids, ja, jb = np.intersect1d(ba.ids, bb.ids, assume_unique=True, return_indices=True)
    if ids.size == 0:
        return _EMPTY
    ca, cb = ba.cards[ja], bb.cards[jb]
    oa, ob = ba.offs[ja], bb.offs[jb]
    da, db = ca >= SPARSE_BLOCK_LIMIT, cb >= SPARSE_BLOCK_LIMIT
    parts = []

    sel = da & db
    if sel.any():
        rows = K.gather_rows(a._u8, oa[sel], BLOCK_BITMAP_BYTES) & K.gather_rows(b._u8, ob[sel], BLOCK_BITMAP_BYTES)
        parts.append(K.rows_to_values(rows, ids[sel], 8))

    sel = ~da & ~db
    if sel.any():
        out = np.empty(SPARSE_BLOCK_LIMIT, dtype=np.uint32)
        for bid, c1, o1, c2, o2 in zip(ids[sel].tolist(), ca[sel].tolist(), oa[sel].tolist(),
                                      cb[sel].tolist(), ob[sel].tolist()):
            cnt = K.small_array_intersect(a._buf[o1:o1 + c1], b._buf[o2:o2 + c2], bid << 8, out, vectorized)
            parts.append(out[:cnt].astype(np.int64))

    for dense_side, x, y, cy, ox, oy in ((da & ~db, a, b, cb, oa, ob), (~da & db, b, a, ca, ob, oa)):
        if dense_side.any():
            rows = K.gather_rows(x._u8, ox[dense_side], BLOCK_BITMAP_BYTES)
            vals, row = K.gather_arrays(y._u8, oy[dense_side], cy[dense_side])
            hit = K.bit_test(rows, row, vals)
            parts.append((ids[dense_side][row[hit]] << 8) | vals[hit])
    return np.sort(np.concatenate(parts))


def _chunk_or(a: SlicedSet, i: int, b: SlicedSet, j: int) -> np.ndarray:
    ta, tb = a._types_l[i], b._types_l[j]
    base = a._ids_l[i] << 16
    if ta == FULL or tb == FULL:
        return base + np.arange(CHUNK_SPAN, dtype=np.int64)
    if ta == DENSE or tb == DENSE:
        bm_a = a._chunk_bitmap(i) if ta == DENSE else a._sparse_as_bitmap(i)
        bm_b = b._chunk_bitmap(j) if tb == DENSE else b._sparse_as_bitmap(j)
        words = bm_a.view("<u8") | bm_b.view("<u8")
        return base + K.bitmap_positions_i64(words.view(np.uint8))
    return base + _sparse_or_sparse(a, i, b, j)


def _sparse_or_sparse(a: SlicedSet, i: int, b: SlicedSet, j: int) -> np.ndarray:
    ba, bb = a._blocks(i), b._blocks(j)
    ids, ja, jb = np.intersect1d(ba.ids, bb.ids, assume_unique=True, return_indices=True)
    parts = []
    only_a = np.ones(len(ba.ids), dtype=bool)
    only_a[ja] = False
    only_b = np.ones(len(bb.ids), dtype=bool)
    only_b[jb] = False
    if only_a.any():
        parts.append(a._decode_blocks(ba.ids[only_a], ba.cards[only_a], ba.offs[only_a]))
    if only_b.any():
        parts.append(b._decode_blocks(bb.ids[only_b], bb.cards[only_b], bb.offs[only_b]))
    if ids.size:
        ca, cb = ba.cards[ja], bb.cards[jb]
        oa, ob = ba.offs[ja], bb.offs[jb]
        da, db = ca >= SPARSE_BLOCK_LIMIT, cb >= SPARSE_BLOCK_LIMIT
        sel = ~da & ~db
        if sel.any():
            va, ra = K.gather_arrays(a._u8, oa[sel], ca[sel])
            vb, rb = K.gather_arrays(b._u8, ob[sel], cb[sel])
            keys = ids[sel]
            parts.append(np.union1d((keys[ra] << 8) | va, (keys[rb] << 8) | vb))
        sel = da | db
        if sel.any():
            rows = _block_rows(a, oa[sel], ca[sel]) | _block_rows(b, ob[sel], cb[sel])
            parts.append(K.rows_to_values(rows, ids[sel], 8))
    return np.sort(np.concatenate(parts))


def _block_rows(s: SlicedSet, offs: np.ndarray, cards: np.ndarray) -> np.ndarray:
    """32-byte bitmap rows for a mix of bitmap and array blocks."""
    rows = np.zeros((len(offs), BLOCK_BITMAP_BYTES), dtype=np.uint8)
    dense = cards >= SPARSE_BLOCK_LIMIT
    if dense.any():
        rows[dense] = K.gather_rows(s._u8, offs[dense], BLOCK_BITMAP_BYTES)
    if (~dense).any():
        vals, row = K.gather_arrays(s._u8, offs[~dense], cards[~dense])
        target = np.flatnonzero(~dense)[row]
        np.bitwise_or.at(rows, (target, vals >> 3), (1 << (vals & 7)).astype(np.uint8))
    return rows
