"""Container kernels: small sorted byte arrays and bitmaps."""
from __future__ import annotations

import numpy as np

from .bits import positions_to_bitmap, select_in_word  # noqa: F401
from .errors import BufferTooSmall

# one all-versus-all byte comparison covers this many lanes
LANES = 16


def ctz(x: int) -> int:
    return (x & -x).bit_length() - 1


def _scalar_and(l, r) -> list[int]:
    i = j = 0
    found = []
    while i < len(l) and j < len(r):
        a, b = l[i], r[j]
        if a < b:
            i += 1
        elif a > b:
            j += 1
        else:
            found.append(a)
            i += 1
            j += 1
    return found


def _compare_any(probe: np.ndarray, target: np.ndarray) -> np.ndarray:
    # values of target equal to any value of probe, in target order
    return target[(probe[:, None] == target[None, :]).any(axis=0)]


def _as_u8(x) -> np.ndarray:
    if isinstance(x, (bytes, bytearray, memoryview)):
        return np.frombuffer(x, dtype=np.uint8)
    return np.asarray(x, dtype=np.uint8)


def _vector_and(l, r) -> list[int]:
    lv, rv = _as_u8(l), _as_u8(r)
    cl, cr = len(lv), len(rv)
    if cl <= LANES and cr <= LANES:
        return _compare_any(lv, rv).tolist()
    if cl <= LANES:
        return _compare_any(lv, rv[:LANES]).tolist() + _compare_any(lv, rv[LANES:]).tolist()
    if cr <= LANES:
        return _compare_any(lv[:LANES], rv).tolist() + _compare_any(lv[LANES:], rv).tolist()
    # four comparisons would be needed; the scalar merge wins here
    return _scalar_and(l, r)


def small_array_intersect(l, r, base: int, out: np.ndarray, vectorized: bool = False) -> int:
    """Intersect two sorted arrays of 8-bit values and write ``base + v``.

    ``vectorized`` selects the all-versus-all comparison path (up to 16
    lanes per comparison); both paths give identical output.
    """
    found = _vector_and(l, r) if vectorized else _scalar_and(l, r)
    if len(found) > len(out):
        raise BufferTooSmall(f"{len(found)} results, capacity {len(out)}")
    out[:len(found)] = [base + v for v in found]
    return len(found)


# batched block-level helpers; a block is (id, cardinality, payload offset)

def gather_rows(u8: np.ndarray, offs: np.ndarray, width: int) -> np.ndarray:
    return u8[offs[:, None] + np.arange(width)]


def rows_to_values(rows: np.ndarray, ids: np.ndarray, shift: int) -> np.ndarray:
    """Set bits of each bitmap row as ``id << shift | bit``, row-major."""
    bits = np.unpackbits(rows, axis=1, bitorder="little")
    r, col = np.nonzero(bits)
    return (ids[r].astype(np.int64) << shift) | col


def gather_arrays(u8: np.ndarray, offs: np.ndarray, cards: np.ndarray):
    """Flatten array payloads; returns (values, row index of each value)."""
    total = int(cards.sum())
    row = np.repeat(np.arange(len(cards)), cards)
    starts = np.cumsum(cards) - cards
    idx = np.repeat(offs, cards) + (np.arange(total) - starts[row])
    return u8[idx].astype(np.int64), row


def bit_test(rows: np.ndarray, row: np.ndarray, values: np.ndarray) -> np.ndarray:
    return (rows[row, values >> 3] >> (values & 7)) & 1 == 1


# bitmap words

def bitmap_positions_i64(bitmap: np.ndarray) -> np.ndarray:
    return np.flatnonzero(np.unpackbits(bitmap, bitorder="little"))


def words_at(buf: bytes, off: int, nwords: int) -> np.ndarray:
    return np.frombuffer(buf, dtype="<u8", count=nwords, offset=off)


def bitmap_select(words: np.ndarray, r: int) -> int:
    """Position of the ``(r+1)``-th set bit: popcount scan, then select in word."""
    cs = np.cumsum(np.bitwise_count(words))
    w = int(np.searchsorted(cs, r, side="right"))
    before = int(cs[w - 1]) if w else 0
    return 64 * w + select_in_word(int(words[w]), r - before)


def bitmap_next_geq(words: np.ndarray, low: int) -> int | None:
    w = low >> 6
    rest = int(words[w]) >> (low & 63)
    if rest:
        return low + ctz(rest)
    nz = np.flatnonzero(words[w + 1:])
    if nz.size == 0:
        return None
    w += 1 + int(nz[0])
    return 64 * w + ctz(int(words[w]))


def bitmap_first(words: np.ndarray) -> int:
    w = int(np.flatnonzero(words)[0])
    return 64 * w + ctz(int(words[w]))
