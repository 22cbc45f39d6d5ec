"""Word-level bit helpers: select-in-word, bitmap <-> position conversion.

Bitmaps are little-endian byte arrays: bit ``i`` of 64-bit word ``w``
is universe offset ``64 * w + i``, which is also bit ``i % 8`` of byte
``i // 8``.
"""
from __future__ import annotations

import numpy as np

from .errors import RankOutOfRange

MASK64 = (1 << 64) - 1
_M1 = 0x5555555555555555
_M2 = 0x3333333333333333
_M4 = 0x0F0F0F0F0F0F0F0F
_L8 = 0x0101010101010101
_H8 = 0x8080808080808080


def _build_select_in_byte():
    table = []
    for b in range(256):
        table.append(tuple(i for i in range(8) if b >> i & 1))
    return tuple(table)


_SELECT_IN_BYTE = _build_select_in_byte()


def popcount(w: int) -> int:
    return w.bit_count()


def select_in_word(w: int, j: int) -> int:
    """Position of the ``(j+1)``-th least significant set bit of ``w``.

    Broadword: byte popcounts are prefix-summed with one multiply, the
    target byte is found with a parallel compare, and a 256-entry table
    finishes inside the byte.
    """
    w &= MASK64
    if j < 0 or j >= w.bit_count():
        raise RankOutOfRange(f"rank {j} out of range for word {w:#x}")
    s = w - ((w >> 1) & _M1)
    s = (s & _M2) + ((s >> 2) & _M2)
    s = (s + (s >> 4)) & _M4
    prefix = (s * _L8) & MASK64
    t = (((j * _L8) | _H8) - prefix) & _H8
    byte = (((t >> 7) * _L8) & MASK64) >> 56
    before = 0 if byte == 0 else (prefix >> (8 * (byte - 1))) & 0xFF
    return 8 * byte + _SELECT_IN_BYTE[(w >> (8 * byte)) & 0xFF][j - before]


def bitmap_positions(bitmap: np.ndarray) -> np.ndarray:
    """Offsets of the set bits of a ``uint8`` bitmap, ascending."""
    return np.flatnonzero(np.unpackbits(bitmap, bitorder="little")).astype(np.uint32)


def positions_to_bitmap(positions: np.ndarray, nbytes: int) -> np.ndarray:
    bits = np.zeros(nbytes * 8, dtype=np.uint8)
    bits[positions] = 1
    return np.packbits(bits, bitorder="little")

