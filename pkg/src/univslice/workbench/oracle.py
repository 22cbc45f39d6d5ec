"""Plain-array ground truth for every operation."""
from __future__ import annotations

from bisect import bisect_left

from ..errors import IndexOutOfBounds


def _plain(seq) -> list[int]:
    values = getattr(seq, "values", seq)
    return values.tolist() if hasattr(values, "tolist") else list(values)


def oracle_decode(seq) -> list[int]:
    return _plain(seq)


def oracle_access(seq, i: int) -> int:
    values = _plain(seq)
    if not 0 <= i < len(values):
        raise IndexOutOfBounds(f"index {i} outside [0, {len(values)})")
    return values[i]


def oracle_next_geq(seq, x: int) -> int | None:
    values = _plain(seq)
    p = bisect_left(values, x)
    return values[p] if p < len(values) else None


def oracle_intersect(a, b) -> list[int]:
    a, b = _plain(a), _plain(b)
    i = j = 0
    out = []
    while i < len(a) and j < len(b):
        if a[i] < b[j]:
            i += 1
        elif a[i] > b[j]:
            j += 1
        else:
            out.append(a[i])
            i += 1
            j += 1
    return out


def oracle_union(a, b) -> list[int]:
    a, b = _plain(a), _plain(b)
    i = j = 0
    out = []
    while i < len(a) and j < len(b):
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        elif a[i] > b[j]:
            out.append(b[j])
            j += 1
        else:
            out.append(a[i])
            i += 1
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return out
