from __future__ import annotations

import numpy as np

from .errors import BufferTooSmall

LIMIT = 2**32 - 1


def check_capacity(out: np.ndarray, need: int) -> None:
    if len(out) < need:
        raise BufferTooSmall(f"output holds {len(out)} values, {need} required")


class SetOps:
    """Array-returning conveniences over the out-buffer operations."""

    n: int

    def __len__(self) -> int:
        return self.n

    def to_array(self) -> np.ndarray:
        out = np.empty(self.n, dtype=np.uint32)
        self.decode(out)
        return out

    def and_array(self, other) -> np.ndarray:
        out = np.empty(min(self.n, other.n), dtype=np.uint32)
        return out[:self.intersect(other, out)]

    def or_array(self, other) -> np.ndarray:
        out = np.empty(self.n + other.n, dtype=np.uint32)
        return out[:self.union(other, out)]

    def next_geq_or_limit(self, x: int) -> int:
        z = self.next_geq(x)
        return LIMIT if z is None else z
