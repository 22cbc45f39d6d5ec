"""Shared sequences and generators for the test suite."""
import numpy as np
from hypothesis import strategies as st

from univslice import validate_sequence

TOY = [0, 1, 4, 5, 6, 17, 18, 19, 20, 21, 22, 24, 27, 31, 34, 35,
        37, 38, 39, 40, 41, 42, 43, 44, 45, 46, 47, 50, 52, 53, 54, 55]


def toy():
    return validate_sequence(TOY, 55)


@st.composite
def sequences(draw, max_value=1 << 22):
    """Scattered values, long runs, or a handful of crowded 256-spans."""
    kind = draw(st.sampled_from(["scatter", "runs", "blocks"]))
    if kind == "scatter":
        vals = draw(st.sets(st.integers(0, max_value), min_size=1, max_size=300))
    elif kind == "runs":
        pieces = draw(st.lists(st.tuples(st.integers(0, max_value), st.integers(1, 70000)), min_size=1, max_size=3))
        vals = set()
        for start, length in pieces:
            vals.update(range(start, min(start + length, max_value + 1)))
    else:
        spans = draw(st.lists(st.integers(0, max_value >> 8), min_size=1, max_size=6))
        vals = set()
        for s in spans:
            lows = draw(st.sets(st.integers(0, 255), min_size=1, max_size=256))
            vals.update((s << 8) | x for x in lows)
    return validate_sequence(sorted(vals))


def structured_sequence(rng: np.random.Generator, max_log: int = 22):
    """Random sequence mixing the container shapes a sliced set can hold."""
    kind = rng.integers(5)
    span = int(2 ** rng.uniform(4, max_log))
    if kind == 0:
        n = max(1, int(span * 10 ** rng.uniform(-3, 0)))
        v = rng.integers(0, span, n)
    elif kind == 1:
        starts = rng.integers(0, span, rng.integers(1, 20))
        v = np.concatenate([np.arange(s, s + rng.integers(1, 70000)) for s in starts])
    elif kind == 2:
        chunks = rng.integers(0, 40, 3)
        v = np.concatenate([rng.integers(c << 16, (c << 16) + 65536, rng.integers(1, 60000)) for c in chunks])
    elif kind == 3:
        blocks = rng.integers(0, 3000, 40)
        v = np.concatenate([rng.integers(b << 8, (b << 8) + 256, rng.integers(1, 256)) for b in blocks])
    else:
        v = np.r_[np.arange(1 << 16), rng.integers(1 << 16, 1 << 20, 500)]
    return validate_sequence(np.unique(v))
