import numpy as np
import pytest
from hypothesis import given, strategies as st

from univslice import RankOutOfRange, select_in_word, small_array_intersect
from univslice.bits import bitmap_positions, positions_to_bitmap
from univslice.kernels import bitmap_next_geq, bitmap_select, gather_arrays, rows_to_values


def naive_select(w, j):
    seen = -1
    for i in range(64):
        if w >> i & 1:
            seen += 1
            if seen == j:
                return i
    raise AssertionError


def test_select_in_word_examples():
    assert select_in_word(0b10110, 0) == 1
    assert select_in_word(0b10110, 2) == 4
    assert select_in_word(1 << 63, 0) == 63
    assert select_in_word((1 << 64) - 1, 63) == 63


def test_select_in_word_rank_out_of_range():
    with pytest.raises(RankOutOfRange):
        select_in_word(0b10110, 3)
    with pytest.raises(RankOutOfRange):
        select_in_word(0, 0)


@given(st.integers(1, (1 << 64) - 1), st.data())
def test_select_in_word_matches_bit_loop(w, data):
    j = data.draw(st.integers(0, w.bit_count() - 1))
    assert select_in_word(w, j) == naive_select(w, j)


def test_select_in_word_dense_and_sparse_words():
    rng = np.random.default_rng(3)
    for _ in range(2000):
        p = rng.uniform(0.01, 0.99)
        w = int(sum(1 << i for i in range(64) if rng.random() < p)) or 1
        j = int(rng.integers(w.bit_count()))
        assert select_in_word(w, j) == naive_select(w, j)


def test_small_array_example():
    out = np.empty(8, dtype=np.uint32)
    for vec in (False, True):
        cnt = small_array_intersect([3, 9, 12], [9, 12, 200], 65536, out, vectorized=vec)
        assert out[:cnt].tolist() == [65545, 65548]


def test_small_array_idempotent_and_disjoint():
    out = np.empty(40, dtype=np.uint32)
    x = list(range(0, 200, 7))
    for vec in (False, True):
        assert small_array_intersect(x, x, 0, out, vec) == len(x)
        assert out[:len(x)].tolist() == x
        assert small_array_intersect([1, 3, 5], [2, 4, 6], 0, out, vec) == 0


@given(st.sets(st.integers(0, 255), max_size=30), st.sets(st.integers(0, 255), max_size=30),
       st.sampled_from([0, 256, 0xFFFFFF00]))
def test_small_array_paths_agree(l, r, base):
    l, r = sorted(l), sorted(r)
    a = np.empty(31, dtype=np.uint32)
    b = np.empty(31, dtype=np.uint32)
    ca = small_array_intersect(l, r, base, a, vectorized=False)
    cb = small_array_intersect(bytes(l), bytes(r), base, b, vectorized=True)
    assert ca == cb
    assert a[:ca].tolist() == b[:cb].tolist() == [base + v for v in sorted(set(l) & set(r))]


def test_bitmap_round_trip_and_select():
    pos = np.array([0, 5, 63, 64, 700, 8191 * 8 + 7])
    bm = positions_to_bitmap(pos, 8192)
    assert bitmap_positions(bm).tolist() == pos.tolist()
    words = bm.view("<u8")
    assert [bitmap_select(words, r) for r in range(len(pos))] == pos.tolist()
    assert bitmap_next_geq(words, 6) == 63
    assert bitmap_next_geq(words, 701) == 8191 * 8 + 7
    assert bitmap_next_geq(positions_to_bitmap(np.array([3]), 64).view("<u8"), 4) is None


def test_gather_arrays_and_rows():
    u8 = np.arange(20, dtype=np.uint8)
    vals, row = gather_arrays(u8, np.array([2, 10]), np.array([3, 2]))
    assert vals.tolist() == [2, 3, 4, 10, 11]
    assert row.tolist() == [0, 0, 0, 1, 1]
    rows = np.zeros((2, 32), dtype=np.uint8)
    rows[0, 0] = 0b101
    rows[1, 31] = 0x80
    assert rows_to_values(rows, np.array([1, 2]), 8).tolist() == [256, 258, 512 + 255]
