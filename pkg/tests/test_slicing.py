from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings

from golden.make_golden import MIXED
from helpers import TOY, toy, sequences, structured_sequence
from univslice import BufferTooSmall, IndexOutOfBounds, MalformedBuffer, SlicedSet, validate_sequence
from univslice.slicing import CHUNK_BITMAP_BYTES, SPARSE_BLOCK_LIMIT
from univslice.workbench import oracle

GOLDEN = Path(__file__).parent / "golden"
FULL = validate_sequence(np.arange(1 << 16))


def test_toy_layout():
    s = SlicedSet.build(toy())
    assert s.size_bytes() == 44
    assert s.chunk_descriptors() == [
        {"id": 0, "cardinality": 32, "encoded_bytes": 34, "type": "sparse", "block_count": 1}]
    assert s.block_descriptors(0) == [{"id": 0, "cardinality": 32, "kind": "dense"}]
    assert s.serialize() == (GOLDEN / "slicing_toy.bin").read_bytes()


def test_full_chunk_layout():
    s = SlicedSet.build(FULL)
    assert s.size_bytes() == 10
    assert s.chunk_descriptors()[0]["type"] == "full"
    assert s.chunk_descriptors()[0]["encoded_bytes"] == 0
    assert s.serialize() == (GOLDEN / "slicing_full_chunk.bin").read_bytes()
    assert np.array_equal(s.to_array(), np.arange(1 << 16))
    assert s.access(1234) == 1234


def test_mixed_golden():
    s = SlicedSet.build(validate_sequence(MIXED))
    assert s.serialize() == (GOLDEN / "slicing_mixed.bin").read_bytes()
    assert [c["type"] for c in s.chunk_descriptors()] == ["full", "dense", "sparse"]
    back = SlicedSet.deserialize((GOLDEN / "slicing_mixed.bin").read_bytes())
    assert back.to_array().tolist() == MIXED


def test_dense_chunk_bits_per_int():
    rng = np.random.default_rng(0)
    low = np.sort(rng.choice(1 << 16, 40000, replace=False))
    s = SlicedSet.build(validate_sequence(low))
    (c,) = s.chunk_descriptors()
    assert c["type"] == "dense"
    assert 8 * c["encoded_bytes"] / c["cardinality"] == pytest.approx(1.6384)


def test_chunk_turns_dense_when_sparse_encoding_is_too_large():
    # 256 blocks of 30 values cost 256 * (2 + 30) = 8192 bytes, no smaller than the bitmap;
    # with 29 values per block the sparse form wins at 7936 bytes
    vals = np.concatenate([(b << 8) + np.arange(30) for b in range(256)])
    s = SlicedSet.build(validate_sequence(vals))
    assert s.chunk_descriptors()[0]["type"] == "dense"
    vals = np.concatenate([(b << 8) + np.arange(29) for b in range(256)])
    assert SlicedSet.build(validate_sequence(vals)).chunk_descriptors()[0]["type"] == "sparse"


def test_block_threshold():
    s = SlicedSet.build(validate_sequence(np.r_[np.arange(30), 256 + np.arange(31)]))
    assert [b["kind"] for b in s.block_descriptors(0)] == ["sparse", "dense"]
    assert s.size_bytes() == 2 + 8 + 4 + 30 + 32


def test_toy_queries():
    s = SlicedSet.build(toy())
    assert s.to_array().tolist() == TOY
    assert s.access(2) == 4
    assert s.next_geq(23) == 24
    assert s.next_geq(56) is None
    assert s.next_geq_or_limit(56) == 2**32 - 1
    assert all(s.next_geq(v) == v for v in TOY)


def test_errors():
    s = SlicedSet.build(toy())
    with pytest.raises(IndexOutOfBounds):
        s.access(32)
    with pytest.raises(IndexOutOfBounds):
        s.access(-1)
    with pytest.raises(BufferTooSmall):
        s.decode(np.empty(31, dtype=np.uint32))
    with pytest.raises(BufferTooSmall):
        s.union(s, np.empty(10, dtype=np.uint32))


def test_union_evens_odds():
    ev = SlicedSet.build(validate_sequence(np.arange(0, 256, 2)))
    od = SlicedSet.build(validate_sequence(np.arange(1, 256, 2)))
    assert ev.or_array(od).tolist() == list(range(256))
    assert ev.and_array(od).size == 0
    assert ev.or_array(ev).tolist() == list(range(0, 256, 2))


def test_breakdown_toy():
    b = SlicedSet.build(toy()).space_breakdown()
    assert b.coverage == {"FC": 0, "DC": 0, "DB": 32, "SB": 0}
    assert b.bytes == {"H": 12, "FC": 0, "DC": 0, "DB": 32, "SB": 0}


def test_breakdown_mixed():
    b = SlicedSet.build(validate_sequence(MIXED)).space_breakdown()
    assert b.coverage == {"FC": 65536, "DC": 32768, "DB": 40, "SB": 3}
    assert b.bytes == {"H": 2 + 24 + 4, "FC": 0, "DC": 8192, "DB": 32, "SB": 3}


def test_malformed_buffers():
    good = (GOLDEN / "slicing_mixed.bin").read_bytes()
    bad = [
        b"", b"\x00",
        good[:-1], good + b"\x00",
        good[:2] + b"\x05" + good[3:],              # chunk 0 id > chunk 1 id
        good[:8] + b"\x07" + good[9:],              # unknown type
        good[:26] + b"\x00" + good[27:],            # dense bitmap popcount off by the cleared bits
        good[:-39] + bytes([7, 2, 5, 39]) + good[-35:],  # block ids out of order
        good[:-35] + bytes([3, 2, 1]) + good[-32:],  # array not increasing
    ]
    for buf in bad:
        with pytest.raises(MalformedBuffer):
            SlicedSet.deserialize(buf)


@settings(max_examples=60)
@given(sequences())
def test_round_trip_and_queries(seq):
    s = SlicedSet.build(seq)
    assert np.array_equal(s.to_array(), seq.values)
    again = SlicedSet.deserialize(s.serialize())
    assert again.serialize() == s.serialize()
    plain = seq.values.tolist()
    rng = np.random.default_rng(seq.n)
    for i in rng.integers(0, seq.n, 30).tolist():
        assert s.access(i) == plain[i]
    for x in rng.integers(0, plain[-1] + 300, 30).tolist():
        assert s.next_geq(x) == oracle.oracle_next_geq(plain, x)


@settings(max_examples=60)
@given(sequences(max_value=1 << 20), sequences(max_value=1 << 20))
def test_and_or_all_modes(a, b):
    sa, sb = SlicedSet.build(a), SlicedSet.build(b)
    pa, pb = a.values.tolist(), b.values.tolist()
    want_and, want_or = oracle.oracle_intersect(pa, pb), oracle.oracle_union(pa, pb)
    for mode in ("batched", "vector", "scalar"):
        out = np.empty(min(a.n, b.n), dtype=np.uint32)
        assert out[:sa.intersect(sb, out, mode=mode)].tolist() == want_and
    for mode in ("batched", "driver"):
        out = np.empty(a.n + b.n, dtype=np.uint32)
        assert out[:sa.union(sb, out, mode=mode)].tolist() == want_or
    assert sb.and_array(sa).tolist() == want_and
    assert sb.or_array(sa).tolist() == want_or


def test_structured_pairs_against_oracle():
    rng = np.random.default_rng(11)
    seqs = [structured_sequence(rng) for _ in range(40)]
    sets = [SlicedSet.build(s) for s in seqs]
    for k in range(0, 40, 2):
        a, b = seqs[k], seqs[k + 1]
        assert sets[k].and_array(sets[k + 1]).tolist() == np.intersect1d(a.values, b.values).tolist()
        assert sets[k].or_array(sets[k + 1]).tolist() == np.union1d(a.values, b.values).tolist()


@settings(max_examples=60)
@given(sequences())
def test_accounting_invariants(seq):
    s = SlicedSet.build(seq)
    chunks = s.chunk_descriptors()
    assert s.size_bytes() == 2 + sum(8 + c["encoded_bytes"] for c in chunks)
    for k, c in enumerate(chunks):
        if c["type"] == "dense":
            assert c["encoded_bytes"] == CHUNK_BITMAP_BYTES
            if c["cardinality"] >= 1 << 15:
                assert 8 * c["encoded_bytes"] / c["cardinality"] <= 2.0
        if c["type"] == "sparse":
            blocks = s.block_descriptors(k)
            payload = sum(b["cardinality"] if b["cardinality"] < SPARSE_BLOCK_LIMIT else 32 for b in blocks)
            assert c["encoded_bytes"] == 2 * len(blocks) + payload < CHUNK_BITMAP_BYTES
    b = s.space_breakdown()
    assert sum(b.coverage.values()) == seq.n
    assert sum(b.bytes.values()) == s.size_bytes()


def test_unknown_mode():
    s = SlicedSet.build(toy())
    with pytest.raises(ValueError):
        s.intersect(s, np.empty(32, dtype=np.uint32), mode="simd")
