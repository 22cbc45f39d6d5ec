import numpy as np
from hypothesis import given, settings

from helpers import toy, sequences
from univslice import (ListPartitionCursor, PcEfList, RoaringLiteSet, SlicedSet, SuccessorCursor,
                       intersect_by_candidate, intersect_by_partition)
from univslice.workbench import oracle


class Recording:
    """Wraps a value cursor and logs every next_geq argument."""

    def __init__(self, inner):
        self.inner = inner
        self.probes = []

    def next(self):
        return self.inner.next()

    def current(self):
        return self.inner.current()

    def next_geq(self, x):
        self.probes.append(x)
        return self.inner.next_geq(x)


@settings(max_examples=60)
@given(sequences(max_value=1 << 18), sequences(max_value=1 << 18))
def test_candidate_probes_are_monotone(a, b):
    la, lb = PcEfList.build(a), PcEfList.build(b)
    short, long_ = (la, lb) if la.n <= lb.n else (lb, la)
    rs, rl = Recording(short.cursor()), Recording(long_.cursor())
    out = np.empty(min(a.n, b.n), dtype=np.uint32)
    cnt = intersect_by_candidate(rs, rl, out)
    assert out[:cnt].tolist() == oracle.oracle_intersect(a.values.tolist(), b.values.tolist())
    for log in (rs.probes, rl.probes):
        assert all(x <= y for x, y in zip(log, log[1:]))


@settings(max_examples=40)
@given(sequences(max_value=1 << 20), sequences(max_value=1 << 20))
def test_both_paradigms_agree_across_representations(a, b):
    want = oracle.oracle_intersect(a.values.tolist(), b.values.tolist())
    out = np.empty(min(a.n, b.n), dtype=np.uint32)
    # candidate driver over generic successor cursors of two different representations
    cnt = intersect_by_candidate(SuccessorCursor(SlicedSet.build(a)), SuccessorCursor(RoaringLiteSet.build(b)), out)
    assert out[:cnt].tolist() == want
    # partition driver with a container kernel that reads the chunk values of each side
    sa, rb = SlicedSet.build(a), RoaringLiteSet.build(b)
    cnt = intersect_by_partition(
        sa.partitions(), rb.partitions(),
        lambda i, j: np.intersect1d(sa._chunk_values(i), rb._chunk_values(j)), out)
    assert out[:cnt].tolist() == want


def test_partition_driver_no_common_ids():
    calls = []
    out = np.empty(4, dtype=np.uint32)
    cnt = intersect_by_partition(ListPartitionCursor([1, 3, 5]), ListPartitionCursor([0, 2, 4, 6]),
                                 lambda i, j: calls.append((i, j)), out)
    assert cnt == 0 and calls == []


def test_partition_driver_identical():
    out = np.empty(3, dtype=np.uint32)
    ids = [2, 9, 40]
    cnt = intersect_by_partition(ListPartitionCursor(ids), ListPartitionCursor(ids),
                                 lambda i, j: np.array([ids[i]]), out)
    assert out[:cnt].tolist() == ids


def test_successor_cursor():
    c = SuccessorCursor(SlicedSet.build(toy()))
    assert c.current() is None
    assert c.next() == 0
    assert c.next() == 1
    assert c.next_geq(23) == 24
    assert c.current() == 24
    assert c.next() == 27
    assert c.next_geq(60) is None
