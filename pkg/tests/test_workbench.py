import json
import struct

import numpy as np
import pytest

from helpers import TOY
from univslice import InfeasibleParameters, MalformedFile, ValidationFailure, density, validate_sequence
from univslice.workbench import (OPS, REPRESENTATIONS, BenchReport, Collection, bench_run, build_all,
                                 filter_by_density, generate_clustered, make_workload, read_collection,
                                 validate, write_collection)
from univslice.workbench.bench import CSV_COLUMNS


def test_generator_is_deterministic():
    a = generate_clustered(10, 1 << 20, 1e-2, seed=7)
    b = generate_clustered(10, 1 << 20, 1e-2, seed=7)
    assert a.lists == b.lists
    assert a.lists != generate_clustered(10, 1 << 20, 1e-2, seed=8).lists


def test_generator_realized_density():
    c = generate_clustered(20, 1 << 20, 1e-2, seed=42)
    for seq in c.lists:
        assert 0.8e-2 <= density(seq) <= 1.2e-2
        assert int(seq.values[-1]) < 1 << 20


def test_generator_runs_limit():
    c = generate_clustered(5, 1 << 16, 0.5, run_prob=0.999, seed=1)
    for seq in c.lists:
        gaps = np.diff(seq.values.astype(np.int64))
        assert (gaps == 1).mean() > 0.95


def test_generator_infeasible():
    with pytest.raises(InfeasibleParameters):
        generate_clustered(3, 1 << 10, 2.0)
    with pytest.raises(InfeasibleParameters):
        generate_clustered(0, 1 << 10, 0.1)
    with pytest.raises(InfeasibleParameters):
        generate_clustered(3, 1 << 10, 0.1, run_prob=1.0)


def test_collection_file_round_trip(tmp_path):
    c = generate_clustered(6, 1 << 18, 1e-2, seed=3)
    path = tmp_path / "c.bin"
    write_collection(c, path)
    back = read_collection(path)
    assert back.u == c.u and back.lists == c.lists


def test_hand_built_file(tmp_path):
    path = tmp_path / "two.bin"
    path.write_bytes(struct.pack("<7I", 1, 100, 2, 3, 7, 1, 50))
    c = read_collection(path)
    assert c.u == 100
    assert [s.values.tolist() for s in c.lists] == [[3, 7], [50]]


@pytest.mark.parametrize("words", [
    (1, 100, 2, 7, 3),          # descending pair
    (1, 100, 3, 1, 2),          # truncated record
    (1, 100, 0),                # empty record
    (2, 100, 5),                # bad universe record
    (1, 10, 1, 10),             # value not below the universe
])
def test_malformed_files(tmp_path, words):
    path = tmp_path / "bad.bin"
    path.write_bytes(struct.pack(f"<{len(words)}I", *words))
    with pytest.raises(MalformedFile):
        read_collection(path)
    path.write_bytes(b"\x01\x00\x00")
    with pytest.raises(MalformedFile):
        read_collection(path)


def test_density_filter_examples():
    keep = validate_sequence(np.r_[np.arange(99), 5000])
    drop = validate_sequence(np.r_[np.arange(9), 10**6])
    c = Collection(10**6 + 1, [keep, drop])
    f = filter_by_density(c, 1e-2)
    assert f.sequences == 1 and f.collection.lists == [keep]
    f = filter_by_density(c, 1e-4)
    assert f.collection.lists == [keep]
    assert f.integers == 100 and f.percent == pytest.approx(100 * 100 / 110)
    assert filter_by_density(c, 0).sequences == 2


def small_collection():
    c = generate_clustered(12, 1 << 20, 5e-3, run_prob=0.6, seed=5)
    c.lists.append(validate_sequence(TOY))
    c.lists.append(validate_sequence(np.arange(1 << 16)))
    return c


def test_workload_is_pure():
    c = small_collection()
    w1, w2 = make_workload(c, 9, 50, 20), make_workload(c, 9, 50, 20)
    assert np.array_equal(w1.and_or_pairs, w2.and_or_pairs)
    assert all(np.array_equal(x, y) for x, y in zip(w1.nextgeq_keys, w2.nextgeq_keys))
    assert all(np.array_equal(x, y) for x, y in zip(w1.access_positions, w2.access_positions))


def test_validate_catches_a_broken_representation():
    c = small_collection()
    w = make_workload(c, 0, 20, 10)
    built = build_all(c, ["slicing"])
    validate(c, built, w)
    built["slicing"][0], built["slicing"][1] = built["slicing"][1], built["slicing"][0]
    with pytest.raises(ValidationFailure):
        validate(c, built, w)


def test_bench_report_shape_and_round_trip():
    c = Collection(56, [validate_sequence(TOY, 55)])
    report = bench_run(c, list(REPRESENTATIONS), make_workload(c, 1, 4, 4), runs=1, dataset="toy")
    assert report.value("slicing", "bits_per_int") == pytest.approx(44 * 8 / 32)
    for name in REPRESENTATIONS:
        for metric in ("bits_per_int",) + OPS:
            report.value(name, metric)
    keys = [(r["repr"], r["metric"]) for r in report.rows]
    assert len(keys) == len(set(keys))
    text = report.to_csv()
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert BenchReport.rows_from_csv(text) == report.rows
    assert json.loads(report.to_json())["rows"] == report.rows
