import csv
import io
import json

import numpy as np

from univslice import validate_sequence
from univslice.cli import main
from univslice.workbench import Collection, write_collection


def test_gen_verify_build_stats(tmp_path, capsys):
    data = tmp_path / "c.bin"
    assert main(["gen", "--lists", "20", "--universe", str(1 << 20), "--density", "0.01",
                 "--seed", "4", "--output", str(data)]) == 0
    assert main(["verify", "--input", str(data), "--pairs", "30", "--queries", "20"]) == 0
    assert "all operations match" in capsys.readouterr().out
    for name in ("slicing", "pc-ef", "roaring-lite"):
        idx = tmp_path / f"{name}.idx"
        assert main(["build", "--input", str(data), "--repr", name, "--output", str(idx)]) == 0
        assert main(["stats", "--index", str(idx), "--format", "json"]) == 0
        stats = json.loads(capsys.readouterr().out.split("\n", 1)[1])
        assert stats["repr"] == name and stats["lists"] == 20


def test_bench_csv_one_row_per_metric(tmp_path, capsys):
    data = tmp_path / "c.bin"
    main(["gen", "--lists", "8", "--universe", str(1 << 18), "--density", "0.01", "--output", str(data)])
    capsys.readouterr()
    assert main(["bench", "--input", str(data), "--pairs", "10", "--queries", "10", "--runs", "2"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    keys = [(r["repr"], r["metric"]) for r in rows]
    assert len(keys) == len(set(keys))
    assert {r for r, _ in keys} == {"slicing", "pc-ef", "roaring-lite"}
    assert all(r["runs"] == "2" for r in rows)


def test_stats_full_chunk(tmp_path, capsys):
    data, idx = tmp_path / "full.bin", tmp_path / "full.idx"
    write_collection(Collection(1 << 16, [validate_sequence(np.arange(1 << 16))]), data)
    assert main(["build", "--input", str(data), "--repr", "slicing", "--output", str(idx)]) == 0
    capsys.readouterr()
    assert main(["stats", "--index", str(idx), "--format", "json"]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["coverage_percent"]["FC"] == 100.0
    assert stats["bytes"] == 10


def test_errors_exit_nonzero(tmp_path, capsys):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"\x01\x00\x00\x00\x10\x00\x00\x00\x02\x00\x00\x00\x05\x00\x00\x00\x04\x00\x00\x00")
    assert main(["verify", "--input", str(bad)]) == 1
    assert main(["stats", "--index", str(tmp_path / "missing.idx")]) == 1
    assert main(["stats", "--index", str(bad)]) == 1
    assert "error:" in capsys.readouterr().err
