"""Query workloads, oracle gate and timed benchmark batches."""
from __future__ import annotations

import csv
import io
import json
import platform
import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationFailure
from ..pcef import PcEfList
from ..roaring import RoaringLiteSet
from ..slicing import SlicedSet
from . import oracle
from .collection import Collection

REPRESENTATIONS = {"slicing": SlicedSet, "pc-ef": PcEfList, "roaring-lite": RoaringLiteSet}
OPS = ("decode", "and", "or", "access", "nextgeq")
CSV_COLUMNS = ("repr", "metric", "dataset", "density", "value", "unit", "runs", "seed")
WORKLOAD_NOTES = "pairs uniform over lists (independent draws); access positions uniform in [0, n); nextGEQ keys uniform in [0, max]"


@dataclass
class Workload:
    and_or_pairs: np.ndarray
    access_positions: list[np.ndarray]
    nextgeq_keys: list[np.ndarray]
    seed: int


def make_workload(collection: Collection, seed: int, pairs: int = 1000, queries: int = 1000) -> Workload:
    """Unsorted random queries; a pure function of the collection and seed."""
    rng = np.random.default_rng(seed)
    nlists = len(collection.lists)
    pair_ids = rng.integers(0, nlists, size=(pairs, 2))
    positions, keys = [], []
    for seq in collection.lists:
        positions.append(rng.integers(0, seq.n, size=queries))
        keys.append(rng.integers(0, int(seq.values[-1]) + 1, size=queries))
    return Workload(pair_ids, positions, keys, seed)


def build_all(collection: Collection, reprs) -> dict[str, list]:
    return {name: [REPRESENTATIONS[name].build(s) for s in collection.lists] for name in reprs}


def _mismatch(name: str, what: str):
    raise ValidationFailure(f"{name}: {what} disagrees with the oracle")


def validate(collection: Collection, built: dict[str, list], workload: Workload, ops=OPS) -> None:
    """Run every workload query once per representation against the oracle."""
    plain = [s.values.tolist() for s in collection.lists]
    pairs = workload.and_or_pairs.tolist()
    expected_and = [oracle.oracle_intersect(plain[a], plain[b]) for a, b in pairs] if "and" in ops else []
    expected_or = [oracle.oracle_union(plain[a], plain[b]) for a, b in pairs] if "or" in ops else []
    for name, sets in built.items():
        for k, s in enumerate(sets):
            if "decode" in ops and s.to_array().tolist() != plain[k]:
                _mismatch(name, f"decode of list {k}")
            if "access" in ops:
                got = [s.access(i) for i in workload.access_positions[k].tolist()]
                if got != [oracle.oracle_access(plain[k], i) for i in workload.access_positions[k].tolist()]:
                    _mismatch(name, f"access on list {k}")
            if "nextgeq" in ops:
                keys = workload.nextgeq_keys[k].tolist()
                if [s.next_geq(x) for x in keys] != [oracle.oracle_next_geq(plain[k], x) for x in keys]:
                    _mismatch(name, f"nextGEQ on list {k}")
        for q, (a, b) in enumerate(pairs):
            if "and" in ops and sets[a].and_array(sets[b]).tolist() != expected_and[q]:
                _mismatch(name, f"AND of pair {q} ({a}, {b})")
            if "or" in ops and sets[a].or_array(sets[b]).tolist() != expected_or[q]:
                _mismatch(name, f"OR of pair {q} ({a}, {b})")


@dataclass
class BenchReport:
    rows: list[dict]
    runs: int
    seed: int
    dataset: str = ""
    density: float | None = None
    notes: dict = field(default_factory=dict)

    def value(self, repr_name: str, metric: str) -> float:
        for r in self.rows:
            if r["repr"] == repr_name and r["metric"] == metric:
                return r["value"]
        raise KeyError((repr_name, metric))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(self.rows)
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"rows": self.rows, "notes": self.notes}, indent=2)

    @staticmethod
    def rows_from_csv(text: str) -> list[dict]:
        rows = list(csv.DictReader(io.StringIO(text)))
        for r in rows:
            r["value"] = float(r["value"])
            r["runs"] = int(r["runs"])
            r["seed"] = int(r["seed"])
            r["density"] = float(r["density"]) if r["density"] else None
        return rows


def _time_batches(batch, runs: int) -> float:
    """Mean seconds per batch over ``runs`` timed repetitions after one warm-up."""
    batch()
    total = 0
    for _ in range(runs):
        t0 = time.perf_counter_ns()
        batch()
        total += time.perf_counter_ns() - t0
    return total / runs / 1e9


def bench_run(collection: Collection, reprs, workload: Workload, runs: int = 10, ops=OPS,
              dataset: str = "", density: float | None = None, built: dict | None = None) -> BenchReport:
    built = built or build_all(collection, reprs)
    validate(collection, built, workload, ops)
    total_ints = collection.total_integers
    pairs = workload.and_or_pairs.tolist()
    nqueries = sum(len(p) for p in workload.access_positions)
    rows = []

    def add(name, metric, value, unit):
        rows.append({"repr": name, "metric": metric, "dataset": dataset, "density": density,
                     "value": float(value), "unit": unit, "runs": runs, "seed": workload.seed})

    for name in reprs:
        sets = built[name]
        add(name, "bits_per_int", 8 * sum(s.size_bytes() for s in sets) / total_ints, "bits/int")
        if name == "slicing":
            cov = {"FC": 0, "DC": 0, "DB": 0, "SB": 0}
            size = {"H": 0, "FC": 0, "DC": 0, "DB": 0, "SB": 0}
            for s in sets:
                b = s.space_breakdown()
                for k, v in b.coverage.items():
                    cov[k] += v
                for k, v in b.bytes.items():
                    size[k] += v
            total_bytes = sum(size.values())
            for k, v in cov.items():
                add(name, f"coverage_{k}", v / total_ints, "fraction")
            for k, v in size.items():
                add(name, f"bytes_{k}", v / total_bytes, "fraction")
        if "decode" in ops:
            buf = np.empty(max(s.n for s in sets), dtype=np.uint32)
            secs = _time_batches(lambda: [s.decode(buf) for s in sets], runs)
            add(name, "decode", secs * 1e9 / total_ints, "ns/int")
        if "and" in ops:
            secs = _time_batches(lambda: [sets[a].and_array(sets[b]) for a, b in pairs], runs)
            add(name, "and", secs * 1e6 / len(pairs), "us/query")
        if "or" in ops:
            secs = _time_batches(lambda: [sets[a].or_array(sets[b]) for a, b in pairs], runs)
            add(name, "or", secs * 1e6 / len(pairs), "us/query")
        if "access" in ops:
            qs = [(s, p.tolist()) for s, p in zip(sets, workload.access_positions)]
            secs = _time_batches(lambda: [[s.access(i) for i in p] for s, p in qs], runs)
            add(name, "access", secs * 1e9 / nqueries, "ns/query")
        if "nextgeq" in ops:
            qs = [(s, k.tolist()) for s, k in zip(sets, workload.nextgeq_keys)]
            secs = _time_batches(lambda: [[s.next_geq(x) for x in k] for s, k in qs], runs)
            add(name, "nextgeq", secs * 1e9 / nqueries, "ns/query")

    notes = {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "machine": platform.machine(),
        "lists": len(collection.lists),
        "integers": total_ints,
        "pairs": len(pairs),
        "queries_per_list": len(workload.access_positions[0]) if workload.access_positions else 0,
        "workload": WORKLOAD_NOTES,
    }
    return BenchReport(rows, runs, workload.seed, dataset, density, notes)
