"""Collections of lists, their on-disk format and density filtering.

File format: a stream of little-endian u32 words. The first record is
``[1][u]`` (u = number of documents, every value is below it); each
following record is ``[length][values...]`` with strictly increasing values.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import MalformedFile, UnivsliceError
from ..sequence import SortedSequence, density, validate_sequence


@dataclass
class Collection:
    u: int
    lists: list[SortedSequence]

    def __post_init__(self):
        for k, seq in enumerate(self.lists):
            if int(seq.values[-1]) >= self.u:
                raise ValueError(f"list {k} holds {int(seq.values[-1])}, outside universe {self.u}")

    def __len__(self) -> int:
        return len(self.lists)

    @property
    def total_integers(self) -> int:
        return sum(s.n for s in self.lists)


def write_collection(collection: Collection, path) -> None:
    words = [np.array([1, collection.u], dtype="<u4")]
    for seq in collection.lists:
        words.append(np.array([seq.n], dtype="<u4"))
        words.append(seq.values.astype("<u4"))
    Path(path).write_bytes(np.concatenate(words).tobytes())


def read_collection(path) -> Collection:
    raw = Path(path).read_bytes()
    if len(raw) % 4:
        raise MalformedFile(f"{path}: size {len(raw)} is not a whole number of 32-bit words")
    data = np.frombuffer(raw, dtype="<u4")
    if len(data) < 2 or data[0] != 1:
        raise MalformedFile(f"{path}: first record must be a single universe value")
    u = int(data[1])
    lists = []
    pos = 2
    while pos < len(data):
        length = int(data[pos])
        if length == 0 or pos + 1 + length > len(data):
            raise MalformedFile(f"{path}: bad record length {length} at word {pos}")
        values = data[pos + 1:pos + 1 + length]
        try:
            seq = validate_sequence(values, u - 1)
        except UnivsliceError as exc:
            raise MalformedFile(f"{path}: record {len(lists)}: {exc}") from exc
        lists.append(seq)
        pos += 1 + length
    return Collection(u, lists)


@dataclass
class DensityFilter:
    collection: Collection
    threshold: float
    sequences: int
    integers: int
    percent: float


def filter_by_density(collection: Collection, d: float) -> DensityFilter:
    """Keep the lists whose density exceeds ``d``."""
    if d < 0:
        raise ValueError("density threshold must be non-negative")
    kept = [s for s in collection.lists if density(s) > d]
    integers = sum(s.n for s in kept)
    total = collection.total_integers
    percent = 100.0 * integers / total if total else 0.0
    return DensityFilter(Collection(collection.u, kept), d, len(kept), integers, percent)
