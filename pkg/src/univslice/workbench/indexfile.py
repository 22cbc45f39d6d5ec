"""Container file for a built index: one serialized set per list.

Layout (little-endian u32 words unless noted)::

    b"USLX" [version = 1][representation code][universe][list count]
    per list: [byte length][serialized set]
"""
from __future__ import annotations

import struct
from pathlib import Path

from ..errors import MalformedFile, UnivsliceError
from .bench import REPRESENTATIONS

MAGIC = b"USLX"
VERSION = 1
CODES = {"slicing": 1, "pc-ef": 2, "roaring-lite": 3}
NAMES = {v: k for k, v in CODES.items()}


def write_index(path, repr_name: str, u: int, sets) -> None:
    parts = [MAGIC, struct.pack("<IIII", VERSION, CODES[repr_name], u, len(sets))]
    for s in sets:
        blob = s.serialize()
        parts.append(struct.pack("<I", len(blob)))
        parts.append(blob)
    Path(path).write_bytes(b"".join(parts))


def read_index(path):
    """Returns (representation name, universe, list of sets)."""
    raw = Path(path).read_bytes()
    if len(raw) < 20 or raw[:4] != MAGIC:
        raise MalformedFile(f"{path}: not an index file")
    version, code, u, count = struct.unpack_from("<IIII", raw, 4)
    if version != VERSION or code not in NAMES:
        raise MalformedFile(f"{path}: unsupported version {version} or representation {code}")
    cls = REPRESENTATIONS[NAMES[code]]
    pos = 20
    sets = []
    for k in range(count):
        if pos + 4 > len(raw):
            raise MalformedFile(f"{path}: truncated before list {k}")
        (size,) = struct.unpack_from("<I", raw, pos)
        pos += 4
        if pos + size > len(raw):
            raise MalformedFile(f"{path}: list {k} truncated")
        try:
            sets.append(cls.deserialize(raw[pos:pos + size]))
        except UnivsliceError as exc:
            raise MalformedFile(f"{path}: list {k}: {exc}") from exc
        pos += size
    if pos != len(raw):
        raise MalformedFile(f"{path}: {len(raw) - pos} trailing bytes")
    return NAMES[code], u, sets
