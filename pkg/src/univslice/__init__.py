"""Compressed sorted-integer sets: recursive universe slicing plus two baselines.

``SlicedSet`` splits the universe into 2^16-span chunks (full, dense
bitmap, or sparse) and sparse chunks into 2^8-span blocks (bitmap or
byte array). ``PcEfList`` is Elias-Fano over fixed 128-value partitions
with skip pointers; ``RoaringLiteSet`` is the two-container
array/bitmap scheme.
"""
from ._common import LIMIT
from .algebra import ListPartitionCursor, SuccessorCursor, intersect_by_candidate, intersect_by_partition
from .bits import select_in_word
from .errors import (BufferTooSmall, EmptyInput, IndexOutOfBounds, InfeasibleParameters, MalformedBuffer,
                     MalformedFile, NotStrictlyIncreasing, RankOutOfRange, UniverseTooSmall, UnivsliceError,
                     ValidationFailure)
from .kernels import small_array_intersect
from .pcef import EfPartition, PcEfList, ef_decode_partition, ef_encode_partition
from .roaring import RoaringLiteSet
from .sequence import (Partitioning, SortedSequence, density, partition_by_cardinality, partition_by_universe,
                       validate_sequence)
from .slicing import Breakdown, SlicedSet

__all__ = [
    "LIMIT", "ListPartitionCursor", "SuccessorCursor", "intersect_by_candidate", "intersect_by_partition",
    "select_in_word", "BufferTooSmall", "EmptyInput", "IndexOutOfBounds", "InfeasibleParameters",
    "MalformedBuffer", "MalformedFile", "NotStrictlyIncreasing", "RankOutOfRange", "UniverseTooSmall",
    "UnivsliceError", "ValidationFailure", "small_array_intersect", "EfPartition", "PcEfList",
    "ef_decode_partition", "ef_encode_partition", "RoaringLiteSet", "Partitioning", "SortedSequence",
    "density", "partition_by_cardinality", "partition_by_universe", "validate_sequence", "Breakdown",
    "SlicedSet",
]
