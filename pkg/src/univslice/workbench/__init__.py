"""Collections, synthetic data, the oracle and the benchmark runner."""
from .bench import OPS, REPRESENTATIONS, BenchReport, Workload, bench_run, build_all, make_workload, validate
from .collection import Collection, DensityFilter, filter_by_density, read_collection, write_collection
from .generate import generate_clustered
from .oracle import oracle_access, oracle_decode, oracle_intersect, oracle_next_geq, oracle_union

__all__ = [
    "OPS", "REPRESENTATIONS", "BenchReport", "Workload", "bench_run", "build_all", "make_workload",
    "validate", "Collection", "DensityFilter", "filter_by_density", "read_collection",
    "write_collection", "generate_clustered", "oracle_access", "oracle_decode", "oracle_intersect",
    "oracle_next_geq", "oracle_union",
]
