"""Command line: gen, build, stats, bench, verify."""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import UnivsliceError, ValidationFailure
from .workbench.bench import OPS, REPRESENTATIONS, bench_run, build_all, make_workload, validate
from .workbench.collection import filter_by_density, read_collection, write_collection
from .workbench.generate import generate_clustered
from .workbench.indexfile import read_index, write_index


def _csv_list(choices):
    def parse(text):
        items = [t.strip() for t in text.split(",") if t.strip()]
        bad = [t for t in items if t not in choices]
        if bad or not items:
            raise argparse.ArgumentTypeError(f"choose from {', '.join(choices)}")
        return items
    return parse


def _load(path, threshold):
    collection = read_collection(path)
    if threshold is None:
        return collection, None
    filt = filter_by_density(collection, threshold)
    print(f"density > {threshold:g}: {filt.sequences} lists, {filt.integers} integers "
          f"({filt.percent:.1f}% retained)", file=sys.stderr)
    return filt.collection, filt


def cmd_gen(args):
    collection = generate_clustered(args.lists, args.universe, args.density, args.run_prob,
                                    args.gap_mean, args.seed, args.density_spread)
    write_collection(collection, args.output)
    print(f"wrote {len(collection)} lists, {collection.total_integers} integers to {args.output}")
    return 0


def cmd_build(args):
    collection, _ = _load(args.input, args.density_filter)
    if not collection.lists:
        print("no lists left after filtering", file=sys.stderr)
        return 1
    sets = build_all(collection, [args.repr])[args.repr]
    write_index(args.output, args.repr, collection.u, sets)
    total = sum(s.size_bytes() for s in sets)
    print(f"{args.repr}: {len(sets)} lists, {total} bytes, "
          f"{8 * total / collection.total_integers:.3f} bits/int -> {args.output}")
    return 0


def cmd_stats(args):
    name, u, sets = read_index(args.index)
    n = sum(s.n for s in sets)
    size = sum(s.size_bytes() for s in sets)
    stats = {"repr": name, "universe": u, "lists": len(sets), "integers": n,
             "bytes": size, "bits_per_int": 8 * size / n}
    if name == "slicing":
        cov = {"FC": 0, "DC": 0, "DB": 0, "SB": 0}
        nbytes = {"H": 0, "FC": 0, "DC": 0, "DB": 0, "SB": 0}
        for s in sets:
            b = s.space_breakdown()
            for k, v in b.coverage.items():
                cov[k] += v
            for k, v in b.bytes.items():
                nbytes[k] += v
        stats["coverage_percent"] = {k: 100.0 * v / n for k, v in cov.items()}
        stats["bytes_percent"] = {k: 100.0 * v / size for k, v in nbytes.items()}
    if args.format == "json":
        print(json.dumps(stats, indent=2))
        return 0
    print(f"{name}: {len(sets)} lists, {n} integers, {size} bytes, {stats['bits_per_int']:.3f} bits/int")
    if name == "slicing":
        print("coverage %: " + "  ".join(f"{k} {v:.2f}" for k, v in stats["coverage_percent"].items()))
        print("bytes %:    " + "  ".join(f"{k} {v:.2f}" for k, v in stats["bytes_percent"].items()))
    return 0


def cmd_bench(args):
    collection, _ = _load(args.input, args.density_filter)
    workload = make_workload(collection, args.seed, args.pairs, args.queries)
    report = bench_run(collection, args.reprs, workload, args.runs, args.ops,
                       dataset=args.dataset or args.input, density=args.density_filter)
    text = report.to_csv() if args.format == "csv" else report.to_json()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args):
    collection, _ = _load(args.input, args.density_filter)
    workload = make_workload(collection, args.seed, args.pairs, args.queries)
    built = build_all(collection, args.reprs)
    for name, sets in built.items():
        for s, seq in zip(sets, collection.lists):
            again = REPRESENTATIONS[name].deserialize(s.serialize())
            if not np.array_equal(again.to_array(), seq.values):
                raise ValidationFailure(f"{name}: serialization round trip failed")
    validate(collection, built, workload, OPS)
    print(f"verified {', '.join(args.reprs)} on {len(collection)} lists: all operations match the oracle")
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="univslice", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    reprs = list(REPRESENTATIONS)

    g = sub.add_parser("gen", help="write a synthetic clustered collection")
    g.add_argument("--lists", type=int, default=100)
    g.add_argument("--universe", type=int, default=1 << 24)
    g.add_argument("--density", type=float, default=1e-3)
    g.add_argument("--density-spread", type=float, default=0.0, help="log10 half-width of per-list densities")
    g.add_argument("--run-prob", type=float, default=0.5)
    g.add_argument("--gap-mean", type=float, default=8.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", required=True)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("build", help="build one representation over a collection")
    b.add_argument("--input", required=True)
    b.add_argument("--repr", choices=reprs, required=True)
    b.add_argument("--density-filter", type=float)
    b.add_argument("--output", required=True)
    b.set_defaults(func=cmd_build)

    s = sub.add_parser("stats", help="space statistics of a built index")
    s.add_argument("--index", required=True)
    s.add_argument("--format", choices=["text", "json"], default="text")
    s.set_defaults(func=cmd_stats)

    for name, func, helptext in (("bench", cmd_bench, "time the operations"),
                                 ("verify", cmd_verify, "differential test against the oracle")):
        c = sub.add_parser(name, help=helptext)
        c.add_argument("--input", required=True)
        c.add_argument("--reprs", type=_csv_list(reprs), default=reprs)
        c.add_argument("--density-filter", type=float)
        c.add_argument("--seed", type=int, default=0)
        c.add_argument("--pairs", type=int, default=1000)
        c.add_argument("--queries", type=int, default=1000, help="access/nextGEQ queries per list")
        c.set_defaults(func=func)
        if name == "bench":
            c.add_argument("--ops", type=_csv_list(OPS), default=list(OPS))
            c.add_argument("--runs", type=int, default=10)
            c.add_argument("--format", choices=["csv", "json"], default="csv")
            c.add_argument("--dataset", default="")
            c.add_argument("--output")
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UnivsliceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
