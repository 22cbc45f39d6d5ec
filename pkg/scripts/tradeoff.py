"""Space versus AND latency for the three representations.

One benchmark per density level on a synthetic clustered collection;
writes (representation, density, bits/int, AND us/query, decode ns/int)
rows ready to scatter-plot.

    python3 scripts/tradeoff.py --lists 500 --pairs 200 --runs 3 --output tradeoff.csv
"""
import argparse
import csv
import sys

from univslice.workbench import REPRESENTATIONS, bench_run, generate_clustered, make_workload


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--lists", type=int, default=500)
    p.add_argument("--universe", type=int, default=1 << 24)
    p.add_argument("--densities", default="1e-2,1e-3,1e-4")
    p.add_argument("--pairs", type=int, default=200)
    p.add_argument("--runs", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    args = p.parse_args()

    reprs = list(REPRESENTATIONS)
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    w = csv.writer(out)
    w.writerow(["repr", "density", "bits_per_int", "and_us", "decode_ns_per_int"])
    for d in (float(x) for x in args.densities.split(",")):
        c = generate_clustered(args.lists, args.universe, d, seed=args.seed)
        workload = make_workload(c, args.seed, args.pairs, queries=1)
        report = bench_run(c, reprs, workload, args.runs, ops=("decode", "and"), density=d)
        for name in reprs:
            w.writerow([name, d, f"{report.value(name, 'bits_per_int'):.3f}",
                        f"{report.value(name, 'and'):.1f}", f"{report.value(name, 'decode'):.1f}"])
        out.flush()
    if args.output:
        out.close()


if __name__ == "__main__":
    main()
