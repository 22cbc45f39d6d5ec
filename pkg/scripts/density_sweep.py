"""Retained lists and integers as the density threshold grows.

    python3 scripts/density_sweep.py --lists 2000 --output sweep.csv
"""
import argparse
import csv
import sys

from univslice.workbench import filter_by_density, generate_clustered, read_collection


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--input", help="collection file; a synthetic one is generated when omitted")
    p.add_argument("--lists", type=int, default=2000)
    p.add_argument("--universe", type=int, default=1 << 24)
    p.add_argument("--density", type=float, default=1e-3)
    p.add_argument("--spread", type=float, default=1.5, help="log10 half-width of per-list densities")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--thresholds", default="1e-2,1e-3,1e-4")
    p.add_argument("--output")
    args = p.parse_args()

    if args.input:
        c = read_collection(args.input)
    else:
        c = generate_clustered(args.lists, args.universe, args.density, seed=args.seed, density_spread=args.spread)
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    w = csv.writer(out)
    w.writerow(["threshold", "sequences", "integers", "percent_integers"])
    for d in (float(t) for t in args.thresholds.split(",")):
        f = filter_by_density(c, d)
        w.writerow([d, f.sequences, f.integers, f"{f.percent:.2f}"])
    if args.output:
        out.close()


if __name__ == "__main__":
    main()
