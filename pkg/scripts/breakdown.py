"""Where a sliced index spends its bytes, per density level.

For each density, integers covered by full chunks, dense chunks, dense
blocks and sparse blocks (as fractions of n), and bytes spent on headers
and on each container kind (as fractions of the index size).

    python3 scripts/breakdown.py --densities 1e-2,1e-3,1e-4 --output breakdown.csv
"""
import argparse
import csv
import sys

from univslice.slicing import SlicedSet
from univslice.workbench import generate_clustered


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--lists", type=int, default=300)
    p.add_argument("--universe", type=int, default=1 << 24)
    p.add_argument("--densities", default="1e-1,1e-2,1e-3,1e-4")
    p.add_argument("--run-prob", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    args = p.parse_args()

    out = open(args.output, "w", newline="") if args.output else sys.stdout
    w = csv.writer(out)
    w.writerow(["density", "kind", "FC", "DC", "DB", "SB", "H"])
    for d in (float(x) for x in args.densities.split(",")):
        c = generate_clustered(args.lists, args.universe, d, args.run_prob, seed=args.seed)
        cov = dict.fromkeys(("FC", "DC", "DB", "SB"), 0)
        size = dict.fromkeys(("H", "FC", "DC", "DB", "SB"), 0)
        for seq in c.lists:
            b = SlicedSet.build(seq).space_breakdown()
            for k, v in b.coverage.items():
                cov[k] += v
            for k, v in b.bytes.items():
                size[k] += v
        n, total = c.total_integers, sum(size.values())
        w.writerow([d, "integers"] + [f"{cov[k] / n:.4f}" for k in ("FC", "DC", "DB", "SB")] + [""])
        w.writerow([d, "bytes"] + [f"{size[k] / total:.4f}" for k in ("FC", "DC", "DB", "SB", "H")])
        out.flush()
    if args.output:
        out.close()


if __name__ == "__main__":
    main()
