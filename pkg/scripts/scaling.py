"""Single-row solver wall time over a geometric range of sizes (CSV on stdout)."""

import argparse
import sys

from rowlegal.bench import BenchConfig, run, to_csv


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--min-exp", type=int, default=3)
    ap.add_argument("--max-exp", type=int, default=6)
    ap.add_argument("--per-decade", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    steps = (args.max_exp - args.min_exp) * args.per_decade
    sizes = tuple(int(round(10 ** (args.min_exp + i / args.per_decade))) for i in range(steps + 1))
    sys.stdout.write(to_csv(run(BenchConfig(sizes=sizes, seed=args.seed, repeat=args.repeat))))


if __name__ == "__main__":
    main()
