"""Revealment of the two-interface box algorithm as the box grows.

    python scripts/revealment_decay.py --trials 5000 --sizes 16,32,64
"""
import argparse

import numpy as np

from percolab import explore


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="16,32,64")
    ap.add_argument("--trials", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    sizes = [int(x) for x in args.sizes.split(",")]
    deltas = []
    for R in sizes:
        rec = explore.measure_revealment("box", (R,), args.trials, seed=args.seed)
        deltas.append(rec.delta_hat)
        where = rec.domain.cells[int(np.argmax(rec.counts))]
        print(f"R={R:4d}  delta_hat={rec.delta_hat:.4f}  busiest cell (u, v)={tuple(int(c) for c in where)}")
    dec = -np.diff(np.log2(deltas))
    print("log2 decrement per doubling:", " ".join(f"{d:.3f}" for d in dec))


if __name__ == "__main__":
    main()
