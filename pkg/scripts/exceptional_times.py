"""Time sets of a crossing event under the dynamics, with covering numbers.

    python scripts/exceptional_times.py --R 16 --T 1 --trials 200
"""
import argparse

import numpy as np

from percolab import dynamics, lattice, sampler


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--R", type=int, default=16)
    ap.add_argument("--T", type=float, default=1.0)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    dom = lattice.box(args.R)
    ev = sampler.box_left_right()
    s = dynamics.exceptional_time_stats(dom, ev, args.T, args.trials, seed=args.seed)
    print(f"P[crossed at 0] = {s.p_hat.mean:.3f} +- {s.p_hat.stderr:.3f}")
    print(f"mean switches N = {s.N.mean():.3f}, influence 2N/T = {s.i_hat:.3f}")
    print(f"mean occupied time = {s.X.mean():.3f}, second-moment ratio = {s.second_moment_ratio:.3f}")
    print(f"covering bound violations: {s.bound_violations}")
    for e, c in zip(s.eps[::3], s.covering.mean(axis=0)[::3]):
        print(f"  eps={e:.5f}  mean covering number {c:.2f}")
    d = dynamics.dimension_bound(max(s.p_hat.mean, 1e-12), max(s.i_hat, 1e-12))
    print(f"dimension bound from these estimates: {d.value} ({d.regime})")
    ts = dynamics.crossing_time_set(dom, ev, args.T, args.seed, 0)
    print("first trajectory intervals:", np.round(ts.intervals, 4).tolist())


if __name__ == "__main__":
    main()
