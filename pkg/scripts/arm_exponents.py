"""Arm-probability curves and log-log slopes for the standard arm events.

    python scripts/arm_exponents.py --trials 20000 --radii 16,32,64,128,256
"""
import argparse

from percolab import estimators, lattice, sampler

EVENTS = {
    "one-arm": sampler.one_arm(),
    "two-arm": sampler.alternating_arms(2),
    "four-arm": sampler.alternating_arms(4),
    "half-plane": sampler.half_plane_arms((1,)),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--r", type=int, default=4)
    ap.add_argument("--radii", default="16,32,64,128,256")
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--five-arm", action="store_true", help="also run Z2 five arms (r = 1)")
    args = ap.parse_args()
    radii = [int(x) for x in args.radii.split(",")]

    jobs = [(name, ev, args.r, radii, lattice.TRIANGULAR) for name, ev in EVENTS.items()]
    if args.five_arm:
        jobs.append(("five-arm", sampler.five_arm(), 1, [4, 8, 16, 32, 64], lattice.SQUARE))
    for name, ev, r, rs, lat in jobs:
        ests = estimators.estimate_arm_curve(ev, r, rs, args.trials, seed=args.seed, lat=lat)
        fit = estimators.fit_exponent(ests)
        probs = " ".join(f"{e.R}:{e.p_hat:.4f}" for e in ests)
        print(f"{name:10s} {probs}")
        print(f"{'':10s} slope {fit.slope:+.3f} +- {fit.stderr:.3f}  reference {fit.reference:+.3f}")


if __name__ == "__main__":
    main()
