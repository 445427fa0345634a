"""Exact level-weight bounds for the built-in corpus and the majority witness.

    python scripts/fourier_corpus.py
"""
from percolab import fourier


def show(name, report):
    print(f"{name}: delta={report.delta}  ||f||^2={report.norm2}  violations={report.violations}")
    for c in report.levels:
        if c.weight:
            print(f"    k={c.k}  weight={c.weight}  bound={c.bound}  {'ok' if c.ok else 'VIOLATED'}")


def main():
    for name, f, alg in fourier.builtin_corpus():
        show(name, fourier.check_theorem_noise(f, alg))
    f, wit = fourier.recursive_majority(2), fourier.recursive_majority_witness(2)
    print("\nwitness sets are not query algorithms:",
          "conditionally uniform =", fourier.conditionally_uniform(wit))
    show(wit.name, fourier.check_theorem_noise(f, wit))
    short = fourier.random_order_and_truncated(3, 2)
    rep = fourier.check_generalized(fourier.and_function(3), short)
    print(f"\nAND_3 stopped after two reads: E[var]={rep.expected_variance}")
    show(short.name + " (generalized bound)", rep)


if __name__ == "__main__":
    main()
