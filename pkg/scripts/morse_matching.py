"""Morse matching of perturbed tree isometries, swept over the perturbation size."""

import argparse
import random
from fractions import Fraction

from buildings.coarse import MorseMatcher, controlled_fit, morse_match, perturbed_isometry
from buildings.rtree import apartments, random_automorphism, regular_tree


def sweep(depth, trials, eps_values, seed):
    T = regular_tree(3, depth)
    apts = apartments(T)
    matcher = MorseMatcher(T)
    rng = random.Random(seed)
    for eps in eps_values:
        wrong = ties = 0
        worst = Fraction(0)
        worst_fit = (Fraction(1), Fraction(0))
        for _ in range(trials):
            g = random_automorphism(T, rng)
            f = perturbed_isometry(T, g, eps, rng)
            fit = controlled_fit(f)
            worst_fit = max(worst_fit, (fit.c, fit.d))
            for A in apts:
                rep = morse_match(T, T, f, A, matcher)
                worst = max(worst, rep.distance)
                ties += len(rep.minimizers) > 1
                wrong += rep.best.ends != frozenset((g[A.u], g[A.v]))
        print(f"eps={eps!s:>5}  wrong={wrong:4d}  ties={ties:4d}  max_hausdorff={worst!s:>5}  "
              f"worst_fit=(c={worst_fit[0]}, d={worst_fit[1]})")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--eps", nargs="*", default=["1/8", "1/4", "1/2", "1"])
    args = ap.parse_args()
    sweep(args.depth, args.trials, [Fraction(e) for e in args.eps], args.seed)


if __name__ == "__main__":
    main()
