"""KS distance of n-th root Ginibre product spectra to U(0, 1) as n grows.

Usage: python demos/ginibre_convergence.py [N] [repetitions]
"""

import sys

from freemax import Uniform01, mean_ks, sample_batch


def main(N=256, repetitions=4):
    N, repetitions = int(N), int(repetitions)
    for n in (1, 2, 4, 8, 16, 32, 64):
        batch = sample_batch("ginibre-product", N, n, seed=7, repetitions=repetitions)
        print(f"n={n:<3d} mean KS={mean_ks(batch, Uniform01()):.4f}")


if __name__ == "__main__":
    main(*sys.argv[1:])
