"""Print the limit operator Phi on a few catalog laws next to its closed form.

Usage: python demos/phi_catalog.py [output_dir]
"""

import sys
from pathlib import Path

import numpy as np

from freemax import BooleanStablePos, Dagum, FreeStablePos, MarchenkoPastur, Pareto, TwoPoint, phi
from freemax.export import write_cdf_table

CASES = [
    ("mp", MarchenkoPastur(1.0), lambda x: np.clip(x, 0, 1), np.linspace(0.05, 0.95, 7)),
    ("twopoint", TwoPoint(0.5, 2.0), lambda x: 1 / (2 - x), np.linspace(0.05, 0.95, 7)),
    ("fstable", FreeStablePos(0.5), Pareto(1.0).cdf, np.geomspace(1.1, 100, 7)),
    ("bstable", BooleanStablePos(0.5), Dagum(1.0).cdf, np.geomspace(0.01, 100, 7)),
]


def main(out_dir="demo_out"):
    out = Path(out_dir)
    for name, law, ref, x in CASES:
        res = phi(law)
        got = res.cdf(x)
        print(f"{name:<9} atom0={res.atom_zero:.3g} support={res.support} max|diff|={np.max(np.abs(got - ref(x))):.2e}")
        for xi, gi in zip(x, got):
            print(f"    x={xi:9.4f}  Phi={gi:.10f}")
        write_cdf_table(out / f"phi_{name}.csv", x, got)


if __name__ == "__main__":
    main(*sys.argv[1:])
