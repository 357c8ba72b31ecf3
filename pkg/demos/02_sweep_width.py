"""
How much parallelism does a sweep expose?
=========================================

The width of a sweep is the number of rewrites it applies.  Here we compare
the width profiles of the three benchmark families.
"""

import numpy as np

from termsweep import sweep
from termsweep.corpora import GenSpec, generate_system

specs = [GenSpec("mergesort", (50,)), GenSpec("treemergesort", (6, 5)), GenSpec("transform", (8,))]

for spec in specs:
    system = generate_system(spec)
    nf, trace = sweep.normalize(system)
    w = trace.widths
    print(f"{spec.family:14s} rewrites={trace.total_rewrites:6d} sweeps={trace.sweeps:5d} "
          f"max={w.max():4d} median={np.median(w):6.1f}")

# a single merge sort is mostly a long tail of width one;
# the transformation tree steps all 2^d leaves at once
system = generate_system(GenSpec("transform", (8,)))
_, trace = sweep.normalize(system)
print("transform(8) widths:", trace.widths.tolist())

# a coarse text histogram of the merge sort profile
_, trace = sweep.normalize(generate_system(GenSpec("mergesort", (50,))))
counts = np.bincount(trace.widths)
for width, k in enumerate(counts):
    if k:
        print(f"width {width:3d}: {'#' * max(1, int(60 * k / counts.max()))} {k}")

# the per-sweep trace is plain CSV
print(trace.to_csv().splitlines()[0])
print(trace.to_csv().splitlines()[1])
