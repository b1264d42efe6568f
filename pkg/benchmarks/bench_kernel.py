"""Benchmark the compiled enumeration kernel against the pure-Python twin.

Usage: python benchmarks/bench_kernel.py [max_length ...]

Runs each backend on the same cutoffs, verifies they produce identical
class data, and prints timings plus the speedup.
"""

import os
import sys
import time

import numpy as np


def run(backend, cutoff):
    os.environ["ZETA_LAB_KERNEL"] = backend
    # fresh import so the kernel selection sees the env var
    for name in [m for m in sys.modules if m.startswith("zetalab")]:
        del sys.modules[name]
    from zetalab.hyperbolic_core import octagon_presentation
    from zetalab.surface_group import enumerate_classes

    pres = octagon_presentation(2)
    t0 = time.perf_counter()
    spec = enumerate_classes(pres, cutoff)
    elapsed = time.perf_counter() - t0
    return spec, elapsed


def main(argv):
    cutoffs = [float(x) for x in argv[1:]] or [6.2, 8.0, 9.5]
    print(f"{'cutoff':>7} {'classes':>8} {'cython':>9} {'python':>9} {'speedup':>8}")
    for cutoff in cutoffs:
        spec_c, t_c = run("c", cutoff)
        spec_p, t_p = run("py", cutoff)
        assert np.array_equal(spec_c.words_flat, spec_p.words_flat), \
            "backends disagree"
        assert np.array_equal(spec_c.lengths, spec_p.lengths)
        print(f"{cutoff:>7.2f} {len(spec_c):>8} {t_c:>8.3f}s {t_p:>8.3f}s "
              f"{t_p / t_c:>7.1f}x")


if __name__ == "__main__":
    main(sys.argv)
