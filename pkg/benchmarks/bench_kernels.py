"""Time the compiled and numpy kernel backends on representative inputs.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from bellsynth import kernels


def inputs(seed=0):
    rng = np.random.default_rng(seed)
    # one padded pulsed amplitude pair (512 x 1024) and a 1 s event stream
    a = rng.normal(size=(512, 1024)) + 1j * rng.normal(size=(512, 1024))
    b = rng.normal(size=(512, 1024)) + 1j * rng.normal(size=(512, 1024))
    t1 = np.sort(rng.uniform(0, 1e9, 14000))
    t2 = np.sort(rng.uniform(0, 1e9, 14000))
    return a, b, t1, t2


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    a, b, t1, t2 = inputs()
    cases = {
        "interference_sums": lambda m: m.interference_sums(a, b),
        "coincidence_pairs": lambda m: m.coincidence_pairs(t1, t2, 3.0, 0.1),
    }
    found = kernels.backends()
    print(f"{'kernel':<20} " + " ".join(f"{name:>12}" for name in found) + "   speedup")
    for case, fn in cases.items():
        times = {
            name: min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)) for name, mod in found.items()
        }
        cols = " ".join(f"{1e3 * t:>10.2f}ms" for t in times.values())
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{case:<20} {cols}   {speed:6.2f}x")


if __name__ == "__main__":
    main()
