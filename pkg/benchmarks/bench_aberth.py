"""Compare the compiled and NumPy Aberth kernels on preimage-sized batches.

Usage: python benchmarks/bench_aberth.py [--batch P] [--degrees 3,6,12] [--repeat R]
"""
import argparse
import time

import numpy as np

from compop.kernels import backends


def random_batch(rng, P, d):
    c = rng.normal(size=(P, d + 1)) + 1j * rng.normal(size=(P, d + 1))
    c[:, -1] += np.sign(c[:, -1].real) * 1.0  # keep the leading term away from zero
    return c


def best_time(fn, coeffs, repeat):
    fn(coeffs[:4])  # warm up
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn(coeffs)
        times.append(time.perf_counter() - t)
    return min(times)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--batch", type=int, default=16384)
    p.add_argument("--degrees", default="3,6,12")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    impls = backends()
    names = sorted(impls)
    print(f"{'degree':>6}  " + "  ".join(f"{n + ' [s]':>12}" for n in names) + "  speedup  max|dz|")
    for d in (int(x) for x in args.degrees.split(",")):
        coeffs = random_batch(rng, args.batch, d)
        times = {n: best_time(impls[n], coeffs, args.repeat) for n in names}
        roots = {n: np.sort_complex(impls[n](coeffs)[0]) for n in names}
        diff = max(float(np.max(np.abs(roots[n] - roots["python"]))) for n in names)
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{d:>6}  " + "  ".join(f"{times[n]:>12.4f}" for n in names)
              + f"  {speed:>7.1f}  {diff:.1e}")


if __name__ == "__main__":
    main()
