"""Compare the pure-Python and GMP multiplication backends.

Usage: python3 benchmarks/bench_kernel.py [--repeat R] [--json FILE]

Two workloads are timed for every available backend: a single packed
series product of the size met in the modular-equation product tree, and
the complete modular equation for (N, k, l) = (7, 3, 2).  Both backends
must produce identical results; the script exits nonzero otherwise.
"""

from __future__ import annotations

import argparse
import json
import random
import statistics
import sys
import time

from genlambda import kernel
from genlambda.cyclotomic import cyclo_context
from genlambda.modpoly import modular_equation
from genlambda.phiexp import LambdaParams


def random_rows(rng, n, d, bits):
    return [[rng.randrange(-(1 << bits), 1 << bits) for _ in range(d)] for _ in range(n)]


def timeit(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="write the timings here")
    args = ap.parse_args(argv)

    ctx = cyclo_context(7)
    rng = random.Random(20240607)
    cases = [(70, 200), (400, 200), (200, 1000)]
    data = {n_bits: (random_rows(rng, n_bits[0], ctx.degree, n_bits[1]),
                     random_rows(rng, n_bits[0], ctx.degree, n_bits[1])) for n_bits in cases}
    results = {}
    reference = {}
    for backend in kernel.available_backends():
        kernel.set_backend(backend)
        row = {}
        for (n, bits), (a, b) in data.items():
            t, out = timeit(lambda a=a, b=b, n=n: kernel.mul_rows(a, b, n, ctx.degree, ctx.red), args.repeat)
            key = f"mul_rows n={n} bits={bits}"
            row[key] = t
            if reference.setdefault(key, out) != out:
                print(f"backend {backend} disagrees on {key}", file=sys.stderr)
                return 1
        t, me = timeit(lambda: modular_equation(LambdaParams(7, 3, 2)), max(1, args.repeat // 2))
        row["modular_equation (7,3,2)"] = t
        if reference.setdefault("me", me.to_json()) != me.to_json():
            print(f"backend {backend} disagrees on the modular equation", file=sys.stderr)
            return 1
        results[backend] = row

    names = list(results)
    keys = list(results[names[0]])
    width = max(len(k) for k in keys)
    print(f"{'workload':<{width}}  " + "  ".join(f"{n:>10}" for n in names)
          + ("     speedup" if len(names) > 1 else ""))
    for k in keys:
        line = f"{k:<{width}}  " + "  ".join(f"{results[n][k] * 1e3:>8.2f}ms" for n in names)
        if len(names) > 1:
            line += f"  {results['python'][k] / results['gmp'][k]:>9.1f}x"
        print(line)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=1, sort_keys=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
