"""Compiled versus pure-Python jet kernels.

Run with ``python3 benchmarks/bench_jet.py [--order N] [--repeat R]``.  Each
kernel is timed on the same inputs under both backends, and a full
``scalar_pack`` evaluation is timed in a subprocess per backend because the
backend is fixed at import.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from abmetric import _jetcore_py

try:
    from abmetric import _jetcore
except ImportError:
    _jetcore = None

PACK_SNIPPET = (
    "import timeit; from abmetric.scalars import PhiSpec, scalar_pack; "
    "phi = PhiSpec.randers_type(1.0, 0.5, 0.3); "
    "n = {number}; "
    "t = min(timeit.repeat(lambda: scalar_pack(phi, 0.2, 0.25, 3), number=n, repeat=3)); "
    "print(t / n)"
)


def kernel_cases(order, rng):
    a = list(rng.uniform(-1, 1, order + 1))
    b = list(rng.uniform(-1, 1, order + 1))
    a[0], b[0] = 1.7, 2.3
    return {
        "mul": ("mul", (a, b)),
        "div": ("div", (a, b)),
        "sqrt": ("sqrt", (a,)),
        "exp": ("exp", (a,)),
        "log": ("log", (a,)),
        "powr": ("powr", (a, 2.5)),
    }


def time_kernel(module, name, args, number):
    fn = getattr(module, name)
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=5)) / number


def time_pack(pure, number):
    env = dict(os.environ)
    env.pop("ABMETRIC_PURE_PYTHON", None)
    if pure:
        env["ABMETRIC_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", PACK_SNIPPET.format(number=number)], env=env,
                         capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--repeat", type=int, default=20000)
    args = p.parse_args(argv)
    if _jetcore is None:
        print("compiled kernels are not built; only the pure-Python timings are shown")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<12}{'python (us)':>14}{'cython (us)':>14}{'speedup':>10}")
    for label, (name, kargs) in kernel_cases(args.order, rng).items():
        t_py = time_kernel(_jetcore_py, name, kargs, args.repeat)
        if _jetcore is not None:
            t_cy = time_kernel(_jetcore, name, kargs, args.repeat)
            print(f"{label:<12}{t_py * 1e6:>14.3f}{t_cy * 1e6:>14.3f}{t_py / t_cy:>10.1f}")
        else:
            print(f"{label:<12}{t_py * 1e6:>14.3f}{'-':>14}{'-':>10}")
    number = max(args.repeat // 100, 50)
    t_py = time_pack(True, number)
    line = f"{'scalar_pack':<12}{t_py * 1e6:>14.1f}"
    if _jetcore is not None:
        t_cy = time_pack(False, number)
        line += f"{t_cy * 1e6:>14.1f}{t_py / t_cy:>10.1f}"
    print(line)


if __name__ == "__main__":
    main()
