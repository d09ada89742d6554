"""Compare the compiled and numpy kernel backends.

Times the two hot kernels on node-sized inputs, then end-to-end forest
training with each backend forced through ``BRF_PURE_PYTHON``.

    python benchmarks/bench_kernels.py [--repeat 200] [--dataset wine]
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from brforest import kernels

TRAIN_SNIPPET = """
import time
from brforest.dataset import load_builtin
from brforest.forest import ForestConfig, train
data = load_builtin({name!r})
best = float("inf")
for _ in range(3):
    start = time.perf_counter()
    train(data, ForestConfig(seed=0))
    best = min(best, time.perf_counter() - start)
print(best)
"""


def kernel_inputs(n, k, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 10, n)
    y = rng.integers(0, 10, n)
    z = np.ascontiguousarray(rng.integers(0, 10, (n, k)))
    return x, y, z


def route_inputs(n, depth=8, seed=0):
    rng = np.random.default_rng(seed)
    # complete binary tree stored breadth-first
    internal = 2 ** depth - 1
    total = 2 ** (depth + 1) - 1
    feature = np.full(total, -1, dtype=np.int64)
    feature[:internal] = rng.integers(0, 4, internal)
    threshold = rng.uniform(0, 1, total)
    left = np.full(total, -1, dtype=np.int64)
    right = np.full(total, -1, dtype=np.int64)
    left[:internal] = 2 * np.arange(internal) + 1
    right[:internal] = 2 * np.arange(internal) + 2
    return feature, threshold, left, right, rng.uniform(0, 1, (n, 4))


def bench_kernels(repeat):
    rows = []
    for n, k in [(50, 0), (50, 3), (200, 2), (1000, 4)]:
        args = kernel_inputs(n, k)
        for name in kernels.available_backends():
            impl = kernels.get_backend(name)
            t = min(timeit.repeat(lambda: impl.cmi_sum(*args), number=repeat, repeat=3)) / repeat
            rows.append((f"cmi_sum n={n} |z|={k}", name, t))
    for n in (100, 5000):
        args = route_inputs(n)
        for name in kernels.available_backends():
            impl = kernels.get_backend(name)
            t = min(timeit.repeat(lambda: impl.route(*args), number=repeat, repeat=3)) / repeat
            rows.append((f"route n={n} depth=8", name, t))
    return rows


def bench_training(name):
    out = {}
    for backend in kernels.available_backends():
        env = dict(os.environ)
        env.pop("BRF_PURE_PYTHON", None)
        if backend == "python":
            env["BRF_PURE_PYTHON"] = "1"
        res = subprocess.run([sys.executable, "-c", TRAIN_SNIPPET.format(name=name)],
                             env=env, capture_output=True, text=True, check=True)
        out[backend] = float(res.stdout.strip())
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=200)
    parser.add_argument("--dataset", default="wine")
    args = parser.parse_args(argv)

    print(f"backends: {', '.join(kernels.available_backends())}")
    rows = bench_kernels(args.repeat)
    print(f"{'kernel':<26}{'backend':<9}{'us/call':>10}")
    for label, backend, t in rows:
        print(f"{label:<26}{backend:<9}{t * 1e6:>10.1f}")
    times = bench_training(args.dataset)
    print(f"\ntrain {args.dataset} (best of 3, default config):")
    for backend, t in times.items():
        print(f"  {backend:<8}{t:8.3f} s")
    if len(times) == 2:
        print(f"  speedup {times['python'] / times['cython']:.2f}x")


if __name__ == "__main__":
    main()
