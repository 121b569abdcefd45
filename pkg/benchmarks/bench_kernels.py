#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the NumPy fallback.

Times the three kernels on representative workloads plus one end-to-end
solve, and prints a speedup table. Run after building the extension:

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import statistics
import time

import numpy as np

from eqstop.backend import available_backends, get_backend
from eqstop.model import subset_masks
from eqstop import DiscountFunction, MarkovModel


def _model(n, seed=0):
    rng = np.random.default_rng(seed)
    weights = rng.integers(1, 10, size=(n, n)).astype(float)
    return MarkovModel(
        labels=tuple(f"s{i}" for i in range(n)),
        kernel=weights / weights.sum(axis=1, keepdims=True),
        reward=rng.integers(1, 129, size=n) / 64.0,
        discount=DiscountFunction("hyperbolic", {"beta": 1.0}),
    )


def workloads():
    small = _model(6)
    big = _model(22, seed=3)
    masks_all = subset_masks(6, 0, 64)
    masks_one = np.zeros((1, 22), dtype=np.uint8)
    masks_one[0, -3:] = 1
    out = []

    def entry_sweep(impl):
        delta = small.discount_weights(401)
        impl.first_entry_bounds(
            small.kernel, masks_all, small.reward, delta, small.max_reward, 400
        )

    out.append(("entry bounds, 64 regions x 6 states, T=400", entry_sweep))

    def deep_sup(impl):
        delta = big.discount_weights(4000)
        impl.constrained_sup_bounds(
            big.kernel, masks_one, big.reward, delta, big.max_reward, 4000
        )

    out.append(("deviation bounds, 22 states, T=4000", deep_sup))

    def hit(impl):
        impl.hitting_mass(big.kernel, masks_one[0], 0, 2000)

    out.append(("hitting mass, 22 states, T=2000", hit))
    return out


def bench(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    if len(backends) < 2:
        print("compiled core not built; run pip install -e . first")

    rows = []
    for label, work in workloads():
        row = {"label": label}
        for name in backends:
            impl = get_backend(name)
            best, med = bench(lambda: work(impl), args.repeat)
            row[name] = best
        rows.append(row)

    width = max(len(r["label"]) for r in rows) + 2
    header = "workload".ljust(width) + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for row in rows:
        line = row["label"].ljust(width)
        for b in backends:
            line += f"{row[b] * 1e3:>10.2f}ms"
        if len(backends) == 2:
            line += f"{row[backends[1]] / row[backends[0]]:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
