"""Benchmark the compiled backward-induction kernel against the numpy fallback.

Usage: python3 benchmarks/bench_dp.py [--repeat N]

Builds joint-state DP instances of increasing size (units x threshold x
periods), runs both kernels on identical inputs, verifies the results are
bit-identical and reports wall-clock times.
"""
import argparse
import time

import numpy as np

from netmaint._dp_fallback import dp_backward as dp_python

try:
    from netmaint._dp_core import dp_backward as dp_cython
except ImportError:
    dp_cython = None


def build_instance(rng, j_count, threshold, t_count):
    """Random instance shaped like the scheduler's joint-age DP."""
    effective = np.full(j_count, threshold, dtype=np.int64)
    n_states = int(np.prod(effective))
    n_actions = 1 << j_count
    strides = np.ones(j_count, dtype=np.int64)
    for j in range(1, j_count):
        strides[j] = strides[j - 1] * effective[j - 1]
    ages = np.zeros((n_states, j_count), dtype=np.int64)
    idx = np.arange(n_states)
    for j in range(j_count):
        ages[:, j] = (idx // strides[j]) % effective[j] + 1
    trans = np.empty((n_states, n_actions), dtype=np.int32)
    for mask in range(n_actions):
        maintained = np.array([mask >> j & 1 for j in range(j_count)], dtype=bool)
        nxt = np.where(maintained, 1, ages + 1)
        feasible = np.all(nxt <= effective, axis=1)
        trans[:, mask] = np.where(feasible, (nxt - 1) @ strides, -1).astype(np.int32)
    reward = rng.uniform(-5.0, 20.0, (t_count, n_actions))
    counts = np.array([int(m).bit_count() for m in range(n_actions)], dtype=np.int64)
    order = np.array(
        sorted(range(n_actions), key=lambda m: (-counts[m], m)), dtype=np.int64
    )
    return trans, reward, counts, order


def timed(fn, args, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    cases = [(2, 4, 30), (3, 6, 30), (4, 8, 30), (5, 9, 30), (5, 12, 60)]
    header = f"{'units':>5} {'thr':>4} {'T':>4} {'states':>8} {'python':>10} {'cython':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for j_count, threshold, t_count in cases:
        instance = build_instance(rng, j_count, threshold, t_count)
        n_states = instance[0].shape[0]
        t_py, res_py = timed(dp_python, instance, args.repeat)
        if dp_cython is None:
            print(f"{j_count:>5} {threshold:>4} {t_count:>4} {n_states:>8} "
                  f"{t_py:>10.4f} {'n/a':>10} {'n/a':>8}")
            continue
        t_cy, res_cy = timed(dp_cython, instance, args.repeat)
        for a, b in zip(res_py, res_cy):
            assert np.array_equal(a, b), "backends disagree"
        print(f"{j_count:>5} {threshold:>4} {t_count:>4} {n_states:>8} "
              f"{t_py:>10.4f} {t_cy:>10.4f} {t_py / t_cy:>7.1f}x")


if __name__ == "__main__":
    main()
