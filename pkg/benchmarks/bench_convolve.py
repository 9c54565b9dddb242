"""Benchmark the compiled convolution core against the scipy fallback.

Run:  python benchmarks/bench_convolve.py
"""

import time

import numpy as np

from carleman_lab import convolve
from carleman_lab.multiplier import MultiplierKernel


def build_problem(n_slots, n_in, seed=0):
    rng = np.random.default_rng(seed)
    h = 0.01
    tau = 9.0
    lams = rng.uniform(0.0, 25.0, n_slots)
    lams[rng.uniform(size=n_slots) < 0.1] = 0.0
    kernels = [MultiplierKernel.closed_form(float(lam), tau) for lam in lams]
    n_pieces = max(len(k.pieces) for k in kernels)
    coeff = np.zeros((n_slots, n_pieces))
    rate = np.ones((n_slots, n_pieces))
    side = np.zeros((n_slots, n_pieces), dtype=np.int32)
    power = np.zeros((n_slots, n_pieces), dtype=np.int32)
    for s, k in enumerate(kernels):
        for p, piece in enumerate(k.pieces):
            coeff[s, p], rate[s, p], side[s, p], power[s, p] = piece
    t = h * (np.arange(n_in) - n_in / 2)
    wf = rng.standard_normal((n_slots, n_in)) * np.exp(-((t / (0.1 * n_in * h)) ** 2)) * h
    lo, hi = n_in // 4, 3 * n_in // 4
    return wf, h, coeff, rate, side, power, lo, hi


def timeit(backend, args, repeats=5):
    best = np.inf
    for _ in range(repeats):
        tic = time.perf_counter()
        out = convolve.convolve_pieces(*args, force_backend=backend)
        best = min(best, time.perf_counter() - tic)
    return best, out


def main():
    print(f"extension available: {convolve.HAVE_EXTENSION}")
    cases = [(8, 20_000), (64, 20_000), (8, 200_000), (121, 50_000)]
    header = f"{'slots':>6} {'n_in':>8} {'scipy':>10} {'cython':>10} {'speedup':>8} {'max|diff|':>10}"
    print(header)
    print("-" * len(header))
    for n_slots, n_in in cases:
        args = build_problem(n_slots, n_in)
        t_py, out_py = timeit("scipy", args)
        if convolve.HAVE_EXTENSION:
            t_cy, out_cy = timeit("cython", args)
            diff = np.max(np.abs(out_cy - out_py))
            print(
                f"{n_slots:>6} {n_in:>8} {t_py * 1e3:>8.2f}ms {t_cy * 1e3:>8.2f}ms "
                f"{t_py / t_cy:>7.1f}x {diff:>10.2e}"
            )
        else:
            print(f"{n_slots:>6} {n_in:>8} {t_py * 1e3:>8.2f}ms {'-':>10} {'-':>8} {'-':>10}")


if __name__ == "__main__":
    main()
