"""Compare the numba kernels with their numpy fallbacks.

Each kernel runs once to warm the JIT cache, then both variants are timed on
the same inputs and their outputs compared.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from parisian import _kernels as k
from parisian._jit import NUMBA_AVAILABLE
from parisian.dist import binomial, negbinomial

BASE = binomial(3, 0.3).weights
NB = negbinomial(3, 0.8, "a").weights


def _time(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def cases():
    P = k.conv_powers(BASE, 400, 403)
    ballot = k._ballot_sums_np(P, 398)
    cdf = np.cumsum(BASE)
    ys = np.arange(BASE.size, dtype=np.int64)
    return [
        ("conv_powers t=400", lambda: k._conv_powers_jit(BASE, 400, 1200), lambda: k._conv_powers_np(BASE, 400, 1200)),
        ("seal_series u=5 t=400", lambda: k._seal_series_jit(P, ballot, 5, 398),
         lambda: k._seal_series_np(P, ballot, 5, 398)),
        ("deficit_fill u=5 s=300", lambda: k._deficit_fill_jit(P, BASE, 5, 300, 2),
         lambda: k._deficit_fill_np(P, BASE, 5, 300, 2)),
        ("diag_series u=5 k=3000", lambda: k._diag_series_jit(BASE, 5, 3000), lambda: k._diag_series_np(BASE, 5, 3000)),
        ("parisian_dp NB t=200", lambda: k._parisian_dp_jit(NB, 5, 3, 200), lambda: k._parisian_dp_np(NB, 5, 3, 200)),
        ("brute_force steps=13", lambda: k._brute_force_jit(ys, BASE, 2, 2, 13, False, 1 << 62)[0],
         lambda: k._brute_force_np(ys, BASE, 2, 2, 13, False, 1 << 62)[0]),
        ("mc_count 1e5 paths t=20", lambda: k._mc_count_jit(cdf, 5, 3, 19, 100_000, np.uint64(12345)),
         lambda: k._mc_count_np(cdf, 5, 3, 19, 100_000, 12345)),
        ("ladder_dp depth=120", lambda: k._ladder_dp_jit(BASE, 120, 1e-13, 10**6)[0],
         lambda: k._ladder_dp_np(BASE, 120, 1e-13, 10**6)[0]),
    ]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if not NUMBA_AVAILABLE:
        print("numba not importable; nothing to compare")
        return 1
    print(f"{'kernel':<26}{'jit [s]':>12}{'numpy [s]':>12}{'speedup':>10}{'max |diff|':>14}")
    for name, jit_fn, np_fn in cases():
        jit_fn()  # compile / load cache
        tj, a = _time(jit_fn, args.repeat)
        tn, b = _time(np_fn, args.repeat)
        diff = float(np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))))
        print(f"{name:<26}{tj:>12.4f}{tn:>12.4f}{tn / tj:>10.1f}{diff:>14.3g}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
