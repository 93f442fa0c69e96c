#!/usr/bin/env python3
"""Time the numba and numpy kernel backends on corpus-scale workloads.

The LCS suffix table and the Levenshtein distance dominate detection and
scoring runtime; this script fills them with sequence sizes typical of
phoneme-level utterances. Select the library-wide backend at import time
with DYSFLUX_BACKEND=numpy|numba; here both are timed explicitly.
"""

import time

import numpy as np

from dysflux.kernels import HAS_NUMBA, lcs_suffix_table, levenshtein


def _workload(rng, n_pairs=2000, lo=30, hi=70):
    pairs = []
    for _ in range(n_pairs):
        a = rng.integers(0, 39, rng.integers(lo, hi))
        b = rng.integers(0, 39, rng.integers(lo, hi))
        pairs.append((a, b))
    return pairs


def _time(fn, pairs, backend):
    fn(pairs[0][0], pairs[0][1], backend=backend)  # warm up / JIT compile
    t0 = time.perf_counter()
    sink = 0
    for a, b in pairs:
        out = fn(a, b, backend=backend)
        sink += int(out if np.isscalar(out) else out[0, 0])
    return time.perf_counter() - t0, sink


def main():
    rng = np.random.default_rng(0)
    pairs = _workload(rng)
    backends = ["numpy"] + (["numba"] if HAS_NUMBA else [])
    print(f"{len(pairs)} sequence pairs, lengths 30-70, alphabet 39")
    for name, fn in (("lcs_suffix_table", lcs_suffix_table), ("levenshtein", levenshtein)):
        results = {}
        checks = {}
        for backend in backends:
            elapsed, sink = _time(fn, pairs, backend)
            results[backend] = elapsed
            checks[backend] = sink
            rate = len(pairs) / elapsed
            print(f"  {name:18s} {backend:6s} {elapsed * 1e3:8.1f} ms total  {rate:8.0f} pairs/s")
        if len(set(checks.values())) != 1:
            raise SystemExit(f"{name}: backends disagree: {checks}")
        if "numba" in results:
            print(f"  {name:18s} speedup numba vs numpy: {results['numpy'] / results['numba']:.1f}x")


if __name__ == "__main__":
    main()
