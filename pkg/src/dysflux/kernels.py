"""Dynamic-programming kernels behind alignment and edit-distance scoring.

Both kernels are O(n*m) table fills over integer-encoded symbol sequences and
dominate runtime on corpus-scale detection, so each has a numba-compiled
version and a pure-numpy fallback. The active implementation is chosen by the
``DYSFLUX_BACKEND`` environment variable ("numba" or "numpy") read at import;
callers may also pass ``backend=`` explicitly, which the benchmark uses to
time both paths in one process.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None
    HAS_NUMBA = False


def _resolve_backend() -> str:
    choice = os.environ.get("DYSFLUX_BACKEND", "").strip().lower()
    if choice in ("numba", "numpy"):
        if choice == "numba" and not HAS_NUMBA:
            return "numpy"
        return choice
    return "numba" if HAS_NUMBA else "numpy"


BACKEND = _resolve_backend()


def _lcs_suffix_table_numpy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, m = a.shape[0], b.shape[0]
    table = np.zeros((n + 1, m + 1), dtype=np.int32)
    for i in range(n - 1, -1, -1):
        # table[i][j] = max(table[i+1][j], best match of a[i] at any j' >= j)
        cand = np.where(a[i] == b, table[i + 1, 1:] + 1, 0)
        best = np.maximum.accumulate(cand[::-1])[::-1]
        table[i, :m] = np.maximum(table[i + 1, :m], best)
    return table


def _levenshtein_numpy(a: np.ndarray, b: np.ndarray) -> int:
    m = b.shape[0]
    idx = np.arange(m + 1, dtype=np.int32)
    prev = idx.copy()
    for i in range(a.shape[0]):
        curr = np.empty(m + 1, dtype=np.int32)
        curr[0] = i + 1
        cost = (a[i] != b).astype(np.int32)
        curr[1:] = np.minimum(prev[1:] + 1, prev[:-1] + cost)
        # fold in the left-neighbor (+1 per step) dependency via a min-scan
        curr = np.minimum.accumulate(curr - idx) + idx
        prev = curr
    return int(prev[m])


if HAS_NUMBA:

    @njit(cache=True)
    def _lcs_suffix_table_numba(a, b):  # pragma: no cover - exercised via wrapper
        n = a.shape[0]
        m = b.shape[0]
        table = np.zeros((n + 1, m + 1), dtype=np.int32)
        for i in range(n - 1, -1, -1):
            ai = a[i]
            for j in range(m - 1, -1, -1):
                if ai == b[j]:
                    table[i, j] = table[i + 1, j + 1] + 1
                else:
                    down = table[i + 1, j]
                    right = table[i, j + 1]
                    table[i, j] = down if down >= right else right
        return table

    @njit(cache=True)
    def _levenshtein_numba(a, b):  # pragma: no cover - exercised via wrapper
        n = a.shape[0]
        m = b.shape[0]
        prev = np.empty(m + 1, dtype=np.int32)
        curr = np.empty(m + 1, dtype=np.int32)
        for j in range(m + 1):
            prev[j] = j
        for i in range(n):
            curr[0] = i + 1
            ai = a[i]
            for j in range(m):
                cost = 0 if ai == b[j] else 1
                best = prev[j] + cost
                if prev[j + 1] + 1 < best:
                    best = prev[j + 1] + 1
                if curr[j] + 1 < best:
                    best = curr[j] + 1
                curr[j + 1] = best
            prev, curr = curr, prev
        return prev[m]


def _as_ids(seq) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(seq, dtype=np.int64))


def lcs_suffix_table(a, b, backend: str | None = None) -> np.ndarray:
    """Table S with S[i, j] = LCS length of a[i:] vs b[j:], shape (n+1, m+1)."""
    a, b = _as_ids(a), _as_ids(b)
    if (backend or BACKEND) == "numba" and HAS_NUMBA:
        return _lcs_suffix_table_numba(a, b)
    return _lcs_suffix_table_numpy(a, b)


def levenshtein(a, b, backend: str | None = None) -> int:
    """Edit distance with unit substitution/deletion/insertion costs."""
    a, b = _as_ids(a), _as_ids(b)
    if (backend or BACKEND) == "numba" and HAS_NUMBA:
        return int(_levenshtein_numba(a, b))
    return _levenshtein_numpy(a, b)


def warmup() -> None:
    """Trigger JIT compilation so timing-sensitive callers pay it up front."""
    one = np.array([1], dtype=np.int64)
    lcs_suffix_table(one, one)
    levenshtein(one, one)
