"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The backend is chosen once at import from the ``DISJOINT_LINK_BACKEND``
environment variable: ``numba`` (default when importable), or ``numpy``.
Every public kernel also accepts an explicit ``backend=`` override so the
two paths can be compared in tests and benchmarks.

Both paths accumulate floating-point sums in the same order (ascending
over the reduced axis), so for the same inputs they produce bit-identical
outputs.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit, prange

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap

    prange = range


def _default_backend() -> str:
    choice = os.environ.get("DISJOINT_LINK_BACKEND", "").strip().lower()
    if choice in ("numba", "numpy"):
        if choice == "numba" and not _HAVE_NUMBA:
            raise RuntimeError("DISJOINT_LINK_BACKEND=numba but numba is not installed")
        return choice
    return "numba" if _HAVE_NUMBA else "numpy"


DEFAULT_BACKEND = _default_backend()


def _pick(backend: str | None) -> str:
    b = DEFAULT_BACKEND if backend is None else backend
    if b not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {b!r}")
    if b == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return b


# ---------------------------------------------------------------------------
# pairwise Euclidean distances
# ---------------------------------------------------------------------------


@njit(parallel=True, cache=True)
def _pairwise_nb(a, b):  # pragma: no cover - compiled
    n, r = a.shape
    m = b.shape[0]
    out = np.empty((n, m))
    for i in prange(n):
        for j in range(m):
            acc = 0.0
            for t in range(r):
                d = a[i, t] - b[j, t]
                acc += d * d
            out[i, j] = np.sqrt(acc)
    return out


def _pairwise_np(a, b):
    n, _ = a.shape
    m = b.shape[0]
    acc = np.zeros((n, m))
    # loop over the (small) reduced axis so the accumulation order matches
    # the numba kernel exactly
    for t in range(a.shape[1]):
        d = a[:, t][:, None] - b[:, t][None, :]
        acc += d * d
    return np.sqrt(acc)


def pairwise_euclidean(a: np.ndarray, b: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Exact all-pairs Euclidean distances between rows of `a` and rows of `b`."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("inputs must be 2-D")
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    if _pick(backend) == "numba":
        return _pairwise_nb(a, b)
    return _pairwise_np(a, b)


# ---------------------------------------------------------------------------
# k smallest per row (ties broken by lower column index)
# ---------------------------------------------------------------------------


@njit(parallel=True, cache=True)
def _ksmallest_nb(dist, k):  # pragma: no cover - compiled
    n, m = dist.shape
    idx = np.empty((n, k), dtype=np.int64)
    val = np.empty((n, k), dtype=np.float64)
    for i in prange(n):
        best_d = np.full(k, np.inf)
        best_j = np.full(k, -1, dtype=np.int64)
        for j in range(m):
            d = dist[i, j]
            # scanning j in ascending order means an equal distance never
            # displaces an incumbent, which is exactly the lower-index rule
            if d < best_d[k - 1]:
                pos = k - 1
                while pos > 0 and best_d[pos - 1] > d:
                    best_d[pos] = best_d[pos - 1]
                    best_j[pos] = best_j[pos - 1]
                    pos -= 1
                best_d[pos] = d
                best_j[pos] = j
        idx[i] = best_j
        val[i] = best_d
    return idx, val


def _ksmallest_np(dist, k):
    order = np.argsort(dist, axis=1, kind="stable")[:, :k]
    return order.astype(np.int64), np.take_along_axis(dist, order, axis=1)


def k_smallest(dist: np.ndarray, k: int, backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Per-row indices and values of the k smallest entries, ascending.

    Ties are broken by the lower column index, so the output is a total,
    reproducible order.
    """
    dist = np.ascontiguousarray(dist, dtype=np.float64)
    if not 1 <= k <= dist.shape[1]:
        raise ValueError(f"k={k} out of range for {dist.shape[1]} columns")
    if _pick(backend) == "numba":
        return _ksmallest_nb(dist, k)
    return _ksmallest_np(dist, k)


# ---------------------------------------------------------------------------
# median over each row's neighbor set
# ---------------------------------------------------------------------------


@njit(parallel=True, cache=True)
def _median_rows_nb(values, idx):  # pragma: no cover - compiled
    n, k = idx.shape
    ncols = values.shape[1]
    out = np.empty((n, ncols))
    for i in prange(n):
        buf = np.empty(k)
        for c in range(ncols):
            for t in range(k):
                buf[t] = values[idx[i, t], c]
            srt = np.sort(buf)
            h = k // 2
            if k % 2 == 1:
                out[i, c] = srt[h]
            else:
                out[i, c] = (srt[h - 1] + srt[h]) * 0.5
    return out


def _median_rows_np(values, idx):
    gathered = values[idx]  # (n, k, ncols)
    srt = np.sort(gathered, axis=1)
    k = idx.shape[1]
    h = k // 2
    if k % 2 == 1:
        return srt[:, h, :].copy()
    return (srt[:, h - 1, :] + srt[:, h, :]) * 0.5


def median_over_rows(values: np.ndarray, idx: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Feature-wise median of ``values[idx[i]]`` for each row i.

    Even neighbor counts use the midpoint of the two middle values.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= values.shape[0]):
        raise ValueError("neighbor index out of range")
    if _pick(backend) == "numba":
        return _median_rows_nb(values, idx)
    return _median_rows_np(values, idx)
