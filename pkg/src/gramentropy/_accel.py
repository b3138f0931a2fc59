"""Hot numeric kernels: numba-compiled fast path plus a pure-numpy fallback.

The backend is chosen once at import time from the ``GRAMENTROPY_BACKEND``
environment variable (``numba`` or ``numpy``).  Default is numba when it
imports, numpy otherwise.  Both implementations of each kernel are kept
importable so the test suite and ``benchmarks/backend_bench.py`` can compare
them directly.

Determinism: every kernel computes each output entry with a fixed-order
scalar accumulation, so results are bit-identical for identical input no
matter how rows are scheduled across threads.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

__all__ = ["active_backend", "pairwise_sq_dists", "prim_mst"]


# ---------------------------------------------------------------------------
# pure-numpy implementations

def pairwise_sq_dists_numpy(x: np.ndarray) -> np.ndarray:
    """Squared Euclidean distance matrix via the Gram expansion."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    sq = np.einsum("ij,ij->i", x, x)
    d = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    d = 0.5 * (d + d.T)
    np.maximum(d, 0.0, out=d)
    np.fill_diagonal(d, 0.0)
    return d


def prim_mst_numpy(dist: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Dense Prim over a full distance matrix.

    Returns (edges, lengths) with edges as (n-1, 2) int64 rows (i < j).
    Ties are broken toward the lexicographically smallest (tree vertex,
    new vertex) pair, matching the numba variant exactly.
    """
    d = np.asarray(dist, dtype=np.float64)
    n = d.shape[0]
    in_tree = np.zeros(n, dtype=bool)
    key = d[0].copy()
    parent = np.zeros(n, dtype=np.int64)
    in_tree[0] = True
    key[0] = np.inf
    edges = np.empty((n - 1, 2), dtype=np.int64)
    lengths = np.empty(n - 1, dtype=np.float64)
    idx = np.arange(n)
    for step in range(n - 1):
        masked = np.where(in_tree, np.inf, key)
        order = np.lexsort((idx, parent, masked))
        best = order[0]
        u = int(parent[best])
        lo, hi = (u, best) if u < best else (best, u)
        edges[step, 0] = lo
        edges[step, 1] = hi
        lengths[step] = key[best]
        in_tree[best] = True
        row = d[best]
        outside = ~in_tree
        closer = outside & (row < key)
        key[closer] = row[closer]
        parent[closer] = best
        tie = outside & (row == key) & (best < parent)
        parent[tie] = best
    return edges, lengths


# ---------------------------------------------------------------------------
# numba implementations

def _build_numba():
    from numba import njit, prange
    from numba.core.errors import NumbaWarning

    # some environments pin a TBB too old for numba, which then warns when
    # the parallel target first initializes; the workqueue fallback is fine
    warnings.filterwarnings("ignore", message=".*TBB.*", category=NumbaWarning)

    @njit(cache=True, parallel=True)
    def pairwise_sq_dists_nb(x):  # pragma: no cover - exercised via dispatch
        n, dim = x.shape
        out = np.empty((n, n), dtype=np.float64)
        for i in prange(n):
            out[i, i] = 0.0
            for j in range(i + 1, n):
                s = 0.0
                for k in range(dim):
                    diff = x[i, k] - x[j, k]
                    s += diff * diff
                out[i, j] = s
                out[j, i] = s
        return out

    @njit(cache=True)
    def prim_mst_nb(d):  # pragma: no cover - exercised via dispatch
        n = d.shape[0]
        in_tree = np.zeros(n, dtype=np.bool_)
        key = np.empty(n, dtype=np.float64)
        parent = np.zeros(n, dtype=np.int64)
        in_tree[0] = True
        for v in range(n):
            key[v] = d[0, v]
        key[0] = np.inf
        edges = np.empty((n - 1, 2), dtype=np.int64)
        lengths = np.empty(n - 1, dtype=np.float64)
        for step in range(n - 1):
            best = -1
            for v in range(n):
                if in_tree[v]:
                    continue
                if best == -1 or key[v] < key[best]:
                    best = v
                elif key[v] == key[best]:
                    if parent[v] < parent[best] or (
                        parent[v] == parent[best] and v < best
                    ):
                        best = v
            u = parent[best]
            if u < best:
                edges[step, 0] = u
                edges[step, 1] = best
            else:
                edges[step, 0] = best
                edges[step, 1] = u
            lengths[step] = key[best]
            in_tree[best] = True
            for v in range(n):
                if in_tree[v]:
                    continue
                dv = d[best, v]
                if dv < key[v]:
                    key[v] = dv
                    parent[v] = best
                elif dv == key[v] and best < parent[v]:
                    parent[v] = best
        return edges, lengths

    def pairwise(x):
        return pairwise_sq_dists_nb(np.ascontiguousarray(x, dtype=np.float64))

    def prim(dist):
        return prim_mst_nb(np.ascontiguousarray(dist, dtype=np.float64))

    return pairwise, prim


def _select_backend():
    requested = os.environ.get("GRAMENTROPY_BACKEND", "").strip().lower()
    if requested not in ("", "numba", "numpy"):
        raise RuntimeError(
            f"GRAMENTROPY_BACKEND must be 'numba' or 'numpy', got {requested!r}"
        )
    if requested == "numpy":
        return "numpy", pairwise_sq_dists_numpy, prim_mst_numpy
    try:
        pairwise, prim = _build_numba()
        return "numba", pairwise, prim
    except ImportError:
        if requested == "numba":
            raise RuntimeError("GRAMENTROPY_BACKEND=numba but numba is not installed")
        return "numpy", pairwise_sq_dists_numpy, prim_mst_numpy


_BACKEND_NAME, pairwise_sq_dists, prim_mst = _select_backend()


def active_backend() -> str:
    """Name of the backend selected at import time ('numba' or 'numpy')."""
    return _BACKEND_NAME
