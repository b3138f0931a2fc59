"""Comparison statistics: the quadratic kernel dependence statistic and the
minimum-spanning-tree entropic-graph entropy gap.

Both are alternatives to the Gram-entropy gap inside the same permutation
test harness, so they share kernel specs and data conventions with the rest
of the library.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._accel import pairwise_sq_dists, prim_mst
from .errors import InputError, NumericError
from .kernels import KernelSpec, as_samples, kernel_matrix

__all__ = [
    "MstConfig",
    "EdgeList",
    "quadratic_stat",
    "euclidean_mst",
    "mst_entropy",
    "mst_gap_stat",
]


@dataclass(frozen=True)
class MstConfig:
    """Entropic-graph settings.

    ``alpha`` must stay in (0, 1) (the validity range of the estimator).
    ``gamma`` is the power applied to edge lengths; when None it is derived
    per call as ``d * (1 - alpha)`` with ``d`` the point dimension.
    """

    alpha: float = 0.5
    gamma: float | None = None

    def __post_init__(self) -> None:
        a = float(self.alpha)
        if not (0.0 < a < 1.0):
            raise InputError(f"MST entropy needs alpha in (0, 1), got {self.alpha!r}")
        if self.gamma is not None and not float(self.gamma) > 0.0:
            raise InputError(f"gamma must be positive, got {self.gamma!r}")

    def edge_power(self, dim: int) -> float:
        return float(self.gamma) if self.gamma is not None else dim * (1.0 - self.alpha)


@dataclass(frozen=True)
class EdgeList:
    """Spanning tree as (i, j, length) triples with i < j."""

    edges: tuple
    n_vertices: int

    def __post_init__(self) -> None:
        if len(self.edges) != self.n_vertices - 1:
            raise InputError(
                f"spanning tree on {self.n_vertices} vertices needs "
                f"{self.n_vertices - 1} edges, got {len(self.edges)}"
            )

    @property
    def lengths(self) -> np.ndarray:
        return np.array([e[2] for e in self.edges], dtype=np.float64)

    @property
    def total_length(self) -> float:
        return float(np.sum(self.lengths))


def quadratic_stat(x, y, kx: KernelSpec, ky: KernelSpec) -> float:
    """Three-term V-statistic on the kernel matrices of paired samples.

    Measures the squared discrepancy between the joint and the product of
    marginals in feature space; zero when either side is constant and
    invariant under simultaneous row permutations.
    """
    xs = as_samples(x, min_rows=1)
    ys = as_samples(y, min_rows=1)
    if xs.shape[0] != ys.shape[0]:
        raise InputError(f"paired samples need equal n: {xs.shape[0]} vs {ys.shape[0]}")
    k = kernel_matrix(xs, kx)
    l = kernel_matrix(ys, ky)
    term1 = float(np.mean(k * l))
    ck = k.mean(axis=0)
    cl = l.mean(axis=0)
    term2 = 2.0 * float(np.mean(ck * cl))
    term3 = float(np.mean(k)) * float(np.mean(l))
    return term1 - term2 + term3


def euclidean_mst(data) -> EdgeList:
    """Minimum spanning tree under Euclidean distance (dense Prim, O(n^2)).

    Tie-breaking is deterministic: among equal-length candidate edges the
    lexicographically smallest (tree vertex, new vertex) pair wins.
    """
    x = as_samples(data)
    dist = np.sqrt(pairwise_sq_dists(x))
    edges, lengths = prim_mst(dist)
    triples = tuple(
        (int(edges[s, 0]), int(edges[s, 1]), float(lengths[s]))
        for s in range(edges.shape[0])
    )
    return EdgeList(triples, x.shape[0])


def mst_entropy(data, cfg: MstConfig = MstConfig()) -> float:
    """Entropy estimate from power-weighted MST edge lengths (in bits).

    No bias-correction constant is applied; inside a permutation test the
    constant cancels against the threshold.
    """
    x = as_samples(data)
    tree = euclidean_mst(x)
    power = cfg.edge_power(x.shape[1])
    total = float(np.sum(tree.lengths**power))
    if total <= 0.0:
        raise NumericError("all spanning-tree edges are zero; entropy undefined")
    return float(np.log2(total) / (1.0 - cfg.alpha))


def mst_gap_stat(x, y, cfg: MstConfig = MstConfig()) -> float:
    """Marginal MST entropies minus the joint-sample MST entropy.

    The joint sample concatenates coordinates row-wise; each term uses the
    edge power matching its own dimension.
    """
    xs = as_samples(x)
    ys = as_samples(y)
    if xs.shape[0] != ys.shape[0]:
        raise InputError(f"paired samples need equal n: {xs.shape[0]} vs {ys.shape[0]}")
    joint = np.hstack([xs, ys])
    return (
        mst_entropy(xs, cfg) + mst_entropy(ys, cfg) - mst_entropy(joint, cfg)
    )
