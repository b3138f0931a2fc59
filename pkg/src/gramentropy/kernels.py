"""Kernel evaluation, Gram matrices, diagonal normalization, and the
kernel-induced semi-metric.

The Gaussian kernel is unit-normalized (``kappa(x, x) == 1``), so a Gram
matrix always carries a unit diagonal and scaling by ``1/n`` yields a valid
unit-trace density.  Entrywise powers of such Gram matrices stay positive
semidefinite (infinite divisibility), which is what licenses the Hadamard
constructions in :mod:`gramentropy.entropy`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from ._accel import pairwise_sq_dists
from .errors import InputError, NumericError
from .linalg import DensityState, SymMatrix

__all__ = [
    "GaussianKernel",
    "ProductKernel",
    "KernelSpec",
    "GramMatrix",
    "as_samples",
    "gram",
    "kernel_matrix",
    "kernel_pair",
    "median_heuristic",
    "normalize_diagonal",
    "to_density",
    "semi_metric_sq",
    "neg_log_transform",
    "kernel_from_distance",
]

_DIAG_TOL = 1e-9


@dataclass(frozen=True)
class GaussianKernel:
    """``exp(-||x - y||^2 / (2 sigma^2))`` with the constant fixed to 1."""

    sigma: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.sigma) or self.sigma <= 0.0:
            raise InputError(f"sigma must be positive, got {self.sigma!r}")


@dataclass(frozen=True)
class ProductKernel:
    """Product of kernels acting on consecutive column blocks.

    ``dims[i]`` columns of the input feed ``components[i]``; the kernel value
    is the product of the per-block values.
    """

    components: tuple
    dims: tuple

    def __post_init__(self) -> None:
        components = tuple(self.components)
        dims = tuple(int(d) for d in self.dims)
        if len(components) < 2:
            raise InputError("product kernel needs at least two components")
        if len(dims) != len(components):
            raise InputError("dims must match components one-to-one")
        if any(d < 1 for d in dims):
            raise InputError("every block must span at least one column")
        object.__setattr__(self, "components", components)
        object.__setattr__(self, "dims", dims)


KernelSpec = Union[GaussianKernel, ProductKernel]


def as_samples(data, *, min_rows: int = 2) -> np.ndarray:
    """Validate a sample matrix: 2-D float64, finite, at least ``min_rows``.

    1-D input is treated as a single column.
    """
    x = np.asarray(data, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise InputError(f"samples must be a 2-D array, got ndim={x.ndim}")
    if x.shape[0] < min_rows:
        raise InputError(f"need at least {min_rows} rows, got {x.shape[0]}")
    if x.shape[1] < 1:
        raise InputError("samples need at least one column")
    if not np.all(np.isfinite(x)):
        raise InputError("sample entries must be finite")
    return np.ascontiguousarray(x)


class GramMatrix:
    """Unit-diagonal symmetric kernel matrix with its kernel provenance.

    Positive semidefiniteness is inherited from the kernel; it is enforced
    (to the -1e-9 eigenvalue floor) whenever a spectrum is actually taken,
    and exercised directly by the test suite.
    """

    __slots__ = ("_matrix", "_kernel")

    def __init__(self, matrix: SymMatrix, kernel: KernelSpec | None = None) -> None:
        values = matrix.values
        diag = np.diag(values)
        err = float(np.max(np.abs(diag - 1.0)))
        if err > _DIAG_TOL:
            raise InputError(f"Gram matrix must have unit diagonal (off by {err:.3e})")
        if err != 0.0:
            fixed = np.array(values)
            np.fill_diagonal(fixed, 1.0)
            matrix = SymMatrix(fixed)
        self._matrix = matrix
        self._kernel = kernel

    @property
    def matrix(self) -> SymMatrix:
        return self._matrix

    @property
    def values(self) -> np.ndarray:
        return self._matrix.values

    @property
    def kernel(self) -> KernelSpec | None:
        return self._kernel

    @property
    def n(self) -> int:
        return self._matrix.n

    def __repr__(self) -> str:
        return f"GramMatrix(n={self.n}, kernel={self._kernel!r})"


def kernel_matrix(x: np.ndarray, kernel: KernelSpec) -> np.ndarray:
    """Raw kernel matrix on validated samples (no Gram wrapper)."""
    if isinstance(kernel, GaussianKernel):
        d2 = pairwise_sq_dists(x)
        k = np.exp(d2 / (-2.0 * kernel.sigma * kernel.sigma))
        np.fill_diagonal(k, 1.0)
        return k
    if isinstance(kernel, ProductKernel):
        if sum(kernel.dims) != x.shape[1]:
            raise InputError(
                f"product kernel spans {sum(kernel.dims)} columns, data has {x.shape[1]}"
            )
        out = None
        start = 0
        for comp, width in zip(kernel.components, kernel.dims):
            block = kernel_matrix(np.ascontiguousarray(x[:, start : start + width]), comp)
            out = block if out is None else out * block
            start += width
        return out
    raise InputError(f"unsupported kernel spec {kernel!r}")


def kernel_pair(x, y, kernel: KernelSpec) -> float:
    """Kernel value for a single pair of points."""
    xv = np.atleast_1d(np.asarray(x, dtype=np.float64))
    yv = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if xv.shape != yv.shape:
        raise InputError(f"point shape mismatch: {xv.shape} vs {yv.shape}")
    if isinstance(kernel, GaussianKernel):
        d2 = float(np.sum((xv - yv) ** 2))
        return float(np.exp(-d2 / (2.0 * kernel.sigma * kernel.sigma)))
    if isinstance(kernel, ProductKernel):
        if sum(kernel.dims) != xv.size:
            raise InputError(
                f"product kernel spans {sum(kernel.dims)} coordinates, point has {xv.size}"
            )
        val = 1.0
        start = 0
        for comp, width in zip(kernel.components, kernel.dims):
            val *= kernel_pair(xv[start : start + width], yv[start : start + width], comp)
            start += width
        return val
    raise InputError(f"unsupported kernel spec {kernel!r}")


def gram(data, kernel: KernelSpec) -> GramMatrix:
    """Gram matrix of all pairwise kernel evaluations on the sample rows."""
    x = as_samples(data)
    k = kernel_matrix(x, kernel)
    if not np.all(np.isfinite(k)):
        raise NumericError("kernel evaluation produced non-finite values")
    return GramMatrix(SymMatrix(k), kernel)


def median_heuristic(data) -> float:
    """Median of the pairwise Euclidean distances (the usual width choice)."""
    x = as_samples(data)
    d2 = pairwise_sq_dists(x)
    iu = np.triu_indices(x.shape[0], k=1)
    med = float(np.median(np.sqrt(d2[iu])))
    if med <= 0.0:
        raise NumericError("median pairwise distance is zero; data is degenerate")
    return med


def normalize_diagonal(a: SymMatrix) -> SymMatrix:
    """``a_ij / sqrt(a_ii a_jj)``; a congruence, so PSD-ness is preserved."""
    d = np.diag(a.values)
    if np.min(d) <= 0.0:
        raise InputError("diagonal entries must be strictly positive")
    root = np.sqrt(d)
    out = a.values / np.outer(root, root)
    np.fill_diagonal(out, 1.0)
    return SymMatrix(out)


def to_density(g: GramMatrix) -> DensityState:
    """Scale a unit-diagonal Gram matrix by ``1/n`` into a unit-trace state.

    The spectrum of the result is exactly the Gram spectrum divided by n.
    """
    return DensityState(SymMatrix(g.values / g.n))


def semi_metric_sq(x, y, kernel: KernelSpec) -> float:
    """Squared kernel-induced distance ``k(x,x) + k(y,y) - 2 k(x,y)``."""
    val = (
        kernel_pair(x, x, kernel)
        + kernel_pair(y, y, kernel)
        - 2.0 * kernel_pair(x, y, kernel)
    )
    return max(val, 0.0)


def neg_log_transform(a: SymMatrix) -> SymMatrix:
    """``-log(a_ij)`` entrywise; unit-diagonal input gives a zero diagonal."""
    if np.min(a.values) <= 0.0:
        raise InputError("entries must be strictly positive for -log")
    return SymMatrix(-np.log(a.values))


def kernel_from_distance(dist_sq: SymMatrix) -> GramMatrix:
    """Exponentiate a squared-distance matrix into a normalized Gram matrix.

    ``dist_sq`` must be nonnegative with a zero diagonal.  Negative
    definiteness on the zero-sum subspace (which guarantees the result is
    infinitely divisible) is not checked here; the test suite probes it
    probabilistically.
    """
    values = dist_sq.values
    if np.min(values) < 0.0:
        raise InputError("squared distances must be nonnegative")
    diag_err = float(np.max(np.abs(np.diag(values))))
    if diag_err > 1e-12:
        raise InputError(f"distance matrix must have a zero diagonal (off by {diag_err:.3e})")
    a = np.exp(-values)
    return GramMatrix(normalize_diagonal(SymMatrix(a)))
