"""Spectral entropy functionals on density states and Gram matrices.

Everything is reported in bits (base-2 logarithms): the uniform spectrum on
n states scores ``log2 n`` and a rank-one state scores 0.  Joint quantities
are built from the Hadamard product of two unit-diagonal Gram matrices,
renormalized to unit trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericError, PsdViolationError
from .kernels import GramMatrix, as_samples
from .linalg import EIG_CLAMP_TOL, DensityState, trace_power
from ._accel import pairwise_sq_dists

__all__ = [
    "EntropyOrder",
    "renyi_entropy",
    "joint_entropy",
    "conditional_entropy",
    "mutual_information",
    "gram_entropy",
    "density_spectrum",
    "parzen_h2",
    "parzen_h2_trace",
    "von_neumann_entropy",
]


@dataclass(frozen=True)
class EntropyOrder:
    """Order ``alpha`` of the entropy functional: positive and not 1."""

    alpha: float

    def __post_init__(self) -> None:
        a = float(self.alpha)
        if not np.isfinite(a) or a <= 0.0:
            raise InputError(f"alpha must be positive, got {self.alpha!r}")
        if abs(a - 1.0) <= 1e-6:
            raise InputError("alpha == 1 is excluded; use von_neumann_entropy for the limit")
        object.__setattr__(self, "alpha", a)


def _as_order(order) -> EntropyOrder:
    return order if isinstance(order, EntropyOrder) else EntropyOrder(float(order))


def renyi_entropy(d: DensityState, order) -> float:
    """``(1 / (1 - alpha)) * log2(sum_i lambda_i**alpha)`` in bits."""
    o = _as_order(order)
    tp = trace_power(d, o.alpha)
    if tp <= 0.0:
        raise NumericError("entire spectrum clamped to zero; entropy undefined")
    return math.log2(tp) / (1.0 - o.alpha)


def density_spectrum(values: np.ndarray) -> np.ndarray:
    """Descending, clamped eigenvalues of ``values / trace(values)``.

    Eigenvalues only (no eigenvectors), so this is the cheap path used by
    the Gram-level functionals and the permutation-test inner loop.
    """
    tr = float(np.trace(values))
    if tr <= 0.0:
        raise NumericError("matrix trace must be positive")
    w = np.linalg.eigvalsh(values)[::-1] / tr
    if w[-1] < -EIG_CLAMP_TOL:
        raise PsdViolationError(f"eigenvalue {w[-1]:.3e} below -{EIG_CLAMP_TOL}")
    return np.maximum(w, 0.0)


def _entropy_from_values(values: np.ndarray, order: EntropyOrder) -> float:
    lam = density_spectrum(values)
    tp = float(np.sum(lam**order.alpha))
    if tp <= 0.0:
        raise NumericError("entire spectrum clamped to zero; entropy undefined")
    return math.log2(tp) / (1.0 - order.alpha)


def gram_entropy(g: GramMatrix, order) -> float:
    """Entropy of the unit-trace state ``K / n`` for a Gram matrix ``K``."""
    return _entropy_from_values(g.values, _as_order(order))


def _check_pair(gx: GramMatrix, gy: GramMatrix) -> None:
    if gx.n != gy.n:
        raise InputError(f"Gram dimension mismatch: {gx.n} vs {gy.n}")


def joint_entropy(gx: GramMatrix, gy: GramMatrix, order) -> float:
    """Entropy of the trace-normalized Hadamard product of two Gram matrices."""
    _check_pair(gx, gy)
    return _entropy_from_values(gx.values * gy.values, _as_order(order))


def conditional_entropy(gx: GramMatrix, gy: GramMatrix, order) -> float:
    """Joint entropy minus the ``gy`` marginal; nonnegative and at most the
    ``gx`` marginal."""
    _check_pair(gx, gy)
    o = _as_order(order)
    return _entropy_from_values(gx.values * gy.values, o) - _entropy_from_values(
        gy.values, o
    )


def mutual_information(gx: GramMatrix, gy: GramMatrix, order) -> float:
    """Marginal entropies minus the Hadamard joint entropy.

    Nonnegative for orders near 1 (the independence-test regime); for
    orders well above 1 the joint entropy can exceed the marginal sum on
    adversarial Gram pairs, so small negative values are possible there.
    """
    _check_pair(gx, gy)
    o = _as_order(order)
    return (
        _entropy_from_values(gx.values, o)
        + _entropy_from_values(gy.values, o)
        - _entropy_from_values(gx.values * gy.values, o)
    )


def parzen_h2(data, sigma: float) -> float:
    """Second-order entropy from the kernel double sum.

    With window width ``sigma`` the plug-in square integrates to the
    ``sqrt(2) * sigma`` kernel sum; the density normalization constant is
    fixed to 1, so identical points score exactly 0 bits.
    """
    x = as_samples(data)
    sigma = float(sigma)
    if not np.isfinite(sigma) or sigma <= 0.0:
        raise InputError(f"sigma must be positive, got {sigma!r}")
    d2 = pairwise_sq_dists(x)
    # width sqrt(2)*sigma: 2 * (sqrt(2) sigma)^2 == 4 sigma^2
    pot = float(np.mean(np.exp(d2 / (-4.0 * sigma * sigma))))
    return -math.log2(pot)


def parzen_h2_trace(data, sigma: float) -> float:
    """Same estimator through ``tr(K K) / n^2`` with the ``2 sigma`` Gram.

    Squaring the ``2 sigma`` kernel reproduces the ``sqrt(2) * sigma`` kernel,
    so this agrees with :func:`parzen_h2` up to a data-independent constant
    (exactly zero under the unit kernel normalization used here).
    """
    x = as_samples(data)
    sigma = float(sigma)
    if not np.isfinite(sigma) or sigma <= 0.0:
        raise InputError(f"sigma must be positive, got {sigma!r}")
    d2 = pairwise_sq_dists(x)
    k = np.exp(d2 / (-8.0 * sigma * sigma))
    pot = float(np.sum(k * k)) / (x.shape[0] ** 2)
    return -math.log2(pot)


def von_neumann_entropy(d: DensityState) -> float:
    """``-sum_i lambda_i log2 lambda_i``: the ``alpha -> 1`` limit.

    Diagnostic helper only; the library's operative functional is
    :func:`renyi_entropy` with ``alpha != 1``.
    """
    lam = d.clamped_eigenvalues()
    pos = lam[lam > 0.0]
    return float(-np.sum(pos * np.log2(pos)))
