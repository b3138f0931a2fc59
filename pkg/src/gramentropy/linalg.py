"""Dense symmetric linear algebra: spectra, Hadamard/Kronecker products,
entrywise powers, trace functionals, and majorization.

Conventions used throughout the library:

* eigenvalues are reported in descending order; ties keep the order the
  underlying solver produced (stable sort), so identical input gives
  identical output;
* eigenvalues in ``[-EIG_CLAMP_TOL, 0)`` are treated as exact zeros by the
  spectral functionals, anything more negative raises
  :class:`PsdViolationError`;
* ``0**alpha == 0`` for ``alpha > 0`` inside :func:`trace_power`, while
  ``0**0 == 1`` only in :func:`entrywise_power`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericError, PsdViolationError

__all__ = [
    "EIG_CLAMP_TOL",
    "TRACE_TOL",
    "SymMatrix",
    "Spectrum",
    "DensityState",
    "eigh",
    "trace_power",
    "hadamard",
    "kronecker",
    "entrywise_power",
    "majorizes",
]

EIG_CLAMP_TOL = 1e-9
TRACE_TOL = 1e-9
_ORTHO_TOL = 1e-9
_RECON_TOL = 1e-8


class SymMatrix:
    """Exactly symmetric dense real matrix.

    The constructor stores ``0.5 * (a + a.T)``, which is exactly symmetric
    in IEEE arithmetic, and marks the buffer read-only.  All operations in
    this module treat instances as immutable values.
    """

    __slots__ = ("_values",)

    def __init__(self, values) -> None:
        a = np.array(values, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InputError(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InputError("matrix entries must be finite")
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        self._values = a

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def n(self) -> int:
        return self._values.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self._values))

    @staticmethod
    def identity(n: int) -> "SymMatrix":
        return SymMatrix(np.eye(n))

    def __repr__(self) -> str:
        return f"SymMatrix(n={self.n})"


@dataclass(frozen=True)
class Spectrum:
    """Descending eigenvalues with their orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eigh(a: SymMatrix) -> Spectrum:
    """Full eigendecomposition of a symmetric matrix.

    Eigenvalues come back in descending order (stable tie order) and the
    result is checked against orthonormality and reconstruction tolerances
    before being returned.
    """
    w, u = np.linalg.eigh(a.values)
    order = np.argsort(-w, kind="stable")
    w = np.ascontiguousarray(w[order])
    u = np.ascontiguousarray(u[:, order])
    ortho_err = np.max(np.abs(u.T @ u - np.eye(a.n)))
    if ortho_err > _ORTHO_TOL:
        raise NumericError(f"eigenvector orthonormality off by {ortho_err:.3e}")
    recon_err = np.max(np.abs((u * w) @ u.T - a.values))
    scale = max(1.0, float(np.max(np.abs(a.values))))
    if recon_err > _RECON_TOL * scale:
        raise NumericError(f"eigendecomposition residual {recon_err:.3e}")
    w.setflags(write=False)
    u.setflags(write=False)
    return Spectrum(w, u)


class DensityState:
    """Unit-trace positive semidefinite matrix with a cached spectrum.

    Construction eigendecomposes the matrix once; tiny negative eigenvalues
    (above ``-EIG_CLAMP_TOL``) are kept in the spectrum but clamped to zero
    by every downstream functional.
    """

    __slots__ = ("_matrix", "_spectrum")

    def __init__(self, matrix: SymMatrix) -> None:
        if abs(matrix.trace - 1.0) > TRACE_TOL:
            raise InputError(f"trace must be 1 within {TRACE_TOL}, got {matrix.trace!r}")
        spectrum = eigh(matrix)
        min_eig = float(spectrum.eigenvalues[-1])
        if min_eig < -EIG_CLAMP_TOL:
            raise PsdViolationError(f"eigenvalue {min_eig:.3e} below -{EIG_CLAMP_TOL}")
        self._matrix = matrix
        self._spectrum = spectrum

    @property
    def matrix(self) -> SymMatrix:
        return self._matrix

    @property
    def spectrum(self) -> Spectrum:
        return self._spectrum

    @property
    def n(self) -> int:
        return self._matrix.n

    def clamped_eigenvalues(self) -> np.ndarray:
        """Descending eigenvalues with negatives snapped to zero."""
        return np.maximum(self._spectrum.eigenvalues, 0.0)

    def __repr__(self) -> str:
        return f"DensityState(n={self.n})"


def trace_power(d: DensityState, alpha) -> float:
    """``sum_i lambda_i**alpha`` over the clamped spectrum of ``d``."""
    alpha = float(getattr(alpha, "alpha", alpha))
    if not np.isfinite(alpha) or alpha <= 0.0:
        raise InputError(f"alpha must be positive, got {alpha!r}")
    lam = d.clamped_eigenvalues()
    return float(np.sum(lam**alpha))


def hadamard(a: SymMatrix, b: SymMatrix) -> SymMatrix:
    """Entrywise (Schur) product.  PSD inputs give a PSD output."""
    if a.n != b.n:
        raise InputError(f"dimension mismatch: {a.n} vs {b.n}")
    return SymMatrix(a.values * b.values)


def kronecker(a: SymMatrix, b: SymMatrix, *, max_dim: int = 4096) -> SymMatrix:
    """Tensor product; the spectrum is all pairwise eigenvalue products."""
    out_dim = a.n * b.n
    if out_dim > max_dim:
        raise InputError(f"kronecker output dimension {out_dim} exceeds guard {max_dim}")
    return SymMatrix(np.kron(a.values, b.values))


def entrywise_power(a: SymMatrix, r: float) -> SymMatrix:
    """Entrywise power ``a_ij**r`` with the convention ``0**0 == 1``."""
    r = float(r)
    if not np.isfinite(r) or r < 0.0:
        raise InputError(f"exponent must be nonnegative, got {r!r}")
    if r != np.floor(r) and bool(np.any(a.values < 0.0)):
        raise InputError("negative entries require an integer exponent")
    return SymMatrix(np.power(a.values, r))


def majorizes(q, p, *, tol: float = 1e-9) -> bool:
    """True when ``q`` majorizes ``p``: every partial sum of the descending
    sort of ``q`` dominates the corresponding partial sum of ``p``.

    Both vectors must be (near-)nonnegative with equal totals within
    ``tol``; comparisons allow the same slack.
    """
    q = np.asarray(q, dtype=np.float64).ravel()
    p = np.asarray(p, dtype=np.float64).ravel()
    if q.shape != p.shape:
        raise InputError(f"length mismatch: {q.shape} vs {p.shape}")
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
        raise InputError("vectors must be finite")
    if np.min(q, initial=0.0) < -tol or np.min(p, initial=0.0) < -tol:
        raise InputError("vectors must be nonnegative")
    if abs(float(q.sum()) - float(p.sum())) > tol:
        raise InputError("vectors must have equal sums")
    cq = np.cumsum(np.sort(q)[::-1])
    cp = np.cumsum(np.sort(p)[::-1])
    return bool(np.all(cq >= cp - tol))
