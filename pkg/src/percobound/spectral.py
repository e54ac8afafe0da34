"""Dense symmetric eigensolver wrappers: full spectra, operator norm, lambda_2."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SpectralResult", "eig_sym", "spectral_norm", "lambda2"]

# Relative symmetry tolerance, measured against the max absolute row sum
# (an upper bound on the spectral norm for symmetric matrices).
_SYMMETRY_RTOL = 1e-10


@dataclass(frozen=True)
class SpectralResult:
    """Spectrum of a symmetric matrix.

    eigenvalues are ascending with multiplicity.  eigenvectors (columns,
    aligned with eigenvalues) and max_residual are filled only when vectors
    were requested; max_residual is max_i ||M v_i - mu_i v_i||_2.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None
    max_residual: float | None = None


def _checked_symmetric(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    if n == 0:
        raise ValueError("matrix must have at least one row")
    scale = max(1.0, float(np.abs(M).sum(axis=1).max()))
    asym = float(np.abs(M - M.T).max())
    if asym > _SYMMETRY_RTOL * scale:
        raise ValueError(
            f"matrix is not symmetric: max |M - M^T| entry is {asym:.3e}"
        )
    # Exact symmetry keeps LAPACK deterministic regardless of which triangle
    # it reads.
    return 0.5 * (M + M.T)


def eig_sym(M, compute_vectors: bool = False) -> SpectralResult:
    """Full spectrum of a symmetric matrix, ascending.

    Raises ValueError for non-square input or when M deviates from symmetry
    by more than 1e-10 relative to its largest absolute row sum.
    """
    S = _checked_symmetric(M)
    if not compute_vectors:
        return SpectralResult(eigenvalues=np.linalg.eigvalsh(S))
    vals, vecs = np.linalg.eigh(S)
    residual = float(np.linalg.norm(S @ vecs - vecs * vals, axis=0).max())
    return SpectralResult(eigenvalues=vals, eigenvectors=vecs, max_residual=residual)


def spectral_norm(M) -> float:
    """Spectral norm of a symmetric matrix: max |eigenvalue|."""
    vals = eig_sym(M).eigenvalues
    return float(max(abs(vals[0]), abs(vals[-1])))


def lambda2(M) -> float:
    """Second smallest eigenvalue (with multiplicity) of a symmetric matrix."""
    vals = eig_sym(M).eigenvalues
    if vals.shape[0] < 2:
        raise ValueError("lambda2 needs a matrix of order at least 2")
    return float(vals[1])
