"""Dense linear-algebra kernels shared by the whole package.

Symmetric eigendecomposition, thin QR and principal-angle computations,
all with fixed sign conventions so repeated calls give identical output.
Everything operates on float64 numpy arrays and is pure.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError, RankDeficientError

__all__ = [
    "symmetrize",
    "check_orthonormal",
    "sym_eigen",
    "thin_qr",
    "largest_principal_angle_sin2",
]


def symmetrize(a: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Validate that ``a`` is square, finite and symmetric, and return (a + a') / 2.

    Asymmetry is tolerated up to ``rtol`` relative to the largest entry
    magnitude; anything worse raises :class:`InvalidInputError`.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has non-finite entries")
    scale = max(float(np.max(np.abs(a))), 1.0) if a.size else 1.0
    if a.size and float(np.max(np.abs(a - a.T))) > rtol * scale:
        raise InvalidInputError("matrix is not symmetric within tolerance")
    return (a + a.T) / 2.0


def check_orthonormal(q: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Validate that the columns of ``q`` are orthonormal to ``tol``."""
    q = np.asarray(q, dtype=float)
    if q.ndim != 2 or q.shape[0] < q.shape[1]:
        raise InvalidInputError(f"expected a tall p x m matrix, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise InvalidInputError("basis has non-finite entries")
    gram = q.T @ q
    err = float(np.max(np.abs(gram - np.eye(q.shape[1])))) if q.shape[1] else 0.0
    if err > tol:
        raise InvalidInputError(f"columns are not orthonormal (max |Q'Q - I| = {err:.3e})")
    return q


def _fix_column_signs(vecs: np.ndarray) -> np.ndarray:
    # Largest-magnitude entry of each column made positive; ties broken by
    # the first occurrence, so the output is deterministic.
    if vecs.shape[1] == 0:
        return vecs
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def sym_eigen(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    a : ndarray, shape (d, d)
        Symmetric matrix (symmetrized on entry, see :func:`symmetrize`).

    Returns
    -------
    eigenvalues : ndarray, shape (d,)
        Sorted in descending order.
    eigenvectors : ndarray, shape (d, d)
        Orthonormal columns, ``eigenvectors[:, j]`` paired with
        ``eigenvalues[j]``. The sign of each column is fixed so its
        largest-magnitude entry is positive.
    """
    a = symmetrize(a)
    vals, vecs = np.linalg.eigh(a)
    vals = vals[::-1].copy()
    vecs = np.ascontiguousarray(vecs[:, ::-1])
    return vals, _fix_column_signs(vecs)


def thin_qr(t: np.ndarray, rank_rtol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR factorization ``t = q @ r`` with nonnegative diag(r).

    Parameters
    ----------
    t : ndarray, shape (p, m), p >= m
        Matrix with full column rank at tolerance ``rank_rtol * ||t||_2``.

    Returns
    -------
    q : ndarray, shape (p, m)
        Orthonormal columns.
    r : ndarray, shape (m, m)
        Upper triangular with nonnegative diagonal (uniqueness convention).

    Raises
    ------
    RankDeficientError
        If the numerical rank is below ``m``; carries the detected rank.
    """
    t = np.asarray(t, dtype=float)
    if t.ndim != 2 or t.shape[0] < t.shape[1] or t.shape[1] == 0:
        raise InvalidInputError(f"expected a tall p x m matrix with m >= 1, got shape {t.shape}")
    if not np.all(np.isfinite(t)):
        raise InvalidInputError("matrix has non-finite entries")
    q, r = np.linalg.qr(t, mode="reduced")
    diag = np.diag(r)
    flip = diag < 0
    if np.any(flip):
        q = q.copy()
        r = r.copy()
        q[:, flip] *= -1.0
        r[flip, :] *= -1.0
    # QR preserves singular values, so ||r||_2 = ||t||_2 at m x m cost.
    norm = float(np.linalg.norm(r, 2))
    rank = int(np.count_nonzero(np.abs(np.diag(r)) > rank_rtol * norm))
    if rank < t.shape[1]:
        raise RankDeficientError(
            f"matrix has numerical rank {rank} < {t.shape[1]}", detected_rank=rank
        )
    return q, r


def largest_principal_angle_sin2(q1: np.ndarray, q2: np.ndarray) -> float:
    """Squared sine of the largest principal angle between two column spans.

    Equals the squared spectral norm of the difference of the orthogonal
    projectors onto the two subspaces, computed here from the singular
    values of ``q1' @ q2`` at O(p m^2) cost. Both inputs must have
    orthonormal columns and the same row count; if the column counts
    differ the subspaces cannot coincide and the distance is 1.
    """
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    if q1.ndim != 2 or q2.ndim != 2 or q1.shape[0] != q2.shape[0]:
        raise InvalidInputError(
            f"bases must share their row count, got shapes {q1.shape} and {q2.shape}"
        )
    if q1.shape[1] != q2.shape[1]:
        return 1.0
    if q1.shape[1] == 0:
        return 0.0
    svals = np.linalg.svd(q1.T @ q2, compute_uv=False)
    smin = float(np.clip(svals[-1], 0.0, 1.0))
    return 1.0 - smin * smin
