"""Variance-screening initialization: select big-variance coordinates,
eigendecompose the selected submatrix, zero-pad back to full dimension."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptySelectionError, InvalidInputError
from .linalg import sym_eigen
from .model import SampleCov

__all__ = ["InitResult", "screening_level", "dtspca", "ell_entry"]


@dataclass(frozen=True)
class InitResult:
    """Output of the screening step.

    Attributes
    ----------
    b_set : ndarray of int
        Sorted indices of the selected coordinates B.
    ell_b : ndarray
        Eigenvalues of the screened submatrix floored at 1, descending,
        one per selected coordinate. Use :func:`ell_entry` for the
        implicit continuation by 1 beyond ``card(B)``.
    q0 : ndarray, shape (p, card(B))
        Eigenvectors of the screened submatrix zero-padded to length p;
        rows outside ``b_set`` are exactly zero.
    """

    b_set: np.ndarray
    ell_b: np.ndarray
    q0: np.ndarray

    @property
    def card(self) -> int:
        return int(self.b_set.size)


def ell_entry(ell_b: np.ndarray, j: int) -> float:
    """1-based lookup into the eigenvalue list, continued by 1 past its end."""
    if j < 1:
        raise InvalidInputError("eigenvalue index is 1-based")
    return float(ell_b[j - 1]) if j <= len(ell_b) else 1.0


def screening_level(alpha: float, n: int, p: int) -> float:
    """Diagonal screening level alpha * sqrt(log(max(p, n)) / n)."""
    return alpha * float(np.sqrt(np.log(max(p, n)) / n))


def dtspca(s: SampleCov, p_dim: int, alpha: float, sigma2: float) -> InitResult:
    """Diagonal-thresholding initialization.

    Selects ``B = {nu : s_nunu >= sigma2 * (1 + alpha_n)}`` with
    ``alpha_n = alpha * sqrt(log(max(p, n)) / n)``, eigendecomposes the
    submatrix ``S_BB`` and zero-pads its eigenvectors to length p.

    Raises
    ------
    EmptySelectionError
        If no diagonal entry passes the screen; the error carries
        ``alpha_n`` and the largest diagonal value so the caller can
        retry with a smaller ``alpha``.
    """
    if p_dim != s.p:
        raise InvalidInputError(f"p_dim = {p_dim} does not match matrix dimension {s.p}")
    if not alpha > 0.0:
        raise InvalidInputError("alpha must be positive")
    if not sigma2 > 0.0:
        raise InvalidInputError("sigma2 must be positive")
    if s.n < 2:
        raise InvalidInputError("need sample size >= 2")
    alpha_n = screening_level(alpha, s.n, p_dim)
    diag = np.diag(s.s)
    b_set = np.flatnonzero(diag >= sigma2 * (1.0 + alpha_n))
    if b_set.size == 0:
        raise EmptySelectionError(
            f"no coordinate passed the variance screen at level {sigma2 * (1 + alpha_n):.6g}",
            alpha_n=alpha_n,
            max_diagonal=float(diag.max()),
        )
    sub = s.s[np.ix_(b_set, b_set)]
    vals, vecs = sym_eigen(sub)
    q0 = np.zeros((p_dim, b_set.size))
    q0[b_set, :] = vecs
    return InitResult(b_set=b_set, ell_b=np.maximum(vals, 1.0), q0=q0)
