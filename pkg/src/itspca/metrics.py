"""Loss functions for subspaces and single eigenvectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .linalg import largest_principal_angle_sin2

__all__ = ["LossRecord", "subspace_loss", "eigvec_loss"]


@dataclass(frozen=True)
class LossRecord:
    """One replicate's outcome in a Monte Carlo cell."""

    loss: float
    support_size: int
    iterations: int
    seed: int


def subspace_loss(truth: np.ndarray, est: np.ndarray) -> float:
    """Squared spectral norm of the projector difference, in [0, 1].

    Equals the squared sine of the largest principal angle between the
    two column spans; 1 when the dimensions differ.
    """
    return largest_principal_angle_sin2(truth, est)


def eigvec_loss(q: np.ndarray, qhat: np.ndarray) -> float:
    """Sign-aligned squared distance ||q - sgn(q'qhat) qhat||^2 between unit vectors.

    A zero inner product is treated as positive sign (either choice gives
    the same loss of 2).
    """
    q = np.asarray(q, dtype=float).ravel()
    qhat = np.asarray(qhat, dtype=float).ravel()
    if q.shape != qhat.shape:
        raise InvalidInputError(f"vectors differ in length: {q.shape} vs {qhat.shape}")
    for name, v in (("first", q), ("second", qhat)):
        if abs(np.linalg.norm(v) - 1.0) > 1e-8:
            raise InvalidInputError(f"{name} vector is not unit norm")
    sign = 1.0 if float(q @ qhat) >= 0.0 else -1.0
    diff = q - sign * qhat
    return float(diff @ diff)
