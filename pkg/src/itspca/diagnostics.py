"""Oracle quantities computed from a known ground-truth model.

These are test-and-reporting instrumentation only: they require the true
spike directions, which the estimator never sees. They quantify the
per-coordinate noise scale of eigenvector estimation, the set of
coordinates carrying usable signal, an effective support-size bound and
the unavoidable cross-component error term.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .errors import InvalidInputError
from .iterate import spike_snr
from .model import SpikedModel

__all__ = [
    "SparsityClass",
    "OracleQuantities",
    "weak_lr_radius",
    "high_signal_set",
    "oracle_quantities",
]

BETA_FLOOR = 1e-3


@dataclass(frozen=True)
class SparsityClass:
    """Weak-lr decay class: sorted magnitudes bounded by radius * rank^(-1/r)."""

    r: float
    radii: np.ndarray

    def __post_init__(self):
        if not 0.0 < self.r < 2.0:
            raise InvalidInputError("decay exponent r must lie in (0, 2)")
        radii = np.asarray(self.radii, dtype=float)
        if np.any(radii < 1.0):
            raise InvalidInputError("radii must be >= 1")
        object.__setattr__(self, "radii", radii)


@dataclass(frozen=True)
class OracleQuantities:
    """Per-spike noise scales, high-signal set, support bound, error terms."""

    tau: np.ndarray
    h_set: np.ndarray
    m_n: float
    eps: np.ndarray
    beta: float


def weak_lr_radius(u: np.ndarray, r: float) -> float:
    """Smallest radius s with |u|_(nu) <= s * nu^(-1/r) for all nu.

    Computed directly from the definition: the maximum over nu of the
    nu-th largest magnitude times nu^(1/r).
    """
    if not 0.0 < r < 2.0:
        raise InvalidInputError("decay exponent r must lie in (0, 2)")
    u = np.asarray(u, dtype=float).ravel()
    mags = np.sort(np.abs(u))[::-1]
    ranks = np.arange(1, mags.size + 1, dtype=float)
    return float(np.max(mags * ranks ** (1.0 / r)))


def noise_scale(lam2: float, n: int, p: int) -> float:
    """Per-coordinate noise scale tau = sqrt(log(max(p, n)) / (n * h(lam2)))."""
    return sqrt(np.log(max(p, n)) / (n * spike_snr(lam2)))


def high_signal_set(model: SpikedModel, n: int, beta: float) -> np.ndarray:
    """Coordinates where some spike direction exceeds beta times its noise scale."""
    taus = np.array([noise_scale(l2, n, model.p) for l2 in model.spikes])
    mask = np.any(np.abs(model.eigvecs) >= beta * taus[np.newaxis, :], axis=1)
    return np.flatnonzero(mask)


def oracle_quantities(
    model: SpikedModel, n: int, gamma: float, m: int, r: float = 1.0
) -> OracleQuantities:
    """All oracle quantities for a known model at sample size ``n``.

    The high-signal margin is ``beta = 0.9 * (gamma - 2*sqrt(3)) / sqrt(m)``;
    for gamma at or below 2*sqrt(3) (where the margin would be
    nonpositive) beta is clamped to a small positive floor so the
    quantities stay computable in the empirical-gamma regime.

    The support bound uses weak-lr radii of the true spike directions at
    decay exponent ``r`` (floored at 1).
    """
    if m < 1 or m > model.n_spikes:
        raise InvalidInputError(f"m must lie in [1, {model.n_spikes}], got {m}")
    crit = 2.0 * sqrt(3.0)
    beta = 0.9 * (gamma - crit) / sqrt(m) if gamma > crit else BETA_FLOOR
    p = model.p
    lam2 = model.spikes
    taus = np.array([noise_scale(l2, n, p) for l2 in lam2])
    h_set = high_signal_set(model, n, beta)
    radii = np.array(
        [max(1.0, weak_lr_radius(model.eigvecs[:, j], r)) for j in range(model.n_spikes)]
    )
    m_n = float(min(p, np.sum(radii**r / taus**r)))
    logpn = float(np.log(max(p, n)))
    lam2_ext = np.append(lam2, 0.0)
    eps2 = np.empty(model.n_spikes)
    for j in range(model.n_spikes):
        gap = lam2_ext[j] - lam2_ext[j + 1]
        if gap <= 0.0:
            eps2[j] = float("inf")
        else:
            eps2[j] = (lam2[0] + 1.0) * (lam2_ext[j + 1] + 1.0) / gap**2 * logpn / n
    return OracleQuantities(
        tau=taus, h_set=h_set, m_n=m_n, eps=np.sqrt(eps2), beta=beta
    )
