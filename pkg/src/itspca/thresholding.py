"""Scalar shrinkage rules applied elementwise to iteration matrices.

Every rule ``eta`` satisfies the same contract for all real t and all
gamma >= 0:

    |eta(t, gamma) - t| <= gamma        (never moves an entry by more
                                         than the threshold)
    eta(t, gamma) = 0 when |t| <= gamma (kills sub-threshold entries)
    eta(-t, gamma) = -eta(t, gamma)     (odd)

``gamma = 0`` is admitted as an exact pass-through so the fitting loop
degenerates to plain orthogonal iteration when thresholds are off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

__all__ = ["ThresholdKind", "HARD", "SOFT", "eta", "threshold_matrix"]


@dataclass(frozen=True)
class ThresholdKind:
    """Shrinkage rule selector: ``hard``, ``soft`` or ``scad``.

    ``a`` is the SCAD shoulder parameter (must exceed 2) and is ignored
    by the other two rules. Serializes to ``"hard"``, ``"soft"`` or
    ``"scad:<a>"``.
    """

    name: str
    a: float = 3.7

    def __post_init__(self):
        if self.name not in ("hard", "soft", "scad"):
            raise InvalidInputError(f"unknown threshold kind {self.name!r}")
        if self.name == "scad" and not self.a > 2.0:
            raise InvalidInputError(f"scad parameter must exceed 2, got {self.a}")

    @classmethod
    def parse(cls, text: str) -> "ThresholdKind":
        """Parse ``"hard"``, ``"soft"``, ``"scad"`` or ``"scad:<a>"``."""
        text = text.strip().lower()
        if text.startswith("scad:"):
            try:
                return cls("scad", float(text.split(":", 1)[1]))
            except ValueError as exc:
                raise InvalidInputError(f"bad scad parameter in {text!r}") from exc
        return cls(text)

    def __str__(self) -> str:
        if self.name == "scad":
            return f"scad:{self.a:g}"
        return self.name


HARD = ThresholdKind("hard")
SOFT = ThresholdKind("soft")


def _soft(t, gamma):
    return np.sign(t) * np.maximum(np.abs(t) - gamma, 0.0)


def _hard(t, gamma):
    return np.where(np.abs(t) > gamma, t, 0.0)


def _scad(t, gamma, a):
    # Three-piece rule: soft up to 2*gamma, linear interpolation to the
    # identity on (2*gamma, a*gamma], identity beyond.
    abst = np.abs(t)
    mid = ((a - 1.0) * t - np.sign(t) * a * gamma) / (a - 2.0)
    out = np.where(abst <= 2.0 * gamma, _soft(t, gamma), mid)
    return np.where(abst > a * gamma, t, out)


def eta(kind: ThresholdKind, t, gamma):
    """Apply the selected shrinkage rule elementwise.

    ``t`` may be a scalar or an array; ``gamma`` a nonnegative scalar or
    an array broadcastable against ``t``. Scalar input gives a float.
    """
    t_arr = np.asarray(t, dtype=float)
    g_arr = np.asarray(gamma, dtype=float)
    if not np.all(np.isfinite(t_arr)):
        raise InvalidInputError("threshold input has non-finite entries")
    if not np.all(np.isfinite(g_arr)):
        raise InvalidInputError("threshold level is non-finite")
    if np.any(g_arr < 0.0):
        raise InvalidInputError("threshold level must be >= 0")
    if kind.name == "soft":
        out = _soft(t_arr, g_arr)
    elif kind.name == "hard":
        out = _hard(t_arr, g_arr)
    else:
        out = _scad(t_arr, g_arr, kind.a)
    if np.isscalar(t) and out.ndim == 0:
        return float(out)
    return out


def threshold_matrix(kind: ThresholdKind, t: np.ndarray, gammas) -> np.ndarray:
    """Threshold column ``j`` of ``t`` at level ``gammas[j]``."""
    t = np.asarray(t, dtype=float)
    gammas = np.asarray(gammas, dtype=float)
    if t.ndim != 2 or gammas.ndim != 1 or gammas.shape[0] != t.shape[1]:
        raise InvalidInputError(
            f"need one threshold per column, got matrix {t.shape} and {gammas.shape[0]} levels"
        )
    return eta(kind, t, gammas[np.newaxis, :])
