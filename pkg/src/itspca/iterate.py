"""Core fitting loop: multiply, threshold, re-orthonormalize.

Each iteration multiplies the sample covariance into the current basis,
thresholds every entry at a per-column level, and restores orthonormality
by thin QR on the rows that survived. The multiplication only touches the
nonzero rows of the current basis, so a fit costs
O(iterations * m * p * support) flops.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, log
from typing import Optional

import numpy as np

from .errors import DegenerateGapError, InvalidInputError, RankDeficientError
from .linalg import largest_principal_angle_sin2, thin_qr
from .model import SampleCov
from .screening import InitResult, ell_entry
from .thresholding import SOFT, ThresholdKind, threshold_matrix

__all__ = [
    "Stopping",
    "FitConfig",
    "FitResult",
    "spike_snr",
    "threshold_levels",
    "kstar",
    "itspca",
]


def spike_snr(x: float) -> float:
    """Effective signal-to-noise scale h(x) = x^2 / (x + 1) of a spike of size x."""
    return x * x / (x + 1.0)


@dataclass(frozen=True)
class Stopping:
    """When to stop iterating.

    ``theoretical`` runs exactly the data-driven iteration count of
    :func:`kstar`; ``empirical`` stops once the subspace distance between
    successive bases drops below ``tol`` (default 1/n^2); ``max_iters``
    runs a fixed number of iterations.
    """

    rule: str
    tol: Optional[float] = None
    iters: Optional[int] = None

    def __post_init__(self):
        if self.rule not in ("theoretical", "empirical", "max_iters"):
            raise InvalidInputError(f"unknown stopping rule {self.rule!r}")
        if self.rule == "max_iters" and (self.iters is None or self.iters < 1):
            raise InvalidInputError("max_iters stopping needs a positive iteration count")
        if self.tol is not None and not self.tol > 0.0:
            raise InvalidInputError("stopping tolerance must be positive")

    @classmethod
    def theoretical(cls) -> "Stopping":
        return cls("theoretical")

    @classmethod
    def empirical(cls, tol: Optional[float] = None) -> "Stopping":
        return cls("empirical", tol=tol)

    @classmethod
    def max_iters(cls, iters: int) -> "Stopping":
        return cls("max_iters", iters=iters)


@dataclass(frozen=True)
class FitConfig:
    """Target dimension, shrinkage rule, threshold constant and stopping rule.

    ``max_iters_cap`` bounds the empirical rule on inputs that refuse to
    settle; the effective cap is ``max(2 * kstar, max_iters_cap)`` when
    the data-driven count is available.
    """

    m: int
    kind: ThresholdKind = SOFT
    gamma: float = 1.5
    stopping: Stopping = field(default_factory=Stopping.empirical)
    max_iters_cap: int = 500

    def __post_init__(self):
        if self.m < 1:
            raise InvalidInputError("target dimension m must be >= 1")
        if self.gamma < 0.0:
            raise InvalidInputError("gamma must be >= 0")
        if self.max_iters_cap < 1:
            raise InvalidInputError("max_iters_cap must be positive")


@dataclass(frozen=True)
class FitResult:
    """Fitted orthonormal basis plus bookkeeping.

    ``stop_reason`` is one of ``"kstar"`` (theoretical count reached),
    ``"converged"`` (empirical rule met) or ``"cap"`` (iteration budget
    exhausted).
    """

    basis: np.ndarray
    iterations: int
    support: np.ndarray
    thresholds: np.ndarray
    ell_b: np.ndarray
    stop_reason: str

    def to_json_dict(self) -> dict:
        """JSON-ready dict; the basis is stored sparsely as (row, col, value)."""
        rows, cols = np.nonzero(self.basis)
        return {
            "dims": [int(self.basis.shape[0]), int(self.basis.shape[1])],
            "basis": [
                [int(r), int(c), float(self.basis[r, c])] for r, c in zip(rows, cols)
            ],
            "support": [int(i) for i in self.support],
            "iterations": int(self.iterations),
            "thresholds": [float(g) for g in self.thresholds],
            "ell_b": [float(v) for v in self.ell_b],
            "stop_reason": self.stop_reason,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "FitResult":
        p, m = d["dims"]
        basis = np.zeros((p, m))
        for r, c, v in d["basis"]:
            basis[r, c] = v
        return cls(
            basis=basis,
            iterations=int(d["iterations"]),
            support=np.asarray(d["support"], dtype=int),
            thresholds=np.asarray(d["thresholds"], dtype=float),
            ell_b=np.asarray(d["ell_b"], dtype=float),
            stop_reason=d["stop_reason"],
        )


def threshold_levels(ell_b, m: int, n: int, p: int, gamma: float) -> np.ndarray:
    """Per-column threshold levels gamma * sqrt(ell_b[j] * log(max(p, n)) / n)."""
    if gamma < 0.0:
        raise InvalidInputError("gamma must be >= 0")
    if m < 1:
        raise InvalidInputError("m must be >= 1")
    ell = np.array([ell_entry(np.asarray(ell_b, dtype=float), j) for j in range(1, m + 1)])
    return gamma * np.sqrt(ell * np.log(max(p, n)) / n)


def kstar(ell_b, m: int, n) -> int:
    """Data-driven iteration count sufficient for the theoretical error rate.

    Computed from the screened eigenvalues as

        ceil( 1.1 * ell_1 / (ell_m - ell_{m+1})
              * ((1 + 1/log 2) * log n + max(0, log h(ell_1 - 1))) )

    with h(x) = x^2/(x+1). Requires a positive gap ell_m > ell_{m+1}.
    """
    ell = np.asarray(ell_b, dtype=float)
    ell_1 = ell_entry(ell, 1)
    ell_m = ell_entry(ell, m)
    ell_next = ell_entry(ell, m + 1)
    gap = ell_m - ell_next
    if gap <= 0.0:
        raise DegenerateGapError(
            f"eigenvalue gap at m = {m} is zero (ell_m = ell_m+1 = {ell_m:.6g})"
        )
    h = spike_snr(ell_1 - 1.0)
    tail = max(0.0, log(h)) if h > 0.0 else 0.0
    value = 1.1 * ell_1 / gap * ((1.0 + 1.0 / log(2.0)) * log(n) + tail)
    return int(ceil(value))


def _support_rows(mat: np.ndarray) -> np.ndarray:
    return np.flatnonzero(np.any(mat != 0.0, axis=1))


def itspca(s: SampleCov, init: InitResult, cfg: FitConfig) -> FitResult:
    """Iterative-thresholding fit of an m-dimensional sparse principal subspace.

    Starts from the first ``cfg.m`` columns of the screening output and
    alternates multiply / threshold / thin-QR until the configured
    stopping rule fires. Rows outside the running support stay exactly
    zero: QR is performed on the surviving rows only and zero-padded
    back, so the support of the basis equals the nonzero rows of the
    thresholded matrix at every step.

    Raises
    ------
    RankDeficientError
        If thresholding wipes out enough rows to drop the column rank;
        carries the iteration index.
    DegenerateGapError
        Propagated from :func:`kstar` under theoretical stopping.
    """
    m = cfg.m
    if init.q0.shape[1] < m:
        raise InvalidInputError(
            f"screening kept {init.q0.shape[1]} coordinates, fewer than m = {m}"
        )
    n = s.n
    gammas = threshold_levels(init.ell_b, m, n, s.p, cfg.gamma)

    if cfg.stopping.rule == "theoretical":
        budget = kstar(init.ell_b, m, n)
        tol = None
    elif cfg.stopping.rule == "max_iters":
        budget = cfg.stopping.iters
        tol = None
    else:
        tol = cfg.stopping.tol if cfg.stopping.tol is not None else 1.0 / (n * n)
        try:
            budget = max(2 * kstar(init.ell_b, m, n), cfg.max_iters_cap)
        except DegenerateGapError:
            budget = cfg.max_iters_cap

    q = init.q0[:, :m]
    stop_reason = "kstar" if cfg.stopping.rule == "theoretical" else "cap"
    iterations = 0
    for k in range(1, budget + 1):
        rows = _support_rows(q)
        t = s.s[:, rows] @ q[rows, :]
        t_hat = threshold_matrix(cfg.kind, t, gammas)
        rows_hat = _support_rows(t_hat)
        if rows_hat.size < m:
            raise RankDeficientError(
                f"thresholding left {rows_hat.size} nonzero rows < m = {m} at iteration {k}",
                detected_rank=int(rows_hat.size),
                iteration=k,
            )
        try:
            q_red, _ = thin_qr(t_hat[rows_hat, :])
        except RankDeficientError as exc:
            raise RankDeficientError(
                f"iterate became rank deficient at iteration {k}",
                detected_rank=exc.detected_rank,
                iteration=k,
            ) from exc
        q_new = np.zeros_like(q)
        q_new[rows_hat, :] = q_red
        iterations = k
        if tol is not None and largest_principal_angle_sin2(q, q_new) <= tol:
            q = q_new
            stop_reason = "converged"
            break
        q = q_new

    return FitResult(
        basis=q,
        iterations=iterations,
        support=_support_rows(q),
        thresholds=gammas,
        ell_b=init.ell_b,
        stop_reason=stop_reason,
    )
