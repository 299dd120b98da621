"""Data-driven choice of the number of spikes and the target dimension.

The spike count compares the screened eigenvalues against 1 plus a
concentration allowance; the target dimension then keeps the largest
index whose eigenvalue gap is still a sizable fraction of the leading
signal strength.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .screening import InitResult, ell_entry

__all__ = ["RankEstimate", "delta_threshold", "estimate_nspike", "select_m", "estimate_rank"]

DEFAULT_KAPPA_BAR = 15.0


@dataclass(frozen=True)
class RankEstimate:
    """Estimated spike count, selected dimension and their ingredients."""

    nspike_hat: int
    m_selected: int
    delta: list
    gap_ratios: list


def delta_threshold(k: int, n: int, p: int) -> float:
    """Concentration allowance delta_k = 2(sqrt(k/n) + t_k) + (sqrt(k/n) + t_k)^2

    with t_k^2 = 6 log(max(p, n)) / n + 2 k (log(max(p, n)) + 1) / n.
    """
    if k < 1 or n < 2:
        raise InvalidInputError("need k >= 1 and n >= 2")
    logpn = float(np.log(max(p, n)))
    t_k = float(np.sqrt(6.0 * logpn / n + 2.0 * k * (logpn + 1.0) / n))
    base = float(np.sqrt(k / n)) + t_k
    return 2.0 * base + base * base


def estimate_nspike(init: InitResult, n: int, p: int) -> int:
    """Largest j with ell_b[j] > 1 + delta_{card(B)}; 0 when nothing clears it."""
    delta = delta_threshold(init.card, n, p)
    # ell_b is nonincreasing, so the qualifying set is a prefix.
    return int(np.count_nonzero(init.ell_b > 1.0 + delta))


def select_m(init: InitResult, nspike_hat: int, kappa_bar: float = DEFAULT_KAPPA_BAR) -> int:
    """Largest j <= nspike_hat whose gap ratio (ell_1 - 1)/(ell_j - ell_{j+1})
    stays below ``kappa_bar``; 0 if no j qualifies.

    A tied pair ell_j = ell_{j+1} makes the ratio +inf, which simply
    fails the test; the qualifying set need not be contiguous and the
    maximum over it is taken literally.
    """
    if not kappa_bar > 0.0:
        raise InvalidInputError("kappa_bar must be positive")
    if nspike_hat < 0 or nspike_hat > init.card:
        raise InvalidInputError(f"nspike_hat = {nspike_hat} outside [0, card(B) = {init.card}]")
    best = 0
    top = ell_entry(init.ell_b, 1) - 1.0
    for j in range(1, nspike_hat + 1):
        gap = ell_entry(init.ell_b, j) - ell_entry(init.ell_b, j + 1)
        if gap > 0.0 and top / gap <= kappa_bar:
            best = j
    return best


def estimate_rank(
    init: InitResult, n: int, p: int, kappa_bar: float = DEFAULT_KAPPA_BAR
) -> RankEstimate:
    """Spike count plus dimension selection in one call, with diagnostics."""
    nhat = estimate_nspike(init, n, p)
    m_sel = select_m(init, nhat, kappa_bar)
    top = ell_entry(init.ell_b, 1) - 1.0
    ratios = []
    for j in range(1, nhat + 1):
        gap = ell_entry(init.ell_b, j) - ell_entry(init.ell_b, j + 1)
        ratios.append(top / gap if gap > 0.0 else float("inf"))
    return RankEstimate(
        nspike_hat=nhat,
        m_selected=m_sel,
        delta=[delta_threshold(init.card, n, p)],
        gap_ratios=ratios,
    )
