"""Periodized orthonormal discrete wavelet transform and built-in test curves.

The transform uses the 16-tap least-asymmetric orthonormal filter with 8
vanishing moments ("Symmlet 8"). The filter constants below were started
from the WaveLab850 ``MakeONFilter('Symmlet', 8)`` table and polished by
Newton iteration on the defining equations (unit norm, vanishing even-lag
autocorrelations, 8 vanishing moments), so they satisfy

    sum(h) = sqrt(2),  sum(h^2) = 1,  sum_i h[i] h[i + 2k] = 0 (k != 0)

to machine precision. Boundary handling is periodic, which keeps the
transform exactly orthogonal on any length divisible by 2**levels.

All transforms operate on the last axis and accept batched input, so a
whole (n, p) data matrix can be transformed in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "SCALING_FILTER",
    "WaveletSpec",
    "TestSignal",
    "default_levels",
    "dwt",
    "idwt",
    "test_signal",
    "SIGNAL_NAMES",
]

# 8-vanishing-moment least-asymmetric scaling filter (16 taps).
# Numeric source: WaveLab850 MakeONFilter('Symmlet', 8), refined to full
# double precision as described in the module docstring.
SCALING_FILTER = np.array(
    [
        0.0018899503327668202,
        -0.0003029205147247028,
        -0.014952258337058703,
        0.0038087520138944666,
        0.04913717967372468,
        -0.027219029917096196,
        -0.05194583810787943,
        0.36444189483615697,
        0.7771857516996262,
        0.4813596512590738,
        -0.061273359067809625,
        -0.14329423835127578,
        0.00760748732497854,
        0.03169508781152207,
        -0.0005421323318009758,
        -0.003382415951003108,
    ]
)

# Quadrature mirror (wavelet) filter: g[i] = (-1)^i h[L-1-i].
_WAVELET_FILTER = (-1.0) ** np.arange(SCALING_FILTER.size) * SCALING_FILTER[::-1]


@dataclass(frozen=True)
class WaveletSpec:
    """Decomposition depth for the fixed periodized Symmlet-8 transform."""

    levels: int

    def __post_init__(self):
        if self.levels < 1:
            raise InvalidInputError("need at least one decomposition level")


def default_levels(p: int) -> int:
    """Depth leaving a coarsest approximation of 16 coefficients (at least 1 level)."""
    return max(1, int(np.log2(p)) - 4)


def _check_length(n: int, levels: int) -> None:
    if n < 2 or n % (1 << levels) != 0:
        raise InvalidInputError(
            f"signal length {n} is not divisible by 2^levels = {1 << levels}"
        )


def _analyze(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # One analysis level: a[k] = sum_i h[i] x[(2k+i) mod n], same for g.
    n = x.shape[-1]
    lo = np.zeros(x.shape[:-1] + (n // 2,))
    hi = np.zeros_like(lo)
    for i in range(SCALING_FILTER.size):
        shifted = np.roll(x, -i, axis=-1)[..., ::2]
        lo += SCALING_FILTER[i] * shifted
        hi += _WAVELET_FILTER[i] * shifted
    return lo, hi


def _synthesize(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    # Adjoint of _analyze: x[j] = sum_k h[(j-2k) mod n] a[k] + g[(j-2k) mod n] d[k].
    n = 2 * lo.shape[-1]
    up_lo = np.zeros(lo.shape[:-1] + (n,))
    up_hi = np.zeros_like(up_lo)
    up_lo[..., ::2] = lo
    up_hi[..., ::2] = hi
    out = np.zeros_like(up_lo)
    for i in range(SCALING_FILTER.size):
        out += SCALING_FILTER[i] * np.roll(up_lo, i, axis=-1)
        out += _WAVELET_FILTER[i] * np.roll(up_hi, i, axis=-1)
    return out


def dwt(signal: np.ndarray, spec: WaveletSpec) -> np.ndarray:
    """Orthonormal periodized wavelet transform along the last axis.

    Output layout per signal of length p: the coarsest approximation
    block (length p / 2^levels) followed by detail blocks from coarsest
    to finest. The transform is orthogonal, so norms and inner products
    are preserved.
    """
    x = np.asarray(signal, dtype=float)
    _check_length(x.shape[-1], spec.levels)
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("signal has non-finite entries")
    details = []
    approx = x
    for _ in range(spec.levels):
        approx, hi = _analyze(approx)
        details.append(hi)
    return np.concatenate([approx] + details[::-1], axis=-1)


def idwt(coeffs: np.ndarray, spec: WaveletSpec) -> np.ndarray:
    """Inverse of :func:`dwt` (exact, the transform is orthogonal)."""
    c = np.asarray(coeffs, dtype=float)
    _check_length(c.shape[-1], spec.levels)
    if not np.all(np.isfinite(c)):
        raise InvalidInputError("coefficients have non-finite entries")
    n = c.shape[-1]
    coarse_len = n >> spec.levels
    approx = c[..., :coarse_len]
    offset = coarse_len
    for level in range(spec.levels, 0, -1):
        width = n >> level
        hi = c[..., offset : offset + width]
        approx = _synthesize(approx, hi)
        offset += width
    return approx


# ---------------------------------------------------------------------------
# Test curves. Each is sampled at t = nu/p (nu = 1..p) and scaled to unit
# Euclidean norm so it can serve directly as a population eigenvector.
# The breakpoints and amplitudes below are the frozen reference
# definitions; see README for the rationale.
# ---------------------------------------------------------------------------

_STEP_BREAKS = np.array([0.20, 0.60])
_STEP_JUMPS = np.array([4.0, -5.0])

_PEAK_CENTERS = np.array([0.23, 0.45, 0.78])
_PEAK_WIDTHS = np.array([0.05, 0.06, 0.04])
_PEAK_HEIGHTS = np.array([4.0, 5.0, 3.0])

_SING_CENTER = 0.37
_SING_EXPONENT = 0.6


def _step_values(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    for b, h in zip(_STEP_BREAKS, _STEP_JUMPS):
        out += h * (1.0 + np.sign(t - b)) / 2.0
    return out


def _poly_values(t: np.ndarray) -> np.ndarray:
    # Piecewise quadratic with jumps at 0.4 and 0.7.
    out = np.empty_like(t)
    left = t < 0.4
    mid = (t >= 0.4) & (t < 0.7)
    right = t >= 0.7
    out[left] = 1.0 + 6.0 * t[left] - 8.0 * t[left] ** 2
    tm = t[mid] - 0.4
    out[mid] = -1.0 + 4.0 * tm + 10.0 * tm**2
    tr = t[right] - 0.7
    out[right] = 2.0 - 3.0 * tr - 5.0 * tr**2
    return out


def _peak_values(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    for c, w, h in zip(_PEAK_CENTERS, _PEAK_WIDTHS, _PEAK_HEIGHTS):
        out += h * np.exp(-0.5 * ((t - c) / w) ** 2)
    return out


def _sing_values(t: np.ndarray) -> np.ndarray:
    # Continuous, with a cusp (singular derivative) at the center.
    return np.abs(t - _SING_CENTER) ** _SING_EXPONENT


_GENERATORS = {
    "step": _step_values,
    "poly": _poly_values,
    "peak": _peak_values,
    "sing": _sing_values,
}

SIGNAL_NAMES = tuple(sorted(_GENERATORS))


@dataclass(frozen=True)
class TestSignal:
    """A named deterministic test curve, unit Euclidean norm."""

    name: str
    p: int
    values: np.ndarray


def test_signal(name: str, p: int) -> TestSignal:
    """Sample the named test curve at nu/p, nu = 1..p, and normalize.

    ``p`` must be a power of two, at least 64.
    """
    if name not in _GENERATORS:
        raise InvalidInputError(f"unknown test signal {name!r}; choose from {SIGNAL_NAMES}")
    if p < 64 or p & (p - 1) != 0:
        raise InvalidInputError(f"signal length must be a power of two >= 64, got {p}")
    t = np.arange(1, p + 1, dtype=float) / p
    values = _GENERATORS[name](t)
    values = values / np.linalg.norm(values)
    return TestSignal(name=name, p=p, values=values)
