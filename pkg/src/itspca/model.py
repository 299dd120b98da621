"""Spiked covariance model: synthetic data, sample covariance, noise scale.

Data are drawn from the orthogonal factor form

    x_i = sum_j lambda_j * v_ij * q_j + sigma * z_i

with v_ij and z_i independent standard normals, so the population
covariance is ``sum_j lambda_j^2 q_j q_j' + sigma^2 I``. Sampling uses
numpy's seeded PCG64 generator with its standard ziggurat normal
transform; the factor block ``(n, n_spikes)`` is drawn before the noise
block ``(n, p)``, which makes every dataset bit-reproducible from
``(model, n, seed)`` on a given build.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .linalg import check_orthonormal, symmetrize

__all__ = [
    "SpikedModel",
    "DataSet",
    "SampleCov",
    "generate",
    "sample_cov",
    "estimate_noise_var",
    "write_csv",
    "read_csv",
    "write_binary",
    "read_binary",
]

_BINARY_MAGIC = b"SPCDATA1"  # 8 bytes; header is magic + uint32 n + uint32 p


@dataclass(frozen=True)
class SpikedModel:
    """Ground truth: spike strengths, orthonormal spike directions, noise level."""

    p: int
    spikes: np.ndarray
    eigvecs: np.ndarray
    noise_var: float = 1.0

    def __post_init__(self):
        spikes = np.asarray(self.spikes, dtype=float)
        eigvecs = np.asarray(self.eigvecs, dtype=float)
        if spikes.ndim != 1 or spikes.size < 1:
            raise InvalidInputError("spikes must be a nonempty 1-d sequence")
        if np.any(spikes <= 0.0) or np.any(np.diff(spikes) > 0.0):
            raise InvalidInputError("spikes must be positive and nonincreasing")
        if eigvecs.shape != (self.p, spikes.size):
            raise InvalidInputError(
                f"eigvecs must be p x n_spikes = ({self.p}, {spikes.size}), got {eigvecs.shape}"
            )
        check_orthonormal(eigvecs)
        if not self.noise_var > 0.0:
            raise InvalidInputError("noise_var must be positive")
        object.__setattr__(self, "spikes", spikes)
        object.__setattr__(self, "eigvecs", eigvecs)

    @property
    def n_spikes(self) -> int:
        return int(self.spikes.size)

    def covariance(self) -> np.ndarray:
        """Dense p x p population covariance (for small-p checks only)."""
        q = self.eigvecs
        return (q * self.spikes) @ q.T + self.noise_var * np.eye(self.p)


@dataclass(frozen=True)
class DataSet:
    """n x p observation matrix plus the seed it was generated from.

    ``rng_seed = 0`` marks data of unknown provenance (e.g. loaded from
    an external file).
    """

    rows: np.ndarray
    rng_seed: int = 0

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2:
            raise InvalidInputError(f"rows must be a 2-d array, got shape {rows.shape}")
        if not np.all(np.isfinite(rows)):
            raise InvalidInputError("data has non-finite entries")
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return int(self.rows.shape[0])

    @property
    def p(self) -> int:
        return int(self.rows.shape[1])


@dataclass(frozen=True)
class SampleCov:
    """Symmetric p x p second-moment matrix together with its sample size."""

    s: np.ndarray
    n: int

    def __post_init__(self):
        object.__setattr__(self, "s", symmetrize(self.s))
        if self.n < 1:
            raise InvalidInputError("sample size must be >= 1")

    @property
    def p(self) -> int:
        return int(self.s.shape[0])


def generate(model: SpikedModel, n: int, seed: int) -> DataSet:
    """Draw ``n`` i.i.d. observations from the spiked model. Deterministic in ``seed``."""
    if n < 2:
        raise InvalidInputError("need at least 2 observations")
    rng = np.random.default_rng(seed)
    factors = rng.standard_normal((n, model.n_spikes))
    noise = rng.standard_normal((n, model.p))
    lam = np.sqrt(model.spikes)
    rows = factors @ (lam[:, np.newaxis] * model.eigvecs.T)
    rows += np.sqrt(model.noise_var) * noise
    return DataSet(rows=rows, rng_seed=int(seed))


def sample_cov(data: DataSet) -> SampleCov:
    """Uncentered second-moment matrix S = (1/n) X'X (the model has mean zero)."""
    x = data.rows
    s = x.T @ x / data.n
    return SampleCov(s=s, n=data.n)


def estimate_noise_var(data: DataSet) -> float:
    """Median over coordinates of the per-coordinate uncentered second moments.

    Robust to a few spiked coordinates; for an even number of coordinates
    the median is the mean of the two central order statistics.
    """
    if data.p < 1:
        raise InvalidInputError("need at least one coordinate")
    second_moments = np.mean(data.rows**2, axis=0)
    return float(np.median(second_moments))


def write_csv(data: DataSet, path) -> None:
    """Write observations as plain numeric CSV, one row per observation."""
    np.savetxt(path, data.rows, delimiter=",", fmt="%.17g")


def read_csv(path) -> DataSet:
    rows = np.loadtxt(path, delimiter=",", ndmin=2)
    return DataSet(rows=rows)


def write_binary(data: DataSet, path) -> None:
    """Write a 16-byte header (magic, n, p) then row-major little-endian float64."""
    header = struct.pack("<8sII", _BINARY_MAGIC, data.n, data.p)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(data.rows, dtype="<f8").tobytes())


def read_binary(path) -> DataSet:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16:
            raise InvalidInputError(f"{path}: truncated header")
        magic, n, p = struct.unpack("<8sII", header)
        if magic != _BINARY_MAGIC:
            raise InvalidInputError(f"{path}: bad magic {magic!r}")
        payload = fh.read(8 * n * p)
    if len(payload) != 8 * n * p:
        raise InvalidInputError(f"{path}: truncated payload")
    rows = np.frombuffer(payload, dtype="<f8").reshape(n, p).astype(float)
    return DataSet(rows=rows)
