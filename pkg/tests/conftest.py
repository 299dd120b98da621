import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_orthonormal(rng, p, m):
    """Random p x m orthonormal basis (Haar-ish via QR of a Gaussian)."""
    q, r = np.linalg.qr(rng.standard_normal((p, m)))
    return q * np.sign(np.diag(r))


def projector_gap_sq(q1, q2):
    """Test oracle: squared spectral norm of the projector difference."""
    d = q1 @ q1.T - q2 @ q2.T
    return float(np.linalg.norm(d, 2) ** 2)
