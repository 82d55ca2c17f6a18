import numpy as np
import pytest

from skdv.grid import SpatialGrid, SpectralDatum, TimeGrid


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_datum(rng, spatial, band=None, real=False):
    """Random coefficients on |k| <= band (default: half the grid), Nyquist zero."""
    n = spatial.num_points
    band = n // 4 if band is None else band
    c = np.zeros(n, dtype=complex)
    k = spatial.indices
    keep = np.abs(k) <= band
    c[keep] = rng.normal(size=keep.sum()) + 1j * rng.normal(size=keep.sum())
    c[n // 2] = 0
    if real:
        c = 0.5 * (c + np.conj(c[np.mod(-k, n)]))
    return SpectralDatum(spatial, c)


@pytest.fixture
def small_grid():
    return SpatialGrid(64)


@pytest.fixture
def times():
    return TimeGrid(-2.0, 2.0, 256)
