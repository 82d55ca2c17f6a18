"""Random test data for the estimate sweeps.

Every datum is a sparse set of lattice modes with complex Gaussian
coefficients.  Sparse data are admissible test functions like any other;
they keep the exact phase-sum representation small.
"""

from __future__ import annotations

import numpy as np

from ..grid import airy, schrodinger
from ..phasesum import PhaseSum

SHELL_LO = 0.75
SHELL_HI = 1.5
PERIOD_FACTOR = 8


def trial_rng(seed, *keys):
    """Generator for one (seed, case, point, trial) cell; nested under trial doubling."""
    return np.random.default_rng([int(seed)] + [int(k) for k in keys])


def period_for(scale):
    """Torus length 2 pi * 8 * scale^2: long enough that free waves of frequency
    ~scale do not wrap around during the window, as local smoothing requires."""
    return 2 * np.pi * PERIOD_FACTOR * max(1.0, float(scale)) ** 2


def _gauss(rng, n):
    return (rng.normal(size=n) + 1j * rng.normal(size=n)) / np.sqrt(2)


def _sample_indices(rng, lo, hi, h, m):
    """m distinct lattice indices k with lo <= k h < hi (fewer if the range is short)."""
    klo = int(np.ceil(lo / h - 1e-9))
    khi = int(np.ceil(hi / h - 1e-9))
    count = khi - klo
    if count <= 0:
        return np.zeros(0, dtype=np.int64)
    if count <= m:
        return np.arange(klo, khi, dtype=np.int64)
    pick = rng.choice(count, size=m, replace=False)
    return np.sort(klo + pick).astype(np.int64)


def shell_modes(rng, N, period, m):
    """Modes with |xi| in N [0.75, 1.5] (|xi| <= 1 when N = 1), both signs."""
    h = 2 * np.pi / period
    if N == 1:
        return _sample_indices(rng, -1.0, 1.0 + h / 2, h, m)
    half = m // 2
    pos = _sample_indices(rng, SHELL_LO * N, SHELL_HI * N, h, m - half)
    neg = -_sample_indices(rng, SHELL_LO * N, SHELL_HI * N, h, half)
    return np.unique(np.r_[pos, neg])


def complex_datum(rng, k):
    return k, _gauss(rng, k.size)


def real_datum(rng, k):
    """Conjugate-symmetric coefficients on +-k."""
    k = np.unique(np.abs(k))
    c = _gauss(rng, k.size)
    zero = k == 0
    c[zero] = c[zero].real
    kk = np.r_[k, -k[~zero]]
    cc = np.r_[c, np.conj(c[~zero])]
    return kk, cc


def schrodinger_wave(k, c, period, lam):
    return PhaseSum.free_wave(k, c, period, schrodinger(lam))


def airy_wave(k, c, period):
    return PhaseSum.free_wave(k, c, period, airy())


def paired_real_modes(rng, N, period, m):
    """Real-datum modes on shell N such that many pair sums fall in |xi| <= 1.

    Half of the modes are partners -k + d of the first half with a lattice
    offset |d h| <= 1, so high-high to low interactions are present at every N.
    """
    h = 2 * np.pi / period
    base = np.unique(np.abs(shell_modes(rng, N, period, max(2, m // 2))))
    dmax = max(1, int(1.0 / h))
    off = rng.integers(-dmax, dmax + 1, size=base.size)
    partners = np.abs(base + off)
    partners = partners[(partners * h >= SHELL_LO * N) & (partners * h < SHELL_HI * N)]
    return np.unique(np.r_[base, partners])


def resonant_window_modes(rng, N, lam, period, m, pairs=2):
    """Modes of a Schrodinger datum that feeds the resonant output shell N.

    The output xi = xi1 - eta2 of |S u0|^2 is resonant when
    xi1 + eta2 = -xi^2 / lam.  Modes are drawn on a window of width 4N
    centered at -N^2/(2 lam), and ``pairs`` exactly placed lattice pairs with
    xi close to N (or the nearest shell points) are added.
    """
    h = 2 * np.pi / period
    center = -(N ** 2) / (2 * lam)
    k = _sample_indices(rng, center - 2 * N, center + 2 * N, h, m)
    extra = []
    for _ in range(pairs):
        xi = N * rng.uniform(SHELL_LO, SHELL_HI) * rng.choice([-1, 1])
        s = -(xi ** 2) / lam
        k1 = int(np.rint((s + xi) / (2 * h)))
        k2 = int(np.rint((s - xi) / (2 * h)))
        extra += [k1, k2]
    return np.unique(np.r_[k, np.array(extra, dtype=np.int64)])


def resonant_period(N, lam):
    """Period for resonant-window data: fine enough for shell N outputs and
    long enough for the Schrodinger group velocity 2 lam |xi| ~ N^2."""
    return period_for(N)
