"""Exact exponential sums checked against the grid engine and direct sums."""

import numpy as np
import pytest

from scipy.integrate import quad

from skdv.exceptions import GridError
from skdv.grid import ETA, SpatialGrid, SpectralDatum, TimeGrid, airy, mixed_norm, modulation_energies, schrodinger
from skdv.phasesum import PAD_PERIOD, PhaseSum, eta_hat, gram_eta2
from skdv.propagators import duhamel_airy, duhamel_schrodinger, schrodinger_flow, windowed

PERIOD = 8 * np.pi


@pytest.fixture
def grids():
    return SpatialGrid(64, PERIOD), TimeGrid(-2, 2, 2048)


def _sum(rng, n=6, lam=0.5):
    k = rng.choice(np.r_[-12:0, 1:13], size=n, replace=False)
    c = rng.normal(size=n) + 1j * rng.normal(size=n)
    a = PhaseSum.free_wave(k, c, PERIOD, airy())
    b = PhaseSum.free_wave(np.array([2, -3]), np.array([1.0, 0.5j]), PERIOD, schrodinger(lam))
    return a * b + a


def test_eta_hat_matches_quadrature():
    for s in (0.0, 0.7, 3.1, 17.0):
        ref = quad(lambda t: ETA(np.array([t]))[0] * np.cos(s * t), -2, 2, limit=200)[0]
        assert abs(eta_hat(s) - ref) < 1e-9


def test_gram_is_eta_squared_transform():
    ref = quad(lambda t: ETA(np.array([t]))[0] ** 2 * np.cos(1.3 * t), -2, 2, limit=200)[0]
    assert abs(gram_eta2(1.3) - ref) < 1e-9


def test_evaluate_matches_direct_sum(rng):
    ps = _sum(rng)
    t = np.array([-0.4, 0.3])
    x = np.linspace(0, PERIOD, 5)
    direct = sum(c * np.exp(1j * (w * t[:, None] + k * ps.h * x[None, :]))
                 for k, c, w in zip(ps.k, ps.c, ps.omega))
    assert np.allclose(ps.evaluate(t, x), direct, atol=1e-12)


def test_free_wave_matches_grid_flow(rng, grids):
    sg, tg = grids
    a = np.zeros(sg.num_points, dtype=complex)
    a[[3, 7, sg.num_points - 5]] = [1.0, 2j, -0.5]
    d = SpectralDatum(sg, a)
    ps = PhaseSum.from_datum(d, schrodinger(0.25))
    ref = windowed(schrodinger_flow(d, 0.25, tg))
    assert np.allclose(ps.to_field(sg, tg).values, ref.values, atol=1e-12)


def test_products_and_conjugates(rng, grids):
    sg, tg = grids
    ps = _sum(rng)
    x = sg.x
    t = np.array([0.2])
    v = ps.evaluate(t, x)
    assert np.allclose(ps.abs2().evaluate(t, x), np.abs(v) ** 2, atol=1e-10)
    assert np.allclose(ps.conj().evaluate(t, x), np.conj(v), atol=1e-12)
    assert np.allclose(ps.real_part().evaluate(t, x), v.real, atol=1e-12)


def test_duhamel_matches_grid_engine(rng, grids):
    sg, tg = grids
    ps = _sum(rng)
    f = ps.to_field(sg, tg, profile=lambda t: np.ones_like(t))
    exact_k = ps.duhamel_airy().to_field(sg, tg, profile=lambda t: np.ones_like(t))
    exact_s = ps.duhamel_schrodinger(0.5).to_field(sg, tg, profile=lambda t: np.ones_like(t))
    grid_k = duhamel_airy(f)
    grid_s = duhamel_schrodinger(f, 0.5)
    scale = np.max(np.abs(exact_k.values))
    assert np.max(np.abs(grid_k.values - exact_k.values)) < 1e-3 * scale
    scale = np.max(np.abs(exact_s.values))
    assert np.max(np.abs(grid_s.values - exact_s.values)) < 1e-5 * scale


def test_duhamel_exact_resonance_is_finite():
    # a free Airy wave forced at its own frequency grows linearly
    ps = PhaseSum.free_wave([3], [1.0], PERIOD, airy())
    d = ps.duhamel_airy()
    t = np.array([0.5, 1.0])
    vals = np.abs(d.evaluate(t, np.array([0.0]))[:, 0])
    xi = 3 * 2 * np.pi / PERIOD
    assert np.allclose(vals, xi * t, rtol=1e-5)


@pytest.mark.parametrize("sym", [airy(), schrodinger(0.5)], ids=["airy", "schrodinger"])
def test_modulation_energies_match_grid(rng, grids, sym):
    sg, tg = grids
    ps = _sum(rng)
    a = modulation_energies(ps.to_field(sg, tg), sym)
    b = ps.modulation_energies(sym)
    top = max(a.values())
    for L, e in b.items():
        if e > 1e-3 * top:
            assert e == pytest.approx(a[L], rel=1e-6)


def test_l2_and_mixed_norm_sandwiches(rng, grids):
    sg, tg = grids
    ps = _sum(rng)
    f = ps.to_field(sg, tg)
    assert ps.l2_norm() == pytest.approx(mixed_norm(f, "space", 2, 2), rel=1e-8)
    grid_max = mixed_norm(f, "space", 2, np.inf)
    assert ps.maximal_norm("lower") <= grid_max * (1 + 1e-9)
    assert ps.maximal_norm("upper") >= grid_max * (1 - 1e-9)
    grid_sm = mixed_norm(f, "space", np.inf, 2)
    assert ps.smoothing_norm("lower") <= grid_sm * (1 + 1e-3)
    assert ps.smoothing_norm("upper") >= grid_sm * (1 - 1e-9)


def test_merge_combines_equal_terms():
    a = PhaseSum([1, 1, 2], [1.0, 2.0, 3.0], [0.5, 0.5, 0.1], PERIOD)
    assert len(a) == 2
    assert (a - a).num_terms == 0


def test_period_mismatch_raises():
    a = PhaseSum.free_wave([1], [1.0], PERIOD, airy())
    b = PhaseSum.free_wave([1], [1.0], 2 * PERIOD, airy())
    with pytest.raises(GridError):
        a + b
    with pytest.raises(GridError):
        a.to_field(SpatialGrid(16, 2 * PERIOD), TimeGrid(-2, 2, 16))


def test_modulation_fast_paths_match_accumulator(rng):
    # isolated windows far out, near sigma = 0, on octave edges, and overlapping ones
    n = 400
    k = rng.integers(-30, 31, size=n)
    omega = np.concatenate([
        rng.uniform(-1e6, 1e6, n // 4),
        rng.uniform(-300, 300, n // 4),
        np.repeat(2.0 ** rng.integers(8, 16, n // 8), 2) + rng.uniform(-40, 40, n // 4),
        rng.uniform(-5e3, 5e3, n // 4),
    ])
    c = rng.normal(size=n) + 1j * rng.normal(size=n)
    ps = PhaseSum(k, c, omega, PERIOD)
    kvals, Ls, E = ps.modulation_table(airy())
    mu = ps.omega - airy().omega(ps.xi)
    order = np.lexsort((mu, ps.k))
    kk = ps.k[order]
    kids = np.cumsum(np.r_[True, kk[1:] != kk[:-1]]) - 1
    ref = np.zeros_like(E)
    PhaseSum._clustered_energies(kk, mu[order], ps.c[order], kids, PERIOD / PAD_PERIOD, ref)
    assert np.max(np.abs(E - ref)) <= 1e-12 * np.max(ref)


def test_far_windows_match_exact_path(rng, monkeypatch):
    import skdv.phasesum as P

    k = np.arange(1, 9)
    omega = rng.uniform(2.0 ** 38, 2.0 ** 41, 8) * rng.choice([-1, 1], 8)
    c = rng.normal(size=8) + 1j * rng.normal(size=8)
    exact = PhaseSum(k, c, omega, PERIOD).modulation_table(airy())[2]
    monkeypatch.setattr(P, "FAR_SIGMA", 2.0 ** 30)
    far = PhaseSum(k, c, omega, PERIOD).modulation_table(airy())[2]
    assert np.allclose(far, exact, rtol=1e-9, atol=1e-12 * exact.max())


def test_huge_phases_do_not_overflow():
    ps = PhaseSum(np.array([1, 1, 2]), np.array([1.0, 0.5, 0.25j]), np.array([0.0, 8e18, -3e19]), PERIOD)
    kvals, Ls, E = ps.modulation_table(airy())
    assert np.all(np.isfinite(E))
    assert Ls[-1] >= 3e19
    # mode 2 has only the far window, whose energy sits in the shells around 3e19
    live = np.array(Ls)[E[1] > 0]
    assert live.size and live.min() >= 2.0 ** 63 and live.max() <= 2.0 ** 66
