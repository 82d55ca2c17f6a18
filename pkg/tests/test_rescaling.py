"""The scaling map, the choice of lambda and the regularity region."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skdv.exceptions import GridError, PreconditionError
from skdv.grid import SpatialGrid, SpectralDatum, TimeGrid, homogeneous_sobolev_norm, sobolev_norm
from skdv.rescaling import (
    S1_CRITICAL,
    S2_CRITICAL,
    RegularityPair,
    choose_lambda,
    dyadic_exponent,
    is_dyadic_reciprocal,
    rescale_data,
    rescale_datum,
    rescale_solution,
    unscale_datum,
    unscale_solution,
)
from skdv.solver import reference_solve, sup_l2_distance

from conftest import random_datum


@pytest.mark.parametrize("lam,j", [(1.0, 0), (0.5, 1), (2.0 ** -6, 6), (2.0 ** -30, 30)])
def test_dyadic_exponent(lam, j):
    assert dyadic_exponent(lam) == j
    assert is_dyadic_reciprocal(lam)


@pytest.mark.parametrize("lam", [0.1, 0.3, 2.0, 0.0, -0.5, 3 / 8])
def test_non_dyadic_lambda_rejected(lam):
    assert not is_dyadic_reciprocal(lam)
    with pytest.raises(PreconditionError):
        rescale_datum(SpectralDatum.zeros(SpatialGrid(16)), lam)


def test_rescaled_samples_are_lam2_u_of_lam_x(rng):
    sg = SpatialGrid(64)
    d = random_datum(rng, sg, band=20)
    lam = 2.0 ** -3
    r = rescale_datum(d, lam)
    # same sample index j: rescaled x_j = x_j / lam, so u_lam(x_j / lam) = lam^2 u(x_j)
    assert np.allclose(r.physical(), lam ** 2 * d.physical(), atol=1e-13)
    assert r.spatial.period == pytest.approx(sg.period / lam)


@settings(max_examples=40, deadline=None)
@given(j=st.integers(1, 12), s=st.floats(-1.0, 1.0), seed=st.integers(0, 2 ** 16))
def test_homogeneous_norms_scale_exactly(j, s, seed):
    rng = np.random.default_rng(seed)
    sg = SpatialGrid(32)
    d = random_datum(rng, sg)
    lam = 2.0 ** -j
    got = homogeneous_sobolev_norm(rescale_datum(d, lam), s)
    # direct sum over nonzero modes
    xi = sg.xi
    nz = xi != 0
    ref = np.sqrt(sg.period / lam * np.sum(np.abs(lam ** 2 * d.coefficients[nz]) ** 2 * np.abs(lam * xi[nz]) ** (2 * s)))
    assert got == pytest.approx(ref, rel=1e-12)
    assert got == pytest.approx(lam ** (1.5 + s) * homogeneous_sobolev_norm(d, s), rel=1e-10)


def test_unscale_inverts_rescale(rng):
    d = random_datum(rng, SpatialGrid(32))
    back = unscale_datum(rescale_datum(d, 2.0 ** -5), 2.0 ** -5)
    assert back.spatial == d.spatial
    assert np.allclose(back.coefficients, d.coefficients, atol=1e-15)


def test_rescale_data_needs_common_grid(rng):
    with pytest.raises(GridError):
        rescale_data(SpectralDatum.zeros(SpatialGrid(16)), SpectralDatum.zeros(SpatialGrid(32)), 0.5)


def test_choose_lambda_is_largest_admissible(rng):
    sg = SpatialGrid(64)
    u0 = random_datum(rng, sg, band=8)
    v0 = random_datum(rng, sg, band=8, real=True)
    eps0 = 1e-3
    ch = choose_lambda(u0, v0, eps0)
    assert ch.u_norm <= eps0 and ch.v_norm <= eps0
    r = rescale_data(u0, v0, 2 * ch.lam)
    if 2 * ch.lam <= 0.25:
        assert sobolev_norm(r.u0, S1_CRITICAL) > eps0 or sobolev_norm(r.v0, S2_CRITICAL) > eps0


def test_choose_lambda_rejects_bad_eps(rng):
    z = SpectralDatum.zeros(SpatialGrid(16))
    with pytest.raises(PreconditionError):
        choose_lambda(z, z, 0.0)


def test_regularity_region_corners():
    assert RegularityPair(S1_CRITICAL, S2_CRITICAL).admissible
    assert RegularityPair(0.0, 0.0).admissible
    assert not RegularityPair(-0.5, -0.75).admissible
    assert not RegularityPair(0.0, 2.5).admissible


def test_rescaled_solution_solves_rescaled_system(rng):
    # original system (lam = 1) over a short window, mapped forward, against a
    # direct solve of the rescaled system
    lam = 0.5
    sg = SpatialGrid(32)
    u0 = random_datum(rng, sg, band=4)
    v0 = random_datum(rng, sg, band=4, real=True)
    u0 = SpectralDatum(sg, 0.1 * u0.coefficients)
    v0 = SpectralDatum(sg, 0.1 * v0.coefficients)
    short = TimeGrid(-lam ** 3, lam ** 3, 64)
    u, v = reference_solve(u0, v0, 1.0, short)
    ul, vl = rescale_solution(u, v, lam)
    r = rescale_data(u0, v0, lam)
    ur, vr = reference_solve(r.u0, r.v0, lam, ul.temporal)
    assert sup_l2_distance(ul, ur) < 1e-9 * max(1.0, np.max(np.abs(ur.values)))
    assert sup_l2_distance(vl, vr) < 1e-9 * max(1.0, np.max(np.abs(vr.values)))
    ub, vb = unscale_solution(ul, vl, lam)
    assert np.allclose(ub.values, u.values) and ub.temporal.t_max == pytest.approx(short.t_max)
