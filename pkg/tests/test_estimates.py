"""Estimate catalog, sweeps, the resonance check and the growth probe."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skdv.exceptions import PreconditionError
from skdv.estimates import CATALOG, get_case, resonance_lower_bound_check, run_estimate_sweep, sharpness_probe
from skdv.estimates import data as D
from skdv.estimates.catalog import sobolev
from skdv.estimates.probe import second_iterate_ratio
from skdv.estimates.resonance import nonresonant_boxes, resonance
from skdv.estimates.sweep import fit_slope
from skdv.grid import SpatialGrid, TimeGrid
from skdv.norms import x_lambda_norm
from skdv.rescaling import S1_CRITICAL, S2_CRITICAL

EXPECTED_IDS = {"LIN-S", "LIN-K", "BIL-S", "TRI-K", "F-NONRES", "F-RES", "F-INT-HI", "F-INT-LO",
                "F-SMOOTH", "F-Z", "KDV-LOW", "KDV-BIL", "KEY-TRI", "UF-W", "FF-V"}


# catalog and data ---------------------------------------------------------------

def test_catalog_has_fifteen_cases():
    assert set(CATALOG) == EXPECTED_IDS
    for case in CATALOG.values():
        assert case.n_axes, case.id
        assert case.lhs and case.rhs and case.bound


def test_unknown_case_raises():
    with pytest.raises(PreconditionError):
        get_case("NOPE")


def test_trial_rng_is_keyed_and_reproducible():
    a = D.trial_rng(3, 1, 2, 5).normal(size=4)
    b = D.trial_rng(3, 1, 2, 5).normal(size=4)
    c = D.trial_rng(3, 1, 2, 6).normal(size=4)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


@pytest.mark.parametrize("N", [1, 4, 64])
def test_shell_modes_stay_in_shell(N):
    P = D.period_for(N)
    k = D.shell_modes(D.trial_rng(0, N), N, P, 16)
    xi = np.abs(k * 2 * np.pi / P)
    if N == 1:
        assert np.all(xi <= 1 + 1e-12)
    else:
        assert np.all((xi >= 0.75 * N - 1e-12) & (xi < 1.5 * N))


def test_real_datum_is_conjugate_symmetric():
    k, c = D.real_datum(D.trial_rng(1), np.array([3, 5, 9]))
    lookup = dict(zip(k.tolist(), c))
    for kk, cc in lookup.items():
        assert lookup[-kk] == pytest.approx(np.conj(cc))


def test_lin_s_matches_grid_engine():
    # the sweep's exact phase-sum evaluation against sampling on a grid
    lam, N = 0.25, 2
    case = get_case("LIN-S")
    lhs, rhs, bound = case.evaluate({"lam": lam, "N": N}, D.trial_rng(9), 6)
    rng = D.trial_rng(9)
    P = D.period_for(N)
    k, c = D.complex_datum(rng, D.shell_modes(rng, N, P, 6))
    field = D.schrodinger_wave(k, c, P, lam).to_field(SpatialGrid(256, P), TimeGrid(-2, 2, 4096))
    assert lhs == pytest.approx(x_lambda_norm(field, lam, "lower").total, rel=1e-5)
    assert rhs == pytest.approx(sobolev(k, c, P, -3 / 16))
    assert bound == 1.0


# sweeps ---------------------------------------------------------------------------

def test_fit_slope_recovers_power_law():
    xs = [2, 4, 8, 16]
    assert fit_slope(xs, [3 * x ** 1.5 for x in xs]) == pytest.approx(1.5)
    assert fit_slope(xs, [1, 0, math.nan, 1]) == pytest.approx(0.0)
    assert fit_slope([2], [1.0]) is None


def test_sweep_is_deterministic_and_doubling_nests():
    kw = dict(lambdas=(0.25,), n_axes={"N": (1, 2, 4)}, trials=2, seed=5)
    a = run_estimate_sweep("LIN-S", **kw)
    b = run_estimate_sweep("LIN-S", **kw)
    assert a.to_json() == b.to_json() and a.to_csv() == b.to_csv()
    single = run_estimate_sweep("LIN-S", check_doubling=False, **kw)
    for p, q in zip(a.points, single.points):
        assert p.ratios[:2] == q.ratios
        assert len(p.ratios) == 4


def test_sweep_report_round_trips():
    rep = run_estimate_sweep("LIN-K", n_axes={"N": (2, 4, 8)}, trials=2, seed=0)
    d = json.loads(rep.to_json())
    assert d["case"] == "LIN-K" and d["passed"] == rep.passed
    rows = rep.to_csv().strip().splitlines()
    assert rows[0].split(",")[:3] == ["case", "lambda", "N"]
    assert len(rows) == 1 + 3 * 4


def test_sweep_rejects_bad_trials():
    with pytest.raises(PreconditionError):
        run_estimate_sweep("LIN-S", trials=0)


def test_parallel_sweep_equals_serial():
    kw = dict(lambdas=(0.25,), n_axes={"N": (2, 4)}, trials=1, seed=2)
    assert (run_estimate_sweep("LIN-S", workers=2, **kw).to_json()
            == run_estimate_sweep("LIN-S", workers=1, **kw).to_json())


# resonance -------------------------------------------------------------------------

def _brute_min(N1, N2, N, lam, B):
    lamq = Fraction(lam)
    best = None
    for i in range(B):
        for sgn1 in (1, -1):
            x1 = sgn1 * (Fraction(N1) + Fraction(i * N1, B))
            for j in range(B):
                for sgn2 in (1, -1):
                    x2 = sgn2 * (Fraction(N2) + Fraction(j * N2, B))
                    if N <= abs(x1 + x2) < 2 * N:
                        r = abs(resonance(x1, x2, lamq)) / (N2 * max(Fraction(N2) ** 2, lamq * N1))
                        best = r if best is None else min(best, r)
    return best


@pytest.mark.parametrize("box", [(1, 4, 4, 0.25), (16, 1, 16, 2.0 ** -8), (4, 16, 16, 2.0 ** -6)])
def test_resonance_minimum_matches_exact_enumeration(box):
    val, wit = resonance_lower_bound_check(*box, exhaustive_bound=16)
    ref = _brute_min(*box, 16)
    assert wit.ratio == ref
    assert val == float(ref)


def test_resonance_witness_is_exact():
    N1, N2, N, lam = 16, 1, 16, 2.0 ** -8
    val, wit = resonance_lower_bound_check(N1, N2, N, lam, exhaustive_bound=32)
    lamq = Fraction(1, 256)
    assert abs(resonance(wit.xi1, wit.xi2, lamq)) / (N2 * max(Fraction(N2) ** 2, lamq * N1)) == wit.ratio
    assert N <= abs(wit.xi1 + wit.xi2) < 2 * N


def test_resonance_precondition():
    # N2^2 = 16 and lam N1 = 4: comparable
    with pytest.raises(PreconditionError, match="precondition"):
        resonance_lower_bound_check(16, 4, 16, 0.25)
    with pytest.raises(PreconditionError):
        resonance_lower_bound_check(3, 4, 4, 0.25)


def test_nonresonant_boxes_bound():
    boxes = nonresonant_boxes()
    assert len(boxes) == 20
    assert min(resonance_lower_bound_check(*b)[0] for b in boxes) >= 1 / 64


# growth probe -----------------------------------------------------------------------

def test_probe_ratio_is_amplitude_invariant():
    a = second_iterate_ratio(8, -0.5, -0.75, amplitude=1.0)
    b = second_iterate_ratio(8, -0.5, -0.75, amplitude=3.0)
    assert a[1] == b[1]
    assert a[0] == pytest.approx(b[0], rel=1e-12)


def test_probe_separates_critical_and_subcritical():
    crit = sharpness_probe(S1_CRITICAL, S2_CRITICAL, (4, 8, 16, 32))
    low = sharpness_probe(-0.5, S2_CRITICAL, (4, 8, 16, 32))
    assert crit.slope <= 0.1
    assert low.slope >= 0.25
    d = json.loads(low.to_json())
    assert d["N"] == [4, 8, 16, 32] and "generic" in d["label"]


@settings(max_examples=10, deadline=None)
@given(s1=st.floats(-0.6, 0.0), seed=st.integers(0, 1000))
def test_probe_growth_is_monotone_in_s1(s1, seed):
    # lowering s1 weakens the data norm of the high u-boxes and raises R
    r_hi = second_iterate_ratio(16, s1, S2_CRITICAL, seed=seed)[0]
    r_lo = second_iterate_ratio(16, s1 - 0.1, S2_CRITICAL, seed=seed)[0]
    assert r_lo >= r_hi


def test_probe_rejects_bad_input():
    with pytest.raises(PreconditionError):
        sharpness_probe(0, 0, (4, 6))
    with pytest.raises(PreconditionError):
        sharpness_probe(0, 0, (4,))
