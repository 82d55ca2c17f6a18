"""Catalog of the multilinear estimates probed by the sweeps.

Each case maps a parameter point and a random generator to a triple
(lhs, rhs, bound): the lower proxy of the left side, the product of upper
proxies (or exact data norms) of the right side, and the explicit factor
in (lam, N, ...).  The measured ratio is lhs / (bound * rhs).

Fields inside Duhamel integrals are the unwindowed free waves; the eta cutoff
is applied when a norm is taken.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..exceptions import PreconditionError
from ..grid import FrequencyInterval, airy, dyadic_range, psi, schrodinger
from ..norms import (
    maximal_low_norm,
    modulation_besov,
    x_lambda_norm,
    y_norm,
    z_norm,
    smoothing_norm,
)
from ..phasesum import PhaseSum
from . import data as D

MAX_TERMS = 120_000
INTERVAL_C_HI = 0.25


class SkipPoint(Exception):
    """The point cannot be evaluated at the configured resolution or term budget."""


@dataclass(frozen=True)
class EstimateCase:
    id: str
    lhs: str
    rhs: str
    bound: str
    axes: tuple
    statement: str
    evaluate: Callable = field(repr=False, compare=False)
    modes: int = 16

    @property
    def n_axes(self):
        return tuple(a for a in self.axes if a.startswith("N"))


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def sobolev(k, c, period, s):
    xi = k * (2 * np.pi / period)
    return float(np.sqrt(period * np.sum((1 + xi ** 2) ** s * np.abs(c) ** 2)))


def l2(k, c, period):
    return sobolev(k, c, period, 0.0)


def _budget(*sizes):
    n = int(np.prod([max(1, s) for s in sizes]))
    if n > MAX_TERMS:
        raise SkipPoint(f"{n} product terms exceed the budget of {MAX_TERMS}")


def _mul(a, b):
    _budget(len(a), len(b))
    return a.multiply(b)


def similar_shells(M):
    """Dyadic M' with M'/M in [1/8, 8] (the window of P_{~M})."""
    return [L for L in dyadic_range(1, 2 ** 40) if M / 8 <= L <= 8 * M]


def p_similar(ps, M):
    shells = similar_shells(M)
    if not shells:
        return ps.weight(np.zeros(len(ps)))
    return ps.weight(sum(psi(ps.xi, L) for L in shells))


def besov_shells(f, symbol, weight, side, shells=None, b=0.5):
    """sqrt(sum_N (N^weight * besov(P_N f))^2) over N >= 2."""
    tot = 0.0
    for N in shells or f.shells():
        if N < 2:
            continue
        g = f.project_dyadic(N)
        if len(g):
            tot += (N ** weight * modulation_besov(g, symbol, b, side)) ** 2
    return float(np.sqrt(tot))


def F_unwindowed(u0wave):
    """B(|S u0|^2) as a phase sum (the cutoff enters at norm evaluation)."""
    return _mul(u0wave, u0wave.conj()).duhamel_airy()


def _resonant_u0(rng, N, lam, m):
    P = D.resonant_period(N, lam)
    k = D.resonant_window_modes(rng, N, lam, P, m)
    k, c = D.complex_datum(rng, k)
    return P, k, c


# ---------------------------------------------------------------------------
# case evaluators: (point dict, rng, modes) -> (lhs, rhs, bound)
# ---------------------------------------------------------------------------


def _lin_s(p, rng, m):
    lam, N = p["lam"], p["N"]
    P = D.period_for(N)
    k, c = D.complex_datum(rng, D.shell_modes(rng, N, P, m))
    u = D.schrodinger_wave(k, c, P, lam)
    return x_lambda_norm(u, lam, "lower").total, sobolev(k, c, P, -3 / 16), 1.0


def _lin_k(p, rng, m):
    N = p["N"]
    P = D.period_for(N)
    k, c = D.real_datum(rng, D.shell_modes(rng, N, P, m))
    v = D.airy_wave(k, c, P)
    return y_norm(v, "lower").total, sobolev(k, c, P, -3 / 4), 1.0


def _bil_s(p, rng, m):
    lam, N1, N2 = p["lam"], p["N1"], p["N2"]
    P = D.period_for(max(N1, N2))
    ku, cu = D.complex_datum(rng, D.shell_modes(rng, N1, P, m))
    kv, cv = D.real_datum(rng, D.shell_modes(rng, N2, P, m))
    u = D.schrodinger_wave(ku, cu, P, lam)
    v = D.airy_wave(kv, cv, P)
    if p.get("zero_v"):
        v = v * 0.0
    out = _mul(u, v).duhamel_schrodinger(lam)
    lhs = x_lambda_norm(out, lam, "lower").total
    rhs = x_lambda_norm(u, lam, "upper").total * z_norm(v, "upper").total
    return lhs, rhs, lam ** 0.5


def _tri_k(p, rng, m):
    lam, N1, N2 = p["lam"], p["N1"], p["N2"]
    P = D.period_for(max(N1, N2))
    ku, cu = D.complex_datum(rng, D.shell_modes(rng, N1, P, m))
    kw, cw = D.complex_datum(rng, D.shell_modes(rng, N1, P, m))
    kv, cv = D.real_datum(rng, D.shell_modes(rng, N2, P, m))
    u = D.schrodinger_wave(ku, cu, P, lam)
    w = D.schrodinger_wave(kw, cw, P, lam)
    v = D.airy_wave(kv, cv, P)
    A = _mul(u, v).duhamel_schrodinger(lam)
    out = _mul(A, w.conj()).duhamel_airy()
    lhs = y_norm(out, "lower").total
    rhs = (x_lambda_norm(u, lam, "upper").total * z_norm(v, "upper").total
           * x_lambda_norm(w, lam, "upper").total)
    return lhs, rhs, lam ** -0.5


def _f_nonres(p, rng, m):
    lam, N1 = p["lam"], p["N1"]
    P = D.period_for(N1)
    k, c = D.complex_datum(rng, D.shell_modes(rng, N1, P, m))
    u = D.schrodinger_wave(k, c, P, lam)
    full = F_unwindowed(u)
    tot = 0.0
    cache = {}
    for N in full.shells():
        if N < 2:
            continue
        key = tuple(similar_shells(N ** 2 / lam))
        if key not in cache:
            ur = p_similar(u, N ** 2 / lam)
            cache[key] = F_unwindowed(ur) if len(ur) else None
        g = full if cache[key] is None else full - cache[key]
        g = g.project_dyadic(N)
        if len(g):
            tot += (N ** -0.75 * modulation_besov(g, airy(), 0.5, "lower")) ** 2
    return float(np.sqrt(tot)), sobolev(k, c, P, -3 / 16) ** 2, 1.0 / lam


def _f_res(p, rng, m):
    lam, N = p["lam"], p["N"]
    P, k, c = _resonant_u0(rng, N, lam, m)
    u = D.schrodinger_wave(k, c, P, lam)
    tot = 0.0
    cache = {}
    for Nout in dyadic_range(2, 4 * N):
        key = tuple(similar_shells(Nout ** 2 / lam))
        if key not in cache:
            ur = p_similar(u, Nout ** 2 / lam)
            cache[key] = F_unwindowed(ur) if len(ur) else None
        if cache[key] is None:
            continue
        g = cache[key].project_dyadic(Nout)
        if len(g):
            tot += (Nout ** -0.75 * modulation_besov(g, airy(), 0.5, "lower")) ** 2
    return float(np.sqrt(tot)), sobolev(k, c, P, -3 / 16) ** 2, lam ** -0.375


def _min_abs_D(a1, xi_star, ell1, ell2, lam, n=33):
    d1 = np.linspace(-ell1 / 2, ell1 / 2, n)
    d2 = np.linspace(-ell2 / 2, ell2 / 2, n)
    x1 = a1 + d1[:, None]
    e2 = a1 - xi_star + d2[None, :]
    xi = x1 - e2
    return float(np.min(np.abs(xi ** 3 + lam * x1 ** 2 - lam * e2 ** 2)))


def interval_box_hi(N, lam, c=INTERVAL_C_HI):
    """Intervals I1, I2 of length c N and J = I1 - I2 on which |D| >= N, as close
    to the resonance as that allows."""
    xi_star = 0.75 * N
    ell = c * N
    a_res = (xi_star - xi_star ** 2 / lam) / 2
    f = lambda o: _min_abs_D(a_res + o, xi_star, ell, ell, lam) - N
    lo, hi = 0.0, 1.0
    while f(hi) < 0:
        lo, hi = hi, 2 * hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if f(mid) < 0 else (lo, mid)
    a1 = a_res + hi
    a2 = a1 - xi_star
    I1 = FrequencyInterval(a1 - ell / 2, a1 + ell / 2)
    I2 = FrequencyInterval(a2 - ell / 2, a2 + ell / 2)
    J = FrequencyInterval(xi_star - ell, xi_star + ell)
    return I1, I2, J


def interval_box_lo(N, lam):
    """Resonant intervals of length 1/N and J of length 1/N^2 around xi = 3N/4."""
    xi_star = 0.75 * N
    s = -(xi_star ** 2) / lam
    a1 = (s + xi_star) / 2
    a2 = (s - xi_star) / 2
    r = 0.5 / N
    I1 = FrequencyInterval(a1 - r, a1 + r)
    I2 = FrequencyInterval(a2 - r, a2 + r)
    J = FrequencyInterval(xi_star - 0.5 / N ** 2, xi_star + 0.5 / N ** 2)
    return I1, I2, J


def _interval_modes(rng, I, h, m):
    return D._sample_indices(rng, I.lower, I.upper, h, m)


def _f_int(p, rng, m, lo):
    lam, N = p["lam"], p["N"]
    P = D.period_for(N)
    h = 2 * np.pi / P
    if lo:
        I1, I2, J = interval_box_lo(N, lam)
        k1 = _interval_modes(rng, I1, h, m)
        k2 = _interval_modes(rng, I2, h, 10 ** 9)
        bound = 1.0
    else:
        I1, I2, J = interval_box_hi(N, lam)
        k1 = _interval_modes(rng, I1, h, m)
        k2 = _interval_modes(rng, I2, h, m)
        bound = lam ** -0.5
    if k1.size == 0 or k2.size == 0:
        raise SkipPoint("interval holds no lattice point")
    k1, c1 = D.complex_datum(rng, k1)
    k2, c2 = D.complex_datum(rng, k2)
    u1 = D.schrodinger_wave(k1, c1, P, lam)
    u2 = D.schrodinger_wave(k2, c2, P, lam)
    out = _mul(u1, u2.conj()).project_interval(J).duhamel_airy()
    lhs = modulation_besov(out, airy(), 0.5, "lower") if len(out) else 0.0
    rhs = l2(k1, c1, P) ** 2 + l2(k2, c2, P) ** 2
    return lhs, rhs, bound


def _f_smooth(p, rng, m):
    lam, N = p["lam"], p["N"]
    P, k, c = _resonant_u0(rng, N, lam, m)
    F = F_unwindowed(D.schrodinger_wave(k, c, P, lam))
    return smoothing_norm(F, "lower").total, sobolev(k, c, P, -3 / 16) ** 2, 1.0 / lam


def _f_z(p, rng, m):
    lam, N = p["lam"], p["N"]
    P, k, c = _resonant_u0(rng, N, lam, m)
    F = F_unwindowed(D.schrodinger_wave(k, c, P, lam))
    return z_norm(F, "lower").total, sobolev(k, c, P, -3 / 16) ** 2, 1.0 / lam


def _paired_waves(rng, N, P, m):
    ku = D.paired_real_modes(rng, N, P, m)
    ku, cu = D.real_datum(rng, ku)
    kv = D.paired_real_modes(rng, N, P, m)
    # pair the second datum against the first so high-high -> low sums occur
    h = 2 * np.pi / P
    dmax = max(1, int(1.0 / h))
    kv = np.unique(np.r_[kv, np.abs(ku[ku > 0] + rng.integers(-dmax, dmax + 1, size=(ku > 0).sum()))])
    kv = kv[(kv * h >= D.SHELL_LO * N) & (kv * h < D.SHELL_HI * N)]
    kv, cv = D.real_datum(rng, kv)
    return D.airy_wave(ku, cu, P), D.airy_wave(kv, cv, P)


def _kdv_low(p, rng, m):
    N1 = p["N1"]
    P = D.period_for(N1)
    u, v = _paired_waves(rng, N1, P, m)
    out = _mul(u, v).project_dyadic(1).duhamel_airy()
    lhs = maximal_low_norm(out, "lower").total
    rhs = (modulation_besov(u.project_dyadic(N1), airy(), 0.5, "upper")
           * modulation_besov(v.project_dyadic(N1), airy(), 0.5, "upper"))
    return lhs, rhs, N1 ** -1.5


def _kdv_bil(p, rng, m):
    N1, N2 = p["N1"], p["N2"]
    P = D.period_for(max(N1, N2))
    if N1 == N2:
        u, v = _paired_waves(rng, N1, P, m)
    else:
        ku, cu = D.real_datum(rng, D.shell_modes(rng, N1, P, m))
        kv, cv = D.real_datum(rng, D.shell_modes(rng, N2, P, m))
        u, v = D.airy_wave(ku, cu, P), D.airy_wave(kv, cv, P)
    out = _mul(u, v).duhamel_airy()
    lhs = y_norm(out, "lower").total
    rhs = y_norm(u, "upper").total * y_norm(v, "upper").total
    return lhs, rhs, 1.0


def _key_tri(p, rng, m):
    lam, N1, N, form = p["lam"], p["N1"], p["N"], p["form"]
    if not (2 <= N and 8 * N <= N1):
        raise SkipPoint("requires 2 <= N << N1")
    P, k, c = _resonant_u0(rng, N1, lam, m)
    u = D.schrodinger_wave(k, c, P, lam)
    F = F_unwindowed(u).project_dyadic(N1)
    u0l2 = l2(k, c, P) ** 2
    if form == 1:
        kv, cv = D.real_datum(rng, D.shell_modes(rng, N1, P, m))
        v = D.airy_wave(kv, cv, P).project_dyadic(N1)
        out = _mul(v, F).project_dyadic(N).duhamel_airy()
        rhs = modulation_besov(v, airy(), 0.5, "upper") * u0l2
        bound = (lam * N1 ** 3 / N) ** -0.5
    else:
        out = _mul(F, F).project_dyadic(N).duhamel_airy()
        rhs = u0l2 ** 2
        bound = (lam ** 2 * N1 ** 3 / N) ** -0.5
    lhs = modulation_besov(out, airy(), 0.5, "lower") if len(out) else 0.0
    return lhs, rhs, bound


def _uf_w(p, rng, m):
    lam, N1, N2 = p["lam"], p["N1"], p["N2"]
    P = max(D.resonant_period(N2, lam), D.period_for(N1))
    k, c = D.complex_datum(rng, D.resonant_window_modes(rng, N2, lam, P, m))
    F = F_unwindowed(D.schrodinger_wave(k, c, P, lam))
    kv, cv = D.real_datum(rng, D.shell_modes(rng, N1, P, m))
    u = D.airy_wave(kv, cv, P)
    out = _mul(u, F).duhamel_airy()
    lhs = y_norm(out, "lower").total
    rhs = y_norm(u, "upper").total * sobolev(k, c, P, -3 / 16) ** 2
    return lhs, rhs, 1.0 / lam


def _ff_v(p, rng, m):
    lam, N = p["lam"], p["N"]
    P, k, c = _resonant_u0(rng, N, lam, m)
    F = F_unwindowed(D.schrodinger_wave(k, c, P, lam))
    out = _mul(F, F).duhamel_airy()
    lhs = y_norm(out, "lower").total
    return lhs, sobolev(k, c, P, -3 / 16) ** 4, lam ** -2


# ---------------------------------------------------------------------------
# the catalog
# ---------------------------------------------------------------------------


def _case(id, lhs, rhs, bound, axes, ref, fn, modes=16):
    return EstimateCase(id, lhs, rhs, bound, tuple(axes), ref, fn, modes)


CATALOG = {
    c.id: c
    for c in [
        _case("LIN-S", "X_lam(eta S u0) lower", "||u0||_{H^-3/16}", "1", ["lam", "N"],
              "linear estimate: ||eta S_lam(t) u0||_{X_lam} <~ ||u0||_{H^{-3/16}}", _lin_s),
        _case("LIN-K", "Y(eta K v0) lower", "||v0||_{H^-3/4}", "1", ["N"],
              "linear estimate: ||eta K(t) v0||_Y <~ ||v0||_{H^{-3/4}}", _lin_k),
        _case("BIL-S", "X_lam(eta A(uv)) lower", "X_lam(u) upper * Z(v) upper", "lam^(1/2)",
              ["lam", "N1", "N2"], "bilinear Schrodinger estimate: <~ lam^{1/2} ||u||_{X_lam} ||v||_Z", _bil_s),
        _case("TRI-K", "Y(eta B(A(uv) conj w)) lower", "X_lam(u) Z(v) X_lam(w) upper", "lam^(-1/2)",
              ["lam", "N1", "N2"], "trilinear KdV estimate: <~ lam^{-1/2} ||u||_{X_lam} ||v||_Z ||w||_{X_lam}",
              _tri_k, modes=10),
        _case("F-NONRES", "l2_N N^-3/4 V2(P_N(F[u0] - F[P_~N^2/lam u0])) lower", "||u0||^2_{H^-3/16}",
              "lam^-1", ["lam", "N1"], "nonresonant part of F[u0] in U^2_K, bound lam^{-1} ||u0||^2", _f_nonres),
        _case("F-RES", "l2_N N^-3/4 V2(P_N F[P_~N^2/lam u0]) lower", "||u0||^2_{H^-3/16}", "lam^(-3/8)",
              ["lam", "N"], "resonant part of F[u0] in V^2_K: <~ lam^{-3/8} ||u0||^2_{H^{-3/16}}", _f_res),
        _case("F-INT-HI", "V2(eta P_J B(S u1 conj S u2)) lower", "||u0||^2_{L^2}", "lam^(-1/2)",
              ["lam", "N"], "interval refinement with |D| >~ N: <~ lam^{-1/2} ||u0||^2_{L^2}",
              lambda p, r, m: _f_int(p, r, m, lo=False)),
        _case("F-INT-LO", "V2(eta P_J B(S u1 conj S u2)) lower", "||u0||^2_{L^2}", "1", ["lam", "N"],
              "interval refinement with intervals of length 1/N^2: <~ ||u0||^2_{L^2}",
              lambda p, r, m: _f_int(p, r, m, lo=True)),
        _case("F-SMOOTH", "l2_N N^1/4 ||P_N F[u0]||_{Lx^inf Lt^2} lower", "||u0||^2_{H^-3/16}", "lam^-1",
              ["lam", "N"], "local smoothing of F: ||N^{1/4} P_N F[u0]|| <~ lam^{-1} ||u0||^2", _f_smooth),
        _case("F-Z", "Z(F[u0]) lower", "||u0||^2_{H^-3/16}", "lam^-1", ["lam", "N"],
              "||F[u0]||_Z <~ lam^{-1} ||u0||^2_{H^{-3/16}}", _f_z),
        _case("KDV-LOW", "||eta P_1 B(P_N1 u P_N2 v)||_{Lx^2 Lt^inf} lower", "U2(u) U2(v) upper",
              "N1^(-3/2)", ["N1"], "low output frequency: <~ N1^{-3/2} ||u||_{V^2_K} ||v||_{V^2_K}", _kdv_low),
        _case("KDV-BIL", "Y(eta B(uv)) lower", "Y(u) Y(v) upper", "1", ["N1", "N2"],
              "KdV bilinear estimate: ||eta B(uv)||_Y <~ ||u||_Y ||v||_Y", _kdv_bil),
        _case("KEY-TRI", "U2(eta P_N B(P_N1 v P_N2 F)) lower", "U2(v) ||u0||^2 (form 1), ||u0||^4 (form 2)",
              "(lam N1^3/N)^(-1/2), (lam^2 N1^3/N)^(-1/2)", ["lam", "N1", "N", "form"],
              "key trilinear lemma with factors (lam N1^3/N)^{-1/2} and (lam^2 N1^3/N)^{-1/2}", _key_tri,
              modes=8),
        _case("UF-W", "Y(eta B(u F[u0])) lower", "Y(u) upper ||u0||^2_{H^-3/16}", "lam^-1",
              ["lam", "N1", "N2"], "||eta B(u F[u0])||_Y <~ lam^{-1} ||u||_Y ||u0||^2_{H^{-3/16}}", _uf_w,
              modes=12),
        _case("FF-V", "Y(eta B(F[u0]^2)) lower", "||u0||^4_{H^-3/16}", "lam^-2", ["lam", "N"],
              "||eta B(F[u0]^2)||_Y <~ lam^{-2} ||u0||^4_{H^{-3/16}}", _ff_v, modes=8),
    ]
}


def get_case(case_id):
    try:
        return CATALOG[case_id]
    except KeyError:
        raise PreconditionError(f"unknown estimate case {case_id!r}") from None
