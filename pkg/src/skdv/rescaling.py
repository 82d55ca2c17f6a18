"""Scaling map between the original system and its lambda-rescaled form.

With u_lam(t, x) = lam^2 u(lam^3 t, lam x) and the same map for v, a
solution of

    i u_t + u_xx = u v,        v_t + v_xxx = d_x(|u|^2 - v^2)

becomes a solution of

    i u_t + lam u_xx = lam u v,  v_t + v_xxx = d_x(|u|^2 - v^2).

On the torus the map keeps every Fourier index, multiplies the period by
1/lam (so each frequency xi becomes lam xi) and multiplies coefficients by
lam^2.  Homogeneous norms then scale exactly:
||u_{0,lam}||_{H^s dot} = lam^{3/2 + s} ||u_0||_{H^s dot}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import GridError, PreconditionError
from .grid import SpaceTimeField, SpatialGrid, SpectralDatum, TimeGrid, sobolev_norm

S1_CRITICAL = -3.0 / 16.0
S2_CRITICAL = -3.0 / 4.0
MIN_EXPONENT = 30


def dyadic_exponent(lam):
    """j with lam = 2^-j, or a PreconditionError."""
    lam = float(lam)
    if not 0 < lam <= 1:
        raise PreconditionError("lambda must be a dyadic reciprocal 2^-j in (0, 1]")
    m, e = np.frexp(lam)
    if m != 0.5:
        raise PreconditionError(f"lambda must be a dyadic reciprocal, got {lam}")
    return int(1 - e)


def is_dyadic_reciprocal(lam):
    try:
        dyadic_exponent(lam)
    except PreconditionError:
        return False
    return True


@dataclass(frozen=True)
class RegularityPair:
    s1: float
    s2: float

    @property
    def admissible(self):
        lo = max(-0.75, self.s1 - 3)
        hi = min(4 * self.s1, self.s1 + 2)
        return lo <= self.s2 <= hi


@dataclass(frozen=True, eq=False)
class RescaledData:
    u0: SpectralDatum
    v0: SpectralDatum
    lam: float
    original_spatial: SpatialGrid


def _scale_datum(d, lam):
    sg = SpatialGrid(d.spatial.num_points, d.spatial.period / lam)
    return SpectralDatum(sg, d.coefficients * lam ** 2)


def rescale_datum(d, lam):
    dyadic_exponent(lam)
    return _scale_datum(d, lam)


def unscale_datum(d, lam):
    dyadic_exponent(lam)
    sg = SpatialGrid(d.spatial.num_points, d.spatial.period * lam)
    return SpectralDatum(sg, d.coefficients / lam ** 2)


def rescale_data(u0, v0, lam):
    """Data of the rescaled system: lam^2 u0(lam x), lam^2 v0(lam x)."""
    dyadic_exponent(lam)
    if u0.spatial != v0.spatial:
        raise GridError("u0 and v0 must share a grid")
    return RescaledData(_scale_datum(u0, lam), _scale_datum(v0, lam), float(lam), u0.spatial)


@dataclass(frozen=True)
class LambdaChoice:
    lam: float
    u_norm: float
    v_norm: float


def choose_lambda(u0, v0, eps0):
    """Largest lam = 2^-j <= 1/4 with both rescaled data norms at most eps0."""
    if not eps0 > 0:
        raise PreconditionError("eps0 must be positive")
    for j in range(2, MIN_EXPONENT + 1):
        lam = 2.0 ** -j
        r = rescale_data(u0, v0, lam)
        nu = sobolev_norm(r.u0, S1_CRITICAL)
        nv = sobolev_norm(r.v0, S2_CRITICAL)
        if nu <= eps0 and nv <= eps0:
            return LambdaChoice(lam, nu, nv)
    raise PreconditionError("data too large for desk-scale rescaling")


def unscale_solution(u_lam, v_lam, lam):
    """(u, v) of the original system from rescaled fields; time contracts by lam^3."""
    dyadic_exponent(lam)
    if u_lam.spatial != v_lam.spatial or u_lam.temporal != v_lam.temporal:
        raise GridError("u and v must share grids")
    sg = SpatialGrid(u_lam.spatial.num_points, u_lam.spatial.period * lam)
    tg_l = u_lam.temporal
    tg = TimeGrid(tg_l.t_min * lam ** 3, tg_l.t_max * lam ** 3, tg_l.num_steps)
    s = lam ** -2
    u = SpaceTimeField(sg, tg, u_lam.values * s, u_lam.is_real_valued)
    v = SpaceTimeField(sg, tg, v_lam.values * s, v_lam.is_real_valued)
    return u, v


def rescale_solution(u, v, lam):
    """Inverse of ``unscale_solution``; the time window must fit in [-2, 2] afterwards."""
    dyadic_exponent(lam)
    sg = SpatialGrid(u.spatial.num_points, u.spatial.period / lam)
    tg0 = u.temporal
    tg = TimeGrid(tg0.t_min / lam ** 3, tg0.t_max / lam ** 3, tg0.num_steps)
    s = lam ** 2
    return (SpaceTimeField(sg, tg, u.values * s, u.is_real_valued),
            SpaceTimeField(sg, tg, v.values * s, v.is_real_valued))


def shell_datum(rng, spatial, N, real=False):
    """Mean-zero random datum with modes on N <= |xi| < 2N."""
    a = np.abs(spatial.xi)
    keep = (a >= N) & (a < 2 * N) & (spatial.indices != -spatial.num_points // 2)
    c = np.where(keep, rng.normal(size=a.size) + 1j * rng.normal(size=a.size), 0.0)
    if real:
        c = 0.5 * (c + np.conj(c[np.mod(-spatial.indices, spatial.num_points)]))
    return SpectralDatum(spatial, c)


def scaling_slopes(shell=2 ** 14, lambdas=tuple(2.0 ** -j for j in range(2, 9)), seed=0):
    """Fitted exponents of ||u_{0,lam}||_{H^{-3/16}} and ||v_{0,lam}||_{H^{-3/4}} in lam.

    The data live on one dyadic shell with lam * shell >> 1 for every lam, the
    regime where the rescaled norms behave like lam^{3/2 + s}.

    Returns
    -------
    dict
        ``{"u": slope, "v": slope, "lambdas": [...], "u_norms": [...], "v_norms": [...]}``
    """
    for lam in lambdas:
        dyadic_exponent(lam)
    rng = np.random.default_rng(seed)
    sg = SpatialGrid(8 * shell, 2 * np.pi)
    u0 = shell_datum(rng, sg, shell)
    v0 = shell_datum(rng, sg, shell, real=True)
    nu, nv = [], []
    for lam in lambdas:
        r = rescale_data(u0, v0, lam)
        nu.append(sobolev_norm(r.u0, S1_CRITICAL))
        nv.append(sobolev_norm(r.v0, S2_CRITICAL))
    x = np.log2(lambdas)
    return {
        "u": float(np.polyfit(x, np.log2(nu), 1)[0]),
        "v": float(np.polyfit(x, np.log2(nv), 1)[0]),
        "lambdas": [float(v) for v in lambdas],
        "u_norms": nu,
        "v_norms": nv,
    }
