"""Second-iterate growth probe for the data-to-solution map.

The second Picard iterate of the system with v-nonlinearity
d_x(|u|^2 - v^2) is the quadratic map

    u2 = -A(S u0 K v0),    v2 = B(|S u0|^2 - (K v0)^2),

and a C^2 flow map would bound ``sup_t ||(u2, v2)(t)||`` by
``||(u0, v0)||^2`` in H^{s1} x H^{s2}.  The probe builds data on small
frequency boxes in resonant configurations and reports

    R(N) = sup_{0 <= t <= 1} ||(u2, v2)(t)||_{H^{s1} x H^{s2}} / ||(u0, v0)||^2

for each output frequency N.  Two configurations are tried per N and the
larger ratio is kept:

``uu->v``
    u0 on two boxes at (+-N - N^2/lam)/2, so that the difference frequency
    of |S u0|^2 is N and the Airy resonance vanishes at the box centers
    (high-high to low).
``uv->u``
    u0 on one box near -(N^2 + lam N)/(2 lam) and v0 on one box at N, the
    N2^2 ~ lam N1 regime of the u-equation.

Boxes have width 1/N^2, over which the resonance function moves by O(1)
on the unit time window.  This is a generic resonant-box construction, not
a reproduction of any specific counterexample.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..exceptions import GridError, PreconditionError
from ..grid import airy, is_dyadic, japanese, schrodinger
from ..phasesum import PhaseSum
from ..propagators import resonance_denominator
from .data import trial_rng
from .sweep import fit_slope

BOX_POINTS = 8
MAX_INDEX = 2 ** 52
NUM_TIMES = 65
LABEL = ("generic resonant-box construction (boxes of width 1/N^2 at zeros of the resonance "
         "function); not a reproduction of a specific published counterexample")


@dataclass
class ProbeReport:
    s1: float
    s2: float
    lam: float
    seed: int
    N_list: list
    R: list
    config: list
    slope: float
    label: str = LABEL
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "s1": self.s1, "s2": self.s2, "lambda": self.lam, "seed": self.seed,
            "N": list(self.N_list), "R": [float(r) for r in self.R], "config": list(self.config),
            "slope": self.slope, "label": self.label, "notes": list(self.notes),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _sobolev_sup(ps, s, times):
    if not len(ps):
        return np.zeros(len(times))
    return ps.weight(japanese(ps.xi) ** s).slice_l2(times)


def _datum_norm(k, c, period, s):
    h = 2 * np.pi / period
    return math.sqrt(period * float(np.sum(japanese(k * h) ** (2 * s) * np.abs(c) ** 2)))


def _coefficients(rng, m, amplitude):
    """Nearly coherent box coefficients; coherence maximizes the interaction."""
    g = (rng.normal(size=m) + 1j * rng.normal(size=m)) / np.sqrt(2)
    return amplitude * (1.0 + 0.125 * g)


def _refine(k1, k2, xi_index_fn, h, lam, span=2):
    """Move (k1, k2) by up to ``span`` lattice steps to minimize |D| exactly."""
    lamq = Fraction(lam).limit_denominator(2 ** 40)
    hq = Fraction(h).limit_denominator(2 ** 60)
    best = None
    for d1 in range(-span, span + 1):
        for d2 in range(-span, span + 1):
            a, b = k1 + d1, k2 + d2
            val = abs(xi_index_fn(a, b, hq, lamq))
            if best is None or val < best[0]:
                best = (val, a, b)
    return best[1], best[2]


def _box(center, m):
    return np.arange(center - m // 2, center - m // 2 + m, dtype=np.int64)


def _uu_to_v(N, lam, rng, amplitude, m):
    P = 2 * np.pi * m * N ** 2
    h = 2 * np.pi / P
    k1 = int(round((N - N ** 2 / lam) / 2 / h))
    k2 = int(round((-N - N ** 2 / lam) / 2 / h))

    # output xi = eta1 - eta2; D of the F kernel with xi2 = -eta2
    def D(a, b, hq, lamq):
        return resonance_denominator(a * hq, -b * hq, lamq)

    k1, k2 = _refine(k1, k2, D, h, lam)
    k = np.r_[_box(k1, m), _box(k2, m)]
    c = _coefficients(rng, k.size, amplitude)
    u = PhaseSum.free_wave(k, c, P, schrodinger(lam))
    v2 = u.abs2().duhamel_airy()
    data = (k, c, None, None, P)
    return data, PhaseSum.zero(P), v2


def _uv_to_u(N, lam, rng, amplitude, m):
    P = 2 * np.pi * m * N ** 2
    h = 2 * np.pi / P
    k1 = int(round(-(N ** 2 + lam * N) / (2 * lam) / h))
    k2 = int(round(N / h))

    def D(a, b, hq, lamq):
        x1, x2 = a * hq, b * hq
        return x2 ** 3 + lamq * x2 ** 2 + 2 * lamq * x1 * x2

    k1, k2 = _refine(k1, k2, D, h, lam)
    ku, kv = _box(k1, m), _box(k2, m)
    cu = _coefficients(rng, m, amplitude)
    cv = _coefficients(rng, m, amplitude)
    # real v0: conjugate-symmetric partner box
    kv_full = np.r_[kv, -kv]
    cv_full = np.r_[cv, np.conj(cv)]
    u = PhaseSum.free_wave(ku, cu, P, schrodinger(lam))
    v = PhaseSum.free_wave(kv_full, cv_full, P, airy())
    u2 = -(u * v).duhamel_schrodinger(lam)
    v2 = (u.abs2() - v * v).duhamel_airy()
    return (ku, cu, kv_full, cv_full, P), u2, v2


_CONFIGS = (("uu->v", _uu_to_v), ("uv->u", _uv_to_u))


def second_iterate_ratio(N, s1, s2, lam=1.0, seed=0, amplitude=1.0, m=BOX_POINTS):
    """(R, config) for one output frequency N; R is the larger of both configurations."""
    times = np.linspace(0.0, 1.0, NUM_TIMES)
    best = (-1.0, "")
    for idx, (name, build) in enumerate(_CONFIGS):
        rng = trial_rng(seed, int(N), idx)
        (ku, cu, kv, cv, P), u2, v2 = build(N, lam, rng, amplitude, m)
        for kk in (ku, kv):
            if kk is not None and np.max(np.abs(kk)) >= MAX_INDEX:
                raise GridError(f"N = {N} exceeds the representable lattice range")
        dn = _datum_norm(ku, cu, P, s1) ** 2
        if kv is not None:
            dn += _datum_norm(kv, cv, P, s2) ** 2
        top = np.sqrt(_sobolev_sup(u2, s1, times) ** 2 + _sobolev_sup(v2, s2, times) ** 2)
        r = float(np.max(top)) / dn
        if r > best[0]:
            best = (r, name)
    return best


def sharpness_probe(s1, s2, N_list=(4, 8, 16, 32, 64, 128), lam=1.0, seed=0, amplitude=1.0):
    """Growth of the second iterate in H^{s1} x H^{s2}; see the module docstring.

    Returns
    -------
    ProbeReport
        ``R`` per N and the least-squares slope of log2 R against log2 N.
    """
    N_list = [int(n) for n in N_list]
    if len(N_list) < 2:
        raise PreconditionError("need at least two values of N")
    for n in N_list:
        if not is_dyadic(n):
            raise PreconditionError(f"N = {n} is not dyadic")
    if not lam > 0:
        raise PreconditionError("lambda must be positive")
    R, cfg = [], []
    for n in N_list:
        r, name = second_iterate_ratio(n, s1, s2, lam, seed, amplitude)
        R.append(r)
        cfg.append(name)
    slope = fit_slope(N_list, R)
    return ProbeReport(float(s1), float(s2), float(lam), int(seed), N_list, R, cfg, slope)
