"""Free flows, Duhamel integrals and the correction term F[u0].

Sign conventions (Fourier multipliers in x):

    S_lam(t) : exp(-i lam t xi^2)
    K(t)     : exp(i t xi^3)
    A_lam(f) = i lam int_0^t S_lam(t - s) f(s) ds
    B(f)     = int_0^t K(t - s) d_x f(s) ds

Duhamel integrals are evaluated per mode in the interaction picture with a
cumulative composite trapezoid rule started at the node t = 0.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import GridError, PreconditionError, ResolutionWarning
from .grid import (
    ETA,
    SpaceTimeField,
    SpectralDatum,
    TimeGrid,
    airy,
    check_same_grids,
    dealiased_product,
    schrodinger,
)

NEAR_RESONANCE = 1e-3


@dataclass(frozen=True)
class ModelParameters:
    """Coupling constants of the system; only lam is free."""

    lam: float = 1.0
    alpha: float = 1.0
    gamma: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        if not 0 < self.lam <= 1:
            raise PreconditionError(f"lambda must lie in (0, 1], got {self.lam}")
        if (self.alpha, self.gamma, self.beta) != (1.0, 1.0, 0.0):
            raise PreconditionError("only alpha = gamma = 1, beta = 0 is supported")


def _check_lam(lam):
    if not lam > 0:
        raise PreconditionError(f"lambda must be positive, got {lam}")


def _nyquist_pos(spatial):
    return spatial.num_points // 2


# ---------------------------------------------------------------------------
# free flows
# ---------------------------------------------------------------------------


def _flow(d, omega, times, real):
    phase = np.exp(1j * np.outer(times.t, omega))
    coefs = d.coefficients[None, :] * phase
    return SpaceTimeField.from_coefficients(d.spatial, times, coefs, real=real)


def schrodinger_flow(u0, lam, times):
    """S_lam(t) u0 sampled at every node of ``times``; exact per mode."""
    _check_lam(lam)
    return _flow(u0, schrodinger(lam).omega(u0.spatial.xi), times, real=False)


def airy_flow(v0, times):
    """K(t) v0 sampled at every node; real data stay real.

    For real data the unpaired Nyquist mode evolves by cos(t xi^3), the
    real part of its multiplier.
    """
    real = v0.is_real()
    return _flow(v0, airy().omega(v0.spatial.xi), times, real=real)


def free_flow(d, symbol, times):
    return _flow(d, symbol.omega(d.spatial.xi), times, real=symbol.kind == "airy" and d.is_real())


# ---------------------------------------------------------------------------
# Duhamel integrals
# ---------------------------------------------------------------------------


def cumulative_from_zero(g, temporal):
    """int_0^{t_j} g(s) ds along axis 0 for every node, composite trapezoid."""
    j0 = temporal.zero_index()
    dt = temporal.dt
    out = np.zeros_like(g)
    if j0 < g.shape[0] - 1:
        seg = 0.5 * dt * (g[j0 + 1:] + g[j0:-1])
        out[j0 + 1:] = np.cumsum(seg, axis=0)
    if j0 > 0:
        seg = 0.5 * dt * (g[1:j0 + 1] + g[:j0])
        out[:j0] = -np.cumsum(seg[::-1], axis=0)[::-1]
    return out


def _under_resolved(g, rel=1e-8, floor=0.1):
    """True when some significant mode turns by more than pi/2 between nodes.

    Only nodes where the mode is at least ``floor`` of its own peak count, so
    a zero crossing of the amplitude is not mistaken for an oscillation.
    """
    a = np.abs(g)
    peak = np.max(a, initial=0.0)
    if peak == 0:
        return False
    mode_peak = np.max(a, axis=0)
    level = np.maximum(floor * mode_peak, rel * peak)[None, :]
    ok = (a[1:] >= level) & (a[:-1] >= level) & (mode_peak > rel * peak)[None, :]
    if not np.any(ok):
        return False
    turn = np.abs(np.angle(g[1:][ok] * np.conj(g[:-1][ok])))
    return bool(np.max(turn) > np.pi / 2)


def _duhamel(f, omega, multiplier, real):
    tg = f.temporal
    t = tg.t
    coefs = f.coefficients()
    g = coefs * np.exp(-1j * np.outer(t, omega))
    notes = ()
    if _under_resolved(g):
        msg = "time grid under-resolves the Duhamel integrand; quadrature error may be large"
        warnings.warn(msg, ResolutionWarning, stacklevel=3)
        notes = (msg,)
    integral = cumulative_from_zero(g, tg)
    out = integral * np.exp(1j * np.outer(t, omega)) * multiplier[None, :]
    field = SpaceTimeField.from_coefficients(f.spatial, tg, out, real=real)
    if notes:
        field = SpaceTimeField(field.spatial, field.temporal, field.values, field.is_real_valued, notes)
    return field


def duhamel_schrodinger(f, lam):
    """A_lam(f)(t) = i lam int_0^t S_lam(t - s) f(s) ds."""
    _check_lam(lam)
    sg = f.spatial
    m = np.full(sg.num_points, 1j * lam)
    return _duhamel(f, schrodinger(lam).omega(sg.xi), m, real=False)


def duhamel_airy(f):
    """B(f)(t) = int_0^t K(t - s) d_x f(s) ds; real input gives real output."""
    sg = f.spatial
    m = 1j * sg.xi
    m[_nyquist_pos(sg)] = 0.0
    return _duhamel(f, airy().omega(sg.xi), m, real=f.is_real_valued)


# ---------------------------------------------------------------------------
# correction term
# ---------------------------------------------------------------------------


def resonance_denominator(xi1, xi2, lam):
    """D = (xi1 + xi2)^3 + lam xi1^2 - lam xi2^2.

    Works elementwise on arrays and exactly on ``fractions.Fraction`` inputs.
    """
    return (xi1 + xi2) ** 3 + lam * xi1 ** 2 - lam * xi2 ** 2


def phase_difference_integral(t, a, b):
    """int_0^t exp(i s a) ... folded form (exp(i t a) - exp(i t b)) / (i (a - b)).

    Uses t exp(i t (a + b)/2) sinc(t (a - b)/2) where |t (a - b)| < 1e-3, the
    removable-singularity branch.
    """
    t, a, b = np.broadcast_arrays(np.asarray(t, float), np.asarray(a, float), np.asarray(b, float))
    d = a - b
    near = np.abs(t * d) < NEAR_RESONANCE
    out = np.empty(t.shape, dtype=complex)
    far = ~near
    out[far] = (np.exp(1j * t[far] * a[far]) - np.exp(1j * t[far] * b[far])) / (1j * d[far])
    h = 0.5 * t[near] * d[near]
    out[near] = t[near] * np.exp(0.5j * t[near] * (a[near] + b[near])) * np.sinc(h / np.pi)
    return out


@dataclass(frozen=True, eq=False)
class CorrectionTerm(SpaceTimeField):
    """F[u0] = eta(t) B(|S_lam(t) u0|^2)(t), tagged with its datum and lambda."""

    u0: SpectralDatum | None = None
    lam: float = 1.0


def compute_F(u0, lam, times, profile=ETA):
    """Closed-form F[u0] on ``times``.

    Every lattice pair (k1, k2) with k1 + k2 on the grid (Nyquist excluded)
    contributes

        i xi u0^(xi1) conj(u0^(-xi2)) (e^{i t xi^3} - e^{i t lam (xi2^2 - xi1^2)}) / (i D),

    D = resonance_denominator(xi1, xi2, lam); the cutoff is applied last.
    """
    _check_lam(lam)
    sg = u0.spatial
    n = sg.num_points
    h = sg.freq_spacing
    t = times.t
    k = sg.indices
    a = u0.coefficients
    # b(k2) = conj(a(-k2)): coefficients of conj(S u0) at t = 0
    b = np.conj(a[np.mod(-k, n)])
    out = np.zeros((times.num_nodes, n), dtype=complex)
    live = np.nonzero(a)[0]
    for p1 in live:
        k1 = k[p1]
        k2 = k
        ksum = k1 + k2
        keep = (np.abs(ksum) < n // 2) & (b != 0)
        if not np.any(keep):
            continue
        xi1 = k1 * h
        xi2 = k2[keep] * h
        xi = ksum[keep] * h
        amp = 1j * xi * a[p1] * b[keep]
        fast = xi ** 3
        slow = lam * (xi2 ** 2 - xi1 ** 2)
        kern = phase_difference_integral(t[:, None], fast[None, :], slow[None, :])
        np.add.at(out, (slice(None), np.mod(ksum[keep], n)), kern * amp[None, :])
    out *= profile(t)[:, None]
    field = SpaceTimeField.from_coefficients(sg, times, out, real=True)
    return CorrectionTerm(sg, times, field.values, True, (), u0, float(lam))


def compute_F_quadrature(u0, lam, times, profile=ETA):
    """F[u0] by brute-force Duhamel quadrature; the oracle for ``compute_F``."""
    s = schrodinger_flow(u0, lam, times)
    dens = dealiased_product(s, s.conj())
    dens = dens.with_values(dens.values.real, real=True)
    out = duhamel_airy(dens)
    return out.with_values(out.values * profile(times.t)[:, None])


def t_lambda(u, w, F, u0, lam):
    """Quadratic correction T_lam(u, w, u0) = |A|^2 - 2 Re(A conj(S_lam u0)), A = A_lam(u (w + F)).

    This is the combination for which v = w + F satisfies
    v = eta K v0 + eta B(|S_lam u0 - A|^2 - v^2).
    """
    check_same_grids(u, w, F)
    if u0.spatial != u.spatial:
        raise GridError("u0 lives on a different spatial grid")
    A = duhamel_schrodinger(dealiased_product(u, w + F), lam)
    S = schrodinger_flow(u0, lam, u.temporal)
    AA = dealiased_product(A, A.conj())
    AS = dealiased_product(A, S.conj())
    vals = AA.values.real - 2 * AS.values.real
    return SpaceTimeField.from_coefficients(
        u.spatial, u.temporal, np.fft.fft(vals, axis=1) / u.spatial.num_points, real=True
    )


def windowed(f, profile=ETA):
    return f.with_values(f.values * profile(f.temporal.t)[:, None])


def default_times(num_steps=256):
    return TimeGrid(-2.0, 2.0, num_steps)
