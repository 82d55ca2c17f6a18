"""Modified Picard iteration, an independent reference integrator and residuals.

The rescaled system is

    i u_t + lam u_xx = lam u v,      v_t + v_xxx = d_x(|u|^2 - v^2),

and the iteration works with w = v - F[u0]:

    u = eta S u0 - eta A(u (w + F)),
    w = eta K v0 - eta B((w + F)^2) + eta B(T(u, w, u0)).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import GridError, NumericalFailure, PreconditionError
from .grid import ETA, SpaceTimeField, TimeGrid, check_same_grids, dealiased_product
from .norms import x_lambda_norm, y_norm
from .propagators import (
    airy_flow,
    compute_F,
    duhamel_airy,
    duhamel_schrodinger,
    schrodinger_flow,
)

log = logging.getLogger(__name__)

BLOWUP = 1e6
DIVERGENCE_STEPS = 3


def _cut(f):
    return f.with_values(f.values * ETA(f.temporal.t)[:, None])


def _real(f):
    return f.with_values(f.values.real, real=True)


def picard_step(u, w, u0, v0, F, lam):
    """One application of the modified Duhamel map to (u, w)."""
    check_same_grids(u, w, F)
    if u0.spatial != u.spatial or v0.spatial != u.spatial:
        raise GridError("data and fields live on different spatial grids")
    times = u.temporal
    S = schrodinger_flow(u0, lam, times)
    K = airy_flow(v0, times)
    v = w + F
    A = duhamel_schrodinger(dealiased_product(u, v), lam)
    u_new = _cut(S - A)
    AA = dealiased_product(A, A.conj()).values.real
    AS = dealiased_product(A, S.conj()).values.real
    T = w.with_values(AA - 2 * AS, real=True)
    vv = dealiased_product(v, v)
    vv = vv.with_values(vv.values.real, real=True)
    w_new = K - duhamel_airy(vv) + duhamel_airy(T)
    w_new = _cut(w_new)
    if v0.is_real():
        w_new = _real(w_new)
    return u_new, w_new


@dataclass
class IterationTrace:
    """Record of a Picard solve."""

    lam: float
    diff_norms: list = field(default_factory=list)
    contraction_ratios: list = field(default_factory=list)
    converged: bool = False
    final_residual: tuple = (np.nan, np.nan)
    iterates: list = field(default_factory=list)
    u: SpaceTimeField | None = None
    w: SpaceTimeField | None = None
    F: SpaceTimeField | None = None
    diagnostic: str = ""

    @property
    def v(self):
        return None if self.w is None else self.w + self.F

    @property
    def num_iterations(self):
        return len(self.diff_norms)

    def to_dict(self):
        return {
            "lambda": self.lam,
            "converged": self.converged,
            "iterations": self.num_iterations,
            "diff_norms": [list(map(float, d)) for d in self.diff_norms],
            "contraction_ratios": [float(r) for r in self.contraction_ratios],
            "final_residual": [float(r) for r in self.final_residual],
            "diagnostic": self.diagnostic,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _relative(diff, ref):
    return diff / ref if ref > 0 else diff


def picard_solve(u0, v0, lam, max_iters=20, tol=1e-8, times=None, keep_iterates=False):
    """Iterate ``picard_step`` from (eta S u0, eta K v0).

    The step size is measured by the lower proxies of X_lam (for u) and Y (for
    w), relative to the new iterate; the larger of the two drives both the
    stopping test and the contraction ratios.
    """
    if max_iters < 1:
        raise PreconditionError("max_iters must be positive")
    times = times or TimeGrid(-2.0, 2.0, 256)
    F = compute_F(u0, lam, times)
    u = _cut(schrodinger_flow(u0, lam, times))
    w = _cut(airy_flow(v0, times))
    trace = IterationTrace(float(lam), F=F)
    growth = 0
    for it in range(max_iters):
        u_new, w_new = picard_step(u, w, u0, v0, F, lam)
        du = _relative(x_lambda_norm(u_new - u, lam).total, x_lambda_norm(u_new, lam).total)
        dw = _relative(y_norm(w_new - w).total, y_norm(w_new).total)
        d = max(du, dw)
        trace.diff_norms.append((du, dw))
        if len(trace.diff_norms) > 1:
            prev = max(trace.diff_norms[-2])
            trace.contraction_ratios.append(d / prev if prev > 0 else 0.0)
            growth = growth + 1 if d > prev else 0
        if keep_iterates:
            trace.iterates.append((u_new, w_new))
        u, w = u_new, w_new
        log.debug("picard iteration %d: du=%.3e dw=%.3e", it + 1, du, dw)
        if not np.isfinite(d) or np.max(np.abs(u.values), initial=0) > BLOWUP:
            trace.diagnostic = f"non-finite or blown-up iterate at step {it + 1}"
            break
        if d < tol:
            trace.converged = True
            break
        if growth >= DIVERGENCE_STEPS:
            trace.diagnostic = f"step size grew {DIVERGENCE_STEPS} times in a row (iteration {it + 1})"
            break
    else:
        trace.diagnostic = f"no convergence within {max_iters} iterations"
    trace.u, trace.w = u, w
    trace.final_residual = residual(u, w + F, lam, edge="interior")
    return trace


# ---------------------------------------------------------------------------
# reference integrator
# ---------------------------------------------------------------------------


def _pad_real(vh, n):
    out = np.zeros(n + 1, dtype=complex)
    out[: n // 2] = vh[: n // 2]
    return out


class _Rhs:
    """Interaction-picture right-hand side on a dealiased padded grid."""

    def __init__(self, spatial, lam):
        self.n = spatial.num_points
        self.xi = spatial.xi
        self.kr = np.fft.rfftfreq(self.n, 1.0 / self.n).astype(int)
        self.xir = self.kr * spatial.freq_spacing
        self.lam = lam
        self.ws = -lam * self.xi ** 2
        self.wa = self.xir ** 3
        self.keep = np.abs(spatial.indices) < self.n // 2

    def physical(self, U, V, t):
        n, m = self.n, 2 * self.n
        uh = U * np.exp(1j * self.ws * t) * self.keep
        vh = V * np.exp(1j * self.wa * t)
        vh[-1] = 0.0
        up = np.zeros(m, dtype=complex)
        up[: n // 2] = uh[: n // 2]
        up[-n // 2:] = uh[-n // 2:]
        u = np.fft.ifft(up) * m
        v = np.fft.irfft(_pad_real(vh, n), m) * m
        return u, v

    def __call__(self, t, U, V):
        n, m = self.n, 2 * self.n
        u, v = self.physical(U, V, t)
        uv = np.fft.fft(u * v) / m
        uvh = np.concatenate([uv[: n // 2], [0.0], uv[-n // 2 + 1:]])
        dens = np.abs(u) ** 2 - v ** 2
        dh = np.fft.rfft(dens)[: n // 2 + 1] / m
        dh[-1] = 0.0
        dU = np.exp(-1j * self.ws * t) * (-1j * self.lam) * uvh
        dV = np.exp(-1j * self.wa * t) * (1j * self.xir) * dh
        return dU, dV


def _stepsize(spatial, lam, umax, vmax, target):
    xmax = spatial.max_abs_xi
    rate = xmax ** 3 + lam * xmax ** 2 + xmax * (vmax + umax) + lam * vmax + 1e-300
    return min(target, 0.25 / rate)


def reference_solve(u0, v0, lam, times, max_step=None):
    """Integrating-factor midpoint integrator; an independent oracle for the Picard solve.

    The free flows are applied exactly; the nonlinearity is advanced with the
    explicit midpoint rule in the interaction picture.  v is carried through
    real transforms so it stays real.  Steps are sub-divided so that
    dt (|xi|^3_max + lam |xi|^2_max + nonlinear rate) <= 1/4.
    """
    if u0.spatial != v0.spatial:
        raise GridError("u0 and v0 must share a grid")
    if not v0.is_real():
        raise PreconditionError("v0 must be real")
    sg = u0.spatial
    n = sg.num_points
    rhs = _Rhs(sg, lam)
    U0 = u0.coefficients.copy()
    U0[n // 2] = 0.0
    V0 = np.fft.rfft(v0.physical().real) / n
    V0[-1] = 0.0
    t = times.t
    j0 = times.zero_index()
    Uout = np.zeros((t.size, n), dtype=complex)
    Vout = np.zeros((t.size, n // 2 + 1), dtype=complex)
    Uout[j0], Vout[j0] = U0, V0
    for direction in (1, -1):
        U, V = U0.copy(), V0.copy()
        tc = 0.0
        idx = range(j0 + 1, t.size) if direction > 0 else range(j0 - 1, -1, -1)
        for j in idx:
            while abs(t[j] - tc) > 1e-14:
                u, v = rhs.physical(U, V, tc)
                umax, vmax = np.max(np.abs(u)), np.max(np.abs(v))
                if not (umax < BLOWUP and vmax < BLOWUP):
                    raise NumericalFailure(f"blow-up guard tripped at t={tc:.6g}")
                h = _stepsize(sg, lam, umax, vmax, max_step or times.dt)
                h = min(h, abs(t[j] - tc))
                nsub = int(np.ceil(abs(t[j] - tc) / h - 1e-9))
                h = (t[j] - tc) / nsub
                for _ in range(nsub):
                    k1u, k1v = rhs(tc, U, V)
                    k2u, k2v = rhs(tc + h / 2, U + h / 2 * k1u, V + h / 2 * k1v)
                    U = U + h * k2u
                    V = V + h * k2v
                    tc += h
                tc = t[j]
            Uout[j], Vout[j] = U, V
    uh = Uout * np.exp(1j * np.outer(t, rhs.ws))
    vh = Vout * np.exp(1j * np.outer(t, rhs.wa))
    u = SpaceTimeField.from_coefficients(sg, times, uh)
    v = SpaceTimeField(sg, times, np.fft.irfft(vh, n, axis=1) * n, True)
    return u, v


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------


def _time_derivative(g, temporal, spectral):
    if spectral:
        n = temporal.num_steps
        body = g[:-1]
        tau = 2 * np.pi * np.fft.fftfreq(n, temporal.dt)
        d = np.fft.ifft(1j * tau[:, None] * np.fft.fft(body, axis=0), axis=0)
        return np.vstack([d, d[:1]])
    dt = temporal.dt
    d = np.gradient(g, dt, axis=0, edge_order=2)
    if g.shape[0] >= 5:
        d[2:-2] = (-g[4:] + 8 * g[3:-1] - 8 * g[1:-3] + g[:-4]) / (12 * dt)
    return d


def residual(u, v, lam, edge="interior"):
    """L^2_{t,x} norms of both equation residuals over the nodes with |t| <= 1.

    Time derivatives are taken in the interaction picture: spectrally when the
    fields decay at the window edges, by fourth-order differences otherwise.
    """
    check_same_grids(u, v)
    sg, tg = u.spatial, u.temporal
    t = tg.t
    ws = -lam * sg.xi ** 2
    wa = sg.xi ** 3
    spectral = u.edge_decayed() and v.edge_decayed()
    uc, vc = u.coefficients(), v.coefficients()
    Ut = _time_derivative(uc * np.exp(-1j * np.outer(t, ws)), tg, spectral)
    Vt = _time_derivative(vc * np.exp(-1j * np.outer(t, wa)), tg, spectral)
    uv = dealiased_product(u, v).coefficients()
    dens = dealiased_product(u, u.conj()).values.real - dealiased_product(v, v).values.real
    dh = np.fft.fft(dens, axis=1) / sg.num_points
    keep = (np.abs(sg.indices) < sg.num_points // 2)[None, :]
    r1 = (1j * np.exp(1j * np.outer(t, ws)) * Ut - lam * uv) * keep
    r2 = (np.exp(1j * np.outer(t, wa)) * Vt - 1j * sg.xi[None, :] * dh) * keep
    inner = np.abs(t) <= 1 + 1e-12 if edge == "interior" else np.ones(t.size, bool)
    w = tg.trapezoid_weights()[inner]
    n1 = np.sqrt(sg.period * np.sum(w[:, None] * np.abs(r1[inner]) ** 2))
    n2 = np.sqrt(sg.period * np.sum(w[:, None] * np.abs(r2[inner]) ** 2))
    return float(n1), float(n2)


def sup_l2_distance(a, b, mask=None):
    """L_t^inf L_x^2 distance over the selected time nodes."""
    check_same_grids(a, b)
    d = a.values - b.values
    if mask is not None:
        d = d[mask]
    return float(np.max(np.sqrt(np.sum(np.abs(d) ** 2, axis=1) * a.spatial.spacing)))
