"""Exact exponential-sum representation of space-time fields.

A ``PhaseSum`` stores a finite sum

    f(t, x) = sum_j c_j exp(i (h k_j x + omega_j t)),   h = 2 pi / period,

with integer lattice indices k_j and arbitrary real time frequencies
omega_j.  Free waves, products and Duhamel integrals of such sums are again
such sums, so resonant phases of size N^3 are carried exactly instead of being
sampled on a time grid.

The field itself is unwindowed.  Every norm evaluates the windowed field
eta(t) f(t, x); this matches the grid engine, where fields carry the cutoff
explicitly.  Time integrals against eta are done with tabulated Fourier
transforms of eta, eta^2 and eta'^2.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from .exceptions import GridError, PreconditionError
from .grid import (
    ETA,
    FrequencyInterval,
    SpaceTimeField,
    SpatialGrid,
    TimeGrid,
    covering_dyadic,
    dyadic_range,
    interval_symbol,
    phi,
    psi,
)

SIGMA_WINDOW = 80.0
GRAM_WINDOW = 100.0
PAD_PERIOD = 16.0
DSIGMA = 2 * np.pi / PAD_PERIOD
MERGE_RTOL = 1e-13
MIN_DETUNING = 1e-6
MIN_DETUNING_REL = 1e-10


# ---------------------------------------------------------------------------
# Fourier tables of the cutoff
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _tables():
    # eta' by differences on a fine grid, sums on every 8th node
    n, sub = 2 ** 11, 8
    tf = np.linspace(-2, 2, n * sub, endpoint=False)
    ef = ETA(tf)
    t, e = tf[::sub], ef[::sub]
    de = np.gradient(ef, tf[1] - tf[0])[::sub]
    dt = 4.0 / n
    sig = np.arange(0.0, GRAM_WINDOW * 1.25, 0.02)
    # the functions are even and supported in [-2, 2]; cosine sums are exact
    # up to the sampling of t, which resolves far beyond the tabulated range
    cos = np.cos(np.outer(sig, t))
    out = {}
    for name, g in (("eta", e), ("eta2", e * e), ("deta2", de * de)):
        out[name] = CubicSpline(sig, cos @ g * dt)
    return out


TAYLOR_ORDER = 12


@lru_cache(maxsize=None)
def _taylor_table():
    """eta_hat^(p)(j DSIGMA) / p! for p <= TAYLOR_ORDER and |j| <= half window.

    With mu = m DSIGMA + d, |d| <= DSIGMA / 2, eta_hat(j DSIGMA - d) is the
    sum over p of (-d)^p times row p; the remainder is below 1e-13 eta_hat(0)
    since eta is supported in [-2, 2].
    """
    half = int(np.ceil(SIGMA_WINDOW / DSIGMA))
    n = 2 ** 11
    t = np.linspace(-2, 2, n, endpoint=False)
    e = ETA(t) * (4.0 / n)
    sig = np.arange(-half, half + 1) * DSIGMA
    kern = np.exp(-1j * np.outer(t, sig))
    rows = []
    fact = 1.0
    for p in range(TAYLOR_ORDER + 1):
        if p:
            fact *= p
        rows.append(((e * (-1j * t) ** p) @ kern).real / fact)
    return np.array(rows)


NEAR_LATTICE = 4096


@lru_cache(maxsize=None)
def _near_table():
    """G[m + NEAR_LATTICE, s, l] = sum_j U_s(j) psi_{2^l}((m + j) DSIGMA)^2 for |m| <= NEAR_LATTICE.

    U_s = sum_{p+q=s} (row p)(row q) of the Taylor table, so that for one term
    sum_j eta_hat(j DSIGMA - d)^2 psi_L^2 = sum_s (-d)^s G[m, s, l].
    """
    from scipy.signal import fftconvolve

    T = _taylor_table()
    half = (T.shape[1] - 1) // 2
    U = np.zeros((2 * TAYLOR_ORDER + 1, T.shape[1]))
    for p in range(TAYLOR_ORDER + 1):
        for q in range(TAYLOR_ORDER + 1):
            U[p + q] += T[p] * T[q]
    m = np.arange(-NEAR_LATTICE - half, NEAR_LATTICE + half + 1)
    j, w = _shell_split(m * DSIGMA)
    nL = int(j.max()) + 2
    W = np.zeros((nL, m.size))
    W[j, np.arange(m.size)] = w ** 2
    W[j + 1, np.arange(m.size)] += (1.0 - w) ** 2
    # correlation of W with U_s; the valid part has one entry per centre m
    G = fftconvolve(W[None, :, :], U[:, None, ::-1], mode="valid", axes=2)
    return np.ascontiguousarray(np.transpose(G, (2, 0, 1)))


def _near_energies(mu, mc, weight, kids, E):
    """Add the shell energies of isolated windows centred near sigma = 0."""
    if mu.size == 0:
        return
    G = _near_table()
    nL = min(E.shape[1], G.shape[2])
    d = mu - mc * DSIGMA
    powers = (-d[:, None]) ** np.arange(G.shape[1])[None, :]
    for s in range(0, mu.size, 4096):
        e = min(s + 4096, mu.size)
        rows = np.einsum("ts,tsl->tl", powers[s:e], G[mc[s:e] + NEAR_LATTICE, :, :nL])
        np.add.at(E[:, :nL], kids[s:e], weight[s:e, None] * rows)


# beyond this the sigma lattice index leaves int64 range; a window there sits
# inside one octave and sum_m eta_hat(m DSIGMA - d)^2 does not depend on d
FAR_SIGMA = 2.0 ** 50


def _far_energies(mu, weight, kids, E):
    """Shell energies of windows at |sigma| > FAR_SIGMA, taken incoherently."""
    total = np.sum(_taylor_table()[0] ** 2)
    j, w = _shell_split(mu)
    nL = E.shape[1]
    np.add.at(E, (kids, j), weight * total * w ** 2)
    up = j + 1 < nL
    np.add.at(E, (kids[up], j[up] + 1), (weight * total * (1.0 - w) ** 2)[up])


def _even_table(name, s, cutoff):
    s = np.abs(np.asarray(s, dtype=float))
    out = np.zeros_like(s)
    m = s <= cutoff
    out[m] = _tables()[name](s[m])
    return out


def eta_hat(sigma):
    """int eta(t) exp(-i sigma t) dt (real and even)."""
    return _even_table("eta", sigma, SIGMA_WINDOW * 1.2)


def gram_eta2(delta):
    """int eta(t)^2 exp(i delta t) dt."""
    return _even_table("eta2", delta, GRAM_WINDOW)


def gram_deta2(delta):
    """int eta'(t)^2 exp(i delta t) dt."""
    return _even_table("deta2", delta, GRAM_WINDOW)


# ---------------------------------------------------------------------------
# the sum itself
# ---------------------------------------------------------------------------


class PhaseSum:
    """Finite exponential sum on a torus of length ``period``.

    Parameters
    ----------
    k : array of int
        Lattice indices; the spatial frequency of a term is ``k * h``.
    c : array of complex
        Coefficients.
    omega : array of float
        Time frequencies.
    period : float
        Spatial period.
    """

    def __init__(self, k, c, omega, period, merge=True):
        k = np.asarray(k, dtype=np.int64).ravel()
        c = np.asarray(c, dtype=complex).ravel()
        omega = np.asarray(omega, dtype=float).ravel()
        if not (k.shape == c.shape == omega.shape):
            raise GridError("k, c and omega must have equal length")
        if not period > 0:
            raise GridError("period must be positive")
        self.period = float(period)
        if merge:
            k, c, omega = _merge(k, c, omega)
        self.k, self.c, self.omega = k, c, omega
        for a in (self.k, self.c, self.omega):
            a.setflags(write=False)
        self._cache = {}

    # construction ----------------------------------------------------------

    @classmethod
    def zero(cls, period):
        return cls([], [], [], period, merge=False)

    @classmethod
    def free_wave(cls, k, c, period, symbol):
        k = np.asarray(k, dtype=np.int64)
        h = 2 * np.pi / period
        return cls(k, c, symbol.omega(k * h), period)

    @classmethod
    def from_datum(cls, datum, symbol):
        sg = datum.spatial
        live = np.nonzero(datum.coefficients)[0]
        return cls.free_wave(sg.indices[live], datum.coefficients[live], sg.period, symbol)

    # basic attributes ------------------------------------------------------

    @property
    def h(self):
        return 2 * np.pi / self.period

    @property
    def xi(self):
        return self.k * self.h

    def __len__(self):
        return self.k.size

    @property
    def num_terms(self):
        return self.k.size

    def max_abs_xi(self):
        return float(np.max(np.abs(self.xi), initial=0.0))

    def shells(self):
        """Dyadic N with P_N f possibly nonzero."""
        if len(self) == 0:
            return []
        return dyadic_range(1, covering_dyadic(self.max_abs_xi()))

    def _like(self, k, c, omega, merge=True):
        return PhaseSum(k, c, omega, self.period, merge=merge)

    def _check(self, other):
        if not isinstance(other, PhaseSum):
            raise GridError(f"cannot combine PhaseSum with {type(other).__name__}")
        if abs(other.period - self.period) > 1e-12 * self.period:
            raise GridError("phase sums live on different periods")

    # algebra ----------------------------------------------------------------

    def conj(self):
        return self._like(-self.k, np.conj(self.c), -self.omega, merge=False)

    def real_part(self):
        return (self + self.conj()) * 0.5

    def __neg__(self):
        return self._like(self.k, -self.c, self.omega, merge=False)

    def __add__(self, other):
        if isinstance(other, (int, float)) and other == 0:
            return self
        self._check(other)
        return self._like(np.concatenate([self.k, other.k]), np.concatenate([self.c, other.c]),
                          np.concatenate([self.omega, other.omega]))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PhaseSum):
            return self.multiply(other)
        return self._like(self.k, self.c * other, self.omega, merge=False)

    __rmul__ = __mul__

    def multiply(self, other, max_terms=None):
        """Pointwise product; all pairs of terms, then merged."""
        self._check(other)
        n = len(self) * len(other)
        if max_terms is not None and n > max_terms:
            raise PreconditionError(f"product would have {n} terms (limit {max_terms})")
        k = (self.k[:, None] + other.k[None, :]).ravel()
        c = (self.c[:, None] * other.c[None, :]).ravel()
        w = (self.omega[:, None] + other.omega[None, :]).ravel()
        keep = c != 0
        return self._like(k[keep], c[keep], w[keep])

    def abs2(self):
        return self.multiply(self.conj())

    def weight(self, m):
        """Multiply each term by m(xi_j); zero terms are dropped."""
        c = self.c * m
        keep = c != 0
        return self._like(self.k[keep], c[keep], self.omega[keep], merge=False)

    # projections --------------------------------------------------------------

    def project_dyadic(self, N):
        return self.weight(psi(self.xi, int(N)))

    def project_interval(self, interval, sharpness="sharp"):
        sg = _PseudoGrid(self.period)
        return self.weight(interval_symbol(sg, interval, sharpness, xi=self.xi))

    def restrict_modes(self, mask_fn):
        return self.weight(mask_fn(self.xi).astype(float))

    # Duhamel integrals --------------------------------------------------------

    def _duhamel(self, multiplier, omega0):
        """sum_j c_j e^{i w_j t} -> sum_j m_j c_j (e^{i w_j t} - e^{i w0_j t}) / (i (w_j - w0_j))."""
        d = self.omega - omega0
        # exact resonances are detuned slightly; the linear-in-t growth is then
        # carried by two nearly cancelling terms
        floor = np.maximum(MIN_DETUNING, MIN_DETUNING_REL * np.abs(omega0))
        small = np.abs(d) < floor
        d = np.where(small, np.where(d < 0, -floor, floor), d)
        w = omega0 + d
        amp = multiplier * self.c / (1j * d)
        k = np.concatenate([self.k, self.k])
        c = np.concatenate([amp, -amp])
        om = np.concatenate([w, omega0])
        keep = c != 0
        return self._like(k[keep], c[keep], om[keep])

    def duhamel_schrodinger(self, lam):
        """i lam int_0^t S_lam(t - s) f(s) ds."""
        xi = self.xi
        return self._duhamel(1j * lam * np.ones_like(xi), -lam * xi ** 2)

    def duhamel_airy(self):
        """int_0^t K(t - s) d_x f(s) ds."""
        xi = self.xi
        return self._duhamel(1j * xi, xi ** 3)

    # evaluation ----------------------------------------------------------------

    def evaluate(self, t, x):
        """Unwindowed values on the tensor grid (t, x); direct summation."""
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        out = np.zeros((t.size, x.size), dtype=complex)
        for s in range(0, len(self), 256):
            sl = slice(s, s + 256)
            et = np.exp(1j * np.outer(t, self.omega[sl])) * self.c[sl]
            ex = np.exp(1j * np.outer(self.h * self.k[sl], x))
            out += et @ ex
        return out

    def to_field(self, spatial, temporal, profile=ETA):
        """Windowed samples eta(t) f(t, x) as a grid field (exact per mode)."""
        if abs(spatial.period - self.period) > 1e-12 * self.period:
            raise GridError("grid period differs from the phase sum period")
        n = spatial.num_points
        if len(self) and np.max(np.abs(self.k)) >= n // 2:
            raise GridError("phase sum has modes beyond the grid's Nyquist index")
        t = temporal.t
        coefs = np.zeros((t.size, n), dtype=complex)
        pos = np.mod(self.k, n)
        for s in range(0, len(self), 512):
            sl = slice(s, s + 512)
            vals = np.exp(1j * np.outer(t, self.omega[sl])) * self.c[sl]
            for col, p in enumerate(pos[sl]):
                coefs[:, p] += vals[:, col]
        coefs *= profile(t)[:, None]
        return SpaceTimeField.from_coefficients(spatial, temporal, coefs)

    def slice_l2(self, t):
        """||f(t)||_{L^2_x} at each time in ``t`` (unwindowed)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        _, inv = np.unique(self.k, return_inverse=True)
        nk = inv.max() + 1 if len(self) else 0
        out = np.zeros(t.size)
        for i, tt in enumerate(t):
            a = np.zeros(nk, dtype=complex)
            np.add.at(a, inv, self.c * np.exp(1j * self.omega * tt))
            out[i] = np.sqrt(self.period * np.sum(np.abs(a) ** 2))
        return out

    # norms of eta f ------------------------------------------------------------

    def _by_k(self):
        if "by_k" not in self._cache:
            order = np.lexsort((self.omega, self.k))
            k = self.k[order]
            starts = np.flatnonzero(np.r_[True, k[1:] != k[:-1]]) if k.size else np.array([], int)
            self._cache["by_k"] = (order, starts)
        return self._cache["by_k"]

    def modulation_table(self, symbol):
        """Per-mode modulation energies of eta f.

        Returns ``(kvals, Ls, E)`` with ``E[i, l] = ||Q_L (eta f_k)||^2_{L^2_{t,x}}``
        for the mode k = kvals[i] and L = Ls[l].  Energies are computed over
        the padded time period 16, as in the grid engine.
        """
        key = ("mod", symbol)
        if key in self._cache:
            return self._cache[key]
        if len(self) == 0:
            out = (np.zeros(0, np.int64), [1], np.zeros((0, 1)))
            self._cache[key] = out
            return out
        mu = self.omega - symbol.omega(self.xi)
        order = np.lexsort((mu, self.k))
        k = self.k[order]
        mu = mu[order]
        c = self.c[order]
        newk = np.r_[True, k[1:] != k[:-1]]
        kids = np.cumsum(newk) - 1
        kvals = k[newk]
        smax = np.max(np.abs(mu)) + SIGMA_WINDOW
        Ls = dyadic_range(1, covering_dyadic(max(smax, 2.0)))
        E = np.zeros((kvals.size, len(Ls)))
        scale = self.period / PAD_PERIOD
        far = np.abs(mu) > FAR_SIGMA
        if np.any(far):
            _far_energies(mu[far], np.abs(c[far]) ** 2 * scale, kids[far], E)
            k, mu, c, kids = k[~far], mu[~far], c[~far], kids[~far]
            newk = np.r_[True, k[1:] != k[:-1]]
        if k.size == 0:
            out = (kvals, Ls, E)
            self._cache[key] = out
            return out
        half = int(np.ceil(SIGMA_WINDOW / DSIGMA))
        mc = np.rint(mu / DSIGMA).astype(np.int64)
        lo = mc - half
        hi = mc + half
        # a window that overlaps no other window of its mode and stays inside
        # one octave 2^j <= |sigma| < 2^(j+1) needs no accumulator
        brk = newk | np.r_[True, lo[1:] > hi[:-1]]
        alone = brk & np.r_[brk[1:], True]
        j_lo, _ = _shell_split(lo * DSIGMA)
        j_hi, _ = _shell_split(hi * DSIGMA)
        near = alone & (np.abs(mc) <= NEAR_LATTICE)
        _near_energies(mu[near], mc[near], np.abs(c[near]) ** 2 * scale, kids[near], E)
        fast = alone & ~near & (lo * hi > 0) & (j_lo == j_hi)
        self._isolated_energies(mu[fast], mc[fast], np.abs(c[fast]) ** 2 * scale,
                                kids[fast] * len(Ls) + j_lo[fast], E)
        slow = ~(fast | near)
        if np.any(slow):
            self._clustered_energies(k[slow], mu[slow], c[slow], kids[slow], scale, E)
        out = (kvals, Ls, E)
        self._cache[key] = out
        return out

    @staticmethod
    def _isolated_energies(mu, mc, weight, flat, E):
        """Add |c|^2 sum_sigma eta_hat^2 psi_L^2 for windows inside one octave."""
        half = int(np.ceil(SIGMA_WINDOW / DSIGMA))
        off = np.arange(-half, half + 1)
        taylor = _taylor_table()
        nL = E.shape[1]
        Ef = E.reshape(-1)
        for s in range(0, mu.size, 4096):
            e = min(s + 4096, mu.size)
            d = mu[s:e] - mc[s:e] * DSIGMA
            A = ((-d[:, None]) ** np.arange(TAYLOR_ORDER + 1)[None, :]) @ taylor
            p2 = A * A
            a = np.abs(mc[s:e, None] + off[None, :]) * DSIGMA
            j = flat[s:e] % nL
            w = phi(a / 2.0 ** j[:, None]) ** 2
            low = np.sum(p2 * w, axis=1)
            high = np.sum(p2, axis=1) - 2 * np.sum(p2 * np.sqrt(w), axis=1) + low
            np.add.at(Ef, flat[s:e], weight[s:e] * low)
            up = j + 1 < nL
            np.add.at(Ef, flat[s:e][up] + 1, (weight[s:e] * high)[up])

    @staticmethod
    def _clustered_energies(k, mu, c, kids, scale, E):
        """Accumulate overlapping windows on the sigma lattice, then split into shells."""
        half = int(np.ceil(SIGMA_WINDOW / DSIGMA))
        mc = np.rint(mu / DSIGMA).astype(np.int64)
        lo = mc - half
        hi = mc + half
        newk = np.r_[True, k[1:] != k[:-1]]
        brk = newk | np.r_[True, lo[1:] > hi[:-1]]
        cl = np.cumsum(brk) - 1
        ncl = cl[-1] + 1
        cl_start = np.flatnonzero(brk)
        cl_end = np.r_[cl_start[1:], k.size] - 1
        cl_lo = lo[cl_start]
        cl_hi = hi[cl_end]
        span = cl_hi - cl_lo + 1
        nL = E.shape[1]
        off = np.arange(2 * half + 1)
        taylor = _taylor_table()
        # process clusters in chunks of bounded accumulator size
        budget = 4_000_000
        c0 = 0
        while c0 < ncl:
            tot = np.cumsum(span[c0:])
            c1 = c0 + max(1, int(np.searchsorted(tot, budget, side="right")))
            base = np.r_[0, np.cumsum(span[c0:c1])]
            acc = np.zeros(base[-1], dtype=complex)
            t0, t1 = cl_start[c0], cl_end[c1 - 1] + 1
            for s in range(t0, t1, 2048):
                e = min(s + 2048, t1)
                d = mu[s:e] - mc[s:e] * DSIGMA
                amp = c[s:e, None] * (((-d[:, None]) ** np.arange(TAYLOR_ORDER + 1)[None, :]) @ taylor)
                idx = base[cl[s:e] - c0, None] + (lo[s:e, None] + off[None, :] - cl_lo[cl[s:e], None])
                # terms are sorted, so the chunk touches one contiguous slice
                i0 = idx[0, 0]
                idx = (idx - i0).ravel()
                n = int(idx.max()) + 1
                acc[i0:i0 + n] += np.bincount(idx, weights=amp.real.ravel(), minlength=n) \
                    + 1j * np.bincount(idx, weights=amp.imag.ravel(), minlength=n)
            rel = np.arange(base[-1]) - np.repeat(base[:-1], span[c0:c1])
            sig = (np.repeat(cl_lo[c0:c1], span[c0:c1]) + rel) * DSIGMA
            owner = np.repeat(kids[cl_start[c0:c1]], span[c0:c1])
            p2 = np.abs(acc) ** 2 * scale
            lo_i, w_lo = _shell_split(sig)
            for part, wt in ((lo_i, w_lo), (lo_i + 1, 1.0 - w_lo)):
                wt = wt ** 2 * p2
                nz = (wt > 0) & (part < nL)
                flat = owner[nz] * nL + part[nz]
                E += np.bincount(flat, weights=wt[nz], minlength=E.size).reshape(E.shape)
            c0 = c1

    def modulation_energies(self, symbol, weights=None):
        """{L: ||Q_L(eta f)||} (after an optional per-mode weight, e.g. a shell symbol)."""
        kvals, Ls, E = self.modulation_table(symbol)
        if weights is not None:
            E = E * (weights(kvals * self.h) ** 2)[:, None]
        tot = np.sum(E, axis=0)
        return {L: float(np.sqrt(max(v, 0.0))) for L, v in zip(Ls, tot)}

    def _near_pairs(self, same_k=False):
        key = ("pairs", same_k)
        if key in self._cache:
            return self._cache[key]
        if same_k:
            order, starts = self._by_k()
            ends = np.r_[starts[1:], order.size]
            I, J = [], []
            w = self.omega[order]
            for s, e in zip(starts, ends):
                ww = w[s:e]
                a = np.searchsorted(ww, ww - GRAM_WINDOW, side="left")
                b = np.searchsorted(ww, ww + GRAM_WINDOW, side="right")
                cnt = b - a
                ii = np.repeat(np.arange(e - s), cnt)
                jj = np.concatenate([np.arange(x, y) for x, y in zip(a, b)]) if cnt.sum() else np.zeros(0, int)
                I.append(order[s:e][ii])
                J.append(order[s:e][jj])
            I = np.concatenate(I) if I else np.zeros(0, int)
            J = np.concatenate(J) if J else np.zeros(0, int)
        else:
            order = np.argsort(self.omega, kind="stable")
            w = self.omega[order]
            a = np.searchsorted(w, w - GRAM_WINDOW, side="left")
            b = np.searchsorted(w, w + GRAM_WINDOW, side="right")
            cnt = b - a
            ii = np.repeat(np.arange(w.size), cnt)
            starts = np.repeat(a, cnt)
            jj = starts + (np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt))
            I, J = order[ii], order[jj]
        self._cache[key] = (I, J)
        return I, J

    def l2_norm(self, weights=None):
        """||eta f||_{L^2_{t,x}}."""
        I, J = self._near_pairs(same_k=True)
        c = self.c if weights is None else self.c * weights(self.xi)
        d = self.omega[I] - self.omega[J]
        val = np.sum(c[I] * np.conj(c[J]) * gram_eta2(d)).real * self.period
        return float(np.sqrt(max(val, 0.0)))

    def dt_l2_norm(self, weights=None):
        """||d_t (eta f)||_{L^2_{t,x}}."""
        I, J = self._near_pairs(same_k=True)
        c = self.c if weights is None else self.c * weights(self.xi)
        wi, wj = self.omega[I], self.omega[J]
        d = wi - wj
        kern = gram_deta2(d) + (wi * wj + 0.5 * d * d) * gram_eta2(d)
        val = np.sum(c[I] * np.conj(c[J]) * kern).real * self.period
        return float(np.sqrt(max(val, 0.0)))

    def maximal_norm(self, side, weights=None, num_times=1025):
        """Bounds for ||eta f||_{L_x^2 L_t^inf}.

        lower: the larger of max over sampled t of ||eta f(t)||_{L^2_x} and
        ||eta f||_{L^2_{t,x}} / 2 (Holder over a window of length 4);
        upper: (||eta f|| ||d_t(eta f)||)^{1/2}, from sup|g|^2 <= ||g|| ||g'||
        for g vanishing at both ends of the window.
        """
        if side == "upper":
            return float(np.sqrt(self.l2_norm(weights) * self.dt_l2_norm(weights)))
        f = self if weights is None else self.weight(weights(self.xi))
        t = np.linspace(-2, 2, num_times)
        sl = f.slice_l2(t) * ETA(t) if len(f) else np.zeros(1)
        return float(max(np.max(sl), 0.5 * f.l2_norm()))

    def smoothing_norm(self, side, weights=None, num_points=2048):
        """Bounds for ||eta f||_{L_x^inf L_t^2}.

        H(x) = int |eta f|^2 dt is a trigonometric polynomial in x.  lower:
        max of H over sample points and its mean; upper: sum of the absolute
        values of its coefficients.
        """
        I, J = self._near_pairs(same_k=False)
        c = self.c if weights is None else self.c * weights(self.xi)
        amp = c[I] * np.conj(c[J]) * gram_eta2(self.omega[I] - self.omega[J])
        dk = self.k[I] - self.k[J]
        if dk.size == 0:
            return 0.0
        ud, inv = np.unique(dk, return_inverse=True)
        C = np.zeros(ud.size, dtype=complex)
        np.add.at(C, inv, amp)
        if side == "upper":
            return float(np.sqrt(np.sum(np.abs(C))))
        # at x_j = j P / n the term e^{i h d x_j} only sees d mod n: fold, then one FFT
        folded = np.bincount(np.mod(ud, num_points), weights=C.real, minlength=num_points) \
            + 1j * np.bincount(np.mod(ud, num_points), weights=C.imag, minlength=num_points)
        H = (np.fft.ifft(folded) * num_points).real
        mean = C[ud == 0].real.sum() if np.any(ud == 0) else 0.0
        return float(np.sqrt(max(np.max(H), mean, 0.0)))

    def mixed_norm(self, outer="space", p=2, q=2, side="lower", weights=None):
        if (p, q) == (2, 2):
            return self.l2_norm(weights)
        if outer == "space" and p == 2 and q == np.inf:
            return self.maximal_norm(side, weights)
        if outer == "space" and p == np.inf and q == 2:
            return self.smoothing_norm(side, weights)
        raise PreconditionError(f"mixed norm ({outer}, {p}, {q}) not available for phase sums")


class _PseudoGrid:
    """Just enough of a SpatialGrid for ``interval_symbol``."""

    def __init__(self, period):
        self.freq_spacing = 2 * np.pi / period


def _shell_split(sig):
    """Shell index j (L = 2^j) and weight psi_L(sig), with psi_{2L} = 1 - psi_L there.

    On 2^j <= |sig| <= 2^{j+1} only the shells 2^j and 2^{j+1} are live and
    psi_{2^j} = phi(sig / 2^j); below 1 the whole weight sits on L = 1.
    """
    a = np.abs(sig)
    j = np.zeros(a.shape, dtype=np.int64)
    big = a >= 1.0
    j[big] = np.floor(np.log2(a[big])).astype(np.int64)
    return j, phi(a / 2.0 ** j)


def _merge(k, c, omega):
    if k.size == 0:
        return k, c, omega
    order = np.lexsort((omega, k))
    k, c, omega = k[order], c[order], omega[order]
    tol = MERGE_RTOL * np.maximum(1.0, np.abs(omega))
    same = (k[1:] == k[:-1]) & (np.abs(omega[1:] - omega[:-1]) <= tol[1:])
    grp = np.cumsum(np.r_[True, ~same]) - 1
    ng = grp[-1] + 1
    cc = np.zeros(ng, dtype=complex)
    np.add.at(cc, grp, c)
    first = np.flatnonzero(np.r_[True, ~same])
    kk, ww = k[first], omega[first]
    scale = np.max(np.abs(c), initial=0.0)
    keep = np.abs(cc) > 1e-15 * scale
    return kk[keep], cc[keep], ww[keep]


def spatial_grid_for(ps, num_points):
    return SpatialGrid(num_points, ps.period)


__all__ = ["PhaseSum", "eta_hat", "gram_eta2", "gram_deta2", "FrequencyInterval", "TimeGrid"]
