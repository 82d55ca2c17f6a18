"""Periodic grids, Fourier transforms and Littlewood-Paley machinery.

The whole line is replaced by a torus of length ``period``.  A datum is stored
through its Fourier-series coefficients ``a_k`` so that

    f(x) = sum_k a_k exp(i xi_k x),   xi_k = 2 pi k / period,

and ``||f||_{L^2}^2 = period * sum_k |a_k|^2``.  Arrays are kept in numpy FFT
order throughout.

Space-time fields live on a uniform time grid inside [-2, 2], the support of
the time cutoff eta.  Modulation projections use the interaction picture:
the free phase of the chosen dispersion relation is divided out per spatial
mode before the time transform, so the modulation variable is sampled
directly instead of through the (unresolvable) absolute time frequency.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np

from .exceptions import GridError, NotWindowedError, PreconditionError, ResolutionWarning

DEFAULT_PERIOD = 64 * 2 * np.pi
EDGE_DECAY_TOL = 1e-8


# ---------------------------------------------------------------------------
# cutoffs
# ---------------------------------------------------------------------------


def _exp_mollifier(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1, monotone in between."""
    a = _exp_mollifier(x)
    b = _exp_mollifier(1.0 - np.asarray(x, dtype=float))
    return a / (a + b)


def bump(r, inner=1.0, outer=2.0):
    """Even bump equal to 1 on [-inner, inner] and 0 outside [-outer, outer]."""
    r = np.abs(np.asarray(r, dtype=float))
    return smooth_step((outer - r) / (outer - inner))


def phi(xi):
    """Low-frequency symbol of the Littlewood-Paley decomposition."""
    return bump(xi, 1.0, 2.0)


def psi(xi, N):
    """Dyadic shell symbol; ``psi(xi, 1)`` is ``phi`` itself."""
    N = int(N)
    if N == 1:
        return phi(xi)
    xi = np.asarray(xi, dtype=float)
    return phi(xi / N) - phi(2.0 * xi / N)


@dataclass(frozen=True)
class CutoffProfile:
    kind: Literal["eta", "eta_tilde", "phi"] = "eta"
    inner: float = 1.0
    outer: float = 2.0

    def __post_init__(self):
        if self.kind not in ("eta", "eta_tilde", "phi"):
            raise PreconditionError(f"unknown cutoff kind {self.kind!r}")
        if not 0 < self.inner < self.outer:
            raise PreconditionError("cutoff needs 0 < inner < outer")

    @classmethod
    def default(cls, kind="eta"):
        if kind == "eta_tilde":
            return cls("eta_tilde", 2.0, 4.0)
        return cls(kind, 1.0, 2.0)

    def __call__(self, t):
        return bump(t, self.inner, self.outer)


ETA = CutoffProfile.default("eta")


def eta(t):
    return ETA(t)


# ---------------------------------------------------------------------------
# indices and intervals
# ---------------------------------------------------------------------------


def is_dyadic(n) -> bool:
    try:
        n = int(n)
    except (TypeError, ValueError):
        return False
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True, order=True)
class DyadicIndex:
    value: int

    def __post_init__(self):
        if not is_dyadic(self.value):
            raise PreconditionError(f"dyadic index must be a power of two >= 1, got {self.value}")

    def __int__(self):
        return self.value


def dyadic_range(lo, hi):
    """Dyadic numbers N with lo <= N <= hi."""
    out, N = [], 1
    while N <= hi:
        if N >= lo:
            out.append(N)
        N *= 2
    return out


def covering_dyadic(x):
    """Smallest dyadic N with N >= x (and N >= 1)."""
    N = 1
    while N < x:
        N *= 2
    return N


@dataclass(frozen=True)
class FrequencyInterval:
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise PreconditionError("interval needs lower < upper")

    @property
    def length(self):
        return self.upper - self.lower

    def contains(self, xi):
        xi = np.asarray(xi)
        return (xi >= self.lower) & (xi < self.upper)


# ---------------------------------------------------------------------------
# grids and fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpatialGrid:
    num_points: int
    period: float = DEFAULT_PERIOD

    def __post_init__(self):
        if not is_dyadic(self.num_points) or self.num_points < 8:
            raise GridError(f"num_points must be a power of two >= 8, got {self.num_points}")
        if not self.period > 0:
            raise GridError("period must be positive")

    @property
    def spacing(self):
        return self.period / self.num_points

    @property
    def freq_spacing(self):
        return 2 * np.pi / self.period

    @cached_property
    def x(self):
        return np.arange(self.num_points) * self.spacing

    @cached_property
    def indices(self):
        """Integer lattice indices k in FFT order."""
        return np.fft.fftfreq(self.num_points, 1.0 / self.num_points).astype(np.int64)

    @cached_property
    def xi(self):
        return self.indices * self.freq_spacing

    @property
    def nyquist(self):
        return np.pi / self.spacing

    @property
    def max_abs_xi(self):
        return self.num_points // 2 * self.freq_spacing

    def index_of(self, xi):
        """Lattice index of a frequency that lies exactly on the lattice."""
        k = np.rint(np.asarray(xi) / self.freq_spacing).astype(np.int64)
        if np.any(np.abs(k * self.freq_spacing - xi) > 1e-9 * max(1.0, np.max(np.abs(xi)))):
            raise GridError("frequency is not on the lattice")
        return k

    def position(self, k):
        """FFT-order array position of lattice index k."""
        return np.mod(k, self.num_points)


@dataclass(frozen=True)
class TimeGrid:
    t_min: float = -2.0
    t_max: float = 2.0
    num_steps: int = 256

    def __post_init__(self):
        if not self.t_min < self.t_max:
            raise GridError("time grid needs t_min < t_max")
        if self.t_max - self.t_min > 4 + 1e-12:
            raise GridError("time window longer than 4 (support of eta)")
        if self.num_steps < 1:
            raise GridError("num_steps must be positive")

    @property
    def dt(self):
        return (self.t_max - self.t_min) / self.num_steps

    @cached_property
    def t(self):
        return np.linspace(self.t_min, self.t_max, self.num_steps + 1)

    @property
    def num_nodes(self):
        return self.num_steps + 1

    def zero_index(self):
        """Index of the node t = 0 (required by the Duhamel integrals)."""
        j = int(round(-self.t_min / self.dt))
        if not (0 <= j <= self.num_steps) or abs(self.t[j]) > 1e-12 * max(1.0, abs(self.t_min)):
            raise GridError("time grid must contain t = 0 as a node")
        return j

    def trapezoid_weights(self):
        w = np.full(self.num_nodes, self.dt)
        w[0] = w[-1] = self.dt / 2
        return w


@dataclass(frozen=True, eq=False)
class SpectralDatum:
    """Fourier-series coefficients of a function of x, FFT order."""

    spatial: SpatialGrid
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        if c.shape != (self.spatial.num_points,):
            raise GridError(f"coefficient shape {c.shape} does not match grid ({self.spatial.num_points},)")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def from_physical(cls, spatial, values):
        values = np.asarray(values)
        if values.shape != (spatial.num_points,):
            raise GridError("physical values do not match the grid")
        return cls(spatial, np.fft.fft(values) / spatial.num_points)

    @classmethod
    def zeros(cls, spatial):
        return cls(spatial, np.zeros(spatial.num_points, dtype=complex))

    @classmethod
    def plane_wave(cls, spatial, k, amplitude=1.0):
        c = np.zeros(spatial.num_points, dtype=complex)
        c[spatial.position(k)] = amplitude
        return cls(spatial, c)

    def physical(self):
        return np.fft.ifft(self.coefficients) * self.spatial.num_points

    def l2_norm(self):
        return float(np.sqrt(self.spatial.period * np.sum(np.abs(self.coefficients) ** 2)))

    def is_real(self, rtol=1e-12):
        v = self.physical()
        return np.max(np.abs(v.imag), initial=0.0) <= rtol * max(np.max(np.abs(v), initial=0.0), 1e-300)

    def __mul__(self, c):
        return SpectralDatum(self.spatial, self.coefficients * c)

    __rmul__ = __mul__

    def __add__(self, other):
        _check_same_spatial(self.spatial, other.spatial)
        return SpectralDatum(self.spatial, self.coefficients + other.coefficients)


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Complex samples indexed (time node, space point)."""

    spatial: SpatialGrid
    temporal: TimeGrid
    values: np.ndarray
    is_real_valued: bool = False
    notes: tuple = ()

    def __post_init__(self):
        v = np.asarray(self.values)
        v = v.astype(float if (self.is_real_valued and not np.iscomplexobj(v)) else complex, copy=False)
        shape = (self.temporal.num_nodes, self.spatial.num_points)
        if v.shape != shape:
            raise GridError(f"field shape {v.shape} does not match grids {shape}")
        if self.is_real_valued and np.iscomplexobj(v):
            scale = max(np.max(np.abs(v), initial=0.0), 1e-300)
            if np.max(np.abs(v.imag), initial=0.0) > 1e-12 * scale:
                raise GridError("field flagged real has a non-negligible imaginary part")
            v = v.real.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, spatial, temporal, real=False):
        return cls(spatial, temporal, np.zeros((temporal.num_nodes, spatial.num_points)), real)

    def with_values(self, values, real=None):
        return SpaceTimeField(self.spatial, self.temporal, values,
                              self.is_real_valued if real is None else real)

    def coefficients(self):
        """Spatial Fourier-series coefficients per time node."""
        return np.fft.fft(self.values, axis=1) / self.spatial.num_points

    @classmethod
    def from_coefficients(cls, spatial, temporal, coefs, real=False):
        v = np.fft.ifft(coefs, axis=1) * spatial.num_points
        if real:
            v = v.real
        return cls(spatial, temporal, v, real)

    def windowed(self, profile=ETA):
        return self.with_values(self.values * profile(self.temporal.t)[:, None])

    def edge_decayed(self, tol=EDGE_DECAY_TOL):
        peak = np.max(np.abs(self.values), initial=0.0)
        if peak == 0:
            return True
        edge = max(np.max(np.abs(self.values[0])), np.max(np.abs(self.values[-1])))
        return edge <= tol * peak

    def at(self, j):
        return SpectralDatum.from_physical(self.spatial, self.values[j])

    def _binary(self, other, op):
        if isinstance(other, SpaceTimeField):
            check_same_grids(self, other)
            return self.with_values(op(self.values, other.values),
                                    real=self.is_real_valued and other.is_real_valued)
        return self.with_values(op(self.values, other),
                                real=self.is_real_valued and np.isrealobj(other))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)

    def conj(self):
        return self.with_values(np.conj(self.values))


def _check_same_spatial(a, b):
    if a != b:
        raise GridError(f"spatial grids differ: {a} vs {b}")


def check_same_grids(*fields):
    first = fields[0]
    for f in fields[1:]:
        _check_same_spatial(first.spatial, f.spatial)
        if first.temporal != f.temporal:
            raise GridError(f"time grids differ: {first.temporal} vs {f.temporal}")


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Transform:
    values: np.ndarray
    edge_warning: bool = False


def forward_transform(f):
    """Unitary DFT of a datum (1-D) or of a space-time field (2-D).

    The space-time transform drops the duplicated end node and treats the
    window as one period, so the field should carry the eta cutoff;
    ``edge_warning`` is set when it does not.
    """
    if isinstance(f, SpectralDatum):
        return Transform(np.fft.fft(f.physical(), norm="ortho"))
    if isinstance(f, SpaceTimeField):
        return Transform(np.fft.fft2(f.values[:-1], norm="ortho"), not f.edge_decayed())
    raise GridError(f"cannot transform {type(f).__name__}")


def inverse_transform(spectrum, like):
    spectrum = np.asarray(spectrum)
    if isinstance(like, SpectralDatum):
        if spectrum.shape != like.coefficients.shape:
            raise GridError("spectrum shape mismatch")
        return SpectralDatum.from_physical(like.spatial, np.fft.ifft(spectrum, norm="ortho"))
    if isinstance(like, SpaceTimeField):
        if spectrum.shape != (like.temporal.num_steps, like.spatial.num_points):
            raise GridError("spectrum shape mismatch")
        v = np.fft.ifft2(spectrum, norm="ortho")
        return like.with_values(np.vstack([v, v[:1]]), real=False)
    raise GridError(f"cannot invert onto {type(like).__name__}")


# ---------------------------------------------------------------------------
# multipliers
# ---------------------------------------------------------------------------


def apply_multiplier(f, symbol_values):
    """Multiply the spatial Fourier coefficients by ``symbol_values`` (FFT order)."""
    if isinstance(f, SpectralDatum):
        return SpectralDatum(f.spatial, f.coefficients * symbol_values)
    if isinstance(f, SpaceTimeField):
        coefs = f.coefficients() * symbol_values[None, :]
        real = f.is_real_valued and _is_even_real_symbol(f.spatial, symbol_values)
        return SpaceTimeField.from_coefficients(f.spatial, f.temporal, coefs, real=real)
    raise GridError(f"cannot project {type(f).__name__}")


def _is_even_real_symbol(spatial, m):
    if np.iscomplexobj(m) and np.any(np.abs(np.imag(m)) > 0):
        return False
    m = np.real(m)
    mirrored = m[np.mod(-spatial.indices, spatial.num_points)]
    return bool(np.allclose(m, mirrored, rtol=0, atol=1e-15))


def _spatial_of(f):
    return f.spatial


def dyadic_symbol(spatial, N):
    return psi(spatial.xi, int(N))


def nyquist_shells(spatial):
    """Dyadic N whose shells meet the lattice, i.e. the shells of a full partition."""
    return dyadic_range(1, covering_dyadic(spatial.max_abs_xi))


def project_dyadic(f, N):
    """Littlewood-Paley piece P_N f (phi-multiplier for N = 1)."""
    N = int(DyadicIndex(int(N)))
    from .phasesum import PhaseSum

    if isinstance(f, PhaseSum):
        return f.project_dyadic(N)
    spatial = _spatial_of(f)
    lo = N / 2 if N > 1 else 0.0
    if lo >= spatial.max_abs_xi:
        warnings.warn(f"shell N={N} lies above the grid's largest frequency", ResolutionWarning, stacklevel=2)
        return apply_multiplier(f, np.zeros(spatial.num_points))
    return apply_multiplier(f, dyadic_symbol(spatial, N))


def interval_symbol(spatial, interval, sharpness="sharp", xi=None):
    xi = spatial.xi if xi is None else xi
    if sharpness == "sharp":
        return interval.contains(xi).astype(float)
    if sharpness == "smooth":
        eps = min(interval.length / 4, spatial.freq_spacing)
        rise = smooth_step((xi - interval.lower) / eps + 0.5)
        fall = smooth_step((interval.upper - xi) / eps + 0.5)
        return rise * fall
    raise PreconditionError(f"unknown sharpness {sharpness!r}")


def project_interval(f, interval, sharpness="sharp"):
    """Fourier restriction to a frequency interval (half-open [lower, upper))."""
    from .phasesum import PhaseSum

    if isinstance(f, PhaseSum):
        return f.project_interval(interval, sharpness)
    spatial = _spatial_of(f)
    lo, hi = -spatial.max_abs_xi, spatial.max_abs_xi
    if interval.lower < lo - 1e-12 or interval.upper > hi + 1e-12:
        raise PreconditionError(f"interval [{interval.lower}, {interval.upper}) leaves the frequency range")
    m = interval_symbol(spatial, interval, sharpness)
    if not np.any(m):
        warnings.warn("interval contains no lattice frequency", ResolutionWarning, stacklevel=2)
    return apply_multiplier(f, m)


# ---------------------------------------------------------------------------
# dispersion relations and modulation projections
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Dispersion:
    """Dispersion relation tau = omega(xi) of a free flow.

    Schrodinger with parameter lam: tau = -lam xi^2.  Airy: tau = xi^3.
    """

    kind: Literal["schrodinger", "airy"]
    lam: float = 1.0

    def __post_init__(self):
        if self.kind not in ("schrodinger", "airy"):
            raise PreconditionError(f"unknown dispersion {self.kind!r}")
        if self.kind == "schrodinger" and not self.lam > 0:
            raise PreconditionError("schrodinger symbol needs lam > 0")

    def omega(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self.kind == "airy":
            return xi ** 3
        return -self.lam * xi ** 2


def schrodinger(lam):
    return Dispersion("schrodinger", float(lam))


def airy():
    return Dispersion("airy")


def _modulation_spectrum(f, symbol, pad):
    """Interaction-picture spectrum over the padded time period.

    Returns (spectrum[sigma, k], sigma lattice, dt); the sampling is one
    period of length pad * (window length).
    """
    if not f.edge_decayed():
        raise NotWindowedError("modulation projection needs a field that decays at the window edges")
    tg, sg = f.temporal, f.spatial
    n = tg.num_steps
    m = pad * n
    coefs = f.coefficients()[:-1]
    t = tg.t[:-1]
    phase = np.exp(-1j * np.outer(t, symbol.omega(sg.xi)))
    g = np.zeros((m, sg.num_points), dtype=complex)
    g[:n] = coefs * phase
    spec = np.fft.fft(g, axis=0)
    sigma = 2 * np.pi * np.fft.fftfreq(m, tg.dt)
    return spec, sigma, t, n


def modulation_shells(sigma_max):
    return dyadic_range(1, covering_dyadic(sigma_max))


def project_modulation(f, L, symbol, pad=4):
    """Space-time Fourier multiplier psi_L(tau - omega(xi)), returned on the original window.

    The shells over all dyadic L sum to the identity exactly.
    """
    L = int(DyadicIndex(int(L)))
    spec, sigma, t, n = _modulation_spectrum(f, symbol, pad)
    g = np.fft.ifft(spec * psi(sigma, L)[:, None], axis=0)[:n]
    sg = f.spatial
    coefs = g * np.exp(1j * np.outer(t, symbol.omega(sg.xi)))
    coefs = np.vstack([coefs, coefs[:1] * 0])
    out = SpaceTimeField.from_coefficients(sg, f.temporal, coefs)
    return out


def modulation_energies(f, symbol, pad=4):
    """{L: ||Q_L f||_{L^2_{t,x}}} for every shell meeting the sampled modulation range.

    Norms are taken over the padded period, so the small tails that a
    modulation projection spreads outside the window are kept.
    """
    from .phasesum import PhaseSum

    if isinstance(f, PhaseSum):
        return f.modulation_energies(symbol)
    spec, sigma, t, n = _modulation_spectrum(f, symbol, pad)
    sg, tg = f.spatial, f.temporal
    m = spec.shape[0]
    # Parseval over the padded period: dt * sum_t |g|^2 = dt/m * sum_sigma |G|^2,
    # and the x-integral is period * sum_k |a_k|^2.
    dens = np.sum(np.abs(spec) ** 2, axis=1) * tg.dt / m * sg.period
    out = {}
    smax = np.max(np.abs(sigma))
    for L in modulation_shells(smax):
        out[L] = float(np.sqrt(np.sum(dens * psi(sigma, L) ** 2)))
    return out


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


def _lp(values, weights, p, axis):
    a = np.abs(values)
    if p == np.inf:
        return np.max(a, axis=axis)
    w = np.expand_dims(weights, tuple(i for i in range(a.ndim) if i != (axis % a.ndim)))
    return np.sum(w * a ** p, axis=axis) ** (1.0 / p)


def _check_exponent(p):
    if not (p == np.inf or 1 <= p < np.inf):
        raise PreconditionError(f"exponent must lie in [1, inf], got {p}")


def mixed_norm(f, outer="space", p=2, q=2):
    """Mixed Lebesgue norm with space exponent p and time exponent q.

    ``outer="space"`` gives L_x^p L_t^q (time integrated first), ``"time"``
    gives L_t^q L_x^p.  Time uses trapezoid weights on the nodes, space the
    periodic rectangle rule; infinite exponents are grid maxima.
    """
    _check_exponent(p)
    _check_exponent(q)
    from .phasesum import PhaseSum

    if isinstance(f, PhaseSum):
        return f.mixed_norm(outer, p, q)
    wt = f.temporal.trapezoid_weights()
    wx = np.full(f.spatial.num_points, f.spatial.spacing)
    v = f.values
    if outer == "space":
        inner = _lp(v, wt, q, axis=0)
        return float(_lp(inner, wx, p, axis=0))
    if outer == "time":
        inner = _lp(v, wx, p, axis=1)
        return float(_lp(inner, wt, q, axis=0))
    raise PreconditionError(f"outer must be 'space' or 'time', got {outer!r}")


def japanese(xi):
    return np.sqrt(1.0 + np.asarray(xi, dtype=float) ** 2)


def sobolev_norm(d, s):
    """Inhomogeneous H^s norm ||<xi>^s f||_{L^2} of a datum."""
    w = japanese(d.spatial.xi) ** (2 * s)
    return float(np.sqrt(d.spatial.period * np.sum(w * np.abs(d.coefficients) ** 2)))


def homogeneous_sobolev_norm(d, s):
    """Homogeneous norm ||xi|^s f||_{L^2}; the zero mode is excluded."""
    xi = d.spatial.xi
    nz = xi != 0
    w = np.abs(xi[nz]) ** (2 * s)
    return float(np.sqrt(d.spatial.period * np.sum(w * np.abs(d.coefficients[nz]) ** 2)))


# ---------------------------------------------------------------------------
# dealiased products
# ---------------------------------------------------------------------------


def dealiased_product(a, b):
    """Pointwise product of two fields with zero-padding by a factor 2.

    The product is exact on every retained lattice mode; the Nyquist mode
    is dropped so that the result is symmetric in k.
    """
    check_same_grids(a, b)
    sg = a.spatial
    n = sg.num_points
    ca, cb = a.coefficients(), b.coefficients()
    pa, pb = _pad(ca, n), _pad(cb, n)
    prod = np.fft.ifft(pa, axis=1) * np.fft.ifft(pb, axis=1) * (2 * n) ** 2
    c = np.fft.fft(prod, axis=1) / (2 * n)
    out = _unpad(c, n)
    out[:, n // 2] = 0
    real = a.is_real_valued and b.is_real_valued
    return SpaceTimeField.from_coefficients(sg, a.temporal, out, real=real)


def _pad(c, n):
    out = np.zeros(c.shape[:-1] + (2 * n,), dtype=complex)
    out[..., : n // 2] = c[..., : n // 2]
    out[..., -n // 2:] = c[..., -n // 2:]
    return out


def _unpad(c, n):
    out = np.empty(c.shape[:-1] + (n,), dtype=complex)
    out[..., : n // 2] = c[..., : n // 2]
    out[..., -n // 2:] = c[..., -n // 2:]
    return out
