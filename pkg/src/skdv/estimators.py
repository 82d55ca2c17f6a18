"""scikit-learn style transformers over batches of sampled data.

Each row of ``X`` holds the samples of one function on a uniform grid of a
fixed period.  Only the two stateless-in-spirit maps of the package fit
this shape: dyadic shell energies (a feature map) and the lambda rescaling
(with ``lam`` chosen during ``fit``).  Solvers and sweeps produce
space-time fields and reports rather than feature matrices and keep their
functional interface.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import PreconditionError
from .grid import DEFAULT_PERIOD, SpatialGrid, SpectralDatum, dyadic_symbol, nyquist_shells, sobolev_norm
from .rescaling import S1_CRITICAL, choose_lambda, dyadic_exponent, rescale_datum


def _rows(X):
    X = np.asarray(X)
    if X.ndim != 2:
        raise PreconditionError("X must be a 2-d array (n_samples, num_points)")
    return X


class DyadicShellEnergies(TransformerMixin, BaseEstimator):
    """L^2 norm of every Littlewood-Paley piece P_N f, one column per shell.

    Parameters
    ----------
    period : float
        Spatial period of the sampled functions.
    max_shell : int or None
        Largest dyadic N kept; defaults to the Nyquist shell of the grid.
    """

    def __init__(self, period=DEFAULT_PERIOD, max_shell=None):
        self.period = period
        self.max_shell = max_shell

    def fit(self, X, y=None):
        X = _rows(X)
        self.grid_ = SpatialGrid(X.shape[1], self.period)
        shells = nyquist_shells(self.grid_)
        if self.max_shell is not None:
            shells = [N for N in shells if N <= self.max_shell]
        if not shells:
            raise PreconditionError("no dyadic shell below max_shell")
        self.shells_ = list(shells)
        self.symbols_ = np.array([dyadic_symbol(self.grid_, N) for N in self.shells_])
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "shells_")
        X = _rows(X)
        if X.shape[1] != self.n_features_in_:
            raise PreconditionError(f"expected {self.n_features_in_} samples per row, got {X.shape[1]}")
        a = np.fft.fft(X, axis=1) / X.shape[1]
        e = (np.abs(a) ** 2) @ (self.symbols_.T ** 2)
        return np.sqrt(self.period * e)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "shells_")
        return np.array([f"P{N}" for N in self.shells_], dtype=object)


class LambdaRescaler(TransformerMixin, BaseEstimator):
    """u(x) -> lam^2 u(lam x) on the rescaled period ``period / lam``.

    Parameters
    ----------
    lam : float or None
        Dyadic reciprocal; when None, ``fit`` picks the largest lam with
        every row's rescaled norm at most ``eps0`` (rows are treated as
        u-data, the v-datum set to zero).
    eps0 : float
        Smallness target used when ``lam`` is None.
    period : float
        Period of the input samples.
    """

    def __init__(self, lam=None, eps0=1e-3, period=2 * np.pi):
        self.lam = lam
        self.eps0 = eps0
        self.period = period

    def fit(self, X, y=None):
        X = _rows(X)
        grid = SpatialGrid(X.shape[1], self.period)
        if self.lam is not None:
            dyadic_exponent(self.lam)
            lam = float(self.lam)
        else:
            zero = SpectralDatum.zeros(grid)
            lam = min(choose_lambda(SpectralDatum.from_physical(grid, row.astype(complex)), zero, self.eps0).lam
                      for row in X)
        self.lam_ = lam
        self.period_ = self.period / lam
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "lam_")
        X = _rows(X)
        # the sample values of lam^2 u(lam x) at x_j = j P / (n lam) are lam^2 u(x_j lam)
        return X * self.lam_ ** 2

    def inverse_transform(self, X):
        check_is_fitted(self, "lam_")
        return _rows(X) / self.lam_ ** 2

    def rescaled_norms(self, X, s=S1_CRITICAL):
        """H^s norms of the rescaled rows on the rescaled period."""
        check_is_fitted(self, "lam_")
        grid = SpatialGrid(self.n_features_in_, self.period)
        return np.array([sobolev_norm(rescale_datum(SpectralDatum.from_physical(grid, r.astype(complex)),
                                                    self.lam_), s) for r in _rows(X)])
