"""Exhaustive check of the nonresonant lower bound for the u-v -> u interaction.

For xi = xi1 + xi2 the modulation sum |tau1 + lam xi1^2| + |tau2 - xi2^3| +
|tau + lam xi^2| is at least the resonance magnitude

    |R| = |xi2^3 + lam xi2^2 + 2 lam xi1 xi2|,

and the bilinear estimate needs |R| >~ N2 max(N2^2, lam N1) when N2^2 is not
comparable to lam N1.  Boxes are half open: |xi1| in [N1, 2 N1), |xi2| in
[N2, 2 N2), |xi| in [N, 2 N).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..exceptions import PreconditionError
from ..rescaling import dyadic_exponent

SIM_WINDOW = 8.0


def similar(a, b):
    """a ~ b: a / b in [1/8, 8]."""
    return b / SIM_WINDOW <= a <= SIM_WINDOW * b


def much_less(a, b):
    return a < b / SIM_WINDOW


def resonance(xi1, xi2, lam):
    return xi2 ** 3 + lam * xi2 ** 2 + 2 * lam * xi1 * xi2


@dataclass(frozen=True)
class ResonanceWitness:
    xi1: Fraction
    xi2: Fraction
    ratio: Fraction

    def to_dict(self):
        return {"xi1": str(self.xi1), "xi2": str(self.xi2), "ratio": str(self.ratio),
                "ratio_float": float(self.ratio)}


def _axis(N, B):
    """Lattice N + i N / B, i = 0..B-1, both signs, as (float array, numerators)."""
    i = np.arange(B)
    pos = N + i * (N / B)
    return np.r_[pos, -pos], np.r_[B + i, -(B + i)]


def resonance_lower_bound_check(N1, N2, N, lam, exhaustive_bound=256):
    """min over the scanned box of |R| / (N2 max(N2^2, lam N1)), with an exact witness.

    The scan covers ``exhaustive_bound`` points per sign on each of the xi1
    and xi2 axes.  Candidates within a relative 1e-9 of the float minimum are
    re-evaluated in rational arithmetic and the exact minimum is reported.
    """
    for v in (N1, N2, N):
        if int(v) != v or v < 1 or (int(v) & (int(v) - 1)):
            raise PreconditionError("N1, N2, N must be dyadic")
    j = dyadic_exponent(lam)
    if similar(N2 ** 2, lam * N1):
        raise PreconditionError("precondition N₂²≁λN₁ violated")
    B = int(exhaustive_bound)
    x1, n1 = _axis(N1, B)
    x2, n2 = _axis(N2, B)
    X1, X2 = x1[:, None], x2[None, :]
    s = np.abs(X1 + X2)
    inbox = (s >= N) & (s < 2 * N)
    if not np.any(inbox):
        raise PreconditionError("the dyadic boxes admit no xi = xi1 + xi2 in the N shell")
    scale = N2 * max(N2 ** 2, lam * N1)
    r = np.abs(resonance(X1, X2, lam)) / scale
    r = np.where(inbox, r, np.inf)
    fmin = float(np.min(r))
    cand = np.argwhere(r <= fmin * (1 + 1e-9) + 1e-300)
    lamq = Fraction(1, 2 ** j)
    scq = Fraction(N2) * max(Fraction(N2) ** 2, lamq * N1)
    best = None
    for a, b in cand:
        q1 = Fraction(int(n1[a]) * N1, B)
        q2 = Fraction(int(n2[b]) * N2, B)
        sq = abs(q1 + q2)
        if not (N <= sq < 2 * N):
            continue
        ratio = abs(resonance(q1, q2, lamq)) / scq
        if best is None or ratio < best.ratio:
            best = ResonanceWitness(q1, q2, ratio)
    if best is None:
        raise PreconditionError("no exact witness confirmed the float minimum")
    return float(best.ratio), best


def nonresonant_boxes(count=20, lambdas=(2.0 ** -2, 2.0 ** -4, 2.0 ** -6, 2.0 ** -8),
                      shells=(1, 4, 16, 64, 256)):
    """``count`` admissible (N1, N2, N, lam) boxes spread evenly over all admissible ones."""
    out = []
    for lam in lambdas:
        for N1 in shells:
            for N2 in shells:
                if similar(N2 ** 2, lam * N1):
                    continue
                for N in (max(N1, N2), max(N1, N2) * 2):
                    x1, _ = _axis(N1, 8)
                    x2, _ = _axis(N2, 8)
                    s = np.abs(x1[:, None] + x2[None, :])
                    if np.any((s >= N) & (s < 2 * N)):
                        out.append((N1, N2, N, lam))
                        break
    if len(out) <= count:
        return out
    pick = np.unique(np.linspace(0, len(out) - 1, count).round().astype(int))
    return [out[i] for i in pick]
