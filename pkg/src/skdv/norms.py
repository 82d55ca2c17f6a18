"""Computable proxies for the solution-space norms X_lam, Y and Z.

The U^2 / V^2 pieces are replaced by modulation-Besov sums over the
dyadic modulation shells L of the propagator's dispersion relation:

    upper: sum_L L^b ||Q_L f||,     lower: sup_L L^b ||Q_L f||.

For time-localized f one has lower <= ||f||_{V^2} <= ||f||_{U^2} <= upper, so
an inequality is probed as "lower proxy of the left side against upper proxy
of the right side".

Every function accepts either a windowed ``SpaceTimeField`` or a
``PhaseSum`` (for which the eta window is implicit).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .exceptions import PreconditionError
from .grid import (
    SpaceTimeField,
    airy,
    mixed_norm,
    modulation_energies,
    nyquist_shells,
    project_dyadic,
    psi,
    schrodinger,
)
from .phasesum import PhaseSum

ProxySide = Literal["upper", "lower"]
X_WEIGHT = -3.0 / 16.0
Y_WEIGHT = -3.0 / 4.0
Z_SMOOTHING_WEIGHT = 1.0 / 4.0


def _check_side(side):
    if side not in ("upper", "lower"):
        raise PreconditionError(f"side must be 'upper' or 'lower', got {side!r}")


@dataclass(frozen=True)
class NormReport:
    """A norm value with its decomposition by dyadic shell and by component."""

    name: str
    side: str
    total: float
    per_shell: dict = field(default_factory=dict)
    components: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "name": self.name,
            "side": self.side,
            "total": self.total,
            "per_shell": {str(k): v for k, v in sorted(self.per_shell.items())},
            "components": dict(sorted(self.components.items())),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# shell primitives shared by both field types
# ---------------------------------------------------------------------------


def field_shells(f):
    if isinstance(f, PhaseSum):
        return f.shells()
    return [N for N in nyquist_shells(f.spatial) if (N / 2 if N > 1 else 0) < f.spatial.max_abs_xi]


def shell_modulation_energies(f, symbol, N):
    """{L: ||Q_L P_N f||}."""
    if isinstance(f, PhaseSum):
        return f.modulation_energies(symbol, weights=lambda xi: psi(xi, N))
    return modulation_energies(project_dyadic(f, N), symbol)


def shell_mixed_norm(f, N, outer, p, q, side="lower"):
    if isinstance(f, PhaseSum):
        return f.mixed_norm(outer, p, q, side, weights=lambda xi: psi(xi, N))
    return mixed_norm(project_dyadic(f, N), outer, p, q)


def _besov(energies, b, side):
    vals = [L ** b * e for L, e in energies.items()]
    if not vals:
        return 0.0
    return float(np.sum(vals) if side == "upper" else np.max(vals))


def modulation_besov(f, symbol, b=0.5, side="lower"):
    """Modulation-Besov surrogate of the U^2 (upper) or V^2 (lower) norm."""
    _check_side(side)
    e = f.modulation_energies(symbol) if isinstance(f, PhaseSum) else modulation_energies(f, symbol)
    return _besov(e, b, side)


def _shell_besov(f, symbol, N, b, side):
    return _besov(shell_modulation_energies(f, symbol, N), b, side)


# ---------------------------------------------------------------------------
# the three solution norms
# ---------------------------------------------------------------------------


def x_lambda_norm(u, lam, side="lower", b=0.5):
    """||N^{-3/16} P_N u||_{l^2_N U^2_{S_lam}} proxy."""
    _check_side(side)
    sym = schrodinger(lam)
    per = {}
    for N in field_shells(u):
        per[N] = N ** X_WEIGHT * _shell_besov(u, sym, N, b, side)
    total = float(np.sqrt(sum(v * v for v in per.values())))
    return NormReport("X_lambda", side, total, per, {"shell-sum": total})


def y_norm(v, side="lower", b=0.5):
    """||P_1 v||_{L_x^2 L_t^inf} + ||N^{-3/4} P_N v||_{l^2_{N>=2} U^2_K} proxy."""
    _check_side(side)
    sym = airy()
    shells = field_shells(v)
    per = {}
    low = shell_mixed_norm(v, 1, "space", 2, np.inf, side) if 1 in shells else 0.0
    for N in shells:
        if N >= 2:
            per[N] = N ** Y_WEIGHT * _shell_besov(v, sym, N, b, side)
    high = float(np.sqrt(sum(x * x for x in per.values())))
    per[1] = low
    return NormReport("Y", side, low + high, per, {"P1-maximal": low, "U2-part": high})


def z_norm(v, side="lower", b=0.5):
    """Z = ||P_1 v||_{L_x^2 L_t^inf} + ||N^{-3/4} P_N v||_{l^2_{N>=2} V^2_K} + ||N^{1/4} P_N v||_{l^2_N L_x^inf L_t^2}.

    The V^2 part uses the lower modulation proxy on the lower side and the
    upper one when Z appears on the right of an inequality.
    """
    _check_side(side)
    sym = airy()
    shells = field_shells(v)
    low = shell_mixed_norm(v, 1, "space", 2, np.inf, side) if 1 in shells else 0.0
    v2 = {}
    sm = {}
    for N in shells:
        if N >= 2:
            v2[N] = N ** Y_WEIGHT * _shell_besov(v, sym, N, b, side)
        sm[N] = N ** Z_SMOOTHING_WEIGHT * shell_mixed_norm(v, N, "space", np.inf, 2, side)
    v2_total = float(np.sqrt(sum(x * x for x in v2.values())))
    sm_total = float(np.sqrt(sum(x * x for x in sm.values())))
    per = {N: float(np.sqrt(v2.get(N, 0.0) ** 2 + sm.get(N, 0.0) ** 2)) for N in shells}
    comps = {"P1-maximal": low, "V2-part": v2_total, "smoothing-part": sm_total}
    return NormReport("Z", side, low + v2_total + sm_total, per, comps)


def smoothing_norm(v, side="lower", weight=Z_SMOOTHING_WEIGHT):
    """||N^{weight} P_N v||_{l^2_N L_x^inf L_t^2}."""
    per = {N: N ** weight * shell_mixed_norm(v, N, "space", np.inf, 2, side) for N in field_shells(v)}
    total = float(np.sqrt(sum(x * x for x in per.values())))
    return NormReport("smoothing", side, total, per, {"smoothing-part": total})


def maximal_low_norm(v, side="lower"):
    """||P_1 v||_{L_x^2 L_t^inf}."""
    val = shell_mixed_norm(v, 1, "space", 2, np.inf, side) if 1 in field_shells(v) else 0.0
    return NormReport("P1-maximal", side, val, {1: val}, {"P1-maximal": val})


def l2_norm(f):
    if isinstance(f, PhaseSum):
        return f.l2_norm()
    return mixed_norm(f, "space", 2, 2)


def is_field(f):
    return isinstance(f, (SpaceTimeField, PhaseSum))
