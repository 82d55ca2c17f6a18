"""Pseudo-spectral laboratory for the Schrodinger-KdV system at low regularity.

The rescaled system

    i u_t + lam u_xx = lam u v,    v_t + v_xxx = d_x(|u|^2 - v^2)

is solved by the modified Picard iteration around the closed-form
correction term F[u0]; norms are computable Besov-type proxies.
"""

from .exceptions import GridError, NotWindowedError, NumericalFailure, PreconditionError, ResolutionWarning
from .grid import (
    CutoffProfile,
    DyadicIndex,
    FrequencyInterval,
    SpaceTimeField,
    SpatialGrid,
    SpectralDatum,
    TimeGrid,
    airy,
    forward_transform,
    inverse_transform,
    mixed_norm,
    project_dyadic,
    project_interval,
    project_modulation,
    schrodinger,
    sobolev_norm,
)
from .norms import NormReport, x_lambda_norm, y_norm, z_norm
from .propagators import (
    ModelParameters,
    airy_flow,
    compute_F,
    duhamel_airy,
    duhamel_schrodinger,
    resonance_denominator,
    schrodinger_flow,
    t_lambda,
)
from .rescaling import choose_lambda, rescale_data, unscale_solution
from .solver import IterationTrace, picard_solve, picard_step, reference_solve, residual

__all__ = [
    "GridError", "NotWindowedError", "NumericalFailure", "PreconditionError", "ResolutionWarning",
    "CutoffProfile", "DyadicIndex", "FrequencyInterval", "SpaceTimeField", "SpatialGrid", "SpectralDatum",
    "TimeGrid", "airy", "forward_transform", "inverse_transform", "mixed_norm", "project_dyadic",
    "project_interval", "project_modulation", "schrodinger", "sobolev_norm",
    "NormReport", "x_lambda_norm", "y_norm", "z_norm",
    "ModelParameters", "airy_flow", "compute_F", "duhamel_airy", "duhamel_schrodinger",
    "resonance_denominator", "schrodinger_flow", "t_lambda",
    "choose_lambda", "rescale_data", "unscale_solution",
    "IterationTrace", "picard_solve", "picard_step", "reference_solve", "residual",
]
