"""Numerical verification of the multilinear estimates, the resonance oracle and the sharpness probe."""

from .catalog import CATALOG, EstimateCase, get_case
from .probe import ProbeReport, sharpness_probe
from .resonance import resonance_lower_bound_check
from .sweep import SweepReport, run_estimate_sweep

__all__ = ["CATALOG", "EstimateCase", "get_case", "ProbeReport", "sharpness_probe",
           "resonance_lower_bound_check", "SweepReport", "run_estimate_sweep"]
