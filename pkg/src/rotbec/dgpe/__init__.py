"""Three-dimensional rotating-frame dipolar Gross-Pitaevskii simulator."""

from .grid import FieldState, SimGrid, gaussian_field, tf_field
from .kernel import DipolarKernel, cutoff_bracket, ddi_kernel_cutoff, interaction_potential
from .observables import (AlphaEstimate, Energy, Moments, alpha_estimate, energy, moments,
                          paraboloid_residual, phase_fit, z0_slices)
from .propagate import GroundState, Propagator, ground_state, step_real
from .ramp import (TIMESERIES_COLUMNS, RampProtocol, RampResult, branch_comparison, run_ramp,
                   seed_perturbation)
from .snapshot import load_snapshot, save_snapshot

__all__ = [
    "SimGrid", "FieldState", "gaussian_field", "tf_field", "DipolarKernel", "cutoff_bracket",
    "ddi_kernel_cutoff", "interaction_potential", "Energy", "Moments", "AlphaEstimate", "energy",
    "moments", "alpha_estimate", "phase_fit", "paraboloid_residual", "z0_slices", "Propagator",
    "step_real", "ground_state", "GroundState", "TIMESERIES_COLUMNS", "RampProtocol", "RampResult",
    "run_ramp", "seed_perturbation", "branch_comparison", "save_snapshot", "load_snapshot",
]
