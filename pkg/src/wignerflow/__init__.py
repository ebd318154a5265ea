"""Wigner flow and phase-space velocity analysis for 1D quantum oscillators."""

__version__ = "0.1.0"

from ._kernel import backend_name
from .flow import (
    PotentialModel,
    TruncationPolicy,
    flow_divergence,
    harmonic_flow,
    kerr_flow,
    mechanical_flow,
    potential_derivative,
)
from .grids import PhaseGrid, ScalarField, VectorField
from .states import (
    PhysicalParams,
    StateSpec,
    bound_state_count,
    eigenenergy,
    evaluate_state,
    harmonic_eigenfunction,
    morse_eigenfunction,
)
from .topology import (
    LoopPath,
    circle_loop,
    pinch_point_report,
    poincare_index,
    stagnation_points,
    streamline,
    zero_contours,
)
from .velocity import compress_divergence, phase_velocity, velocity_divergence
from .wigner import (
    QuadratureSpec,
    WignerCalculator,
    harmonic_wigner_oracle,
    wigner_field,
    wigner_time_derivative,
)

__all__ = [
    "PhaseGrid", "ScalarField", "VectorField", "PhysicalParams", "StateSpec",
    "QuadratureSpec", "WignerCalculator", "PotentialModel", "TruncationPolicy",
    "LoopPath", "backend_name", "bound_state_count", "circle_loop",
    "compress_divergence", "eigenenergy", "evaluate_state", "flow_divergence",
    "harmonic_eigenfunction", "harmonic_flow", "harmonic_wigner_oracle",
    "kerr_flow", "mechanical_flow", "morse_eigenfunction", "phase_velocity",
    "pinch_point_report", "poincare_index", "potential_derivative",
    "stagnation_points", "streamline", "velocity_divergence", "wigner_field",
    "wigner_time_derivative", "zero_contours",
]
