"""Spectral Hopf-bifurcation analysis of symmetric ring networks.

Predict which oscillation pattern a coupled ring bifurcates into from the
coupling coefficients alone, design couplings that realize a prescribed
instability ordering, and verify predictions by direct simulation.
"""

from . import errors
from ._kernels import active_backend
from .analyze import (
    Colouring,
    PhasePattern,
    VerifyReport,
    check_balanced,
    colouring_from_config,
    estimate_period,
    extract_pattern,
    glide_residual,
    verify_prediction,
)
from .hopf_predict import (
    DihedralMode,
    HopfPrediction,
    dihedral_modes,
    predict,
    predict_from_sigma,
    symmetry_pair,
    time_reverse,
)
from .ring_model import (
    RingNetwork,
    Symmetry,
    VectorField,
    build_network,
    cubic_ring,
    cubic_z3,
    cubic_z5,
    evaluate_field,
    expression_field,
    field_from_config,
    linear_coefficients,
    negate_field,
    network_from_config,
)
from .simulate import Trajectory, integrate, settle_and_sample, trajectory_to_csv
from .spectral import (
    BifurcationKind,
    BlockCoefficients,
    CouplingCoefficients,
    Direction,
    FirstBifurcation,
    SpectralMode,
    block_spectrum,
    circulant_spectrum,
    classify_first_bifurcation,
    design_ordering,
    hopf_nondegeneracy,
    rotation_direction,
)

__version__ = "0.1.0"

__all__ = [
    "BifurcationKind", "BlockCoefficients", "Colouring",
    "CouplingCoefficients", "DihedralMode", "Direction", "FirstBifurcation",
    "HopfPrediction", "PhasePattern", "RingNetwork", "SpectralMode",
    "Symmetry", "Trajectory", "VectorField", "VerifyReport",
    "active_backend", "block_spectrum", "build_network", "check_balanced",
    "circulant_spectrum", "classify_first_bifurcation", "colouring_from_config",
    "cubic_ring",
    "cubic_z3", "cubic_z5", "design_ordering", "dihedral_modes", "errors",
    "estimate_period", "evaluate_field", "expression_field",
    "extract_pattern", "field_from_config", "glide_residual",
    "hopf_nondegeneracy", "integrate", "linear_coefficients", "negate_field",
    "network_from_config", "predict", "predict_from_sigma",
    "rotation_direction", "settle_and_sample", "symmetry_pair",
    "time_reverse", "trajectory_to_csv", "verify_prediction",
]
