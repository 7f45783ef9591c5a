"""Numerical toolkit for the Margolus-Levitin quantum speed limit of pure and
mixed finite-dimensional states."""

from .errors import ToolkitError
from .matcore import hermitian_eig, psd_sqrt, trace_norm, unimodular_proportionality_check
from .mlbound import (
    BoundReport,
    ObjectiveMinimum,
    alpha,
    dual_ml_bound,
    minimal_time_to_fidelity,
    minimize_objective,
    ml_bound,
    objective,
    objective_derivative,
)
from .qubit import (
    BlochVector,
    bloch_from_state,
    construct_saturating_qubit,
    hubner_fidelity,
    qubit_alpha,
    qubit_ml_bound,
    state_from_bloch,
)
from .saturation import (
    SaturatingSpec,
    SaturationReport,
    check_saturation,
    construct_dual_saturating_state,
    construct_saturating_state,
    z_for_delta,
)
from .states import (
    DensityMatrix,
    Hamiltonian,
    Purification,
    evolve,
    expected_energy,
    fidelity,
    populated_levels,
    purified_overlap,
    purify,
)

__version__ = "0.1.0"
