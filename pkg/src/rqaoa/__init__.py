"""QAOA and recursive QAOA for MAX-CUT on weighted Ising models."""

from .analytic import (
    edge_correlation,
    expected_edge_cost,
    f_reduced,
    g_derivative,
    g_function,
    maximize_f,
    optimal_beta,
    qaoa1_ratio,
    verify_g_positivity,
)
from .ising import (
    ConstraintRecord,
    ConstraintStack,
    IsingModel,
    SpinAssignment,
    brute_force_max,
    complete_model,
    contract,
    energy,
    maxcut_model,
    parse_edge_list,
    reconstruct,
    serialize_model,
)
from .recursive import RqaoaConfig, RqaoaSolution, is_uniform_complete, rqaoa_round, run_rqaoa
from .simulator import (
    OptimizerConfig,
    ParameterSchedule,
    Statevector,
    apply_mixer_layer,
    apply_phase_layer,
    correlation,
    expectation_energy,
    optimize_schedule,
    plus_state,
    qaoa_state,
)

__version__ = "0.1.0"
