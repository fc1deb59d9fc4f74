"""Quantized Rock-Scissors-Paper: payoff evaluation, mixed Nash equilibria and evolutionary stability."""

from .dynamics import InvasionTrace, PopulationState, invasion_step, simulate_invasion
from .equilibrium import (
    Classification,
    DeltaSet,
    EquilibriumReport,
    Gradient,
    QuadraticForm,
    classify,
    compute_deltas,
    ess_payoff_difference,
    extract_quadratic_form,
    payoff_gradient_general,
    payoff_gradient_rsp,
    solve_interior_ne,
)
from .errors import (
    InternalConsistencyError,
    InvalidInputError,
    InvalidParameterError,
    InvalidStrategyError,
    NormalizationError,
    NotAnEquilibriumError,
    QuantumRspError,
    SymmetryRequiredError,
)
from .game_model import (
    MixedQuantumStrategy,
    PayoffBimatrix,
    is_symmetric,
    make_rsp_matrix,
    validate_strategy,
)
from .quantum_engine import (
    InitialState,
    OperatorLabel,
    apply_operator,
    basis_state,
    build_omega,
    classical_state,
    entangled_state,
    final_distribution,
    is_state_symmetric,
    make_initial_state,
    payoff_closed_form,
    payoff_from_distribution,
    payoff_oracle_density,
    payoff_sums,
    uniform_state,
)

__version__ = "0.1.0"
