"""Damped Jaynes-Cummings master equation on a truncated Fock space.

Split-operator propagators for the vectorized two-level-atom/oscillator
master equation, exact closed forms for the block-diagonal damping flow,
and brute-force reference integrators to check everything against.
"""

from .errors import (
    ConfigError,
    DampedJCError,
    DomainError,
    NumericalError,
    ParamError,
    ShapeError,
    StepError,
    TruncationError,
    TruncationWarning,
)
from .params import ModelParams
from .fock import (
    annihilation,
    coherent_state,
    coherent_tail_weight,
    cos_sqrt,
    creation,
    embed_operator,
    func_of_number,
    number,
    restrict_operator,
    sinc_sqrt,
)
from .superop import (
    BlockDensity,
    build_generator,
    build_hamiltonian,
    build_X,
    build_Y,
    devectorize,
    devectorize_blocks,
    guard_occupation,
    k_generators,
    lindblad_superop,
    restrict_superop,
    sandwich_superop,
    vectorize,
    vectorize_blocks,
)
from .analytic import (
    EFG,
    ClassicalTrajectory,
    classical_trajectory,
    coherent_solution,
    diagonal_block_propagator,
    efg,
    tau_series,
    vacuum_solution,
)
from .zassenhaus import (
    CommutatorBlocks,
    PropagatorOrder,
    assemble_commutator,
    commutator_blocks,
    example_solution,
    exp_commutator,
    exp_X,
    exp_Y,
    propagate,
    propagator_matrix,
)
from .oracle import (
    DiagnosticsReport,
    OracleConfig,
    OracleMethod,
    converged_diagonal_expm,
    converged_expm,
    diagnostics,
    master_rhs,
    oracle_propagate,
)
from .cli import (
    ConvergenceResult,
    ObservableRow,
    RunConfig,
    convergence_study,
    emit_plotscript,
    run_trajectory,
    trace_distance,
)

__version__ = "0.1.0"

__all__ = [
    "BlockDensity",
    "ClassicalTrajectory",
    "CommutatorBlocks",
    "ConfigError",
    "ConvergenceResult",
    "DampedJCError",
    "DiagnosticsReport",
    "DomainError",
    "EFG",
    "ModelParams",
    "NumericalError",
    "ObservableRow",
    "OracleConfig",
    "OracleMethod",
    "ParamError",
    "PropagatorOrder",
    "RunConfig",
    "ShapeError",
    "StepError",
    "TruncationError",
    "TruncationWarning",
    "annihilation",
    "assemble_commutator",
    "build_generator",
    "build_hamiltonian",
    "build_X",
    "build_Y",
    "classical_trajectory",
    "coherent_solution",
    "coherent_state",
    "coherent_tail_weight",
    "commutator_blocks",
    "convergence_study",
    "converged_diagonal_expm",
    "converged_expm",
    "cos_sqrt",
    "creation",
    "devectorize",
    "devectorize_blocks",
    "diagnostics",
    "diagonal_block_propagator",
    "efg",
    "embed_operator",
    "emit_plotscript",
    "example_solution",
    "exp_commutator",
    "exp_X",
    "exp_Y",
    "func_of_number",
    "guard_occupation",
    "k_generators",
    "lindblad_superop",
    "master_rhs",
    "number",
    "oracle_propagate",
    "propagate",
    "propagator_matrix",
    "restrict_operator",
    "restrict_superop",
    "run_trajectory",
    "sandwich_superop",
    "sinc_sqrt",
    "tau_series",
    "trace_distance",
    "vacuum_solution",
    "vectorize",
    "vectorize_blocks",
    "__version__",
]
