"""Kicked two-mode Kerr coupler (nonlinear quantum scissors) in a truncated Fock basis."""

from .diagnostics import (
    FOUR_STATE,
    THREE_STATE,
    KickTrajectory,
    TrackedSet,
    bell_fidelities,
    bell_states,
    compute_trajectory,
    detect_events,
    entanglement_entropy,
    leakage,
    probabilities,
    simulate,
)
from .fock import (
    FockBasis,
    JointOperator,
    NormalizationError,
    NumericalError,
    StateVector,
    coherent_state,
    dagger,
    kron,
    mode_a_annihilation,
    mode_b_annihilation,
    single_mode_annihilation,
    vacuum_state,
)
from .hamiltonian import CouplerConfig, build_h_nl, build_kick_generator
from .propagator import (
    Propagators,
    build_propagators,
    build_u_k,
    build_u_nl,
    expm_hermitian_scaled,
    run_kicks,
)

__version__ = "0.1.0"
