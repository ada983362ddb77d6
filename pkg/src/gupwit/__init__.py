"""gupwit: variance-based entanglement witnesses with minimal-length (GUP)
corrections, evaluated on multimode states in a truncated Fock basis."""

from .fock import (
    CutoffTooSmallError,
    FockSpace,
    HBAR,
    Operator,
    QuantumState,
    TruncationError,
    commutator,
    expectation,
    expectation_value,
    identity,
    ladder,
    make_space,
    number,
    quadrature_pair,
    reduced_density,
    variance,
)
from .gup import (
    BETA_CAP,
    GupConfig,
    commutator_residual,
    gup_hamiltonian,
    gup_momentum,
    sho_perturbative_shift,
)
from .states import (
    SeparableEnsemble,
    coherent_state,
    cv_ghz,
    fock_state,
    mixture_state,
    product_state,
    random_fock_superposition,
    random_separable,
    random_symmetric_two_mode,
    single_mode_state,
    squeezed_state,
    state_from_spec,
    tail_safe_caps,
    thermal_state,
    two_mode_squeezed,
    vacuum_state,
)
from .witnesses import (
    BipartiteCoefficients,
    TripartiteCoefficients,
    WitnessReport,
    build_epr_operators,
    duan_witness,
    mode_quadrature_moments,
    rigolin_collective,
    rigolin_pairwise,
    vanloock_witness,
)
from .oracle import (
    OracleReport,
    beta_monotonicity,
    default_suites,
    exhaustive_qubit_duan,
    first_order_consistency,
    rigolin_universal,
    run_suites,
    separable_bound_sweep,
    violation_search,
)

__version__ = "0.1.0"
