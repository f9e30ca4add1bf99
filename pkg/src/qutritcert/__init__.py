"""Certification toolkit for maximal local randomness from two-qutrit states
and extremal nine-outcome measurements."""

from .algebra import (
    EPS_DEGENERACY,
    OMEGA,
    DegenerateSchmidtError,
    SchmidtVector,
    clock_Z,
    max_entangled,
    mub_observable,
    omega_power,
    partial_state,
    relabel_conjugate,
    schmidt_filter,
    shift_X,
    weyl,
)
from .bell import (
    BETA_L,
    BETA_Q,
    LAMBDA,
    BellFunctional,
    alice_optimal,
    bell_value,
    bob_ideal_first,
    bob_ideal_fourth,
    build_w1_functional,
    build_w2_functional,
    certified_weyl_block,
    check_anticommutator_relations,
    classical_bound,
    fourier_correlators,
    inverse_fourier,
    reconstruct_B3,
    w1_ideal_alice,
    w2_ideal_alice,
)
from .povm import (
    ANALYTIC_COVERAGE,
    CoveragePredicateError,
    ExtremalPovmParams,
    Povm,
    build_extremal_povm,
    canonical_relabeling,
    coverage_predicate,
    equal_probability_check,
    expansion_coefficients,
    monte_carlo_coverage,
    reconstruct_from_coefficients,
    sample_schmidt,
    validate_povm,
)
from .randomness import (
    CertificationInapplicableError,
    EveStrategy,
    GuessingReport,
    IncompatibleStrategyError,
    StatisticsTable,
    decomposition_check,
    eve_attack_value,
    guessing_probability_ideal,
    ideal_statistics,
    min_entropy,
    splitting_counterexample,
    strategy_corpus,
)
from .steering import (
    certified_alice_observables,
    steering_coefficients,
    steering_lhs_bound,
    steering_quantum_value,
)

__version__ = "0.1.0"
