"""Aggregate certification report: runs the full pipeline for one Schmidt
vector and collects every check into a JSON-friendly structure."""

from __future__ import annotations

import numpy as np

from .algebra import SchmidtVector
from .bell import (
    BETA_L,
    BETA_Q,
    bell_value,
    bob_ideal_first,
    bob_ideal_fourth,
    build_w1_functional,
    build_w2_functional,
    check_anticommutator_relations,
    classical_bound,
    w1_ideal_alice,
    w2_bob_slots,
    w2_ideal_alice,
)
from .algebra import max_entangled
from .povm import (
    build_extremal_povm,
    canonical_relabeling,
    equal_probability_check,
    povm_to_json,
    validate_povm,
)
from .randomness import (
    bell_value_from_table,
    decomposition_check,
    eve_attack_value,
    guessing_probability_ideal,
    ideal_statistics,
    splitting_counterexample,
    steering_value_from_table,
    strategy_corpus,
)
from .steering import steering_coefficients, steering_lhs_bound, steering_quantum_value

#: default check tolerances; overridable per run, recorded in the report
DEFAULT_TOLERANCES = {
    "classical_bound": 1e-9,
    "quantum_value": 1e-10,
    "relation_residual": 1e-10,
    "steering_value": 1e-9,
    "steering_gap": 1e-6,
    "povm_completeness": 1e-10,
    "equal_probability": 1e-10,
    "roundtrip": 1e-10,
    "guessing": 1e-12,
    "attack": 1e-10,
    "table_consistency": 1e-10,
    "nonsignaling": 1e-12,
}


def bounds_report(tolerances: dict | None = None) -> dict:
    """Classical and quantum bounds of both Bell functionals with the
    closed-form self-check."""
    tol = {**DEFAULT_TOLERANCES, **(tolerances or {})}
    phi = max_entangled()
    w1, w2 = build_w1_functional(), build_w2_functional()
    beta_l_w1, _ = classical_bound(w1)
    beta_l_w2, _ = classical_bound(w2)
    w1_value = bell_value(w1, phi, w1_ideal_alice(), list(bob_ideal_first()))
    w2_value = bell_value(w2, phi, w2_ideal_alice(), list(w2_bob_slots()))
    ok = (
        abs(beta_l_w1 - BETA_L) <= tol["classical_bound"]
        and abs(beta_l_w2 - BETA_L) <= tol["classical_bound"]
        and abs(w1_value - BETA_Q) <= tol["quantum_value"]
        and abs(w2_value - BETA_Q) <= 1e-9
    )
    return {
        "beta_L_closed_form": BETA_L,
        "beta_Q_closed_form": BETA_Q,
        "beta_L_enumerated_w1": beta_l_w1,
        "beta_L_enumerated_w2": beta_l_w2,
        "w1_value": w1_value,
        "w2_value": w2_value,
        "w2_alice_convention": "conjugated slot triple (B0, B2^dag, B3)",
        "pass": bool(ok),
    }


def certification_report(
    alpha: SchmidtVector, seed: int = 0, tolerances: dict | None = None
) -> dict:
    """Run the full chain for one admissible Schmidt vector."""
    tol = {**DEFAULT_TOLERANCES, **(tolerances or {})}
    canonical, permutation = canonical_relabeling(alpha)

    bell_part = bounds_report(tolerances)
    b0, _, b2 = bob_ideal_first()
    _, residuals = check_anticommutator_relations(b0, b2, bob_ideal_fourth())
    bell_part["relation_residuals"] = list(residuals)
    bell_ok = bell_part["pass"] and max(residuals) <= tol["relation_residual"]

    coeffs = steering_coefficients(canonical)
    sq_value, convention = steering_quantum_value(canonical)
    lhs, lhs_arg = steering_lhs_bound(canonical)
    steering_ok = (
        abs(sq_value - 3.0) <= tol["steering_value"] and lhs < 3.0 - tol["steering_gap"]
    )
    steering_part = {
        "gamma": coeffs.gamma,
        "delta1": [coeffs.delta[1].real, coeffs.delta[1].imag],
        "quantum_value": sq_value,
        "lhs_bound": lhs,
        "lhs_argmax": list(lhs_arg),
        "convention": convention,
    }

    povm, params = build_extremal_povm(canonical)
    flags = validate_povm(povm)
    eq_ok, eq_values = equal_probability_check(povm, canonical, tol["equal_probability"])
    povm_ok = all(flags.values()) and eq_ok
    povm_part = {
        **flags,
        "equal_probability": bool(eq_ok),
        "relabeling_permutation": list(permutation),
        "params": povm_to_json(povm, canonical, params)["params"],
    }

    table = ideal_statistics(canonical, povm)
    w1_from_table = bell_value_from_table(build_w1_functional(), table)
    w2_from_table = bell_value_from_table(build_w2_functional(), table)
    steering_from_table = steering_value_from_table(table, canonical)
    ns_residual = table.nonsignaling_residual()
    table_ok = (
        abs(w1_from_table - BETA_Q) <= tol["table_consistency"]
        and abs(w2_from_table - BETA_Q) <= tol["table_consistency"]
        and abs(steering_from_table - 3.0) <= tol["table_consistency"]
        and ns_residual <= tol["nonsignaling"]
    )

    guess = guessing_probability_ideal(canonical, povm)
    attack_values = {}
    for strat in strategy_corpus(seed=seed if seed else 7):
        attack_values[strat.name] = eve_attack_value(strat, canonical, povm)
        dec = decomposition_check(povm, strat, canonical)
        if dec.failing_clause is not None:
            attack_values[strat.name + "/decomposition"] = dec.failing_clause
    mixture, splitter = splitting_counterexample()
    counterexample = decomposition_check(mixture, splitter, canonical)
    randomness_ok = (
        abs(guess.guessing_probability - 1.0 / 9.0) <= tol["guessing"]
        and all(
            isinstance(v, float) and abs(v - 1.0 / 9.0) <= tol["attack"]
            for v in attack_values.values()
        )
        and counterexample.failing_clause == "extremality-uniqueness"
    )
    randomness_part = {
        **guess.to_json(),
        "eve_attack_values": {
            k: v for k, v in attack_values.items() if isinstance(v, float)
        },
        "counterexample_failing_clause": counterexample.failing_clause,
    }

    overall = bool(bell_ok and steering_ok and povm_ok and table_ok and randomness_ok)
    return {
        "alpha": [float(v) for v in alpha.as_array()],
        "alpha_canonical": [float(v) for v in canonical.as_array()],
        "bell": {**bell_part, "pass": bool(bell_ok)},
        "steering": {**steering_part, "pass": bool(steering_ok)},
        "povm": {**povm_part, "pass": bool(povm_ok)},
        "statistics": {
            "w1_from_table": w1_from_table,
            "w2_from_table": w2_from_table,
            "steering_from_table": steering_from_table,
            "nonsignaling_residual": ns_residual,
            "pass": bool(table_ok),
        },
        "randomness": {**randomness_part, "pass": bool(randomness_ok)},
        "tolerances": tol,
        "pass": overall,
    }
