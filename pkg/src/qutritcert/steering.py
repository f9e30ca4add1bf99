"""Steering functional on the trusted-Bob side: coefficients, ideal quantum
value, and the numerically enumerated local-hidden-state bound.

The trusted observables are fixed to Z and X.  The untrusted (Alice) ideal
realization is certified only up to a complex-conjugation freedom; we resolve
it operationally by trying the four candidates {Z, Z^dag} x {X, X^2} and
keeping the one that reaches the quantum value 3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    SchmidtVector,
    clock_Z,
    dagger,
    omega_power,
    partial_state,
    shift_X,
)

#: maximal quantum value of the steering functional
BETA_Q_STEERING = 3.0


@dataclass(frozen=True)
class SteeringCoefficients:
    gamma: float
    delta: tuple[complex, complex, complex]


def steering_coefficients(alpha: SchmidtVector) -> SteeringCoefficients:
    """gamma = 3 / sum_{i!=j} a_i/a_j and delta_k = -(gamma/3) sum_{i!=j}
    (a_i/a_j) omega^{-kj}; each j term is weighted by both off-diagonal ratios."""
    a = alpha.as_array()
    ratio_sum = sum(a[i] / a[j] for i in range(3) for j in range(3) if i != j)
    gamma = 3.0 / ratio_sum
    delta = tuple(
        complex(
            -(gamma / 3.0)
            * sum(
                (a[i] / a[j]) * omega_power(-k * j)
                for i in range(3)
                for j in range(3)
                if i != j
            )
        )
        for k in range(3)
    )
    return SteeringCoefficients(gamma=float(gamma), delta=delta)


def build_steering_operator(
    alpha: SchmidtVector, a6: np.ndarray, a7: np.ndarray
) -> np.ndarray:
    """Hermitian 9x9 steering operator A_6 x B_0 + gamma A_7 x B_1
    + delta_1 (1 x B_0) + h.c., trusted side fixed to B_0 = Z, B_1 = X.

    The marginal delta_1 term acts on Bob alone, tensored with identity
    on the untrusted side.
    """
    c = steering_coefficients(alpha)
    Z, X = clock_Z(), shift_X()
    m = (
        np.kron(a6, Z)
        + c.gamma * np.kron(a7, X)
        + c.delta[1] * np.kron(np.eye(3, dtype=complex), Z)
    )
    return m + dagger(m)


def certified_alice_observables(branch: int) -> tuple[np.ndarray, np.ndarray]:
    """Qutrit-block representatives of the certified untrusted observables.

    Branch 1 pairs with the trusted blocks (Z, X); branch 2 is the transposed
    copy, pairing with the trusted blocks (Z, X^2).  Both are reported after
    the conjugation resolution, i.e. A_6 = Z^dag.
    """
    Z, X = clock_Z(), shift_X()
    if branch == 1:
        return dagger(Z), X
    if branch == 2:
        return dagger(Z), X @ X
    raise ValueError(f"branch must be 1 or 2, got {branch}")


def steering_quantum_value(alpha: SchmidtVector) -> tuple[float, str]:
    """Evaluate <W_3> on the ideal untrusted realization.

    Tries the four conjugation candidates and returns (value, convention)
    for the one reaching 3; a failure to reach 3 within 1e-9 is an
    implementation bug and raises RuntimeError.
    """
    Z, X = clock_Z(), shift_X()
    psi = partial_state(alpha)
    candidates = {
        "A6=Z, A7=X": (Z, X),
        "A6=Z^dag, A7=X": (dagger(Z), X),
        "A6=Z, A7=X^2": (Z, X @ X),
        "A6=Z^dag, A7=X^2": (dagger(Z), X @ X),
    }
    for label, (a6, a7) in candidates.items():
        op = build_steering_operator(alpha, a6, a7)
        value = float((psi.conj() @ op @ psi).real)
        if abs(value - BETA_Q_STEERING) <= 1e-9:
            return value, label
    raise RuntimeError("no conjugation convention reaches the quantum value 3")


def _max_eig_hermitian3(h: np.ndarray) -> float:
    """Largest eigenvalue of a 3x3 Hermitian matrix via the characteristic
    cubic (trigonometric form), falling back to numpy when the residual of
    the closed form exceeds 1e-11."""
    mean = np.trace(h).real / 3.0
    k = h - mean * np.eye(3)
    p2 = (np.trace(k @ dagger(k)).real) / 6.0
    if p2 <= 1e-30:
        return float(mean)
    p = np.sqrt(p2)
    b = k / p
    r = np.clip(np.linalg.det(b).real / 2.0, -1.0, 1.0)
    phi = np.arccos(r) / 3.0
    top = mean + 2.0 * p * np.cos(phi)
    # characteristic-polynomial residual check
    char = h - top * np.eye(3)
    if abs(np.linalg.det(char)) > 1e-11 * max(1.0, abs(top)) ** 3:
        return float(np.linalg.eigvalsh(h)[-1])
    return float(top)


def steering_lhs_bound(alpha: SchmidtVector) -> tuple[float, tuple[int, int]]:
    """Local-hidden-state bound: maximum over the nine deterministic
    root-of-unity assignments (a6, a7) of the largest eigenvalue of the
    trusted-side operator a6*Z + gamma*a7*X + delta_1*Z + h.c.

    Returns (bound, (m6, m7)) with the maximizing omega exponents.
    """
    c = steering_coefficients(alpha)
    Z, X = clock_Z(), shift_X()
    best = -np.inf
    arg = (0, 0)
    for m6 in range(3):
        for m7 in range(3):
            f = omega_power(m6) * Z + c.gamma * omega_power(m7) * X + c.delta[1] * Z
            val = _max_eig_hermitian3(f + dagger(f))
            if val > best:
                best = val
                arg = (m6, m7)
    return float(best), arg
