"""Bell operators for the qutrit self-test: the two functionals, their ideal
realizations, exact classical bounds by deterministic enumeration, and the
certified observable algebra (anticommutation relations, certified Weyl
blocks on the two transposition branches).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import OMEGA, dagger, max_entangled, omega_power, shift_X, clock_Z, weyl

#: global phase of both Bell functionals, lambda = exp(-i*pi/18)
LAMBDA = np.exp(-1j * np.pi / 18)

#: closed-form classical bound 2*cos(pi/9) / (3*sqrt(3))
BETA_L = 2.0 * np.cos(np.pi / 9.0) / (3.0 * np.sqrt(3.0))

#: maximal quantum value 2 / (3*sqrt(3))
BETA_Q = 2.0 / (3.0 * np.sqrt(3.0))


@dataclass(frozen=True)
class BellFunctional:
    """Correlation-form Bell functional (phase/27) sum_jk c_jk A_j x B_k + h.c.

    ``alice_slots`` and ``bob_slots`` map the three operator slots onto
    (input, Fourier-power) pairs of the measured statistics table, so the
    same functional can be evaluated either on explicit operators or on
    correlators recovered from probabilities.
    """

    name: str
    phase: complex = LAMBDA
    coeffs: tuple = field(
        default_factory=lambda: tuple(
            tuple(omega_power(j * k) for k in range(3)) for j in range(3)
        )
    )
    alice_slots: tuple = ((0, 1), (1, 1), (2, 1))
    bob_slots: tuple = ((0, 1), (1, 1), (2, 1))

    def operator(self, alice_obs: Sequence[np.ndarray], bob_obs: Sequence[np.ndarray]) -> np.ndarray:
        """Assemble the Hermitian 9x9 Bell operator on the given realizations."""
        w = sum(
            self.coeffs[j][k] * np.kron(alice_obs[j], bob_obs[k])
            for j in range(3)
            for k in range(3)
        )
        w = (self.phase / 27.0) * w
        return w + dagger(w)


def build_w1_functional() -> BellFunctional:
    """The first Bell functional, coefficients omega^{jk} on inputs j,k=0..2."""
    return BellFunctional(name="W1")


def build_w2_functional() -> BellFunctional:
    """The second Bell functional: same omega^{jk} pattern over Alice inputs
    3,4,5 and the Bob operator slots (B_0, B_2^dag, B_3)."""
    return BellFunctional(
        name="W2",
        alice_slots=((3, 1), (4, 1), (5, 1)),
        bob_slots=((0, 1), (2, 2), (3, 1)),
    )


def bob_ideal_first() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Ideal Bob observables for W1: B_0 = Z, B_1 = X, B_2 = omega X^2 Z^2."""
    return clock_Z(), shift_X(), OMEGA * weyl(2, 2)


def bob_ideal_fourth() -> np.ndarray:
    """Ideal fourth Bob observable B_3 = omega^2 X^2 Z (first-branch block)."""
    return omega_power(2) * weyl(2, 1)


def alice_optimal(j: int, bob_obs: Sequence[np.ndarray]) -> np.ndarray:
    """Optimal Alice observable (lambda*/sqrt3) sum_k omega^{-jk} B_k^*."""
    return (np.conj(LAMBDA) / np.sqrt(3.0)) * sum(
        omega_power(-j * k) * bob_obs[k].conj() for k in range(3)
    )


def w1_ideal_alice() -> list[np.ndarray]:
    """Alice observables A_0, A_1, A_2 maximizing W1 on the ideal Bob triple."""
    bob = bob_ideal_first()
    return [alice_optimal(j, bob) for j in range(3)]


def w2_ideal_alice() -> list[np.ndarray]:
    """Alice observables A_3, A_4, A_5 maximizing W2.

    Constructed by applying the optimal-Alice pattern to the ordered slot
    triple (B_0, B_2^dag, B_3); numerically this conjugated variant achieves
    the maximal quantum value (the conjugation-free one gives ~0).
    """
    return [alice_optimal(j, w2_bob_slots()) for j in range(3)]


def w2_bob_slots() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The operator triple occupying W2's Bob slots: (B_0, B_2^dag, B_3)."""
    b0, _, b2 = bob_ideal_first()
    return b0, dagger(b2), bob_ideal_fourth()


def bell_value(
    functional: BellFunctional,
    state: np.ndarray,
    alice_obs: Sequence[np.ndarray],
    bob_obs: Sequence[np.ndarray],
) -> float:
    """Expectation of the Bell operator on ``state``; the +h.c. completion is
    applied internally.  A nonreal residue above 1e-12 signals a broken
    functional assembly and raises."""
    op = functional.operator(alice_obs, bob_obs)
    dim = op.shape[0]
    if state.shape != (dim,):
        raise ValueError(f"state dimension {state.shape} incompatible with operator {op.shape}")
    val = complex(state.conj() @ op @ state)
    if abs(val.imag) > 1e-12:
        raise ValueError(f"Bell value has imaginary residue {val.imag:.3e}")
    return val.real


@dataclass(frozen=True)
class DeterministicStrategy:
    alice_outputs: tuple[int, int, int]
    bob_outputs: tuple[int, int, int]


def classical_bound(functional: BellFunctional) -> tuple[float, DeterministicStrategy]:
    """Exact maximum of the Bell expression over all 3^3 * 3^3 = 729
    deterministic strategies, with <A_j B_k> = omega^{a_j + b_k}.

    Ties break to the lexicographically first strategy.
    """
    c = np.array(functional.coeffs, dtype=complex)
    phases = np.array([omega_power(n) for n in range(3)])
    best_val = -np.inf
    best: DeterministicStrategy | None = None
    for a in itertools.product(range(3), repeat=3):
        pa = phases[list(a)]
        for b in itertools.product(range(3), repeat=3):
            pb = phases[list(b)]
            v = 2.0 * ((functional.phase / 27.0) * (pa @ c @ pb)).real
            if v > best_val + 1e-15:
                best_val = v
                best = DeterministicStrategy(a, b)
    assert best is not None
    return best_val, best


# ---------------------------------------------------------------------------
# Correlator <-> probability Fourier pair
# ---------------------------------------------------------------------------


def fourier_correlators(prob: np.ndarray) -> np.ndarray:
    """Correlator table <A_l B_m> = sum_ab omega^{al+bm} p(ab) from one 3x3
    conditional probability block."""
    prob = np.asarray(prob, dtype=float)
    if prob.shape != (3, 3) or prob.min() < -1e-12 or abs(prob.sum() - 1.0) > 1e-9:
        raise ValueError("expected a normalized nonnegative 3x3 probability block")
    f = np.array([[omega_power(a * l) for l in range(3)] for a in range(3)])
    return f.T @ prob.astype(complex) @ f


def inverse_fourier(corr: np.ndarray) -> np.ndarray:
    """Invert :func:`fourier_correlators`; round-trip identity within 1e-12."""
    corr = np.asarray(corr, dtype=complex)
    f = np.array([[omega_power(-a * l) for a in range(3)] for l in range(3)])
    prob = (f.T @ corr @ f) / 9.0
    if np.abs(prob.imag).max() > 1e-10:
        raise ValueError("correlator table is not the transform of a real probability block")
    return prob.real


# ---------------------------------------------------------------------------
# Certified observable algebra
# ---------------------------------------------------------------------------


def _anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def check_anticommutator_relations(
    b0: np.ndarray, b2: np.ndarray, b3: np.ndarray, tol: float = 1e-10
) -> tuple[bool, tuple[float, float, float]]:
    """Check the three certified relations tying B_0, B_2 and B_3 together:

        B_0^dag = -omega {B_2^dag, B_3}
        B_3^dag = -omega {B_0, B_2^dag}
        B_2     = -omega {B_3, B_0}

    Returns (all_hold, residual Frobenius norms).
    """
    r1 = np.linalg.norm(dagger(b0) + OMEGA * _anticommutator(dagger(b2), b3))
    r2 = np.linalg.norm(dagger(b3) + OMEGA * _anticommutator(b0, dagger(b2)))
    r3 = np.linalg.norm(b2 + OMEGA * _anticommutator(b3, b0))
    residuals = (float(r1), float(r2), float(r3))
    return max(residuals) <= tol, residuals


def reconstruct_B3(b0: np.ndarray, b2: np.ndarray) -> np.ndarray:
    """Recover the fourth observable as (-omega {B_0, B_2^dag})^dag."""
    return dagger(-OMEGA * _anticommutator(b0, dagger(b2)))


def certified_weyl_block(p: int, q: int, branch: int) -> np.ndarray:
    """Qutrit block of the certified Weyl-family observable.

    branch 1 gives X^p Z^q; branch 2 gives Z^q X^{2p}, which is a phase
    times the transpose of the branch-1 block.
    """
    if branch == 1:
        return weyl(p % 3, q % 3)
    if branch == 2:
        Z, X = clock_Z(), shift_X()
        return np.linalg.matrix_power(Z, q % 3) @ np.linalg.matrix_power(X, (2 * p) % 3)
    raise ValueError(f"branch must be 1 or 2, got {branch}")
