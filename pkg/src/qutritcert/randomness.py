"""Full protocol statistics, guessing probability, and the explicit
finite-dimensional adversary corpus with the extremality decomposition check.

The global space is A' x A'' x B' x B'' x E, with the qutrit factors A', B'
carrying the certified state and the primed junk factors plus Eve's space
carrying an adversary strategy.  States are held as 5-index numpy arrays and
all expectations go through einsum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    SchmidtVector,
    clock_Z,
    dagger,
    max_entangled,
    omega_power,
    partial_state,
    reduced_state,
    schmidt_filter,
    shift_X,
    weyl,
)
from .bell import (
    BETA_Q,
    bob_ideal_first,
    bob_ideal_fourth,
    build_w1_functional,
    build_w2_functional,
    w1_ideal_alice,
    w2_ideal_alice,
    BellFunctional,
)
from .povm import Povm, build_extremal_povm, expansion_coefficients, reconstruct_from_coefficients
from .steering import certified_alice_observables, steering_coefficients


shift_x_cache = shift_X()
clock_z_cache = clock_Z()


class CertificationInapplicableError(ValueError):
    """The POVM does not satisfy the equal-probability condition."""


class IncompatibleStrategyError(ValueError):
    """An adversary strategy fails to reproduce the reference statistics."""


def min_entropy(g: float) -> float:
    """Min-entropy -log2(G) in bits."""
    if not 0.0 < g <= 1.0:
        raise ValueError(f"guessing probability must be in (0, 1], got {g}")
    return float(-np.log2(g))


def projective_elements(observable: np.ndarray) -> list[np.ndarray]:
    """Outcome projectors F_a = (1/3) sum_l omega^{-al} U^l of a unitary
    observable with spectrum {1, omega, omega^2}."""
    powers = [np.eye(3, dtype=complex), observable, observable @ observable]
    return [
        sum(omega_power(-a * l) * powers[l] for l in range(3)) / 3.0 for a in range(3)
    ]


def bob_certified_observables() -> list[np.ndarray]:
    """The four certified Bob observables (first-branch blocks)."""
    b0, b1, b2 = bob_ideal_first()
    return [b0, b1, b2, bob_ideal_fourth()]


# ---------------------------------------------------------------------------
# Statistics table
# ---------------------------------------------------------------------------


@dataclass
class StatisticsTable:
    """Behavior {p(a, b | j, k, prep)}; blocks keyed by (prep, j, k), each an
    (n_a x 3) array.  Preparation 1 holds the Bell inputs j=0..5, preparation
    2 the steering inputs j=6,7 and the nine-outcome input j=8."""

    blocks: dict = field(default_factory=dict)

    def block(self, prep: int, j: int, k: int) -> np.ndarray:
        return self.blocks[(prep, j, k)]

    def correlator(self, prep: int, j: int, k: int, l: int, m: int) -> complex:
        p = self.blocks[(prep, j, k)]
        n_a = p.shape[0]
        fa = np.array([omega_power(a * l) for a in range(n_a)])
        fb = np.array([omega_power(b * m) for b in range(3)])
        return complex(fa @ p @ fb)

    def nonsignaling_residual(self) -> float:
        """Max deviation of one-party marginals across the other party's inputs."""
        worst = 0.0
        preps_js = sorted({(prep, j) for (prep, j, _) in self.blocks})
        for prep, j in preps_js:
            ks = sorted(k for (pp, jj, k) in self.blocks if (pp, jj) == (prep, j))
            margs = [self.blocks[(prep, j, k)].sum(axis=1) for k in ks]
            for m in margs[1:]:
                worst = max(worst, float(np.abs(m - margs[0]).max()))
        preps_ks = sorted({(prep, k) for (prep, _, k) in self.blocks})
        for prep, k in preps_ks:
            js = sorted(j for (pp, j, kk) in self.blocks if (pp, kk) == (prep, k))
            margs = [self.blocks[(prep, j, k)].sum(axis=0) for j in js]
            for m in margs[1:]:
                worst = max(worst, float(np.abs(m - margs[0]).max()))
        return worst

    def to_records(self) -> list[dict]:
        return [
            {"prep": prep, "j": j, "k": k, "probs": self.blocks[(prep, j, k)].tolist()}
            for (prep, j, k) in sorted(self.blocks)
        ]

    @classmethod
    def from_records(cls, records: list[dict]) -> "StatisticsTable":
        table = cls()
        for rec in records:
            table.blocks[(rec["prep"], rec["j"], rec["k"])] = np.asarray(
                rec["probs"], dtype=float
            )
        return table


def _born_block(state: np.ndarray, alice_effects, bob_effects) -> np.ndarray:
    p = np.zeros((len(alice_effects), len(bob_effects)))
    for a, fa in enumerate(alice_effects):
        for b, gb in enumerate(bob_effects):
            p[a, b] = (state.conj() @ np.kron(fa, gb) @ state).real
    return p


def ideal_statistics(alpha: SchmidtVector, povm: Povm | None = None) -> StatisticsTable:
    """Assemble the ideal two-preparation behavior.

    Preparation 1: maximally entangled state, Alice inputs 0..2 (W1 optimal
    observables) and 3..5 (W2 optimal observables).  Preparation 2: the
    partially entangled state, Alice inputs 6,7 (steering observables) and
    input 8 (the extremal POVM).  Bob's four certified observables are used
    for every input.
    """
    if povm is None:
        povm, _ = build_extremal_povm(alpha)
    bob_proj = [projective_elements(b) for b in bob_certified_observables()]
    table = StatisticsTable()

    phi = max_entangled()
    alice_bell = w1_ideal_alice() + w2_ideal_alice()
    for j, obs in enumerate(alice_bell):
        fa = projective_elements(obs)
        for k in range(4):
            table.blocks[(1, j, k)] = _born_block(phi, fa, bob_proj[k])

    psi = partial_state(alpha)
    a6, a7 = certified_alice_observables(branch=1)
    for j, obs in ((6, a6), (7, a7)):
        fa = projective_elements(obs)
        for k in range(4):
            table.blocks[(2, j, k)] = _born_block(psi, fa, bob_proj[k])
    for k in range(4):
        table.blocks[(2, 8, k)] = _born_block(psi, povm.elements, bob_proj[k])
    return table


def bell_value_from_table(functional: BellFunctional, table: StatisticsTable, prep: int = 1) -> float:
    """Re-evaluate a Bell functional from measured statistics via the
    correlator (Fourier) picture."""
    total = 0j
    for jslot, (j, l) in enumerate(functional.alice_slots):
        for kslot, (k, m) in enumerate(functional.bob_slots):
            total += functional.coeffs[jslot][kslot] * table.correlator(prep, j, k, l, m)
    return float(2.0 * ((functional.phase / 27.0) * total).real)


def steering_value_from_table(table: StatisticsTable, alpha: SchmidtVector) -> float:
    """Re-evaluate the steering functional from preparation-2 statistics."""
    c = steering_coefficients(alpha)
    total = (
        table.correlator(2, 6, 0, 1, 1)
        + c.gamma * table.correlator(2, 7, 1, 1, 1)
        + c.delta[1] * table.correlator(2, 6, 0, 0, 1)
    )
    return float(2.0 * total.real)


# ---------------------------------------------------------------------------
# Guessing probability
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GuessingReport:
    guessing_probability: float
    hmin_bits: float
    marginal: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "G": self.guessing_probability,
            "Hmin_bits": self.hmin_bits,
            "marginal": list(self.marginal),
        }


def guessing_probability_ideal(alpha: SchmidtVector, povm: Povm) -> GuessingReport:
    """Guessing probability of the nine-outcome input for the ideal setup.

    Requires the equal-probability condition r^a_{0,0} = 1/9 for all a; the
    certified value is then the largest outcome probability, 1/9.
    """
    r = expansion_coefficients(povm, alpha)
    if np.abs(r[:, 0, 0] - 1.0 / 9.0).max() > 1e-10:
        raise CertificationInapplicableError(
            "POVM violates the equal-probability condition r^a_00 = 1/9"
        )
    marginal = np.array([np.trace(e @ reduced_state(alpha)).real for e in povm.elements])
    g = float(marginal.max())
    return GuessingReport(
        guessing_probability=g,
        hmin_bits=min_entropy(g),
        marginal=tuple(float(v) for v in marginal),
    )


# ---------------------------------------------------------------------------
# Adversary strategies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EveStrategy:
    """Finite-dimensional adversary strategy on the junk/Eve factors.

    ``xi`` is a unit ket with index order (A'', B'', E).  ``eve_povm`` holds
    Eve's outcome elements on E; for the attack evaluation it is padded with
    zeros up to the nine Alice outcomes.  When ``alice_elements`` is None the
    canonical branch-respecting POVM is derived from the ideal POVM under
    test (first branch: the POVM itself; second branch: its filtered
    transpose P^{-1}(P R_a P)^T P^{-1}).
    """

    name: str
    xi: np.ndarray
    alice_branch_projectors: tuple[np.ndarray, np.ndarray]
    bob_branch_projectors: tuple[np.ndarray, np.ndarray]
    eve_povm: tuple[np.ndarray, ...]
    alice_elements: tuple[np.ndarray, ...] | None = None

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.xi.shape

    def eve_povm_padded(self) -> list[np.ndarray]:
        d_e = self.dims[2]
        padded = list(self.eve_povm)
        while len(padded) < 9:
            padded.append(np.zeros((d_e, d_e), dtype=complex))
        return padded[:9]


def transpose_branch_povm(povm: Povm, alpha: SchmidtVector) -> list[np.ndarray]:
    """Second-branch Alice POVM S_a = P^{-1} (P R_a P)^T P^{-1}; the unique
    qutrit POVM reproducing the ideal correlators against the transposed
    Bob blocks."""
    p, pinv = schmidt_filter(alpha)
    return [pinv @ (p @ e @ p).T @ pinv for e in povm.elements]


def strategy_alice_elements(
    strategy: EveStrategy, povm: Povm, alpha: SchmidtVector
) -> list[np.ndarray]:
    if strategy.alice_elements is not None:
        return list(strategy.alice_elements)
    p1, p2 = strategy.alice_branch_projectors
    second = transpose_branch_povm(povm, alpha)
    return [np.kron(r, p1) + np.kron(s, p2) for r, s in zip(povm.elements, second)]


def global_state(strategy: EveStrategy, alpha: SchmidtVector) -> np.ndarray:
    """Five-index global ket Psi[iA', sA'', jB', tB'', e]."""
    t_a, t_b, d_e = strategy.dims
    psi2 = np.zeros((3, 3), dtype=complex)
    for i, v in enumerate(alpha.as_array()):
        psi2[i, i] = v
    return np.einsum("ij,ste->isjte", psi2, strategy.xi.astype(complex))


def _certified_bob_tensor(p: int, q: int, strategy: EveStrategy) -> np.ndarray:
    """Certified Bob observable on B' x B'' as a 4-index tensor."""
    q1, q2 = strategy.bob_branch_projectors
    w1 = weyl(p, q)
    w2 = np.linalg.matrix_power(clock_z_cache, q % 3) @ np.linalg.matrix_power(
        shift_x_cache, (2 * p) % 3
    )
    return np.einsum("jJ,tT->jtJT", w1, q1.astype(complex)) + np.einsum(
        "jJ,tT->jtJT", w2, q2.astype(complex)
    )


def strategy_correlator_table(
    strategy: EveStrategy, povm: Povm, alpha: SchmidtVector
) -> np.ndarray:
    """Table c[a, p, q] = <Psi| Rbar_a x B_pq x 1_E |Psi> for the strategy."""
    psi = global_state(strategy, alpha)
    t_a = strategy.dims[0]
    elements = strategy_alice_elements(strategy, povm, alpha)
    out = np.zeros((9, 3, 3), dtype=complex)
    for a, elem in enumerate(elements):
        r = elem.reshape(3, t_a, 3, t_a)
        for p in range(3):
            for q in range(3):
                bob = _certified_bob_tensor(p, q, strategy)
                out[a, p, q] = np.einsum(
                    "isjte,isIS,jtJT,ISJTe->", psi.conj(), r, bob, psi
                )
    return out


def check_compatibility(
    strategy: EveStrategy, povm: Povm, alpha: SchmidtVector, tol: float = 1e-9
) -> float:
    """Max deviation of the strategy's correlator table from the ideal one;
    raises IncompatibleStrategyError above ``tol``."""
    ideal = expansion_coefficients(povm, alpha)
    actual = strategy_correlator_table(strategy, povm, alpha)
    deviation = float(np.abs(actual - ideal).max())
    if deviation > tol:
        raise IncompatibleStrategyError(
            f"strategy '{strategy.name}' deviates from the reference statistics "
            f"by {deviation:.3e} (tolerance {tol:.1e})"
        )
    return deviation


def eve_attack_value(strategy: EveStrategy, alpha: SchmidtVector, povm: Povm) -> float:
    """Eve's success probability sum_a <Psi| Rbar_a x 1_B x Z_a |Psi>.

    The strategy must reproduce the reference statistics.  When the POVM
    satisfies the equal-probability condition the result must equal 1/9;
    a violation indicates an implementation bug and raises RuntimeError.
    """
    check_compatibility(strategy, povm, alpha)
    psi = global_state(strategy, alpha)
    t_a = strategy.dims[0]
    elements = strategy_alice_elements(strategy, povm, alpha)
    total = 0j
    for elem, z in zip(elements, strategy.eve_povm_padded()):
        r = elem.reshape(3, t_a, 3, t_a)
        total += np.einsum("isjte,isIS,eE,ISjtE->", psi.conj(), r, z.astype(complex), psi)
    value = float(total.real)
    r_table = expansion_coefficients(povm, alpha)
    if np.abs(r_table[:, 0, 0] - 1.0 / 9.0).max() <= 1e-10 and abs(value - 1.0 / 9.0) > 1e-10:
        raise RuntimeError(
            f"guessing value {value} deviates from 1/9 for a compatible strategy"
        )
    return value


# ---------------------------------------------------------------------------
# Decomposition (extremality) check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecompositionReport:
    convex_identity_ok: bool
    conditional_povms_ok: bool
    extremality_ok: bool
    convex_residual: float
    max_table_deviation: float
    branch_weights: dict

    @property
    def failing_clause(self) -> str | None:
        if not self.convex_identity_ok:
            return "convex-identity"
        if not self.conditional_povms_ok:
            return "conditional-povm-validity"
        if not self.extremality_ok:
            return "extremality-uniqueness"
        return None


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((m + dagger(m)) / 2.0)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ dagger(vecs)


def decomposition_check(
    povm: Povm, strategy: EveStrategy, alpha: SchmidtVector
) -> DecompositionReport:
    """Verify the extremality decomposition argument for a strategy.

    Builds the conditional states phi^{b,e} = (1 x Q_b x sqrt(Z_e)) xi / sqrt(q),
    extracts the conditional coefficient tables, and checks (i) the convex
    identity recombining them into the reference table, (ii) that every
    conditional table defines a valid POVM, (iii) that every conditional
    table coincides with the reference one (extremality forces uniqueness).
    """
    check_compatibility(strategy, povm, alpha)
    psi_filter, _ = schmidt_filter(alpha)
    t_a, t_b, d_e = strategy.dims
    elements = strategy_alice_elements(strategy, povm, alpha)
    reference = strategy_correlator_table(strategy, povm, alpha)

    # operator-valued coefficients D^a_{kl} on A''
    coeff_ops = np.zeros((9, 3, 3, t_a, t_a), dtype=complex)
    for a, elem in enumerate(elements):
        r = elem.reshape(3, t_a, 3, t_a)
        m = np.einsum("i,isjt,j->isjt", np.diag(psi_filter), r, np.diag(psi_filter))
        for k in range(3):
            for l in range(3):
                coeff_ops[a, k, l] = np.einsum("jsit,ji->st", m, weyl(k, l))

    q_weights: dict = {}
    conditional_tables: dict = {}
    for b_index, q_proj in enumerate(strategy.bob_branch_projectors, start=1):
        for e, z in enumerate(strategy.eve_povm):
            filt = np.einsum(
                "tT,eE,sTE->ste",
                q_proj.astype(complex),
                _psd_sqrt(z),
                strategy.xi.astype(complex),
            )
            q_be = float(np.vdot(filt, filt).real)
            if q_be < 1e-12:
                continue
            phi = filt / np.sqrt(q_be)
            q_weights[(b_index, e)] = q_be
            tab = np.zeros((9, 3, 3), dtype=complex)
            for a in range(9):
                for p in range(3):
                    for q in range(3):
                        if b_index == 1:
                            d = coeff_ops[a, p, q]
                            tab[a, p, q] = np.einsum("st,sbe,tbe->", d, phi.conj(), phi)
                        else:
                            d = coeff_ops[a, (2 * p) % 3, q]
                            tab[a, p, q] = omega_power(2 * p * q) * np.einsum(
                                "st,sbe,tbe->", d, phi.conj(), phi
                            )
            conditional_tables[(b_index, e)] = tab

    recombined = sum(q_weights[key] * conditional_tables[key] for key in q_weights)
    convex_residual = float(np.abs(recombined - reference).max())

    povms_ok = True
    for tab in conditional_tables.values():
        cond = reconstruct_from_coefficients(tab, alpha)
        psd = all(np.linalg.eigvalsh((e + dagger(e)) / 2).min() >= -1e-10 for e in cond.elements)
        complete = np.abs(cond.total() - np.eye(3)).max() <= 1e-10
        if not (psd and complete):
            povms_ok = False
            break

    max_dev = max(
        float(np.abs(tab - reference).max()) for tab in conditional_tables.values()
    )
    return DecompositionReport(
        convex_identity_ok=convex_residual <= 1e-10,
        conditional_povms_ok=povms_ok,
        extremality_ok=max_dev <= 1e-9,
        convex_residual=convex_residual,
        max_table_deviation=max_dev,
        branch_weights={f"{b},{e}": w for (b, e), w in q_weights.items()},
    )


# ---------------------------------------------------------------------------
# Strategy corpus
# ---------------------------------------------------------------------------


def trivial_eve() -> EveStrategy:
    """Uncorrelated single-outcome Eve on one-dimensional junk spaces."""
    one = np.ones((1, 1), dtype=complex)
    zero = np.zeros((1, 1), dtype=complex)
    return EveStrategy(
        name="trivial",
        xi=np.ones((1, 1, 1)),
        alice_branch_projectors=(one, zero),
        bob_branch_projectors=(one, zero),
        eve_povm=(one,),
    )


def branch_copy_eve() -> EveStrategy:
    """Eve keeps a classical copy of the transposition branch label."""
    xi = np.zeros((2, 2, 2))
    xi[0, 0, 0] = xi[1, 1, 1] = 1.0 / np.sqrt(2.0)
    p1 = np.diag([1.0, 0.0]).astype(complex)
    p2 = np.diag([0.0, 1.0]).astype(complex)
    return EveStrategy(
        name="branch-copy",
        xi=xi,
        alice_branch_projectors=(p1, p2),
        bob_branch_projectors=(p1, p2),
        eve_povm=(p1.copy(), p2.copy()),
    )


def branch_mixing_eve(seed: int = 7, weight_first: float = 0.3) -> EveStrategy:
    """Unequal branch weights, non-orthogonal Eve side states and a random
    nine-element Eve POVM on a three-dimensional space."""
    rng = np.random.default_rng(seed)
    d_e = 3
    chi = []
    for _ in range(2):
        v = rng.standard_normal(d_e) + 1j * rng.standard_normal(d_e)
        chi.append(v / np.linalg.norm(v))
    xi = np.zeros((2, 2, d_e), dtype=complex)
    xi[0, 0, :] = np.sqrt(weight_first) * chi[0]
    xi[1, 1, :] = np.sqrt(1.0 - weight_first) * chi[1]
    raw = []
    for _ in range(9):
        g = rng.standard_normal((d_e, d_e)) + 1j * rng.standard_normal((d_e, d_e))
        raw.append(g @ dagger(g))
    total = sum(raw)
    vals, vecs = np.linalg.eigh(total)
    inv_sqrt = (vecs / np.sqrt(vals)) @ dagger(vecs)
    eve = tuple(inv_sqrt @ m @ inv_sqrt for m in raw)
    p1 = np.diag([1.0, 0.0]).astype(complex)
    p2 = np.diag([0.0, 1.0]).astype(complex)
    return EveStrategy(
        name="branch-mixing",
        xi=xi,
        alice_branch_projectors=(p1, p2),
        bob_branch_projectors=(p1, p2),
        eve_povm=eve,
    )


def strategy_corpus(seed: int = 7) -> list[EveStrategy]:
    return [trivial_eve(), branch_copy_eve(), branch_mixing_eve(seed=seed)]


def splitting_counterexample() -> tuple[Povm, EveStrategy]:
    """Non-extremal POVM (even mixture of the Z and X projective measurements,
    padded with zeros) together with an Eve strategy that splits it.

    The strategy reproduces the mixture's statistics but its conditional
    tables are the two projective components, so the extremality clause of
    :func:`decomposition_check` must fail.
    """
    z_proj = projective_elements(clock_z_cache)
    x_proj = projective_elements(shift_x_cache)
    zero3 = np.zeros((3, 3), dtype=complex)
    mixture = Povm(
        elements=tuple(
            [0.5 * p for p in z_proj] + [0.5 * p for p in x_proj] + [zero3] * 3
        )
    )
    flag0 = np.diag([1.0, 0.0]).astype(complex)
    flag1 = np.diag([0.0, 1.0]).astype(complex)
    alice_elements = tuple(
        [np.kron(p, flag0) for p in z_proj]
        + [np.kron(p, flag1) for p in x_proj]
        + [np.zeros((6, 6), dtype=complex)] * 3
    )
    xi = np.zeros((2, 1, 2))
    xi[0, 0, 0] = xi[1, 0, 1] = 1.0 / np.sqrt(2.0)
    strategy = EveStrategy(
        name="splitting-counterexample",
        xi=xi,
        alice_branch_projectors=(flag0, flag1),
        bob_branch_projectors=(np.ones((1, 1), dtype=complex), np.zeros((1, 1), dtype=complex)),
        eve_povm=(flag0.copy(), flag1.copy()),
        alice_elements=alice_elements,
    )
    return mixture, strategy
