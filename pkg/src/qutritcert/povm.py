"""Extremal nine-outcome qutrit POVM: construction, validation, the
Weyl-basis expansion/reconstruction pair, and the Monte Carlo coverage
experiment over random Schmidt vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    SchmidtVector,
    dagger,
    partial_state,
    reduced_state,
    schmidt_filter,
    weyl,
)


class CoveragePredicateError(ValueError):
    """The Schmidt vector lies outside the construction's coverage region."""


#: analytic coverage fraction under uniform-simplex sampling of the squared
#: coefficients: 1 - 3 * 2 * (1/9)^2 relative to the unit simplex
ANALYTIC_COVERAGE = 25.0 / 27.0


@dataclass(frozen=True)
class ExtremalPovmParams:
    lambda_first: float
    lambda_mid: float
    lambda_last: float
    mu: tuple[float, float, float]


@dataclass(frozen=True)
class Povm:
    """Ordered list of nine PSD 3x3 elements summing to identity."""

    elements: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if len(self.elements) != 9 or any(e.shape != (3, 3) for e in self.elements):
            raise ValueError("expected nine 3x3 elements")

    def total(self) -> np.ndarray:
        return sum(self.elements)


def coverage_predicate(alpha: SchmidtVector) -> bool:
    """True iff at least two Schmidt coefficients exceed 1/3 (strictly).

    Symmetric under permutations; the boundary alpha_i = 1/3 is inadmissible
    because mu_0 or mu_2 vanish there.
    """
    return int(np.sum(alpha.as_array() > 1.0 / 3.0)) >= 2


def canonical_relabeling(alpha: SchmidtVector) -> tuple[SchmidtVector, tuple[int, int, int]]:
    """Permute basis labels so the two coefficients above 1/3 sit at
    positions 0 and 2.  Returns (relabeled alpha, permutation) where
    permutation[new] = old.
    """
    if not coverage_predicate(alpha):
        raise CoveragePredicateError(
            "coverage predicate failed: need at least two Schmidt coefficients > 1/3"
        )
    a = alpha.as_array()
    if a[0] > 1.0 / 3.0 and a[2] > 1.0 / 3.0:
        perm = (0, 1, 2)
    else:
        order = np.argsort(a)  # ascending; the two largest go to slots 0 and 2
        perm = (int(order[2]), int(order[0]), int(order[1]))
    relabeled = SchmidtVector(a[perm[0]], a[perm[1]], a[perm[2]])
    return relabeled, perm


def build_extremal_povm(alpha: SchmidtVector) -> tuple[Povm, ExtremalPovmParams]:
    """Construct the extremal nine-outcome POVM R_a = lambda_a |v_a><v_a|.

    Outcome 0 projects on |0>, outcome 8 on |2>, and outcomes 1..7 share a
    common weight and seventh-root-of-unity phase vectors; requires
    alpha_0 > 1/3 and alpha_2 > 1/3 (canonical labeling).
    """
    a = alpha.as_array()
    if not (a[0] > 1.0 / 3.0 and a[2] > 1.0 / 3.0):
        raise CoveragePredicateError(
            f"construction needs alpha_0 > 1/3 and alpha_2 > 1/3, got {tuple(a)}"
        )
    lam_first = 1.0 / (9.0 * a[0] ** 2)
    lam_last = 1.0 / (9.0 * a[2] ** 2)
    lam_mid = (3.0 - lam_first - lam_last) / 7.0
    mu = (
        np.sqrt((1.0 - lam_first) / (7.0 * lam_mid)),
        np.sqrt(1.0 / (7.0 * lam_mid)),
        np.sqrt((1.0 - lam_last) / (7.0 * lam_mid)),
    )
    params = ExtremalPovmParams(
        lambda_first=lam_first,
        lambda_mid=lam_mid,
        lambda_last=lam_last,
        mu=(float(mu[0]), float(mu[1]), float(mu[2])),
    )
    e0 = np.zeros(3, dtype=complex)
    e0[0] = 1.0
    e2 = np.zeros(3, dtype=complex)
    e2[2] = 1.0
    elements = [lam_first * np.outer(e0, e0.conj())]
    for outcome in range(1, 8):
        v = np.array(
            [
                mu[0],
                mu[1] * np.exp(2j * np.pi * (outcome - 1) / 7.0),
                mu[2] * np.exp(6j * np.pi * (outcome - 1) / 7.0),
            ],
            dtype=complex,
        )
        elements.append(lam_mid * np.outer(v, v.conj()))
    elements.append(lam_last * np.outer(e2, e2.conj()))
    return Povm(elements=tuple(elements)), params


def validate_povm(povm: Povm) -> dict[str, bool]:
    """Validation flags: PSD elements, completeness, rank-one elements, and
    linear independence of the nine vectorized elements (Gram rank 9)."""
    psd = all(np.linalg.eigvalsh((e + dagger(e)) / 2).min() >= -1e-10 for e in povm.elements)
    complete = np.abs(povm.total() - np.eye(3)).max() <= 1e-10
    rank_one = True
    for e in povm.elements:
        eigs = np.sort(np.linalg.eigvalsh((e + dagger(e)) / 2))
        if eigs[-2] > 1e-10:
            rank_one = False
            break
    vecs = np.array([e.reshape(-1) for e in povm.elements])
    gram = vecs @ vecs.conj().T
    sv = np.linalg.svd(gram, compute_uv=False)
    lin_independent = bool(sv.min() > 1e-8 * sv.max())
    return {
        "psd": bool(psd),
        "complete": bool(complete),
        "rank_one": bool(rank_one),
        "lin_independent": lin_independent,
    }


def equal_probability_check(
    povm: Povm, alpha: SchmidtVector, tol: float = 1e-10
) -> tuple[bool, np.ndarray]:
    """Check Tr[R_a rho_A] = 1/9 for every outcome; returns (ok, values)."""
    rho = reduced_state(alpha)
    values = np.array([np.trace(e @ rho).real for e in povm.elements])
    return bool(np.abs(values - 1.0 / 9.0).max() <= tol), values


# ---------------------------------------------------------------------------
# Operator-basis expansion and reconstruction
# ---------------------------------------------------------------------------


def expansion_coefficients(povm: Povm, alpha: SchmidtVector) -> np.ndarray:
    """Coefficient table r[a, p, q] = <psi(alpha)| R_a x W_pq |psi(alpha)>,
    computed as Tr[(P R_a P)^T X^p Z^q]."""
    p, _ = schmidt_filter(alpha)
    table = np.zeros((9, 3, 3), dtype=complex)
    for a, elem in enumerate(povm.elements):
        core = (p @ elem @ p).T
        for pp in range(3):
            for qq in range(3):
                table[a, pp, qq] = np.trace(core @ weyl(pp, qq))
    return table


def reconstruct_from_coefficients(table: np.ndarray, alpha: SchmidtVector) -> Povm:
    """Invert :func:`expansion_coefficients`:

        R_a = (1/3) sum_kl r[a,k,l] P^{-1} (X^k Z^l)^* P^{-1}

    The 1/3 is the dual-basis normalization Tr[(X^k Z^l)^dag X^p Z^q] = 3 dd.
    """
    _, pinv = schmidt_filter(alpha)
    basis = [[pinv @ weyl(k, l).conj() @ pinv for l in range(3)] for k in range(3)]
    elements = []
    for a in range(9):
        m = sum(table[a, k, l] * basis[k][l] for k in range(3) for l in range(3)) / 3.0
        elements.append(m)
    return Povm(elements=tuple(elements))


def povm_to_json(povm: Povm, alpha: SchmidtVector, params: ExtremalPovmParams) -> dict:
    """JSON-serializable POVM export; complex entries become [re, im] pairs."""
    return {
        "alpha": [float(v) for v in alpha.as_array()],
        "elements": [
            [[[float(z.real), float(z.imag)] for z in row] for row in e] for e in povm.elements
        ],
        "params": {
            "lambda_first": params.lambda_first,
            "lambda_mid": params.lambda_mid,
            "lambda_last": params.lambda_last,
            "mu": list(params.mu),
        },
    }


def povm_from_json(obj: dict) -> tuple[Povm, SchmidtVector]:
    alpha = SchmidtVector.from_iterable(obj["alpha"])
    elements = tuple(
        np.array([[complex(z[0], z[1]) for z in row] for row in e]) for e in obj["elements"]
    )
    return Povm(elements=elements), alpha


# ---------------------------------------------------------------------------
# Random Schmidt vectors and Monte Carlo coverage
# ---------------------------------------------------------------------------


def sample_schmidt(rng: np.random.Generator) -> SchmidtVector:
    """One Schmidt vector with squared coefficients uniform on the 2-simplex."""
    while True:
        x = rng.dirichlet((1.0, 1.0, 1.0))
        a = np.sqrt(x)
        if a.min() >= 1e-6:
            return SchmidtVector(float(a[0]), float(a[1]), float(a[2]))


def sample_admissible_schmidt(
    rng: np.random.Generator, floor: float = 0.0
) -> SchmidtVector:
    """Rejection-sample a Schmidt vector passing the coverage predicate,
    optionally with all coefficients at least ``floor``."""
    while True:
        alpha = sample_schmidt(rng)
        if alpha.as_array().min() >= floor and coverage_predicate(alpha):
            return alpha


def coverage_count(n: int, rng: np.random.Generator, chunk: int = 1_000_000) -> int:
    """Number out of ``n`` uniform-simplex samples whose Schmidt vector passes
    the coverage predicate; vectorized in chunks."""
    hits = 0
    remaining = n
    while remaining > 0:
        m = min(remaining, chunk)
        x = rng.dirichlet((1.0, 1.0, 1.0), size=m)
        hits += int(np.count_nonzero(np.sum(x > 1.0 / 9.0, axis=1) >= 2))
        remaining -= m
    return hits


def monte_carlo_coverage(n: int, rng: np.random.Generator) -> tuple[float, float]:
    """Coverage fraction over ``n`` samples and its binomial 95% half-width."""
    if n < 1:
        raise ValueError("need at least one sample")
    hits = coverage_count(n, rng)
    frac = hits / n
    halfwidth = 1.96 * np.sqrt(max(frac * (1.0 - frac), 1e-300) / n)
    return float(frac), float(halfwidth)


def haar_coverage_fraction(n: int, rng: np.random.Generator, chunk: int = 250_000) -> float:
    """Coverage fraction when the two-qutrit state is Haar random (squared
    Schmidt coefficients then follow the Marchenko-type 3x3 trace measure).
    Reported alongside the simplex figure; it does not match 25/27."""
    hits = 0
    remaining = n
    while remaining > 0:
        m = min(remaining, chunk)
        g = rng.standard_normal((m, 3, 3)) + 1j * rng.standard_normal((m, 3, 3))
        w = g @ np.conj(np.swapaxes(g, 1, 2))
        x = np.linalg.eigvalsh(w)
        x = x / x.sum(axis=1, keepdims=True)
        hits += int(np.count_nonzero(np.sum(x > 1.0 / 9.0, axis=1) >= 2))
        remaining -= m
    return hits / n
