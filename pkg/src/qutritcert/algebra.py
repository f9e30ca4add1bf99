"""Qutrit operator algebra: phases, shift/clock operators, MUB observables,
reference states and the Schmidt filter.

Everything here is dense 3x3 (or 9x9 for bipartite objects) complex numpy.
All constructors return fresh arrays; treat them as immutable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: primitive third root of unity, omega = exp(2*pi*i/3)
OMEGA = np.exp(2j * np.pi / 3)

#: minimum admissible Schmidt coefficient; below this the filter inverse
#: and the steering coefficients blow up, so we reject instead.
EPS_DEGENERACY = 1e-6


class DegenerateSchmidtError(ValueError):
    """A Schmidt coefficient is too close to zero for the construction."""


def omega_power(n: int) -> complex:
    """exp(2*pi*i*n/3), period 3 in ``n``."""
    return complex(np.exp(2j * np.pi * (n % 3) / 3))


def shift_X() -> np.ndarray:
    """Cyclic shift on C^3: |i> -> |i+1 mod 3>."""
    X = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        X[(i + 1) % 3, i] = 1.0
    return X


def clock_Z() -> np.ndarray:
    """Diagonal clock operator diag(1, omega, omega^2)."""
    return np.diag([omega_power(i) for i in range(3)]).astype(complex)


def weyl(p: int, q: int) -> np.ndarray:
    """Weyl-Heisenberg operator X^p Z^q with p, q taken mod 3."""
    X, Z = shift_X(), clock_Z()
    return np.linalg.matrix_power(X, p % 3) @ np.linalg.matrix_power(Z, q % 3)


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def trace(m: np.ndarray) -> complex:
    return complex(np.trace(m))


def matmul(*ms: np.ndarray) -> np.ndarray:
    out = ms[0]
    for m in ms[1:]:
        out = out @ m
    return out


def hermitian_eigs(m: np.ndarray, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.

    Raises ValueError if ``m`` deviates from Hermiticity by more than ``tol``
    in max norm.
    """
    if np.abs(m - dagger(m)).max() > tol:
        raise ValueError("hermitian_eigs requires a Hermitian matrix")
    vals, vecs = np.linalg.eigh(m)
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]


# ---------------------------------------------------------------------------
# MUB observables and outcome relabeling
# ---------------------------------------------------------------------------

#: (p, q) exponents of the four MUB observables {Z, X, XZ, XZ^2}
_MUB_PQ = ((0, 1), (1, 0), (1, 1), (1, 2))


def _xzq_eigenvector(q: int, b: int) -> np.ndarray:
    """Closed-form unit eigenvector of X Z^q with eigenvalue omega^b.

    The amplitudes follow the recursion c_m = omega^{-b} omega^{q(m-1)} c_{m-1},
    anchored at c_0 = 1; each amplitude is a pure phase so the norm is sqrt(3).
    """
    c = np.ones(3, dtype=complex)
    for m in (1, 2):
        c[m] = omega_power(-b) * omega_power(q * (m - 1)) * c[m - 1]
    return c / np.sqrt(3)


def mub_observable(r: int) -> tuple[np.ndarray, list[np.ndarray]]:
    """The r-th MUB observable M_r in {Z, X, XZ, XZ^2} and its eigenprojectors.

    Returns (M_r, [Pi_0, Pi_1, Pi_2]) where Pi_b is the rank-one projector
    onto the eigenvector with eigenvalue omega^b (outcome b).
    """
    if r not in range(4):
        raise ValueError(f"MUB index must be 0..3, got {r}")
    p, q = _MUB_PQ[r]
    m = weyl(p, q)
    if r == 0:
        projectors = [np.diag([1.0 + 0j if i == b else 0j for i in range(3)]) for b in range(3)]
    else:
        projectors = []
        for b in range(3):
            v = _xzq_eigenvector(q, b)
            projectors.append(np.outer(v, v.conj()))
    return m, projectors


#: phase exponents s_r of the relabeled observables omega^{s_r} M_r^dag,
#: chosen so the result is again a bare Weyl product
_RELABEL_PHASE = (0, 0, 2, 1)


def relabel_conjugate(r: int) -> np.ndarray:
    """Relabeled observable omega^{s_r} M_r^dag, one of {Z^2, X^2, X^2Z^2, X^2Z}.

    Built from the eigenprojectors of M_r via sum_b omega^{-b+s_r} Pi_r^(b),
    which equals the corresponding Weyl product entrywise.
    """
    _, projectors = mub_observable(r)
    s = _RELABEL_PHASE[r]
    return sum(omega_power(-b + s) * projectors[b] for b in range(3))


# ---------------------------------------------------------------------------
# States and the Schmidt filter
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SchmidtVector:
    """Three strictly positive Schmidt coefficients with unit square sum."""

    a0: float
    a1: float
    a2: float

    def __post_init__(self) -> None:
        vals = (self.a0, self.a1, self.a2)
        if min(vals) < EPS_DEGENERACY:
            raise DegenerateSchmidtError(
                f"Schmidt coefficients must all be >= {EPS_DEGENERACY}, got {vals}"
            )
        norm = sum(v * v for v in vals)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"Schmidt coefficients must satisfy sum(a_i^2)=1, got {norm}")

    @classmethod
    def from_iterable(cls, values, normalize: bool = False) -> "SchmidtVector":
        v = np.asarray(list(values), dtype=float)
        if v.shape != (3,):
            raise ValueError("expected exactly three Schmidt coefficients")
        if normalize:
            n = np.linalg.norm(v)
            if n == 0:
                raise ValueError("cannot normalize the zero vector")
            v = v / n
        return cls(float(v[0]), float(v[1]), float(v[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1, self.a2], dtype=float)

    @classmethod
    def maximally_entangled(cls) -> "SchmidtVector":
        s = 1.0 / np.sqrt(3.0)
        return cls(s, s, s)


def max_entangled() -> np.ndarray:
    """The maximally entangled two-qutrit ket (1/sqrt3) sum_i |ii>."""
    return partial_state(SchmidtVector.maximally_entangled())


def partial_state(alpha: SchmidtVector) -> np.ndarray:
    """The two-qutrit ket sum_i alpha_i |i>_A |i>_B (index ordering 3*i_A + i_B)."""
    a = alpha.as_array()
    psi = np.zeros(9, dtype=complex)
    for i in range(3):
        psi[3 * i + i] = a[i]
    return psi


def reduced_state(alpha: SchmidtVector) -> np.ndarray:
    """Alice's reduced density matrix diag(a0^2, a1^2, a2^2)."""
    return np.diag(alpha.as_array() ** 2).astype(complex)


def schmidt_filter(alpha: SchmidtVector) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal filter P = sum_i alpha_i |i><i| and its exact inverse."""
    a = alpha.as_array()
    return np.diag(a).astype(complex), np.diag(1.0 / a).astype(complex)
