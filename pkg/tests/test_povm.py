import numpy as np
import pytest

from qutritcert import algebra as alg
from qutritcert import povm as pv


MAXENT = alg.SchmidtVector.maximally_entangled()


def _partial():
    return alg.SchmidtVector.from_iterable([0.6, 0.57, np.sqrt(1 - 0.6**2 - 0.57**2)])


def test_maxent_parameters():
    _, params = pv.build_extremal_povm(MAXENT)
    assert params.lambda_first == pytest.approx(1.0 / 3.0, abs=1e-13)
    assert params.lambda_last == pytest.approx(1.0 / 3.0, abs=1e-13)
    assert params.lambda_mid == pytest.approx(1.0 / 3.0, abs=1e-13)
    assert params.mu[0] == pytest.approx(np.sqrt(2.0 / 7.0), abs=1e-13)
    assert params.mu[1] == pytest.approx(np.sqrt(3.0 / 7.0), abs=1e-13)
    assert params.mu[2] == pytest.approx(np.sqrt(2.0 / 7.0), abs=1e-13)


def test_coverage_predicate_examples():
    assert pv.coverage_predicate(MAXENT)
    assert pv.coverage_predicate(_partial())
    skew = alg.SchmidtVector.from_iterable(
        [0.998, 0.0447, np.sqrt(1 - 0.998**2 - 0.0447**2)], normalize=True
    )
    assert not pv.coverage_predicate(skew)
    a2 = np.sqrt(1 - 2 * 0.34**2)
    assert pv.coverage_predicate(alg.SchmidtVector(0.34, 0.34, a2))


def test_predicate_permutation_symmetry():
    rng = np.random.default_rng(5)
    for _ in range(50):
        a = pv.sample_schmidt(rng).as_array()
        base = pv.coverage_predicate(alg.SchmidtVector(*a))
        for perm in ((1, 0, 2), (2, 1, 0), (1, 2, 0)):
            assert pv.coverage_predicate(alg.SchmidtVector(*a[list(perm)])) == base


def test_construction_rejects_small_first_coefficient():
    alpha = alg.SchmidtVector.from_iterable([0.3, 0.9, np.sqrt(1 - 0.09 - 0.81)])
    with pytest.raises(pv.CoveragePredicateError):
        pv.build_extremal_povm(alpha)


def test_canonical_relabeling():
    a = alg.SchmidtVector.from_iterable([0.2, 0.7, np.sqrt(1 - 0.04 - 0.49)])
    relabeled, perm = pv.canonical_relabeling(a)
    r = relabeled.as_array()
    assert r[0] > 1.0 / 3.0 and r[2] > 1.0 / 3.0
    orig = a.as_array()
    assert np.allclose(r, orig[list(perm)])
    same, perm0 = pv.canonical_relabeling(_partial())
    assert perm0 == (0, 1, 2)
    assert np.allclose(same.as_array(), _partial().as_array())


def test_validation_flags():
    for alpha in (MAXENT, _partial()):
        povm, _ = pv.build_extremal_povm(alpha)
        flags = pv.validate_povm(povm)
        assert all(flags.values()), flags


def test_validation_counterexamples():
    # the uniform POVM I/9 x9 is complete and PSD but neither rank-one nor
    # linearly independent
    uniform = pv.Povm(elements=tuple(np.eye(3, dtype=complex) / 9.0 for _ in range(9)))
    flags = pv.validate_povm(uniform)
    assert flags["psd"] and flags["complete"]
    assert not flags["rank_one"] and not flags["lin_independent"]
    # padding a projective measurement with zeros keeps rank <= 1 per element
    # but drops completeness-of-basis
    Z = alg.clock_Z()
    _, projectors = alg.mub_observable(0)
    padded = pv.Povm(
        elements=tuple(projectors) + tuple(np.zeros((3, 3), dtype=complex) for _ in range(6))
    )
    flags = pv.validate_povm(padded)
    assert flags["psd"] and flags["complete"]
    assert not flags["lin_independent"]
    assert np.allclose(padded.total(), np.eye(3))
    del Z


def test_equal_probability():
    for alpha in (MAXENT, _partial()):
        povm, _ = pv.build_extremal_povm(alpha)
        ok, values = pv.equal_probability_check(povm, alpha)
        assert ok
        assert np.abs(values - 1.0 / 9.0).max() < 1e-12


def test_expansion_identity_coefficient():
    for alpha in (MAXENT, _partial()):
        povm, _ = pv.build_extremal_povm(alpha)
        table = pv.expansion_coefficients(povm, alpha)
        assert np.abs(table[:, 0, 0] - 1.0 / 9.0).max() < 1e-12


def test_expansion_completeness_image():
    # summing the table over outcomes gives Tr[P^2 W_pq], the image of the
    # completeness relation under the filtered expansion
    alpha = _partial()
    povm, _ = pv.build_extremal_povm(alpha)
    table = pv.expansion_coefficients(povm, alpha)
    P, _ = alg.schmidt_filter(alpha)
    for p in range(3):
        for q in range(3):
            target = np.trace(P @ P @ alg.weyl(p, q).T)
            assert table[:, p, q].sum() == pytest.approx(target, abs=1e-12)


def test_expansion_roundtrip():
    rng = np.random.default_rng(11)
    for _ in range(20):
        alpha, _ = pv.canonical_relabeling(pv.sample_admissible_schmidt(rng, floor=0.05))
        povm, _ = pv.build_extremal_povm(alpha)
        table = pv.expansion_coefficients(povm, alpha)
        back = pv.reconstruct_from_coefficients(table, alpha)
        for e, f in zip(povm.elements, back.elements):
            assert np.abs(e - f).max() < 1e-10


def test_reconstruct_simple_tables():
    alpha = _partial()
    zero = pv.reconstruct_from_coefficients(np.zeros((9, 3, 3), dtype=complex), alpha)
    assert all(np.abs(e).max() < 1e-14 for e in zero.elements)
    # an identity-only table returns (1/27) P^{-2} per element
    table = np.zeros((9, 3, 3), dtype=complex)
    table[:, 0, 0] = 1.0 / 9.0
    _, pinv = alg.schmidt_filter(alpha)
    target = pinv @ pinv / 27.0
    rec = pv.reconstruct_from_coefficients(table, alpha)
    for e in rec.elements:
        assert np.abs(e - target).max() < 1e-12
    assert np.abs(rec.total() - pinv @ pinv / 3.0).max() < 1e-12


def test_identity_coefficient_is_outcome_probability():
    # r[a,0,0] equals <psi| R_a x 1 |psi> = Tr[R_a rho_A]
    alpha = _partial()
    povm, _ = pv.build_extremal_povm(alpha)
    table = pv.expansion_coefficients(povm, alpha)
    rho = alg.reduced_state(alpha)
    for a, e in enumerate(povm.elements):
        assert table[a, 0, 0] == pytest.approx(np.trace(e @ rho), abs=1e-12)


def test_json_roundtrip(tmp_path):
    import json

    alpha = _partial()
    povm, params = pv.build_extremal_povm(alpha)
    payload = pv.povm_to_json(povm, alpha, params)
    text = json.dumps(payload)
    back, alpha_back = pv.povm_from_json(json.loads(text))
    assert np.allclose(alpha_back.as_array(), alpha.as_array())
    for e, f in zip(povm.elements, back.elements):
        assert np.abs(e - f).max() < 1e-15


def test_sampler_determinism_and_mean():
    a = np.array([pv.sample_schmidt(np.random.default_rng(3)).as_array() for _ in range(1)])
    b = np.array([pv.sample_schmidt(np.random.default_rng(3)).as_array() for _ in range(1)])
    assert np.array_equal(a, b)
    rng = np.random.default_rng(9)
    squared = np.array([pv.sample_schmidt(rng).as_array() ** 2 for _ in range(4000)])
    assert np.abs(squared.mean(axis=0) - 1.0 / 3.0).max() < 0.02


def test_admissible_sampler_respects_predicate():
    rng = np.random.default_rng(13)
    for _ in range(50):
        alpha = pv.sample_admissible_schmidt(rng, floor=0.05)
        assert pv.coverage_predicate(alpha)
        assert alpha.as_array().min() >= 0.05


def test_monte_carlo_coverage_matches_analytic():
    frac, halfwidth = pv.monte_carlo_coverage(200_000, np.random.default_rng(2))
    assert abs(frac - pv.ANALYTIC_COVERAGE) < max(3 * halfwidth, 0.005)


def test_coverage_count_chunking_consistent():
    a = pv.coverage_count(25_000, np.random.default_rng(4), chunk=25_000)
    b = pv.coverage_count(25_000, np.random.default_rng(4), chunk=7_000)
    # same generator stream consumed in different chunk sizes still samples
    # the same distribution; totals agree within binomial noise
    assert abs(a - b) < 4 * np.sqrt(25_000 * (25.0 / 27.0) * (2.0 / 27.0))
