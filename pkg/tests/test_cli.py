import json

import numpy as np
import pytest
from click.testing import CliRunner

from qutritcert.bell import BETA_L, BETA_Q
from qutritcert.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def test_bounds(runner):
    result = runner.invoke(main, ["bounds", "--json"])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["pass"] is True
    assert payload["beta_L_enumerated_w1"] == pytest.approx(BETA_L, abs=1e-12)
    assert payload["beta_L_enumerated_w2"] == pytest.approx(BETA_L, abs=1e-12)
    assert payload["w1_value"] == pytest.approx(BETA_Q, abs=1e-12)
    assert payload["w2_value"] == pytest.approx(BETA_Q, abs=1e-12)


def test_certify_maximally_entangled(runner):
    a = 1.0 / np.sqrt(3.0)
    result = runner.invoke(main, ["certify", "--alpha", str(a), str(a), str(a), "--json"])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["pass"] is True
    assert payload["randomness"]["G"] == pytest.approx(1.0 / 9.0, abs=1e-12)
    assert payload["randomness"]["Hmin_bits"] == pytest.approx(2 * np.log2(3.0), abs=1e-10)
    assert payload["steering"]["quantum_value"] == pytest.approx(3.0, abs=1e-9)


def test_certify_partially_entangled(runner):
    result = runner.invoke(
        main, ["certify", "--alpha", "0.6", "0.57", "0.5616048", "--json"]
    )
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["pass"] is True


def test_certify_out_of_coverage(runner):
    result = runner.invoke(main, ["certify", "--alpha", "0.998", "0.0447", "0.0447"])
    assert result.exit_code == 2
    assert "coverage predicate" in result.output


def test_certify_degenerate_alpha(runner):
    result = runner.invoke(main, ["certify", "--alpha", "1", "0", "0"])
    assert result.exit_code == 2


def test_coverage_small_run_reproducible(runner):
    args = ["coverage", "--samples", "10", "--seed", "3", "--workers", "1", "--json"]
    first = runner.invoke(main, args)
    second = runner.invoke(main, args)
    assert first.exit_code == 0
    assert first.output == second.output
    payload = json.loads(first.output)
    assert payload["samples"] == 10
    assert 0.0 <= payload["fraction"] <= 1.0


def test_coverage_matches_analytic(runner):
    result = runner.invoke(
        main, ["coverage", "--samples", "100000", "--seed", "1", "--workers", "2", "--json"]
    )
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["fraction"] == pytest.approx(25.0 / 27.0, abs=0.01)


def test_coverage_rejects_zero_samples(runner):
    result = runner.invoke(main, ["coverage", "--samples", "0"])
    assert result.exit_code == 2


def test_povm_export(runner, tmp_path):
    out = tmp_path / "povm.json"
    a = 1.0 / np.sqrt(3.0)
    result = runner.invoke(
        main, ["povm", "--alpha", str(a), str(a), str(a), "--out", str(out), "--json"]
    )
    assert result.exit_code == 0
    payload = json.loads(out.read_text())
    assert payload["params"]["lambda_first"] == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert len(payload["elements"]) == 9
    # elements recombine to the identity
    total = np.zeros((3, 3), dtype=complex)
    for e in payload["elements"]:
        total += np.array([[complex(z[0], z[1]) for z in row] for row in e])
    assert np.abs(total - np.eye(3)).max() < 1e-10


def test_povm_relabels_noncanonical_alpha(runner):
    result = runner.invoke(main, ["povm", "--alpha", "0.2", "0.7", "0.6855655", "--json"])
    assert result.exit_code == 0
    alpha = json.loads(result.output)["alpha"]
    assert alpha[0] > 1.0 / 3.0 and alpha[2] > 1.0 / 3.0


def test_povm_bad_output_path(runner):
    a = 1.0 / np.sqrt(3.0)
    result = runner.invoke(
        main,
        ["povm", "--alpha", str(a), str(a), str(a), "--out", "/nonexistent/dir/povm.json"],
    )
    assert result.exit_code == 3


def test_simulate_self_check(runner):
    result = runner.invoke(main, ["simulate", "--alpha", "0.6", "0.57", "0.5616048", "--json"])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["w1_from_table"] == pytest.approx(BETA_Q, abs=1e-10)
    keys = {(rec["prep"], rec["j"], rec["k"]) for rec in payload["records"]}
    assert len(keys) == len(payload["records"]) == 6 * 4 + 3 * 4


def test_certify_deterministic(runner):
    args = ["certify", "--alpha", "0.6", "0.57", "0.5616048", "--seed", "11", "--json"]
    assert runner.invoke(main, args).output == runner.invoke(main, args).output


def test_unknown_tolerance_override(runner):
    result = runner.invoke(main, ["bounds", "--tol", "bogus=1e-3"])
    assert result.exit_code == 2
