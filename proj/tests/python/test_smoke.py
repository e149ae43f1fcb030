import json
import os
import subprocess

import numpy as np
import pytest

import whf


def scalar(v):
    return np.array([[v]], dtype=complex)


def monomial():
    return whf.Realization(scalar(0), A=scalar(0), B=scalar(1), C=scalar(1))


def inverse_monomial():
    return whf.Realization(scalar(0), alpha=scalar(0), beta=scalar(1), gamma=scalar(1))


def test_evaluate_monomials():
    assert monomial()(1j)[0, 0] == pytest.approx(1j)
    assert inverse_monomial()(2.0)[0, 0] == pytest.approx(0.5)


def test_scalar_indices():
    assert whf.indices(monomial())["positives"] == [1]
    assert whf.indices(inverse_monomial())["negatives"] == [1]
    r = whf.indices(whf.Realization(np.eye(3, dtype=complex)))
    assert r["zeros"] == 3
    assert r["flags"] == []


def test_generated_problem_round_trip():
    r, truth = whf.generate(2, [-1, 2], state_plus=2, state_minus=1, seed=3)
    assert truth == [-1, 2]
    res = whf.verify(r)
    assert res["indices"] == truth
    assert res["passed"]
    assert res["winding"] == 1
    assert whf.winding_number(r) == 1
    assert res["checks"]["dss_product"]["status"] == "pass"


def test_factor_shapes():
    r, _ = whf.generate(2, [0, 1], state_plus=1, state_minus=1, seed=4)
    f = whf.factor(r)
    v, w = f["V"], f["W"]
    assert f["X"].shape == (v["A"].shape[0], w["A"].shape[0])
    sysv = np.block([[v["A"], v["B"]], [v["C"], v["D"]]])
    assert np.allclose(sysv.conj().T @ sysv, np.eye(sysv.shape[0]), atol=1e-9)
    z = np.exp(0.3j)
    xi = f["xi"](z)
    assert np.allclose(xi.conj().T @ xi, np.eye(2), atol=1e-9)


def test_json_round_trip(tmp_path):
    r, _ = whf.generate(1, [2], state_plus=1, seed=5)
    path = str(tmp_path / "r.json")
    whf.save(path, r)
    back = whf.load(path)
    assert np.allclose(back(0.5j), r(0.5j))
    assert json.loads(r.to_json())["m"] == 1
    assert whf.Realization.from_json(r.to_json()).n_plus == r.n_plus


def test_errors_carry_codes():
    with pytest.raises(whf.WhfError) as info:
        whf.indices(whf.Realization(scalar(1), A=scalar(1), B=scalar(1), C=scalar(1)))
    assert info.value.code == "UnstableStateMatrix"
    assert info.value.validation
    with pytest.raises(whf.WhfError) as info:
        whf.indices(whf.Realization(scalar(1), A=scalar(0), B=scalar(1), C=scalar(1)))
    assert info.value.stage == "solve_dare"
    with pytest.raises(whf.WhfError):
        whf.Realization(np.eye(2, dtype=complex), A=scalar(0), B=scalar(1))


@pytest.mark.skipif("WHF_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_generate_and_indices(tmp_path):
    cli = os.environ["WHF_CLI"]
    out = tmp_path / "gen"
    subprocess.run(
        [cli, "generate", "--m", "2", "--indices", "-2,1", "--seed", "9",
         "--state-plus", "1", "--state-minus", "2", "--out", str(out)],
        check=True, capture_output=True)
    proc = subprocess.run([cli, "indices", str(out / "problem.json"), "--json"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    result = json.loads(proc.stdout)
    assert result["negatives"] == [2]
    assert result["positives"] == [1]
