import json

import numpy as np
import pytest

from cstarstat.cli import main
from cstarstat.algebra import pauli_basis
from cstarstat.serialize import element_to_obj, state_to_obj
from cstarstat.state_space import State

S0, S1, S2, S3 = pauli_basis()


def write_config(tmp_path, name, cfg):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def delta_povm_obj():
    return {
        "spec": {"block_dims": [1, 1]},
        "effects": [
            {"blocks": [[[1.0, 0.0]], [[0.0, 0.0]]]},
            {"blocks": [[[0.0, 0.0]], [[1.0, 0.0]]]},
        ],
        "labels": ["heads", "tails"],
    }


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_metric_quantum_golden_value(tmp_path, capsys):
    cfg = write_config(tmp_path, "m.json", {"model": {"type": "qubit_dephasing"}})
    code, out, err = run(capsys, ["metric", "--config", cfg, "--point", "1,1"])
    assert code == 0 and err == ""
    report = json.loads(out)
    mat = np.array(report["results"][0]["matrix"])
    assert mat[1, 1] == pytest.approx(1.0 / (np.e ** 2 - 1.0), abs=1e-7)
    assert mat[0, 0] == pytest.approx(np.exp(-2.0) + 1.0 / (np.e ** 2 - 1.0), abs=1e-7)


def test_metric_grid_constant(tmp_path, capsys):
    cfg = write_config(tmp_path, "m.json", {"model": {"type": "qubit_pure"}})
    code, out, _ = run(capsys, ["metric", "--config", cfg, "--grid=-1:1:5"])
    assert code == 0
    report = json.loads(out)
    assert len(report["results"]) == 5
    for entry in report["results"]:
        assert entry["matrix"][0][0] == pytest.approx(1.0, abs=1e-8)


def test_metric_classical_requires_povm(tmp_path, capsys):
    cfg = write_config(tmp_path, "m.json", {"model": {"type": "qubit_pure"}})
    code, out, err = run(
        capsys, ["metric", "--config", cfg, "--point", "0", "--kind", "classical"]
    )
    assert code == 2
    assert out == ""
    assert "schema error" in err


def test_metric_domain_violation(tmp_path, capsys):
    cfg = write_config(tmp_path, "m.json", {"model": {"type": "qubit_dephasing"}})
    code, _, err = run(capsys, ["metric", "--config", cfg, "--point=-1,1"])
    assert code == 3
    assert "domain error" in err


def test_malformed_config(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = run(capsys, ["metric", "--config", str(path), "--point", "0"])
    assert code == 2


def test_sld_report(tmp_path, capsys):
    cfg = write_config(tmp_path, "m.json", {"model": {"type": "qubit_dephasing"}})
    code, out, _ = run(
        capsys, ["sld", "--config", cfg, "--point", "1,1", "--direction", "0,1"]
    )
    assert code == 0
    report = json.loads(out)
    assert report["gauge_dim"] == 1
    assert report["residual"] < 1e-10
    flat = report["element"]["blocks"][0]
    mat = np.array([complex(re, im) for re, im in flat]).reshape(2, 2)
    traceless = mat - np.trace(mat) / 2 * np.eye(2)
    expected = -(1.0 / (2 * np.sinh(1.0))) * (
        np.cos(1.0) * S1.blocks[0] - np.sin(1.0) * S2.blocks[0]
    )
    assert np.allclose(traceless, expected, atol=1e-6)


def test_sld_zero_direction(tmp_path, capsys):
    cfg = write_config(tmp_path, "m.json", {"model": {"type": "qubit_pure"}})
    code, out, _ = run(
        capsys, ["sld", "--config", cfg, "--point", "0", "--direction", "0"]
    )
    assert code == 0
    assert json.loads(out)["note"] == "zero tangent"


def test_sld_inconsistent_tangent_exits_numerical(tmp_path, capsys):
    pure = State(0.5 * (S0 + S1))
    cfg = write_config(
        tmp_path,
        "t.json",
        {
            "state": state_to_obj(pure),
            "tangent": {"base": state_to_obj(pure), "rep": element_to_obj(S1)},
        },
    )
    code, _, err = run(capsys, ["sld", "--config", cfg])
    assert code == 4
    assert "numerical failure" in err


def test_geodesic_report(tmp_path, capsys):
    cfg = write_config(tmp_path, "m.json", {"model": {"type": "qubit_pure"}})
    code, out, _ = run(
        capsys,
        ["geodesic", "--config", cfg, "--point", "0", "--direction", "1",
         "--grid=-2:2:11"],
    )
    assert code == 0
    report = json.loads(out)
    assert len(report["results"]) == 11
    for entry in report["results"]:
        assert entry["min_eigenvalue"] >= -1e-9
        assert entry["trace"] == pytest.approx(1.0, abs=1e-12)


def test_bounds_efficient_bernoulli(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        "b.json",
        {
            "model": {"type": "simplex_affine", "n": 2},
            "povm": delta_povm_obj(),
            "estimator": {"values": [[1.0], [0.0]]},
            "cost": {"kind": "euclidean"},
        },
    )
    code, out, _ = run(capsys, ["bounds", "--config", cfg, "--point", "0.3"])
    assert code == 0
    report = json.loads(out)
    assert report["summary"] == "pass"
    assert report["covariance"][0][0] == pytest.approx(0.21, abs=1e-10)
    for gap in report["covector_gaps"]:
        assert abs(gap["cr_gap"]) <= 1e-8


def test_bounds_nonstationary_exits_5(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        "b.json",
        {
            "model": {"type": "simplex_affine", "n": 2},
            "povm": delta_povm_obj(),
            "estimator": {"values": [[1.0], [0.3]]},
            "cost": {"kind": "euclidean"},
        },
    )
    code, _, err = run(capsys, ["bounds", "--config", cfg, "--point", "0.5"])
    assert code == 5
    assert "non-stationary" in err


def test_bounds_rounds_floor(tmp_path, capsys):
    povm_obj = {
        "spec": {"block_dims": [2]},
        "effects": [
            element_to_obj(0.5 * (S0 + S2)),
            element_to_obj(0.5 * (S0 - S2)),
        ],
    }
    cfg = write_config(
        tmp_path,
        "b.json",
        {"model": {"type": "qubit_pure"}, "povm": povm_obj},
    )
    code, out, _ = run(
        capsys, ["bounds", "--config", cfg, "--point", "0", "--rounds", "3"]
    )
    assert code == 0
    report = json.loads(out)
    assert report["rounds"] == 3
    assert report["round_floors"][0] == pytest.approx(1.0 / 3.0, abs=1e-8)
    assert report["quantum_metric"][0][0] == pytest.approx(3.0, abs=1e-6)


def test_check_passes_and_is_deterministic(tmp_path, capsys):
    code1, out1, _ = run(capsys, ["check", "--seed", "42", "--trials", "40"])
    assert code1 == 0
    report = json.loads(out1)
    assert report["passes"] is True
    assert {c["name"] for c in report["checks"]} == {
        "kadison",
        "majorization",
        "nround_scaling",
        "unitary_invariance",
        "geodesic_validity",
    }
    code2, out2, _ = run(capsys, ["check", "--seed", "42", "--trials", "40"])
    assert out2 == out1


def test_check_faulty_povm_fails(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {"inject_faulty_povm": True})
    code, out, _ = run(capsys, ["check", "--config", cfg, "--seed", "7", "--trials", "10"])
    assert code == 1
    report = json.loads(out)
    kadison = next(c for c in report["checks"] if c["name"] == "kadison")
    assert not kadison["passes"]
    assert report["passes"] is False


def test_out_file(tmp_path, capsys):
    cfg = write_config(tmp_path, "m.json", {"model": {"type": "qubit_pure"}})
    out_path = tmp_path / "report.json"
    code, out, _ = run(
        capsys,
        ["metric", "--config", cfg, "--point", "0.5", "--out", str(out_path)],
    )
    assert code == 0
    assert out == ""
    report = json.loads(out_path.read_text())
    assert report["results"][0]["matrix"][0][0] == pytest.approx(1.0, abs=1e-8)
