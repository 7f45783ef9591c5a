import csv
import io as stdio
import json
from pathlib import Path

import numpy as np
import pytest

from mlqsl import cli, io, reports
from mlqsl.errors import DomainError, SchemaError
from mlqsl.mlbound import alpha
from mlqsl.sampling import random_degenerate_hamiltonian, random_density_matrix
from mlqsl.saturation import SaturatingSpec
from mlqsl.states import DensityMatrix

ROOT = Path(__file__).resolve().parent.parent
SAMPLES = ROOT / "samples"


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_state_json_round_trip(rng):
    rho = random_density_matrix(5, rng)
    back = io.state_from_json(json.loads(json.dumps(io.state_to_json(rho))))
    assert np.max(np.abs(back.matrix - rho.matrix)) <= 1e-15


def test_spec_json_round_trip(rng):
    H = random_degenerate_hamiltonian([2, 3], rng)
    spec = SaturatingSpec.from_levels(H, 0, 1, 0.3, weights=[0.8, 0.2], rng=rng)
    back = io.spec_from_json(json.loads(json.dumps(io.spec_to_json(spec))))
    assert back.delta == 0.3 and back.level1 == 1
    np.testing.assert_allclose(back.H.matrix, H.matrix, atol=1e-15)
    for (a0, a1), (b0, b1) in zip(spec.pairing, back.pairing):
        np.testing.assert_allclose(a0, b0, atol=1e-15)
        np.testing.assert_allclose(a1, b1, atol=1e-15)


def test_nested_rows_accepted():
    m = io.matrix_from_json({"dim": 2, "re": [[1, 2], [3, 4]]})
    np.testing.assert_array_equal(m, [[1, 2], [3, 4]])


def test_syntax_error_has_line_context(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "dim": 2,\n  "re": [1, 0, 0 1]\n}\n')
    with pytest.raises(SchemaError) as err:
        io.load_json(bad)
    assert "line 3" in str(err.value)


@pytest.mark.parametrize(
    "obj, where",
    [
        ({"re": [1]}, "$"),
        ({"dim": 2, "re": [1, 0, 0]}, "$"),
        ({"dim": "2", "re": [1, 0, 0, 1]}, "$"),
    ],
)
def test_matrix_schema_errors(obj, where):
    with pytest.raises(SchemaError) as err:
        io.matrix_from_json(obj)
    assert err.value.location == where


def test_spec_schema_error_location():
    obj = json.loads((SAMPLES / "spec_rank2.json").read_text())
    obj["pairing"][1][0] = [0, 1, 0, 0]
    with pytest.raises(SchemaError) as err:
        io.spec_from_json(obj)
    assert err.value.location == "$.pairing[1][0]"


def test_not_a_density_matrix_is_schema_error():
    with pytest.raises(SchemaError):
        io.state_from_json({"dim": 2, "re": [1, 0, 0, 1]})


def test_alpha_sweep_two_rows(capsys):
    code, out, _ = run(["alpha-sweep", "-n", 2], capsys)
    assert code == 0
    rows = list(csv.reader(stdio.StringIO(out)))
    assert rows[0] == ["delta", "z_min", "alpha"]
    assert [float(x) for x in rows[1]] == [0.0, 0.0, np.pi / 2]
    assert [float(x) for x in rows[2]] == [1.0, -1.0, 0.0]


def test_alpha_sweep_monotone_and_spot_value():
    rows = reports.alpha_sweep(1001)
    a = np.array([r[2] for r in rows])
    assert np.all(np.isfinite(a)) and np.all(np.diff(a) < 0)
    mid = rows[500]
    assert mid[0] == 0.5 and mid[2] == pytest.approx(0.41625293601185653, abs=1e-9)


def test_objective_curves_properties():
    rows = reports.objective_curves(reports.FIGURE_DELTAS, reports.CURVE_SAMPLES)
    assert len(rows) == len(reports.FIGURE_DELTAS) * (reports.CURVE_SAMPLES + 1)
    for d in reports.FIGURE_DELTAS:
        curve = [r for r in rows if r[0] == d]
        sampled = [r[2] for r in curve if not r[3]]
        (m,) = [r for r in curve if r[3]]
        assert len(sampled) == reports.CURVE_SAMPLES
        assert np.all(np.isfinite(sampled))
        assert min(sampled) >= m[2] - 1e-9
        assert m[1] < 0 and m[2] == alpha(d)


@pytest.mark.parametrize("bad", [0.0, 1.0, 1.5])
def test_objective_curves_domain(bad):
    with pytest.raises(DomainError):
        reports.objective_curves([bad], 11)


def test_objective_curves_cli_domain_exit(capsys):
    code, _, err = run(["objective-curves", "--delta", 1.0], capsys)
    assert code == 2 and "fidelity" in err


def test_qubit_sweep_header(capsys):
    code, out, _ = run(["qubit-alpha-sweep", "--purity", 0.9, "-n", 5], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "delta,purity,z_min,alpha"
    assert len(lines) == 6
    assert all(float(line.split(",")[0]) >= 0.2 - 1e-12 for line in lines[1:])


def test_validate_count_zero(capsys):
    code, out, _ = run(["validate", "--count", 0], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["schema"] == 1 and report["samples"] == 0 and report["violations"] == []


def test_validate_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(["validate", "--count", 100, "--seed", 7, "--out", path], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    report = json.loads(a.read_text())
    assert report["violations"] == [] and report["samples"] == 100
    run(["validate", "--count", 100, "--seed", 8, "--out", b], capsys)
    assert a.read_bytes() != b.read_bytes()


def test_construct_shipped_spec(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(["construct", "--spec", SAMPLES / "spec_rank2.json", "--out", out], capsys)
    assert code == 0
    payload = json.loads(out.read_text())
    rep = payload["report"]
    assert rep["saturates"] is True
    assert all(rep[k]["pass"] for k in ("condition_i", "condition_ii", "condition_iii"))
    rho = io.state_from_json(payload["state"])
    assert rho.rank == 2


def test_construct_dual(capsys):
    code, out, _ = run(["construct", "--spec", SAMPLES / "spec_rank2.json", "--dual"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["variant"] == "dual" and payload["report"]["saturates"]


def test_construct_delta_zero_vanishing_compression(capsys):
    code, out, _ = run(["construct", "--spec", SAMPLES / "spec_delta0.json"], capsys)
    assert code == 0
    rep = json.loads(out)["report"]
    assert rep["saturates"] is True
    assert rep["compression"]["vanishes"] is True and rep["compression"]["phase"] is None


def test_construct_faithful_spec_rejected(capsys):
    code, out, err = run(["construct", "--spec", SAMPLES / "spec_faithful.json"], capsys)
    assert code == 4 and out == ""
    assert "faithful" in err and "rank 3" in err


def test_construct_schema_error_exit(tmp_path, capsys):
    bad = tmp_path / "spec.json"
    bad.write_text('{"delta": 0.5,\n "level0": }')
    code, _, err = run(["construct", "--spec", bad], capsys)
    assert code == 2 and "line 2" in err


def test_check_maximally_mixed_qubit(capsys):
    argv = ["check", "--state", SAMPLES / "qubit_mixed.json", "--hamiltonian", SAMPLES / "qubit_hamiltonian.json"]
    code, out, _ = run(argv + ["--delta", 0.5, "--tau", 1.0], capsys)
    assert code == 0
    rep = json.loads(out)["report"]
    assert rep["saturates"] is False and rep["condition_ii"]["pass"] is False


def test_check_pure_plus_state_at_bound_time(capsys):
    argv = ["check", "--state", SAMPLES / "qubit_plus.json", "--hamiltonian", SAMPLES / "qubit_hamiltonian.json"]
    code, out, _ = run(argv + ["--delta", 0.0], capsys)
    assert code == 0
    rep = json.loads(out)["report"]
    assert rep["saturates"] is True and rep["tau"] == pytest.approx(np.pi)


def test_minimal_time_command(capsys):
    argv = ["minimal-time", "--state", SAMPLES / "qubit_plus.json", "--hamiltonian", SAMPLES / "qubit_hamiltonian.json"]
    code, out, _ = run(argv + ["--delta", 0.0, "--horizon", 4], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["tau"] == pytest.approx(np.pi, abs=1e-9)
    assert payload["bound"]["tau_lower"] == pytest.approx(np.pi)
    code, out, _ = run(argv + ["--delta", 0.0, "--horizon", 3], capsys)
    assert json.loads(out)["tau"] is None


def test_check_rejects_bad_state_file(tmp_path, capsys):
    bad = tmp_path / "s.json"
    bad.write_text(json.dumps({"dim": 2, "re": [0.5, 0, 0, 0.6]}))
    code, _, err = run(["check", "--state", bad, "--hamiltonian", SAMPLES / "qubit_hamiltonian.json", "--delta", 0.5], capsys)
    assert code == 2 and "schema error" in err


def test_curve_rows_mark_one_minimum_per_delta():
    rows = reports.objective_curves([0.4, 0.6], 101)
    assert sum(r[3] for r in rows) == 2


def test_density_matrix_from_sample_file():
    rho = io.state_from_json(io.load_json(SAMPLES / "qubit_plus.json"))
    assert rho.purity == pytest.approx(1.0)
    assert isinstance(rho, DensityMatrix)
