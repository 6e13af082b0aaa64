import json
import subprocess
import sys

import numpy as np
import pytest

from dashchain import cli
from dashchain.analysis import decide, make_counterexample_n3
from dashchain.chain_model import ChainSpec, assemble_state_space, load_spec
from dashchain.dynamics import min_energy_control, simulate


@pytest.fixture
def write_spec(tmp_path):
    def _write(masses, stiffness, damping, name="spec.json"):
        path = tmp_path / name
        path.write_text(json.dumps({"masses": masses, "stiffness": stiffness, "damping": damping}))
        return str(path)
    return _write


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_proportional(capsys, write_spec):
    path = write_spec([1, 2, 3], [1, 2], [2, 4])
    code, out, _ = _run(capsys, "analyze", path)
    assert code == 0
    data = json.loads(out)
    assert data["proportional"] is True and data["controllable_observable"] is True
    assert data == decide(load_spec(path)).to_dict()


def test_counterexample_then_analyze(capsys, tmp_path):
    out_path = tmp_path / "ce.json"
    code, _, _ = _run(capsys, "counterexample", "--m", "1,1,1", "--k1", "1", "--c1", "1", "--c2", "1",
                      "-o", str(out_path))
    assert code == 0
    data = json.loads(out_path.read_text())
    assert data["stiffness"] == ["1", "1/2"]
    assert data["counterexample"]["k2"] == "1/2"
    assert data["counterexample"]["common_root"] == "-1"
    code, out, _ = _run(capsys, "analyze", "--spec", str(out_path))
    assert code == 3
    verdict = json.loads(out)
    assert verdict["common_roots"] == ["-1"] and verdict["gcd"] == "z + 1"


def test_counterexample_rejects_negative_stiffness(capsys):
    code, _, err = _run(capsys, "counterexample", "--m", "1,1,1", "--k1", "1", "--c1", "1", "--c2", "1/4")
    assert code == 1 and "DerivedStiffnessNonPositive" in err


def test_counterexample_seeded_deterministic(capsys):
    a = _run(capsys, "counterexample", "--seed", "7")
    b = _run(capsys, "counterexample", "--seed", "7")
    assert a == b and a[0] == 0


def test_nonproportional(capsys):
    code, out, _ = _run(capsys, "counterexample", "--nonproportional", "--m", "1,1,1", "--c1", "1", "--c2", "1")
    assert code == 0
    assert json.loads(out)["stiffness"] == ["1", "2"]


def test_polys_text_and_json(capsys, write_spec):
    path = write_spec([1, 1], [1], [1])
    code, out, _ = _run(capsys, "polys", path)
    assert code == 0
    assert out.splitlines()[0] == "char_poly: z^4 + 2*z^3 + 2*z^2"
    assert out == cli.polys_text(load_spec(path))
    code, out, _ = _run(capsys, "polys", path, "--format", "json")
    assert json.loads(out)["adjoint_roots"] == ["-1"]


def test_simulate_matches_library(capsys, write_spec):
    path = write_spec([1, 1], [1], [1])
    code, out, _ = _run(capsys, "simulate", path, "--z0", "1,-1,0,0", "--horizon", "0.5", "--input", "const:2")
    assert code == 0
    lib = simulate(assemble_state_space(load_spec(path)), [1, -1, 0, 0], 2.0, 0.5, 1e-3).to_csv()
    assert out == lib


def test_simulate_bad_horizon(capsys, write_spec):
    code, _, err = _run(capsys, "simulate", "--spec", write_spec([1, 1], [1], [1]), "--horizon", "0")
    assert code == 1 and err.count("\n") == 1


def test_usage_errors(capsys, tmp_path):
    assert _run(capsys, "analyze")[0] == 1
    assert _run(capsys, "frobnicate")[0] == 1
    assert _run(capsys, "analyze", str(tmp_path / "missing.json"))[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text('{"masses": [1, 0], "stiffness": [1], "damping": [1]}')
    code, _, err = _run(capsys, "analyze", str(bad))
    assert code == 1 and "NonPositiveMass" in err


def test_control_csv_and_summary(capsys, write_spec):
    path = write_spec([1, 1], [1], [1])
    code, out, _ = _run(capsys, "control", path, "--target", "1,0,0,0")
    assert code == 0
    plan = min_energy_control(assemble_state_space(load_spec(path)), np.zeros(4), [1, 0, 0, 0])
    assert out == plan.to_csv()
    code, out, _ = _run(capsys, "control", path, "--target", "1,0,0,0", "--format", "json")
    assert json.loads(out)["terminal_error"] < 1e-4


def test_control_counterexample_exit_1(capsys, tmp_path):
    path = tmp_path / "ce.json"
    path.write_text(json.dumps(make_counterexample_n3((1, 1, 1), 1, 1, 1).spec.to_dict()))
    code, _, err = _run(capsys, "control", str(path), "--target", "1,1,1,0,0,0", "--horizon", "1")
    assert code == 1 and "NotControllable" in err


def test_observe(capsys, write_spec):
    path = write_spec([1, 1], [1], [1])
    code, out, _ = _run(capsys, "observe", path, "--z0", "1,-1,0.5,0", "--horizon", "3", "--samples", "12")
    assert code == 0
    assert json.loads(out)["relative_error"] < 1e-6


def test_quarter_car(capsys):
    code, out, _ = _run(capsys, "quarter-car", "--road", "step:0.05:0.5", "--c1", "0",
                        "--z0", "0.01,0,0,0", "--horizon", "1", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["relative_error"] < 1e-6 and data["chain_controllable_observable"]


def test_quarter_car_bad_road(capsys):
    assert _run(capsys, "quarter-car", "--road", "cobbles", "--horizon", "0.1")[0] == 1


def test_module_entry_point(write_spec):
    path = write_spec([1, 2], [3], [4])
    proc = subprocess.run([sys.executable, "-m", "dashchain", "analyze", path],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["controllable_observable"] is True


def test_output_file_deterministic(capsys, write_spec, tmp_path):
    path = write_spec([1, 2, 1], [1, 2], [1, "1/2"])
    outs = []
    for i in range(2):
        target = tmp_path / f"traj{i}.csv"
        assert _run(capsys, "simulate", path, "--z0", "0,0,0,1,0,0", "--horizon", "0.2", "-o", str(target))[0] == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]


def test_spec_roundtrip_through_to_dict(tmp_path):
    spec = ChainSpec((1, 2, 3), ("1/3", 2), (0, "7/2"))
    path = tmp_path / "rt.json"
    path.write_text(json.dumps(spec.to_dict()))
    assert load_spec(path) == spec
