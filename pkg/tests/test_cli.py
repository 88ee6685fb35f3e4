"""Command-line front end: outputs, formats, determinism and exit codes."""

import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from mimophase import cli, lti, systems
from mimophase.exceptions import SolverError
from mimophase.lti import StateSpace, TransferMatrix


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)

    eye = np.eye(2)
    return {
        "identity": write("identity.json", np.eye(3).tolist()),
        "eblock": write("eblock.json", {"matrix": [[1, 2], [0, 1]]}),
        "pd": write("pd.json", [[16, 14], [14, 16]]),
        "lag": write("lag.json", lti.model_to_json(systems.first_order_lag(2))),
        "lead": write("lead.json", lti.model_to_json(
            TransferMatrix(np.stack([2 * eye, eye], axis=2), [1.0, 1.0]))),
        "ex31": write("ex31.json", lti.model_to_json(systems.biproper_2x2())),
        "ex32": write("ex32.json", lti.model_to_json(systems.semi_sectorial_3x3())),
        "neg": write("neg.json", lti.model_to_json(
            StateSpace([[-1.0]], [[1.0]], [[-1.0]], [[0.0]]))),
        "small": write("small.json", lti.model_to_json(lti.static_gain(0.1 * eye))),
        "bad": write("bad.json", '{"kind": "state_space",\n "A": [[1]]\n'),
        "tmp": tmp_path,
    }


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    assert code == 0, err
    return json.loads(out)


# ---------------------------------------------------------------------------
# phases


def test_phases_identity(capsys, files):
    out = run_json(capsys, "phases", files["identity"])
    assert out["phases"] == [0.0, 0.0, 0.0]


def test_phases_e_block(capsys, files):
    out = run_json(capsys, "phases", files["eblock"])
    np.testing.assert_allclose(out["phases_deg"], [90, -90], atol=1e-3)
    assert out["classification"] == "semi_sectorial"


def test_phases_positive_definite(capsys, files):
    out = run_json(capsys, "phases", files["pd"])
    np.testing.assert_allclose(out["phases"], [0, 0], atol=1e-12)
    code, text, _ = run(capsys, "phases", files["pd"])
    assert code == 0 and "phases (deg)" in text and "phases (rad)" in text


def test_degree_and_radian_outputs_agree(capsys, files):
    out = run_json(capsys, "phases", files["eblock"])
    np.testing.assert_allclose(np.radians(out["phases_deg"]), out["phases"], atol=1e-7)
    sec = run_json(capsys, "sector", files["lag"])["sweep"]
    assert abs(math.radians(sec["lo_deg"]) - sec["lo"]) < 1e-12
    assert abs(math.radians(sec["hi_deg"]) - sec["hi"]) < 1e-12


# ---------------------------------------------------------------------------
# bode


def test_bode_csv(capsys, files):
    code, out, _ = run(capsys, "bode", files["ex32"], "--grid", 600)
    assert code == 0
    rows = out.strip().splitlines()
    header = rows[0].split(",")
    assert header[0] == "omega" and len(rows) > 600
    assert all(len(r.split(",")) == len(header) for r in rows[1:])


def test_bode_svg_is_wellformed(capsys, files):
    code, out, _ = run(capsys, "bode", files["ex31"], "--grid", 400, "--format", "svg")
    assert code == 0
    root = ET.fromstring(out)
    assert root.tag.endswith("svg")
    assert len([e for e in root.iter() if e.tag.endswith("polyline")]) >= 4


def test_bode_json_sector(capsys, files):
    out = run_json(capsys, "bode", files["lag"], "--grid", 400)
    np.testing.assert_allclose(out["phi_infty_deg"], [-90, 0], atol=1e-3)
    assert out["rank_constant"]


# ---------------------------------------------------------------------------
# sector


def test_sector_lag(capsys, files):
    sec = run_json(capsys, "sector", files["lag"])["sweep"]
    np.testing.assert_allclose([sec["lo_deg"], sec["hi_deg"]], [-90, 0], atol=1e-3)


def test_sector_lead_both_methods_agree(capsys, files):
    out = run_json(capsys, "sector", files["lead"], "--method", "both")
    assert math.degrees(out["discrepancy"]) < 0.06
    code, text, _ = run(capsys, "sector", files["lead"], "--method", "both")
    assert code == 0 and "discrepancy" in text


def test_sector_not_applicable_is_distinct(capsys, files):
    code, _, err = run(capsys, "sector", files["ex31"], "--method", "lmi")
    assert code == cli.EXIT_HYPOTHESIS and "not applicable" in err


# ---------------------------------------------------------------------------
# feedback, certify, power-check


def test_feedback_small_phase_pair(capsys, files):
    out = run_json(capsys, "feedback", files["lag"], files["lead"], "--grid", 800)
    assert out["small_phase"] is True and out["oracle_stable"] is True
    assert out["theorem"] == "small_phase"


def test_feedback_text_table(capsys, files):
    code, out, _ = run(capsys, "feedback", files["ex31"], files["small"], "--grid", 800)
    assert code == 0
    assert "small_gain" in out and "oracle_stable" in out


def test_certify_writes_certificate(capsys, files):
    target = files["tmp"] / "cert.json"
    code, _, _ = run(capsys, "certify", files["lag"], -95, 5, "--degrees", "-o", target)
    assert code == 0
    cert = json.loads(target.read_text())
    assert cert["feasible"] is True


def test_certify_infeasible_sector(capsys, files):
    code, out, _ = run(capsys, "certify", files["lag"], -0.3, 0.3)
    assert code == 0 and "infeasible" in out


def test_power_check(capsys, files):
    out = run_json(capsys, "power-check", files["lag"], "--omega", 1, "--count", 3)
    lo, hi = out["phase_interval"]
    for r in out["reports"]:
        assert r["discrepancy"] < 1e-3
        assert lo - 1e-3 <= r["angle_power"] <= hi + 1e-3


def test_power_check_explicit_direction(capsys, files):
    out = run_json(capsys, "power-check", files["lag"], "--omega", 1, "--direction", "1,0;0,0")
    assert abs(out["reports"][0]["angle_power"] + math.pi / 4) < 1e-3


# ---------------------------------------------------------------------------
# determinism and exit codes


def test_outputs_are_deterministic(capsys, files):
    argv = ("power-check", files["ex31"], "--omega", 1, "--count", 2, "--seed", 7,
            "--format", "json")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]
    argv = ("bode", files["ex32"], "--grid", 300)
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_parse_error_exit_code(capsys, files):
    code, _, err = run(capsys, "sector", files["bad"])
    assert code == cli.EXIT_PARSE and "line 3" in err
    code, _, _ = run(capsys, "phases", files["tmp"] / "missing.json")
    assert code == cli.EXIT_PARSE
    code, _, _ = run(capsys, "power-check", files["lag"], "--omega", 1, "--direction", "1,x")
    assert code == cli.EXIT_PARSE


def test_classification_failure_exit_code(capsys, files):
    code, _, err = run(capsys, "sector", files["neg"])
    assert code == cli.EXIT_HYPOTHESIS and "NegativeDC" in err


def test_solver_failure_exit_code(capsys, files, monkeypatch):
    def fail(*args, **kwargs):
        raise SolverError("solver aborted", "aborted")

    monkeypatch.setattr(cli, "check_sector", fail)
    code, _, err = run(capsys, "certify", files["lag"], -1, 1)
    assert code == cli.EXIT_SOLVER and "solver failure" in err
