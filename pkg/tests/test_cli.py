import csv
import io
import json

import numpy as np
import pytest

from covpovm.cli import main
from covpovm.serialization import matrix_to_json, vector_to_json


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    run.stderr = captured.err
    return code, (json.loads(captured.out) if captured.out else None)


def checks(report):
    return {c["name"]: c for c in report["checks"]}


def test_check_degenerate_basis_fiducial(capsys):
    code, report = run(capsys, "check", "--group", "2", "--fiducial", "basis")
    assert code == 3
    ic = checks(report)["informational_completeness"]
    assert not ic["passed"] and ic["min_modulus"] == 0
    assert report["failed_checks"] == ["informational_completeness"]
    assert all(c["passed"] for name, c in checks(report).items() if name != "informational_completeness")


def test_check_generic_fiducial_passes(capsys):
    code, report = run(capsys, "check", "--group", "4", "--fiducial", "random", "--seed", "7")
    assert code == 0 and report["passed"]
    assert set(checks(report)) == {
        "irreducibility", "identity_resolution", "multiplier_residual",
        "ambiguity_identity", "contraction_bound", "informational_completeness",
    }
    assert report["schema_version"] == "1.0"
    assert report["config"]["group"] == "4" and report["config"]["seed"] == 7


def test_check_trivial_group(capsys):
    code, report = run(capsys, "check", "--group", "1")
    assert code == 0
    assert checks(report)["irreducibility"]["value"] == 1


def test_check_writes_multiplier_csv(capsys, tmp_path):
    path = tmp_path / "f.csv"
    code, _ = run(capsys, "check", "--group", "2,3", "--seed", "1", "--csv", str(path))
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 36 and float(rows[0]["abs_f"]) == pytest.approx(1.0)


def test_tomo_exact(capsys):
    code, report = run(capsys, "tomo", "--group", "8", "--seed", "3")
    assert code == 0
    assert report["mode"] == "exact" and report["frobenius"] < 1e-10
    assert checks(report)["weyl_coefficients"]["value"] < 1e-10


def test_tomo_refuses_non_ic(capsys):
    code, report = run(capsys, "tomo", "--group", "2", "--fiducial", "basis")
    assert code == 3
    assert "refused" in report["diagnostic"]


def test_tomo_missing_state_file(capsys, tmp_path):
    code, report = run(capsys, "tomo", "--group", "4", "--state", str(tmp_path / "missing.json"))
    assert code == 4 and report is None
    assert "not found" in run.stderr


def test_tomo_state_and_fiducial_files(capsys, tmp_path):
    rho = np.diag([0.5, 0.25, 0.25, 0]).astype(complex)
    psi = np.array([1, 1j, -1, 0.5]) / np.linalg.norm([1, 1j, -1, 0.5])
    (tmp_path / "rho.json").write_text(json.dumps(matrix_to_json(rho)))
    (tmp_path / "psi.json").write_text(json.dumps(vector_to_json(psi)))
    code, report = run(capsys, "tomo", "--group", "4", "--state", str(tmp_path / "rho.json"),
                       "--fiducial", str(tmp_path / "psi.json"))
    assert code == 0 and report["frobenius"] < 1e-12
    (tmp_path / "bad.json").write_text(json.dumps(vector_to_json(psi[:3] / np.linalg.norm(psi[:3]))))
    code, _ = run(capsys, "tomo", "--group", "4", "--fiducial", str(tmp_path / "bad.json"))
    assert code == 4


def test_tomo_schedule_csv(capsys, tmp_path):
    out = tmp_path / "report.json"
    code = main(["tomo", "--group", "4", "--seed", "5", "--schedule", "1e3,1e4,1e5", "--n-seeds", "8",
                 "--output", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert abs(report["slope"] + 0.5) <= 0.15
    rows = list(csv.DictReader((tmp_path / "report.csv").open()))
    assert list(rows[0]) == ["shots", "seed", "frobenius", "trace_distance"]
    assert len(rows) == 24


def test_tomo_single_shot_count_embeds_rows(capsys):
    code, report = run(capsys, "tomo", "--group", "3", "--shots", "500", "--n-seeds", "3", "--project")
    assert code == 0 and report["mode"] == "sampled"
    assert len(report["rows"]) == 3 and "slope" not in report


def test_outputs_are_byte_identical(tmp_path):
    out = tmp_path / "run.json"
    runs = []
    for _ in range(2):
        assert main(["tomo", "--group", "2,2", "--seed", "11", "--schedule", "100,1000", "--n-seeds", "4",
                     "--output", str(out)]) == 0
        runs.append((out.read_bytes(), out.with_suffix(".csv").read_bytes()))
    assert runs[0] == runs[1]


def test_config_file_with_flag_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"group": "2", "fiducial": "basis", "seed": 3}))
    code, report = run(capsys, "check", "--config", str(cfg))
    assert code == 3
    code, report = run(capsys, "check", "--config", str(cfg), "--fiducial", "random")
    assert code == 0 and report["config"]["seed"] == 3 and report["config"]["fiducial"] == "random"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["check", "--config", str(cfg)]) == 4
    assert main(["check", "--config", str(tmp_path / "nope.json")]) == 4


def test_bad_config_values():
    assert main(["check", "--group", "0"]) == 4
    assert main(["check", "--group", "2", "--ic-tol", "-1"]) == 4
    assert main(["tomo", "--group", "2", "--shots", "-3"]) == 4


def test_cv_acceptance_run(capsys):
    code, report = run(capsys, "cv", "--trunc", "16", "--radius", "7", "--step", "0.05", "--alpha", "0.5+0.3i")
    assert code == 0
    assert report["max_error"] < 1e-3
    assert report["params"]["alpha"] == [0.5, 0.3]
    assert len(checks(report)["gs_identity"]["per_level_errors"]) == 9


def test_cv_zero_alpha_reduces_to_identity(capsys):
    code, report = run(capsys, "cv", "--alpha", "0")
    assert code == 0
    c = checks(report)
    assert c["gs_identity"]["per_level_errors"] == c["gaussian_contraction"]["per_level_errors"]


def test_cv_grid_too_small(capsys):
    code, report = run(capsys, "cv", "--radius", "1", "--alpha", "0.5")
    assert code == 4 and report is None
    assert "grid too small" in run.stderr


def test_cv_truncation_warning_strict(capsys):
    code, report = run(capsys, "cv", "--trunc", "2", "--alpha", "1.5", "--n-check", "1")
    assert code == 0 and report["warnings"]
    code, report = run(capsys, "cv", "--trunc", "2", "--alpha", "1.5", "--n-check", "1", "--strict")
    assert code == 3
