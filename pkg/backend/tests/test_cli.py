import json

import pytest

from src.api.cli import EXIT_MODEL, EXIT_OK, EXIT_STATE_CAP, EXIT_USAGE, main
from src.api.report import ImcDocument, dump_json


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_check_prints_the_termination_probability(capsys, models_dir):
    # Arrange
    model = str(models_dir / "groupies.cgf")

    # Act
    code, out = _run(capsys, "check", model)

    # Assert
    assert code == EXIT_OK
    assert "termination at init: 1.0000000000000000" in out


def test_check_json_report(capsys, models_dir):
    code, out = _run(capsys, "check", str(models_dir / "groupies.cgf"), "--format", "json")

    report = json.loads(out)
    assert code == EXIT_OK
    assert report["mode"] == "concrete"
    assert report["state_count"] == 4
    assert report["termination"]["initial"]["decimal"] == "1.0000000000000000"


def test_abstract_bounds_of_the_family(capsys, models_dir):
    # Arrange
    model = str(models_dir / "groupies_family.cgf")

    # Act
    code, out = _run(capsys, "abstract", model, "--format", "json")
    _, unwidened = _run(capsys, "abstract", model, "--format", "json", "--no-widening")

    # Assert
    report = json.loads(out)
    assert code == EXIT_OK
    assert report["state_count"] == 7
    assert [float(bound["decimal"]) for bound in report["termination"]["initial"]] == pytest.approx([1.0, 1.0])
    assert json.loads(unwidened)["state_count"] == 16


def test_concrete_check_needs_exact_counts(capsys, models_dir):
    code, _ = _run(capsys, "check", str(models_dir / "groupies_family.cgf"))
    assert code == EXIT_MODEL


def test_malformed_model_exits_with_model_error(capsys, tmp_path):
    model = tmp_path / "broken.cgf"
    model.write_text("species X = ?a(.X\ninit X:1\n", encoding="utf-8")

    code = main(["check", str(model)])

    assert code == EXIT_MODEL
    assert "error:" in capsys.readouterr().err


def test_missing_model_file(capsys, tmp_path):
    code, _ = _run(capsys, "check", str(tmp_path / "absent.cgf"))
    assert code == EXIT_MODEL


def test_state_cap_exit_code(capsys, models_dir):
    code, _ = _run(capsys, "check", str(models_dir / "divergent.cgf"), "--state-cap", "100")
    assert code == EXIT_STATE_CAP


def test_unknown_stage_is_a_usage_error(models_dir):
    with pytest.raises(SystemExit) as excinfo:
        main(["export", str(models_dir / "groupies.cgf"), "--stage", "nope"])
    assert excinfo.value.code == EXIT_USAGE


def test_export_abstract_lts_as_dot(capsys, models_dir):
    code, out = _run(capsys, "export", str(models_dir / "groupies_family.cgf"), "--stage", "alts", "--format", "dot")

    assert code == EXIT_OK
    assert out.startswith("digraph AbstractLTS {")
    assert " | " in out
    assert out.count(" -> ") == 8


def test_json_export_is_deterministic(capsys, models_dir):
    model = str(models_dir / "groupies_family.cgf")

    _, first = _run(capsys, "export", model)
    _, second = _run(capsys, "export", model, "--workers", "3")

    assert first == second.replace('"workers": 3', '"workers": 1')


def test_imc_document_reads_back(capsys, models_dir):
    # Arrange
    _, out = _run(capsys, "export", str(models_dir / "groupies_family.cgf"), "--stage", "imc")

    # Act
    document = ImcDocument.model_validate_json(out)

    # Assert
    assert dump_json(document) + "\n" == out
    assert len(document.states) == 7


def test_output_file_is_written(capsys, models_dir, tmp_path):
    target = tmp_path / "report.json"

    code, out = _run(capsys, "check", str(models_dir / "groupies.cgf"), "--format", "json", "--output", str(target))

    assert code == EXIT_OK and out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["model"] == "groupies"


def test_sweep_reports_every_member(capsys, models_dir):
    code, out = _run(capsys, "sweep", str(models_dir / "groupies_family.cgf"), "--format", "json")

    document = json.loads(out)
    assert code == EXIT_OK
    assert len(document["members"]) == 4
    assert document["all_enclosed"] is True
