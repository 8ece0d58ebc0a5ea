"""Command-line interface: exit codes, reports, JSON output."""
import json

import jsonschema
import pytest

from rasv.cli import EXIT_BUDGET, EXIT_OK, EXIT_PARSE, EXIT_UNSAFE, main

from conftest import SPECS

FLIGHT = str(SPECS / "flight.ras")
JOBHIRING = str(SPECS / "jobhiring.ras")


def test_verify_safe_property(capsys):
    assert main(["verify", JOBHIRING, "--property", "P1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "P1: SAFE" in out and "decision-calls=7" in out


def test_verify_unsafe_exit_and_trace(capsys):
    code = main(["verify", FLIGHT, "--property", "any-registration"])
    assert code == EXIT_UNSAFE
    out = capsys.readouterr().out
    assert "any-registration: UNSAFE" in out
    assert "trace: mark-safe -> register" in out


def test_verify_all_properties_worst_exit(capsys):
    assert main(["verify", FLIGHT]) == EXIT_UNSAFE
    out = capsys.readouterr().out
    assert out.count("SAFE") >= 2 and "UNSAFE" in out


def test_verify_budget_exit(capsys):
    code = main(["verify", JOBHIRING, "--property", "P3", "--max-nodes", "1"])
    assert code == EXIT_BUDGET
    assert "BUDGET-EXHAUSTED" in capsys.readouterr().out


def test_verify_json_report_validates(tmp_path, verdict_schema, capsys):
    out_path = tmp_path / "report.json"
    main(["verify", FLIGHT, "--json", str(out_path), "--replay"])
    capsys.readouterr()
    doc = json.loads(out_path.read_text())
    jsonschema.validate(doc, verdict_schema)
    by_prop = {d["property"]: d for d in doc}
    assert by_prop["any-registration"]["verdict"] == "UNSAFE"
    assert by_prop["any-registration"]["replay"]["steps"] == 2
    assert by_prop["duplicate-safe-city"]["fixpoint_size"] == 1


def test_verify_single_property_json_is_object(capsys, verdict_schema):
    main(["verify", JOBHIRING, "--property", "P1", "--json", "-"])
    out = capsys.readouterr().out
    doc = json.loads(out[out.index("{"):])
    jsonschema.validate(doc, verdict_schema)
    assert doc["system"] == "job-hiring" and doc["verdict"] == "SAFE"


def test_parse_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.ras"
    bad.write_text("system broken\nschema {\n  id sorta X\n}\n")
    with pytest.raises(SystemExit) as exc:
        main(["verify", str(bad)])
    assert exc.value.code == EXIT_PARSE
    assert "error:" in capsys.readouterr().err


def test_unknown_property_exit(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", FLIGHT, "--property", "nope"])
    assert exc.value.code == EXIT_PARSE
    assert "available:" in capsys.readouterr().err


def test_classify_output(capsys):
    assert main(["classify", FLIGHT, "--json", "-"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "flight-management: terminates-thm-5.3" in out
    assert "transition overbook: not-local [probe]" in out
    doc = json.loads(out[out.index("{"):])
    assert doc["tree_like"] is True and doc["system"] == "flight-management"


def test_oracle_reaches_violation(capsys):
    code = main(["oracle", FLIGHT, "--property", "any-registration",
                 "--bounds", "CityId=2,FlightId=2", "--max-depth", "4"])
    assert code == EXIT_UNSAFE
    out = capsys.readouterr().out
    assert "REACHED" in out and "mark-safe -> register" in out


def test_oracle_bound_safe(capsys):
    code = main(["oracle", FLIGHT, "--property", "phantom-flight",
                 "--bounds", "CityId=2,FlightId=2", "--max-depth", "4"])
    assert code == EXIT_OK
    assert "BOUND-SAFE" in capsys.readouterr().out


def test_bad_bounds_exit(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["oracle", FLIGHT, "--bounds", "CityId=two"])
    assert exc.value.code == EXIT_PARSE


def test_explain_tree(capsys):
    code = main(["explain", FLIGHT, "--property", "any-registration"])
    assert code == EXIT_UNSAFE
    out = capsys.readouterr().out
    assert "(property)" in out and "[INITIAL]" in out
    assert "=> UNSAFE" in out
