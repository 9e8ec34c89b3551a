from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from egp.cli import main
from egp.corpus import corpus_dir

SCHEMA_PATH = Path(__file__).resolve().parents[1] / "src" / "egp" / "schema" / "report.schema.json"


@pytest.fixture(scope="module")
def validator():
    import jsonschema

    schema = json.loads(SCHEMA_PATH.read_text())
    return jsonschema.Draft202012Validator(schema)


@pytest.fixture
def tab3a_path():
    return str(corpus_dir() / "tab3A.dag")


@pytest.fixture
def chain_path():
    return str(corpus_dir() / "chain3.dag")


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _run_json(capsys, validator, argv):
    code, out, err = _run(capsys, argv + ["--json"])
    report = json.loads(out)
    validator.validate(report)
    return code, report, err


def test_check_prints_canonical_form(capsys, chain_path):
    code, out, _ = _run(capsys, ["check", chain_path])
    assert code == 0
    assert out.startswith("dag chain3 {")
    assert out.endswith("}\n")


def test_check_reports_warnings_on_stderr(capsys, tmp_path):
    p = tmp_path / "dup.dag"
    p.write_text("dag d { A -> B; A -> B; }")
    code, out, err = _run(capsys, ["check", str(p)])
    assert code == 0
    assert "duplicate edge" in err
    assert str(p) in err


def test_dsep_exit_codes(capsys, chain_path, validator):
    code, report, _ = _run_json(
        capsys, validator, ["dsep", chain_path, "--x", "A", "--y", "C", "--given", "B"]
    )
    assert code == 0
    assert report["kind"] == "dsep"
    assert report["result"]["separated"] is True
    code, _, _ = _run(capsys, ["dsep", chain_path, "--x", "A", "--y", "C"])
    assert code == 1


def test_paths_lists_walks(capsys, tab3a_path, validator):
    code, report, _ = _run_json(
        capsys, validator, ["paths", tab3a_path, "--x", "D", "--y", "Y"]
    )
    assert code == 0
    nodes = [p["nodes"] for p in report["result"]["paths"]]
    assert ["D", "Y"] in nodes and ["D", "X", "Y"] in nodes


def test_adjust_search_and_test(capsys, tab3a_path, validator):
    code, report, _ = _run_json(capsys, validator, ["adjust", tab3a_path])
    assert code == 0
    assert report["kind"] == "adjustment-sets"
    assert report["result"]["sets"] == [["X"]]

    code, report, _ = _run_json(
        capsys, validator, ["adjust", tab3a_path, "--z", "X"]
    )
    assert code == 0
    assert report["kind"] == "backdoor"
    assert report["result"]["admissible"] is True

    code, _, _ = _run(capsys, ["adjust", tab3a_path, "--z", ""])
    assert code == 1


def test_adjust_no_admissible_set_is_negative(capsys, validator):
    path = str(corpus_dir() / "tab3B.dag")
    code, report, _ = _run_json(capsys, validator, ["adjust", path])
    assert code == 1
    assert report["result"]["sets"] == []


def test_iv_verdicts(capsys, validator):
    path = str(corpus_dir() / "sharkey_base.dag")
    code, report, _ = _run_json(
        capsys, validator, ["iv", path, "--instrument", "ONP", "--given", "X"]
    )
    assert code == 0 and report["result"]["valid"] is True
    code, report, _ = _run_json(
        capsys, validator, ["iv", path, "--instrument", "ONP"]
    )
    assert code == 1 and report["result"]["valid"] is False


def test_implications_and_factorize(capsys, chain_path, validator):
    code, report, _ = _run_json(capsys, validator, ["implications", chain_path])
    assert code == 0
    assert [s["display"] for s in report["result"]["statements"]] == ["A _||_ C | B"]
    code, report, _ = _run_json(
        capsys, validator, ["factorize", chain_path, "--do", "B"]
    )
    assert code == 0
    assert report["result"]["rendered"] == "P(A,C | do(B=b)) = P(A) P(C|b)"


def test_simulate_writes_csv(capsys, tmp_path, tab3a_path, validator):
    out_path = tmp_path / "sample.csv"
    code, report, _ = _run_json(
        capsys,
        validator,
        [
            "simulate", tab3a_path, "--n", "50", "--seed", "7",
            "--coef", "X->D=0.8", "--coef", "X->Y=0.5", "--coef", "D->Y=0.3",
            "--do", "D=1", "--out", str(out_path),
        ],
    )
    assert code == 0
    assert report["result"]["n"] == 50
    assert report["result"]["regime"] == "do(D=1.0)"
    text = out_path.read_text()
    assert text.splitlines()[0] == "D,X,Y"
    assert report["result"]["csv"] == text


def test_simulate_determinism_via_cli(capsys, tab3a_path, validator):
    argv = ["simulate", tab3a_path, "--n", "25", "--seed", "3"]
    _, first, _ = _run_json(capsys, validator, argv)
    _, second, _ = _run_json(capsys, validator, argv)
    assert first == second


def test_estimate_pipeline(capsys, tmp_path, tab3a_path, validator):
    csv_path = tmp_path / "data.csv"
    code, report, _ = _run_json(
        capsys,
        validator,
        [
            "simulate", tab3a_path, "--n", "20000", "--seed", "11",
            "--coef", "X->D=0.8", "--coef", "X->Y=0.5", "--coef", "D->Y=0.3",
            "--out", str(csv_path),
        ],
    )
    assert code == 0
    code, report, _ = _run_json(
        capsys,
        validator,
        ["estimate", tab3a_path, "--data", str(csv_path), "--method", "adjust",
         "--adjust", "X"],
    )
    assert code == 0
    assert abs(report["result"]["estimate"] - 0.3) < 0.03
    assert report["result"]["method"] == "adjust"


def test_testfit_compatible_and_not(capsys, tmp_path, chain_path, validator):
    csv_path = tmp_path / "chain.csv"
    code, _, _ = _run(
        capsys,
        ["simulate", chain_path, "--n", "5000", "--seed", "5", "--out", str(csv_path)],
    )
    assert code == 0
    code, report, _ = _run_json(
        capsys, validator, ["testfit", chain_path, "--data", str(csv_path)]
    )
    assert code == 0 and report["result"]["compatible"] is True

    collider = str(corpus_dir() / "collider3.dag")
    code, report, _ = _run_json(
        capsys, validator, ["testfit", collider, "--data", str(csv_path)]
    )
    assert code == 1 and report["result"]["compatible"] is False


def test_sensitivity_requires_attached_strengths(capsys, tab3a_path, validator):
    code, report, _ = _run_json(
        capsys,
        validator,
        ["sensitivity", tab3a_path, "--z", "X", "--strengths=-0.5,0,0.5",
         "--n", "2000", "--seed", "3"],
    )
    assert code == 0
    strengths = [row["strength"] for row in report["result"]["rows"]]
    assert strengths == [-0.5, 0.0, 0.5]


def test_sensitivity_not_admissible_is_query_error(capsys):
    path = str(corpus_dir() / "tab3B.dag")
    code, _, err = _run(
        capsys, ["sensitivity", path, "--z", "X", "--strengths=0", "--n", "100"]
    )
    assert code == 2
    assert "not admissible" in err


def test_corpus_listing_and_replay(capsys, validator):
    code, report, _ = _run_json(capsys, validator, ["corpus"])
    assert code == 0
    assert len(report["result"]["ids"]) == 21

    code, report, _ = _run_json(capsys, validator, ["corpus", "--id", "tab3A"])
    assert code == 0
    assert report["kind"] == "corpus-entry"
    assert report["result"]["id"] == "tab3A"
    assert report["result"]["expectations"]

    code, report, _ = _run_json(capsys, validator, ["corpus", "--replay"])
    assert code == 0
    assert report["result"]["failures"] == 0
    assert report["result"]["total"] == 21
    assert report["result"]["passed"] is True


def test_exit_code_semantics(capsys, chain_path, tmp_path):
    # 3: missing file
    code, _, err = _run(capsys, ["check", str(tmp_path / "absent.dag")])
    assert code == 3 and "absent.dag" in err
    # 3: parse error with location
    bad = tmp_path / "bad.dag"
    bad.write_text("dag b { A -> ; }")
    code, _, err = _run(capsys, ["check", str(bad)])
    assert code == 3 and ":1:14:" in err
    # 3: malformed CSV
    csv = tmp_path / "bad.csv"
    csv.write_text("D,Y\n1,x\n")
    code, _, err = _run(
        capsys, ["estimate", chain_path, "--data", str(csv), "--method", "naive"]
    )
    assert code == 3
    # 2: engine-level query error
    code, _, err = _run(capsys, ["dsep", chain_path, "--x", "Nope", "--y", "C"])
    assert code == 2 and "Nope" in err
    # 2: argparse rejection
    with pytest.raises(SystemExit) as exc:
        main(["dsep", chain_path, "--bogus"])
    assert exc.value.code == 2
    # 2: unknown corpus id
    code, _, err = _run(capsys, ["corpus", "--id", "nonexistent"])
    assert code == 3 and "nonexistent" in err


def test_console_script_round_trip(tmp_path, chain_path):
    # exercise the installed entry point end to end
    proc = subprocess.run(
        ["egp", "dsep", chain_path, "--x", "A", "--y", "C", "--given", "B", "--json"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["result"]["separated"] is True

    proc = subprocess.run(
        [sys.executable, "-m", "egp.cli", "corpus", "--replay"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "replayed 21 entries, 0 failing" in proc.stdout


def test_text_output_is_human_readable(capsys, tab3a_path):
    code, out, _ = _run(capsys, ["adjust", tab3a_path])
    assert code == 0
    assert "{X}" in out or "X" in out
    code, out, _ = _run(capsys, ["dsep", tab3a_path, "--x", "D", "--y", "Y"])
    assert code == 1
    assert "connected" in out or "not separated" in out
