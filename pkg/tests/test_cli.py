import json

import pytest

from peierls.cli import run

GM_SHIFT = json.dumps(
    {"kind": "explicit-finite", "alphabet_size": 2, "edges": [[0, 0], [0, 1], [1, 0]]}
)
GM_POT = json.dumps({"depth": 1, "tail": {"kind": "linear", "c": 1}})
RENEWAL_SHIFT = json.dumps({"kind": "renewal", "renewal": {"a": 2, "b": 0}})
RENEWAL_POT = json.dumps(
    {
        "depth": 1,
        "tail": {"kind": "linear", "c": 1},
        "table": [{"word": [0], "value": 0.0}],
    }
)


@pytest.fixture
def gm_files(tmp_path):
    shift = tmp_path / "shift.json"
    pot = tmp_path / "pot.json"
    shift.write_text(GM_SHIFT, encoding="utf-8")
    pot.write_text(GM_POT, encoding="utf-8")
    return str(shift), str(pot)


@pytest.fixture
def renewal_files(tmp_path):
    shift = tmp_path / "rshift.json"
    pot = tmp_path / "rpot.json"
    shift.write_text(RENEWAL_SHIFT, encoding="utf-8")
    pot.write_text(RENEWAL_POT, encoding="utf-8")
    return str(shift), str(pot)


def test_optimize_payload(gm_files, capsys):
    shift, pot = gm_files
    assert run(["optimize", "--shift", shift, "--potential", pot]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload == {
        "schema": 1,
        "m": 0.0,
        "cycle": [[0]],
        "critical_class_unique": True,
    }


def test_barrier_csv_golden_mean(gm_files, capsys):
    shift, pot = gm_files
    assert run(["barrier", "--shift", shift, "--potential", pot, "--format", "csv"]) == 0
    assert capsys.readouterr().out == "0,0.0\n1,0.0\n"


def test_barrier_json_includes_bounds_and_cutoff(renewal_files, capsys):
    shift, pot = renewal_files
    code = run(
        ["barrier", "--shift", shift, "--potential", pot, "--max-letter", "6"]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["schema"] == 1
    assert payload["m"] == 0.0
    assert payload["base"] == [0]
    assert payload["values"]["5"] == -6.0
    assert [5, 25.0] in payload["bounds"]["per_letter"]
    assert payload["cutoff"]["letter"] == 0
    assert payload["cutoff"]["confinement_bound"] == 1483


def test_barrier_countable_shift_requires_max_letter(renewal_files, capsys):
    shift, pot = renewal_files
    assert run(["barrier", "--shift", shift, "--potential", pot]) == 2
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "--max-letter" in err


def test_missing_file_is_a_usage_error(gm_files, capsys):
    _, pot = gm_files
    assert run(["optimize", "--shift", "/nonexistent.json", "--potential", pot]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_shift_check_payload(gm_files, tmp_path, capsys):
    shift, _ = gm_files
    out = tmp_path / "report.json"
    assert run(["shift", "check", "--shift", shift, "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert payload["bp"]["status"] == "SATISFIED"
    assert payload["bi"]["status"] == "SATISFIED"
    assert payload["transitive"] is True


def test_shift_check_renewal(renewal_files, capsys):
    shift, _ = renewal_files
    assert run(["shift", "check", "--shift", shift]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["bp"]["status"] == "REFUTED"
    assert payload["bp"]["witnesses"][:3] == [1, 3, 5]
    assert payload["bi"]["status"] == "REFUTED"
    assert payload["transitive"] is None


def test_barrier_csv_round_trips_into_verify(renewal_files, tmp_path, capsys):
    shift, pot = renewal_files
    values = tmp_path / "values.csv"
    code = run(
        [
            "barrier",
            "--shift",
            shift,
            "--potential",
            pot,
            "--max-letter",
            "6",
            "--format",
            "csv",
            "--out",
            str(values),
        ]
    )
    assert code == 0
    text = values.read_text(encoding="utf-8")
    assert text.splitlines()[0] == "0,0.0"
    assert "5,-6.0" in text.splitlines()
    code = run(
        [
            "subaction",
            "verify",
            "--shift",
            shift,
            "--potential",
            pot,
            "--max-letter",
            "6",
            "--values",
            str(values),
            "--assert",
        ]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["is_subaction"] is True
    assert payload["is_calibrated"] is True
    assert payload["supp_in_contact"] is True


def test_verify_assert_fails_on_broken_values(gm_files, tmp_path, capsys):
    shift, pot = gm_files
    values = tmp_path / "broken.csv"
    values.write_text("0,0.0\n1,5.0\n", encoding="utf-8")
    code = run(
        [
            "subaction",
            "verify",
            "--shift",
            shift,
            "--potential",
            pot,
            "--values",
            str(values),
            "--assert",
        ]
    )
    assert code == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["is_subaction"] is False


def test_compare_constant_difference(gm_files, tmp_path, capsys):
    shift, pot = gm_files
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    a.write_text("0,0.0\n1,0.0\n", encoding="utf-8")
    b.write_text("0,1.5\n1,1.5\n", encoding="utf-8")
    code = run(
        [
            "subaction",
            "compare",
            "--shift",
            shift,
            "--potential",
            pot,
            "--values",
            str(a),
            "--values-b",
            str(b),
            "--assert",
        ]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["is_constant_diff"] is True
    assert payload["constant"] == -1.5
    assert payload["critical_class_unique"] is True


def test_converge_csv_lists_every_stage(renewal_files, capsys):
    shift, pot = renewal_files
    code = run(
        [
            "converge",
            "--shift",
            shift,
            "--potential",
            pot,
            "--stages",
            "6,12",
            "--format",
            "csv",
        ]
    )
    assert code == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[0] == "6,0,0.0"
    assert "6,5,-6.0" in rows
    assert "12,11,-12.0" in rows
    assert len(rows) == 7 + 13


def test_converge_json_with_probe_and_assert(renewal_files, capsys):
    shift, pot = renewal_files
    code = run(
        [
            "converge",
            "--shift",
            shift,
            "--potential",
            pot,
            "--stages",
            "6,12,24",
            "--letters",
            "1,3,5",
            "--scan-to",
            "23",
            "--assert",
        ]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert [s["used"] for s in payload["stages"]] == [6, 12, 24]
    assert payload["base_stable"] is True
    assert payload["stabilization"]["ok"] is True
    assert payload["probe"]["verdict"] == "DIVERGENT"
    assert payload["probe"]["slope"] == pytest.approx(-1.0)


def test_converge_requires_stages(renewal_files, capsys):
    shift, pot = renewal_files
    with pytest.raises(SystemExit) as exc:
        run(["converge", "--shift", shift, "--potential", pot])
    assert exc.value.code == 2
    assert "--stages" in capsys.readouterr().err


def test_demo_renewal_verdicts(capsys):
    assert run(["demo", "renewal", "--a", "2", "--b", "0"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["m"] == 0.0
    assert payload["verdicts"] == {"bp": "REFUTED", "boundedness": "DIVERGENT"}
    assert payload["conclusion"] == "no bounded calibrated subaction exists."
    assert run(["demo", "renewal", "--a", "1", "--b", "1"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["verdicts"] == {"bp": "SATISFIED", "boundedness": "BOUNDED"}
    assert payload["conclusion"] == "a bounded calibrated subaction exists."


def test_repeated_runs_are_byte_identical(renewal_files, capsys):
    shift, pot = renewal_files
    args = [
        "converge",
        "--shift",
        shift,
        "--potential",
        pot,
        "--stages",
        "6,12",
        "--scan-to",
        "11",
    ]
    assert run(args) == 0
    first = capsys.readouterr().out
    assert run(args) == 0  # cache warm now
    second = capsys.readouterr().out
    assert run(args + ["--no-cache"]) == 0
    third = capsys.readouterr().out
    assert first == second == third
