from __future__ import annotations

import json
import subprocess
import sys

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from dropkit import __version__
from dropkit.cli import run


@pytest.fixture(scope="module")
def fx(tmp_path_factory):
    out = tmp_path_factory.mktemp("fx")
    assert run(["fixtures", str(out)]) == 0
    return out


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fixtures_written_and_byte_stable(fx, tmp_path, capsys):
    code, out, _ = call(capsys, "fixtures", str(tmp_path))
    assert code == 0 and len(out.splitlines()) == 3
    for name in ("dataset.json", "tables.json", "predictions.json"):
        assert (tmp_path / name).read_bytes() == (fx / name).read_bytes()
    data = json.loads((fx / "dataset.json").read_text(encoding="utf-8"))
    qas = {qa["question_id"]: qa for p in data["passages"] for qa in p["qa_pairs"]}
    assert len(qas) == 13
    assert qas["t1-comp"]["answers"] == [{"spans": ["Castile"]}]


def test_evaluate_perfect_and_baseline(fx, tmp_path, capsys):
    data = json.loads((fx / "dataset.json").read_text(encoding="utf-8"))
    perfect = {qa["question_id"]: qa["answers"][0] for p in data["passages"] for qa in p["qa_pairs"]}
    pred = tmp_path / "perfect.json"
    pred.write_text(json.dumps(perfect), encoding="utf-8")
    code, out, _ = call(capsys, "evaluate", "--gold", str(fx / "dataset.json"), "--pred", str(pred))
    assert code == 0 and out.strip() == "EM: 100.00  F1: 100.00"
    code, out, _ = call(
        capsys, "evaluate", "--gold", str(fx / "dataset.json"), "--pred", str(fx / "predictions.json"), "--per-type"
    )
    assert code == 0
    assert out.splitlines()[0] == "EM: 0.00  F1: 0.00"
    assert any(line.startswith("number") for line in out.splitlines())


def test_exec_lf(fx, capsys):
    lf = "(count (filter_number_lesser all_rows num 10000))"
    code, out, _ = call(capsys, "exec-lf", "--tables", str(fx / "tables.json"), "--passage-id", "p-t4-countfilter", "--lf", lf)
    assert code == 0 and json.loads(out) == {"number": "3"}
    code, out, _ = call(
        capsys, "exec-lf", "--tables", str(fx / "tables.json"), "--passage-id", "p-t4-countfilter",
        "--lf", "(select_string (filter_number_lesser all_rows num 0) arg0)",
    )
    assert code == 0 and json.loads(out) == {"empty": True}


def test_exec_lf_unknown_relation_is_input_error(fx, capsys):
    code, out, err = call(
        capsys, "exec-lf", "--tables", str(fx / "tables.json"), "--passage-id", "p-t4-countfilter",
        "--lf", "(count (filter_number_lesser all_rows people 10))",
    )
    assert code == 1 and out == "" and "not a column" in err


def test_search_exec(fx, capsys):
    code, out, _ = call(capsys, "search-exec", "--dataset", str(fx / "dataset.json"), "--question-id", "t1-sub")
    assert code == 0
    assert json.loads(out)["sign_assignments"] == [[[1, "+"], [2, "-"]]]
    code, out, _ = call(
        capsys, "search-exec", "--dataset", str(fx / "dataset.json"), "--question-id", "t4-subcoref", "--word-numbers"
    )
    assert json.loads(out)["sign_assignments"] == [[[0, "-"], [1, "+"]]]


def test_search_lf(fx, capsys):
    args = ["search-lf", "--tables", str(fx / "tables.json"), "--dataset", str(fx / "dataset.json"),
            "--question-id", "t4-countfilter", "--depth", "2"]
    code, out, _ = call(capsys, *args)
    assert code == 0
    assert "(count (filter_number_lesser all_rows num 10000))" in out.splitlines()
    code, out, _ = call(capsys, *args, "--format", "json")
    doc = json.loads(out)
    assert doc["truncated"] is False and "(count (filter_number_lesser all_rows num 10000))" in doc["forms"]


def test_search_lf_with_embeddings(fx, tmp_path, capsys):
    emb = tmp_path / "emb.txt"
    emb.write_text("people 1 0\ninhabitants 0.99 0.1\n", encoding="utf-8")
    code, out, _ = call(
        capsys, "search-lf", "--tables", str(fx / "tables.json"), "--dataset", str(fx / "dataset.json"),
        "--question-id", "t4-countfilter", "--depth", "1", "--embeddings", str(emb), "--distance", "0.3",
    )
    assert code == 0


def test_extract_tables(fx, tmp_path, capsys):
    out_file = tmp_path / "tables.json"
    code, out, _ = call(capsys, "extract-tables", "--dataset", str(fx / "dataset.json"), "--out", str(out_file))
    assert code == 0 and out_file.read_bytes() == (fx / "tables.json").read_bytes()
    code, out, _ = call(capsys, "extract-tables", "--dataset", str(fx / "dataset.json"))
    assert out == (fx / "tables.json").read_text(encoding="utf-8")


def _json_commands(fx, tmp_path):
    d, t, p = (str(fx / n) for n in ("dataset.json", "tables.json", "predictions.json"))
    return [
        ["evaluate", "--gold", d, "--pred", p, "--per-type"],
        ["exec-lf", "--tables", t, "--passage-id", "p-t1-count", "--lf", "(select_string all_rows arg0)"],
        ["search-lf", "--tables", t, "--dataset", d, "--question-id", "t1-count", "--depth", "1"],
        ["search-exec", "--dataset", d, "--question-id", "t1-spans"],
        ["extract-tables", "--dataset", d],
        ["extract-tables", "--dataset", d, "--out", str(tmp_path / "x.json")],
        ["fixtures", str(tmp_path / "again")],
    ]


def test_json_mode_everywhere(fx, tmp_path, capsys):
    for argv in _json_commands(fx, tmp_path):
        code, out, err = call(capsys, *argv, "--format", "json")
        assert code == 0, (argv, err)
        json.loads(out)


@pytest.mark.parametrize("sub", ["evaluate", "exec-lf", "search-lf", "search-exec", "extract-tables", "fixtures"])
def test_version_and_help_on_every_subcommand(sub, capsys):
    code, out, _ = call(capsys, sub, "--version")
    assert code == 0 and __version__ in out
    code, out, _ = call(capsys, sub, "--help")
    assert code == 0 and "usage" in out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["evaluate", "--gold"],
        ["evaluate", "--gold", "missing.json", "--pred", "missing.json"],
        ["search-lf", "--depth", "deep"],
        ["exec-lf", "--tables", "nope.json", "--passage-id", "x", "--lf", "(count all_rows)"],
    ],
)
def test_usage_and_missing_files_exit_1(argv, capsys):
    code, _, err = call(capsys, *argv)
    assert code == 1 and err


def test_unknown_question_and_bad_lf(fx, capsys):
    code, _, err = call(capsys, "search-exec", "--dataset", str(fx / "dataset.json"), "--question-id", "nope")
    assert code == 1 and "nope" in err
    code, _, err = call(
        capsys, "exec-lf", "--tables", str(fx / "tables.json"), "--passage-id", "p-t1-count", "--lf", "(count"
    )
    assert code == 1


def test_unwritable_fixture_dir(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, err = call(capsys, "fixtures", str(blocker / "sub"))
    assert code == 1 and err


def test_internal_error_exit_2(fx, capsys, monkeypatch):
    import dropkit.cli as cli

    def boom(*a, **k):
        raise RuntimeError("boom")

    monkeypatch.setattr(cli, "search_execution_targets", boom)
    code, _, err = call(capsys, "search-exec", "--dataset", str(fx / "dataset.json"), "--question-id", "t1-sub")
    assert code == 2 and "boom" in err


@settings(max_examples=60, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.text(max_size=200))
def test_malformed_inputs_exit_1(tmp_path, text):
    bad = tmp_path / "bad.json"
    bad.write_text(text, encoding="utf-8")
    for argv in (
        ["evaluate", "--gold", str(bad), "--pred", str(bad)],
        ["exec-lf", "--tables", str(bad), "--passage-id", "p", "--lf", "(count all_rows)"],
        ["search-exec", "--dataset", str(bad), "--question-id", "q"],
        ["extract-tables", "--dataset", str(bad)],
    ):
        assert run(argv) == 1


@given(st.sampled_from(["{}", "[]", '{"passages": 3}', '{"passages": [{"id": 1}]}', '{"tables": [{}]}', "null"]))
def test_structurally_wrong_json_exit_1(tmp_path_factory, text):
    bad = tmp_path_factory.mktemp("bad") / "bad.json"
    bad.write_text(text, encoding="utf-8")
    assert run(["search-exec", "--dataset", str(bad), "--question-id", "q"]) == 1
    assert run(["exec-lf", "--tables", str(bad), "--passage-id", "p", "--lf", "(count all_rows)"]) == 1


def test_console_entry_point(fx):
    proc = subprocess.run(
        [sys.executable, "-m", "dropkit.cli", "search-exec", "--dataset", str(fx / "dataset.json"),
         "--question-id", "t4-add"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["sign_assignments"] == [[[0, "+"], [1, "+"]]]
