import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

import cli
from utils.io import dump_json


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_chartable_json(capsys):
    code, out, _ = run(capsys, "chartable", "S3")
    assert code == cli.EXIT_PASS
    output = json.loads(out)
    assert output["command"] == "chartable"
    assert output["result"]["degrees"] == [1, 1, 2]


def test_options_before_and_after_the_subcommand(capsys):
    _, out, _ = run(capsys, "--precision", "7", "chartable", "S3")
    assert json.loads(out)["config"]["precision"] == 7
    _, out, _ = run(capsys, "chartable", "S3", "--precision", "9")
    assert json.loads(out)["config"]["precision"] == 9


def test_text_format(capsys):
    code, out, _ = run(capsys, "check", "q_sqrt_m23", "--mode", "brumer", "--p", "3", "--format", "text")
    assert code == cli.EXIT_PASS
    assert out.startswith("【予想の検証】")
    assert "【設定】" in out


@pytest.mark.parametrize("argv, expected", [
    (["check", "q_sqrt_m23", "--mode", "dual-sbs", "--p", "3"], cli.EXIT_PASS),
    (["check", "q_sqrt_m23", "--mode", "dual-sbs", "--p", "3", "--theta-scale", "1/3"], cli.EXIT_FAIL),
    (["check", "q_sqrt_m23_partial", "--mode", "bs", "--p", "3"], cli.EXIT_UNDECIDED),
    (["classify", "S3", "--p", "3"], cli.EXIT_PASS),
    (["classify", "SL23", "--p", "3"], cli.EXIT_FAIL),
    (["classify", "--extension", "q_sqrt_m23", "--p", "23"], cli.EXIT_PASS),
    (["stickelberger", "q_zeta3"], cli.EXIT_PASS),
    (["corpus", "list"], cli.EXIT_PASS),
])
def test_exit_codes(capsys, argv, expected):
    code, _, _ = run(capsys, *argv)
    assert code == expected


@pytest.mark.parametrize("argv", [
    ["chartable", "no_such_group"],
    ["check", "q_sqrt_m23", "--mode", "brumer", "--p", "2"],
    ["check", "q_sqrt_m23", "--mode", "dual-sbs", "--p", "3", "--theta-scale", "x"],
    ["classify", "--p", "3"],
    ["chartable", "S3", "--precision", "0"],
])
def test_input_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == cli.EXIT_INPUT_ERROR
    assert out == ""
    assert err.startswith("入力エラー")


def test_precision_cap_is_reported_as_undecided(capsys, tmp_path, config):
    data = json.loads((Path(config.corpus_dir) / "extensions" / "q_sqrt_m23.json").read_text(encoding="utf-8"))
    data["class_group"]["invariant_factors"] = [3 ** 70]
    path = tmp_path / "huge.json"
    path.write_text(json.dumps(data, ensure_ascii=False), encoding="utf-8")
    code, out, _ = run(capsys, "check", str(path), "--mode", "brumer", "--p", "3")
    assert code == cli.EXIT_UNDECIDED
    assert json.loads(out)["result"]["verdict"]["status"] == "undecided"


def test_assumption_file(capsys, tmp_path):
    path = tmp_path / "assume.json"
    path.write_text(json.dumps([{"kind": "known_example", "note": "記録"}]), encoding="utf-8")
    code, out, _ = run(capsys, "check", "q_sqrt_m23", "--mode", "brumer", "--p", "3", "--assume", str(path))
    assert code == cli.EXIT_PASS
    assert json.loads(out)["result"]["verdict"]["assumptions"][0]["note"] == "記録"


def test_batch(capsys, tmp_path):
    path = tmp_path / "tasks.json"
    path.write_text(json.dumps([
        {"command": "chartable", "group": "C3"},
        {"command": "classify", "group": "S3", "p": 7},
    ]), encoding="utf-8")
    code, out, _ = run(capsys, "batch", str(path), "--jobs", "2")
    assert code == cli.EXIT_PASS
    results = json.loads(out)["result"]["results"]
    assert results[1]["output"]["verdict"]["tag"] == "coprime-degree"
    assert results[1]["output"]["verdict"]["result"] == "Thm 9.1"

    path.write_text(json.dumps([{"command": "chartable", "group": "missing"}]), encoding="utf-8")
    code, _, _ = run(capsys, "batch", str(path))
    assert code == cli.EXIT_FAIL


def test_verbose_logs_to_stderr(capsys):
    code, out, err = run(capsys, "chartable", "C2", "--verbose")
    assert code == cli.EXIT_PASS
    assert "[DEBUG]" in err
    assert "[DEBUG]" not in out


DETERMINISM_RUNS = [
    ["chartable", "S4"],
    ["classify", "S4", "--p", "3", "--N", "(1,2)(3,4)", "(1,3)(2,4)"],
    ["stickelberger", "hilbert_q_sqrt79"],
    ["check", "q_sqrt_m23", "--mode", "brumer", "--p", "3"],
    ["check", "q_sqrt_m23", "--mode", "dual-sbs", "--p", "3"],
    ["check", "q_sqrt_m23", "--mode", "bs", "--p", "3"],
    ["check", "hilbert_q_sqrt79", "--mode", "dual-sbs", "--p", "5"],
    ["corpus", "list"],
]


@pytest.mark.parametrize("argv", DETERMINISM_RUNS)
def test_repeated_runs_are_byte_identical(capsys, argv):
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second


@pytest.mark.parametrize("argv", DETERMINISM_RUNS)
def test_parallel_run_matches_serial(capsys, argv):
    # config は jobs を含むので result だけ比べる
    _, serial, _ = run(capsys, *argv, "--jobs", "1")
    _, parallel, _ = run(capsys, *argv, "--jobs", "8")
    assert dump_json(json.loads(serial)["result"]) == dump_json(json.loads(parallel)["result"])


def test_output_does_not_depend_on_hash_seed():
    argv = ["check", "hilbert_q_sqrt79", "--mode", "brumer", "--p", "5"]
    script = Path(cli.__file__)
    outputs = []
    for seed in ("0", "1", "12345"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        completed = subprocess.run([sys.executable, str(script), *argv], capture_output=True, env=env,
                                   cwd=script.parent, check=False)
        assert completed.returncode == cli.EXIT_PASS
        outputs.append(completed.stdout)
    assert outputs[0] == outputs[1] == outputs[2]
