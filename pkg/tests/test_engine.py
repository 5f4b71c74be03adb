import json
from fractions import Fraction

import pytest

from engine.core import BrumerStarkEngine, format_group_ring
from engine.reports import render_text
from tools.conjectures import with_t_set
from tools.l_values import stickelberger
from utils.io import dump_json


@pytest.fixture(scope="module")
def engine():
    return BrumerStarkEngine()


def test_config_defaults_are_echoed(engine):
    output = engine.corpus_list()
    assert output["command"] == "corpus"
    assert output["config"]["precision"] == 20
    assert output["config"]["unit_bound"] == 6
    assert "corpus_dir" not in output["config"]


def test_config_overrides():
    engine = BrumerStarkEngine({"precision": 8, "jobs": None})
    assert engine.config.precision == 8
    assert engine.config.jobs == 1
    with pytest.raises(ValueError):
        BrumerStarkEngine({"precision": 0})


def test_format_group_ring(extension):
    datum = extension("q_sqrt_m23")
    j = datum.j.index
    assert format_group_ring(stickelberger(datum).theta, j) == "-3 + 3*j"
    assert format_group_ring(stickelberger(with_t_set(datum, [])).theta, j) == "3/2 - 3/2*j"
    assert format_group_ring(stickelberger(extension("q_zeta3")).theta, j) == "1 - j"


def test_chartable(engine):
    output = engine.chartable(engine.group("S4"))
    result = output["result"]
    assert result["degrees"] == [1, 1, 2, 3, 3]
    assert result["sum_of_squares"] == 24
    assert result["monomial"]
    assert result["frobenius"] is None
    text = render_text(output)
    assert text.startswith("【指標表】")
    assert "Σχ(1)² = 24" in text


def test_classify_is_rechecked(engine):
    result = engine.classify(engine.group("S4"), 3, ["(1,2)(3,4)", "(1,3)(2,4)"])["result"]
    assert result["verdict"]["tag"] == "hybrid-monomial"
    assert result["verdict"]["result"] == "Thm 9.4"
    assert result["rechecked"]


def test_classify_extension(engine):
    result = engine.classify_extension(engine.extension("q_sqrt_m23"), 23)["result"]
    assert result["verdict"]["tag"] == "coprime-degree"
    assert result["extension"]["S"] == ["inf", "23"]


def test_stickelberger_output(engine):
    output = engine.stickelberger(engine.extension("q_sqrt_m23"), 3)
    result = output["result"]
    assert result["theta_text"] == "-3 + 3*j"
    assert [r["mode"] for r in result["integrality"]] == ["Z[G]", "Z_p[G]", "I-sample"]
    assert result["hyp"]["passed"]
    assert "note" in result["p_adic"]
    assert "【Stickelberger 元】" in render_text(output)


@pytest.mark.parametrize("name, mode, status", [
    ("q_sqrt_m23", "brumer", "pass"),
    ("q_sqrt_m23", "bs", "pass"),
    ("q_sqrt_m23", "dual-sbs", "pass"),
    ("q_sqrt_m23", "strong-bs", "pass"),
    ("q_sqrt_m23_partial", "bs", "not-checkable"),
    ("q_sqrt_m23_partial", "dual-sbs", "not-checkable"),
    ("q_zeta3", "brumer", "pass"),
])
def test_check_modes(engine, name, mode, status):
    output = engine.check(engine.extension(name), mode, 3)
    assert output["result"]["verdict"]["status"] == status


def test_check_with_scaled_theta(engine):
    result = engine.check(engine.extension("q_sqrt_m23"), "dual-sbs", 3, theta_scale=Fraction(1, 3))["result"]
    assert result["verdict"]["status"] == "fail"
    assert result["verdict"]["witnesses"]["ray_class_consistency"]["status"] == "pass"


def test_check_records_assumptions(engine):
    records = [{"kind": "known_example", "note": "記録"}]
    result = engine.check(engine.extension("q_sqrt_m23"), "brumer", 3, records)["result"]
    assert result["verdict"]["assumptions"] == records
    text = render_text(engine.check(engine.extension("q_sqrt_m23"), "brumer", 3, records))
    assert "【仮定】" in text


def test_output_is_json_serialisable(engine):
    output = engine.check(engine.extension("q_sqrt_m23"), "dual-sbs", 3)
    text = dump_json(output)
    # 読み直して書き直しても同じ文字列
    assert dump_json(json.loads(text)) == text
    assert json.loads(text)["result"]["verdict"]["status"] == output["result"]["verdict"]["status"]
    assert dump_json(engine.check(engine.extension("q_sqrt_m23"), "dual-sbs", 3)) == text


def test_batch_keeps_order_and_isolates_failures():
    engine = BrumerStarkEngine({"jobs": 2})
    tasks = [
        {"command": "chartable", "group": "S3"},
        {"command": "check", "extension": "q_sqrt_m23", "mode": "brumer", "p": 3},
        {"command": "chartable", "group": "no_such_group"},
        {"command": "unknown"},
    ]
    output = engine.run_batch(tasks)
    results = output["result"]["results"]
    assert [r["command"] for r in results] == ["chartable", "check", "chartable", "unknown"]
    assert [r["success"] for r in results] == [True, True, False, False]
    assert results[1]["output"]["verdict"]["status"] == "pass"
    assert "3. chartable: 失敗" in render_text(output)
