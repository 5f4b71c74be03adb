import json
from pathlib import Path

import pytest

from utils.errors import CorpusEntryNotFound, InputError
from utils.io import (
    corpus_listing,
    dump_json,
    load_assumptions,
    load_extension,
    load_group,
    read_json,
)


def write(tmp_path, name, data) -> str:
    path = tmp_path / name
    path.write_text(json.dumps(data, ensure_ascii=False), encoding="utf-8")
    return str(path)


def test_corpus_listing_contains_examples(config):
    listing = corpus_listing(config)
    groups = {entry["name"] for entry in listing["groups"]}
    extensions = {entry["name"] for entry in listing["extensions"]}
    assert {"S3", "S4", "SL23", "C7C3"} <= groups
    assert {"q_zeta3", "q_sqrt_m23", "q_sqrt_m23_partial", "hilbert_q_sqrt79"} <= extensions


def test_group_from_file(tmp_path):
    path = write(tmp_path, "d5.json", {"name": "D5", "degree": 5, "generators": ["(1,2,3,4,5)", "(2,5)(3,4)"]})
    G = load_group(path)
    assert G.order == 10
    assert G.name == "D5"


def test_unknown_corpus_entry(config):
    with pytest.raises(CorpusEntryNotFound):
        load_group("no_such_group", config)


def test_schema_errors_carry_a_pointer(tmp_path):
    path = write(tmp_path, "bad.json", {"name": "X", "degree": 0, "generators": []})
    with pytest.raises(InputError) as info:
        load_group(path)
    assert info.value.path == "/degree"


def test_extension_with_unknown_t_label(tmp_path, config):
    data, _ = read_json(Path(config.corpus_dir) / "extensions" / "q_zeta3.json")
    data["t_sets"] = [["13"]]
    with pytest.raises(InputError) as info:
        load_extension(write(tmp_path, "ext.json", data))
    assert info.value.path == "/t_sets/0/0"


def test_finite_place_needs_norm(tmp_path):
    data = {"name": "x", "group": "C2", "j": "(1,2)", "mu_order": 2,
            "places": [{"label": "3", "frobenius": "()"}]}
    with pytest.raises(InputError) as info:
        load_extension(write(tmp_path, "ext.json", data))
    assert info.value.path.startswith("/places/0")


def test_extension_records_source_hash(extension):
    datum = extension("q_sqrt_m23")
    assert len(datum.source_hash) == 64
    assert [v.label for v in datum.t_places] == ["3"]
    assert datum.certificates == []


def test_certificates_are_ingested(extension):
    datum = extension("hilbert_q_sqrt79")
    assert len(datum.certificates) == 1
    cert = datum.certificates[0]
    assert cert.character == "chi5"
    assert cert.value == 4
    assert cert.source_hash == datum.source_hash
    assert datum.class_group["part"] == "minus"
    assert len(datum.inductions) == 1
    assert datum.inductions[0].class_group.order == 6


def test_assumption_file(tmp_path):
    path = write(tmp_path, "assume.json", {"assumptions": [{"kind": "known_example", "note": "n"}]})
    assert load_assumptions(path) == [{"kind": "known_example", "note": "n"}]
    assert load_assumptions(None) == []
    with pytest.raises(InputError):
        load_assumptions(write(tmp_path, "bad.json", [{"kind": "other"}]))


def test_unreadable_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{", encoding="utf-8")
    with pytest.raises(InputError):
        read_json(path)


def test_dump_json_is_deterministic():
    assert dump_json({"b": 1, "a": "θ"}) == '{\n  "a": "θ",\n  "b": 1\n}'


def _hilbert_data(config):
    data, _ = read_json(Path(config.corpus_dir) / "extensions" / "hilbert_q_sqrt79.json")
    return data


@pytest.mark.parametrize("edit, pointer", [
    (lambda ind: ind.update(discriminant=79), "/induction/0/discriminant"),
    (lambda ind: ind.update(discriminant=324), "/induction/0/discriminant"),
    (lambda ind: ind.update(subgroup=["(3,4,5)"]), "/induction/0/subgroup"),
    (lambda ind: ind["classes"][1].update(image="(3,4)"), "/induction/0/classes/1/image"),
    (lambda ind: ind["classes"][5].update(form=[3, 22, 14]), "/induction/0/classes/5/form"),
    (lambda ind: ind["classes"][0].update(form=[1, 0, -80]), "/induction/0/classes/0/form"),
    (lambda ind: ind["classes"].pop(), "/induction/0/classes"),
])
def test_induction_block_is_validated(tmp_path, config, edit, pointer):
    data = _hilbert_data(config)
    edit(data["induction"][0])
    with pytest.raises(InputError) as info:
        load_extension(write(tmp_path, "ext.json", data), config)
    assert info.value.path == pointer
