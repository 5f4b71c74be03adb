import pytest

from tools.classifier import (
    TAG_COPRIME_DEGREE,
    TAG_FROBENIUS_ABELIAN_COMPLEMENT,
    TAG_FROBENIUS_ELL_KERNEL,
    TAG_HYBRID_MONOMIAL,
    TAG_KNOWN_EXAMPLE,
    TAG_NONE,
    RESULT_LABELS,
    classify_extension,
    classify_theorem,
    verify_verdict,
)
from utils.errors import InputError, NotNormalSubgroup


def candidate(verdict, tag):
    return next(c for c in verdict.candidates if c["tag"] == tag)


def test_coprime_degree(group):
    G = group("S3")
    verdict = classify_theorem(G, 7)
    assert verdict.tag == TAG_COPRIME_DEGREE
    assert verify_verdict(G, verdict)


def test_frobenius_with_abelian_complement(group):
    G = group("S3")
    verdict = classify_theorem(G, 3)
    assert verdict.tag == TAG_FROBENIUS_ABELIAN_COMPLEMENT
    # 拡大のデータがないので直積の前提は確かめられない
    assert not candidate(verdict, TAG_FROBENIUS_ELL_KERNEL)["applicable"]
    assert verify_verdict(G, verdict)


@pytest.mark.parametrize("name, p", [("A4", 3), ("Aff5", 5), ("C7C3", 7), ("C7C3", 3)])
def test_frobenius_groups(group, name, p):
    assert classify_theorem(group(name), p).tag == TAG_FROBENIUS_ABELIAN_COMPLEMENT


def test_hybrid_monomial_for_s4(group):
    G = group("S4")
    N = G.subgroup_from_cycles(["(1,2)(3,4)", "(1,3)(2,4)"])
    verdict = classify_theorem(G, 3, N)
    assert verdict.tag == TAG_HYBRID_MONOMIAL
    assert verdict.witnesses["N"]
    assert verify_verdict(G, verdict)
    assert classify_theorem(G, 3).tag == TAG_HYBRID_MONOMIAL


def test_non_monomial_group_gets_nothing(group):
    G = group("SL23")
    verdict = classify_theorem(G, 3)
    assert verdict.tag == TAG_NONE
    assert "coprime-degree" in verdict.witnesses["failing_premises"]
    assert verify_verdict(G, verdict)


def test_base_field_other_than_q_needs_a_record(group):
    G = group("S3")
    assert classify_theorem(G, 3, base_field="K").tag != TAG_FROBENIUS_ABELIAN_COMPLEMENT
    records = [{"kind": "abelian_over_Q", "subgroup": ["(1,2,3)"]}]
    verdict = classify_theorem(G, 3, base_field="K", assumptions=records)
    assert verdict.tag == TAG_FROBENIUS_ABELIAN_COMPLEMENT
    assert any(p["source"] == "assumption" for p in verdict.premises)


def test_known_example_record(group):
    G = group("S4")
    records = [{"kind": "known_example", "note": "文献の例"}]
    assert classify_theorem(G, 3, base_field="K").tag == TAG_NONE
    verdict = classify_theorem(G, 3, base_field="K", assumptions=records)
    assert verdict.tag == TAG_KNOWN_EXAMPLE
    assert verdict.assumptions == records


def test_rejects_bad_input(group):
    G = group("S3")
    with pytest.raises(InputError):
        classify_theorem(G, 2)
    with pytest.raises(InputError):
        classify_theorem(G, 9)
    with pytest.raises(InputError):
        classify_theorem(G, 3, assumptions=[{"kind": "unknown"}])
    with pytest.raises(NotNormalSubgroup):
        classify_theorem(G, 3, G.subgroup_from_cycles(["(1,2)"]))


def test_extension_adds_place_premises(extension):
    verdict = classify_extension(extension("q_sqrt_m23"), 23)
    # G⁺ は自明群
    assert verdict.tag == TAG_COPRIME_DEGREE
    names = [p["name"] for p in verdict.premises]
    assert "S contains S_ram and S_inf" in names
    assert "S contains S_p" in names


def test_extension_without_places_above_p(extension):
    verdict = classify_extension(extension("q_sqrt_m23"), 3)
    assert not candidate(verdict, TAG_COPRIME_DEGREE)["applicable"]
    assert candidate(verdict, TAG_COPRIME_DEGREE)["failing_premise"] == "S contains S_p"


@pytest.mark.parametrize("name, p, kernel, expected", [
    ("S3", 7, None, "Thm 9.1"),
    ("S3", 3, None, "Cor 9.5"),
    ("S4", 3, ["(1,2)(3,4)", "(1,3)(2,4)"], "Thm 9.4"),
    ("SL23", 3, None, "none"),
])
def test_result_labels_of_documented_scenarios(group, name, p, kernel, expected):
    G = group(name)
    N = G.subgroup_from_cycles(kernel) if kernel else None
    verdict = classify_theorem(G, p, N)
    assert verdict.result == expected
    data = verdict.to_json()
    assert data["result"] == expected
    assert all(c["result"] == RESULT_LABELS[c["tag"]] for c in data["candidates"])


def test_every_tag_has_a_result_label():
    tags = [TAG_FROBENIUS_ELL_KERNEL, TAG_COPRIME_DEGREE, TAG_FROBENIUS_ABELIAN_COMPLEMENT,
            TAG_HYBRID_MONOMIAL, TAG_KNOWN_EXAMPLE, TAG_NONE]
    assert set(RESULT_LABELS) == set(tags)
    assert RESULT_LABELS[TAG_FROBENIUS_ELL_KERNEL] == "Cor 9.6"
