from dataclasses import replace
from fractions import Fraction

import pytest

from tools.conjectures import (
    STATUS_FAIL,
    STATUS_NOT_CHECKABLE,
    STATUS_PASS,
    STATUS_UNDECIDED,
    bs_antiunit_check,
    brumer_check,
    check_hyp,
    dual_sbs_check,
    ray_class_consistency,
    torsion_free,
    torsion_free_p,
    with_t_set,
)
from utils.errors import InputError, NotCheckable, PrecisionTooLow, PresentationError


# ----------------------------------------------------------------------------
# Hyp(S,T)
# ----------------------------------------------------------------------------
@pytest.mark.parametrize("mu, chars, expected", [
    (1, [], True),
    (2, [], False),
    (2, [2], False),
    (2, [3], True),
    (6, [5], True),
    (6, [2, 3], True),
])
def test_torsion_free(mu, chars, expected):
    assert torsion_free(mu, chars) is expected


def test_torsion_free_p_part():
    assert torsion_free_p(2, [2], 3)
    assert not torsion_free_p(6, [3], 3)


def test_hyp_on_q_sqrt_m23(extension):
    datum = extension("q_sqrt_m23")
    assert check_hyp(datum).passed
    failing = check_hyp(with_t_set(datum, ["2"]))
    assert not failing.passed
    assert not failing.torsion_free
    assert failing.reasons


def test_hyp_requires_ramified_places_in_s(extension):
    datum = extension("q_sqrt_m23")
    places = [replace(v, in_s=False) if v.label == "23" else v for v in datum.places]
    verdict = check_hyp(replace(datum, places=places))
    assert not verdict.s_contains_ram_and_infinite


def test_hyp_detects_overlap(extension):
    datum = extension("q_zeta3")
    places = [replace(v, in_t=True) if v.label == "3" else v for v in datum.places]
    assert not check_hyp(replace(datum, places=places)).s_t_disjoint


def test_unknown_t_label(extension):
    with pytest.raises(InputError):
        with_t_set(extension("q_zeta3"), ["13"])


# ----------------------------------------------------------------------------
# Brumer
# ----------------------------------------------------------------------------
def test_brumer_passes_for_every_admissible_t(extension):
    verdict = brumer_check(extension("q_sqrt_m23"), 3)
    assert verdict.status == STATUS_PASS
    results = {tuple(entry["T"]): entry["result"] for entry in verdict.premises}
    assert results[("3",)] == STATUS_PASS
    assert results[("5",)] == STATUS_PASS
    assert results[("2",)].startswith("skipped")


def test_brumer_with_trivial_class_group(extension):
    verdict = brumer_check(extension("q_zeta3"), 3)
    assert verdict.status == STATUS_PASS
    assert verdict.reason == "cl_L(p) = 0"


def test_brumer_without_admissible_t(extension):
    datum = replace(with_t_set(extension("q_sqrt_m23"), ["2"]), t_sets=[])
    assert brumer_check(datum, 3).status == STATUS_NOT_CHECKABLE


def test_brumer_rejects_even_prime(extension):
    with pytest.raises(InputError):
        brumer_check(extension("q_sqrt_m23"), 2)


def test_missing_class_group(extension):
    datum = replace(extension("q_sqrt_m23"), class_group=None)
    with pytest.raises(NotCheckable):
        brumer_check(datum, 3)


# ----------------------------------------------------------------------------
# 双対強 Brumer–Stark
# ----------------------------------------------------------------------------
def test_dual_strong_brumer_stark(extension):
    verdict = dual_sbs_check(extension("q_sqrt_m23"), 3)
    assert verdict.status == STATUS_PASS
    assert verdict.witnesses["fitting"]["kind"] == "exact"
    assert verdict.witnesses["membership"]["status"] == "member"


def test_scaled_theta_leaves_the_fitting_lattice(extension):
    verdict = dual_sbs_check(extension("q_sqrt_m23"), 3, theta_scale=Fraction(1, 3))
    assert verdict.status == STATUS_FAIL
    assert verdict.witnesses["theta_scale"] == "1/3"


def test_strong_brumer_stark_without_dual(extension):
    verdict = dual_sbs_check(extension("q_sqrt_m23"), 3, dual=False)
    assert verdict.mode == "strong-bs"
    assert verdict.status == STATUS_PASS


def test_dual_sbs_needs_hyp(extension):
    datum = with_t_set(extension("q_sqrt_m23"), ["2"])
    assert dual_sbs_check(datum, 3).status == STATUS_NOT_CHECKABLE


# ----------------------------------------------------------------------------
# ℚ(√79) の狭義ヒルベルト類体（G = C2 × S3、cl_L(5)⁻ ≅ ℤ/5）
# ----------------------------------------------------------------------------
def test_brumer_on_hilbert_class_field(extension):
    verdict = brumer_check(extension("hilbert_q_sqrt79"), 5)
    assert verdict.status == STATUS_PASS
    assert verdict.witnesses["class_group_part"] == "minus"
    assert [entry["result"] for entry in verdict.premises] == [STATUS_PASS]


def test_brumer_on_hilbert_class_field_at_three(extension):
    verdict = brumer_check(extension("hilbert_q_sqrt79"), 3)
    assert verdict.status == STATUS_PASS
    assert verdict.reason == "cl_L(p)⁻ = 0"


@pytest.mark.parametrize("dual, mode", [(True, "dual-sbs"), (False, "strong-bs")])
def test_strong_brumer_stark_on_hilbert_class_field(extension, dual, mode):
    verdict = dual_sbs_check(extension("hilbert_q_sqrt79"), 5, dual=dual)
    assert verdict.mode == mode
    assert verdict.status == STATUS_PASS
    assert verdict.witnesses["theta"]["kind"] == "complex"


def test_minus_part_must_be_odd_module(extension):
    datum = extension("hilbert_q_sqrt79")
    class_group = {**datum.class_group, "action": {"(1,2)": [[1]], "(3,4)": [[-1]], "(3,4,5)": [[1]]}}
    with pytest.raises(PresentationError):
        brumer_check(replace(datum, class_group=class_group), 5)


def test_minus_part_needs_odd_theta(extension):
    datum = extension("hilbert_q_sqrt79")
    # S = {∞} だと θ_S に自明指標の成分 −1/2 が残る
    places = [replace(v, in_s=v.infinite) for v in datum.places]
    verdict = brumer_check(replace(datum, places=places), 5)
    assert verdict.status == STATUS_NOT_CHECKABLE
    assert "偶成分" in verdict.reason


# ----------------------------------------------------------------------------
# Brumer–Stark の反単数
# ----------------------------------------------------------------------------
def test_anti_unit_bookkeeping(extension):
    verdict = bs_antiunit_check(extension("q_sqrt_m23"), 3)
    assert verdict.status == STATUS_PASS
    assert all(p["holds"] for p in verdict.premises)
    names = [p["name"] for p in verdict.premises]
    assert "alpha^(z delta_T) = alpha_T^(z omega_L)" in names


def test_anti_unit_without_generator_data(extension):
    verdict = bs_antiunit_check(extension("q_sqrt_m23_partial"), 3)
    assert verdict.status == STATUS_NOT_CHECKABLE
    assert "alpha_valuations" in verdict.reason


def test_wrong_generator_valuations(extension):
    datum = extension("q_sqrt_m23")
    data = dict(datum.bs_data)
    data["alpha_valuations"] = {"terms": [{"g": "()", "c": "1"}, {"g": "(1,2)", "c": "-1"}]}
    verdict = bs_antiunit_check(replace(datum, bs_data=data), 3)
    assert verdict.status == STATUS_FAIL


def test_anti_unit_needs_ideal(extension):
    with pytest.raises(NotCheckable):
        bs_antiunit_check(replace(extension("q_sqrt_m23"), bs_data=None), 3)


# ----------------------------------------------------------------------------
# 射類群
# ----------------------------------------------------------------------------
def test_ray_class_group_orders(extension):
    report = ray_class_consistency(extension("q_sqrt_m23"), 3)
    assert report["status"] == STATUS_PASS
    assert report["cl_p_order"] == "3"
    assert report["ray_p_order"] == "3"


# ----------------------------------------------------------------------------
# コーパス全体での整合性
# ----------------------------------------------------------------------------
CORPUS_CHECKS = [
    ("q_sqrt_m23", 3),
    ("q_sqrt_m23_partial", 3),
    ("q_zeta3", 3),
    ("hilbert_q_sqrt79", 3),
    ("hilbert_q_sqrt79", 5),
]


def status_of(check, datum, p, **kwargs):
    try:
        return check(datum, p, **kwargs).status
    except NotCheckable:
        return STATUS_NOT_CHECKABLE
    except PrecisionTooLow:
        return STATUS_UNDECIDED


@pytest.mark.parametrize("name, p", CORPUS_CHECKS)
@pytest.mark.parametrize("check", [brumer_check, dual_sbs_check])
def test_verdict_does_not_depend_on_precision(extension, name, p, check):
    datum = extension(name)
    assert status_of(check, datum, p, precision=20) == status_of(check, datum, p, precision=40)


@pytest.mark.parametrize("name, p", CORPUS_CHECKS)
def test_dual_pass_implies_brumer_pass(extension, name, p):
    datum = extension(name)
    if status_of(dual_sbs_check, datum, p) == STATUS_PASS:
        assert status_of(brumer_check, datum, p) == STATUS_PASS


def test_dual_pass_occurs_in_the_corpus(extension):
    passing = [(name, p) for name, p in CORPUS_CHECKS if status_of(dual_sbs_check, extension(name), p) == STATUS_PASS]
    assert ("q_sqrt_m23", 3) in passing
    assert ("hilbert_q_sqrt79", 5) in passing
