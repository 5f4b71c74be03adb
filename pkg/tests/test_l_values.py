from dataclasses import replace
from fractions import Fraction

import pytest

from tools.characters import character_table
from tools.cyclotomic import CyclotomicNumber
from tools.group_ring import CenterElement, e_minus_center
from tools.l_values import (
    PROVENANCE_INDUCED,
    PROVENANCE_MONOMIAL,
    PROVENANCE_NATIVE,
    PROVENANCE_VANISHING,
    ArtinMap,
    PlaceDatum,
    bernoulli_L0,
    check_place_consistency,
    computed_certificates,
    delta_t,
    euler_factor_at_zero,
    integrality_report,
    kronecker_character,
    p_adic_stickelberger,
    primitive_l_value,
    s_truncated_l_value,
    stickelberger,
    teichmuller,
    vanishing_order,
)
from tools.conjectures import with_t_set
from utils.errors import EvenCharacterError, InconsistentPlaceData, InputError, MissingLValue, NotCheckable


def rational(value) -> Fraction:
    return value.to_fraction()


# ----------------------------------------------------------------------------
# ディリクレ指標
# ----------------------------------------------------------------------------
@pytest.mark.parametrize("d, expected", [(-3, Fraction(1, 3)), (-4, Fraction(1, 2)), (-23, Fraction(3))])
def test_bernoulli_value_is_class_number_ratio(d, expected):
    # L(0, χ_d) = 2h/w
    assert rational(bernoulli_L0(kronecker_character(d))) == expected


def reduced_form_count(d: int) -> int:
    """判別式 d < 0 の簡約二次形式 (a, b, c) の個数 = h(d)"""
    count = 0
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            if (b * b - d) % (4 * a):
                continue
            c = (b * b - d) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            count += 1
        a += 1
    return count


@pytest.mark.parametrize("d", [-3, -4, -7, -8, -11, -15, -19, -23, -79])
def test_bernoulli_value_against_reduced_forms(d):
    w = {-3: 6, -4: 4}.get(d, 2)
    assert rational(bernoulli_L0(kronecker_character(d))) == Fraction(2 * reduced_form_count(d), w)


def test_even_and_imprimitive_characters_rejected():
    with pytest.raises(EvenCharacterError):
        bernoulli_L0(kronecker_character(5))
    with pytest.raises(InputError):
        kronecker_character(-12)


def test_teichmuller_is_odd_and_primitive():
    omega = teichmuller(7)
    assert omega.is_odd()
    assert omega.is_primitive
    assert omega.conductor == 7
    with pytest.raises(InputError):
        teichmuller(2)


def test_primitive_part_of_imprimitive_character():
    chi = kronecker_character(-3)
    lifted = chi * kronecker_character(5)
    assert lifted.conductor == 15
    assert (lifted * kronecker_character(5)).primitive().conductor == 3


def test_artin_map_frobenius(extension):
    datum = extension("q_sqrt_m23")
    G = datum.group
    artin = datum.artin_map
    assert artin.frobenius(2) == 0            # 2 は平方剰余
    assert artin.frobenius(5) == G.element("(1,2)")
    assert artin.frobenius(23) is None


def test_artin_map_must_generate(group):
    G = group("C2")
    with pytest.raises(InputError):
        ArtinMap.from_generators(G, 23, {2: 0})
    with pytest.raises(InputError):
        ArtinMap.from_generators(G, 23, {23: G.element("(1,2)")})


# ----------------------------------------------------------------------------
# オイラー因子
# ----------------------------------------------------------------------------
def test_euler_factor_of_two_dimensional_character(group):
    G = group("S3")
    chi = [c for c in character_table(G) if c.degree == 2][0]
    place = PlaceDatum("2", norm=2, frobenius=G.element("(1,2,3)"))
    # 固有値 ω, ω² で (1 − 2ω)(1 − 2ω²) = 7
    assert euler_factor_at_zero(chi, place, 2) == 7
    assert euler_factor_at_zero(chi, place, 1) == 3


def test_euler_factor_of_trivial_character(group):
    G = group("S3")
    place = PlaceDatum("5", norm=5, frobenius=G.element("(1,2)"))
    assert euler_factor_at_zero(character_table(G).trivial(), place, 5) == -4


def test_euler_factor_at_totally_ramified_place(group):
    G = group("S3")
    chi = [c for c in character_table(G) if c.degree == 2][0]
    place = PlaceDatum("3", norm=3, frobenius=0, inertia=G.whole())
    assert euler_factor_at_zero(chi, place, 3) == 1


def test_euler_factor_needs_frobenius(group):
    G = group("S3")
    with pytest.raises(InconsistentPlaceData):
        euler_factor_at_zero(character_table(G).trivial(), PlaceDatum("5", norm=5), 5)


# ----------------------------------------------------------------------------
# L 値
# ----------------------------------------------------------------------------
def test_native_l_values(extension):
    datum = extension("q_sqrt_m23")
    table = character_table(datum.group)
    trivial, odd = table[0], table[1]
    assert primitive_l_value(trivial, datum).value == Fraction(-1, 2)
    value = primitive_l_value(odd, datum)
    assert value.provenance == PROVENANCE_NATIVE
    assert value.value == 3
    assert value.detail["conductor"] == 23


def test_trivial_character_vanishes_with_two_places(extension):
    datum = extension("q_sqrt_m23")
    trivial = character_table(datum.group).trivial()
    assert vanishing_order(trivial, datum) == 1
    result = s_truncated_l_value(trivial, datum)
    assert result.value == 0
    assert result.provenance == PROVENANCE_VANISHING


def test_stickelberger_of_q_sqrt_m23(extension):
    datum = extension("q_sqrt_m23")
    j = datum.j
    e = e_minus_center(j)
    assert stickelberger(with_t_set(datum, [])).theta == e * 3
    # T = {3}: δ_T = 1 − 3 = −2
    assert stickelberger(datum).theta == e * -6
    assert stickelberger(with_t_set(datum, ["5"])).theta == e * 18


def test_stickelberger_of_q_zeta3(extension):
    datum = extension("q_zeta3")
    G = datum.group
    theta = stickelberger(datum)
    # θ_S^T = 1 − j
    assert theta.theta.rational_class_coordinates() == (Fraction(1), Fraction(-1))
    assert not theta.all_even
    assert stickelberger(with_t_set(datum, ["7"])).theta == CenterElement.from_class_coordinates(G, [-1, 1])


def test_hilbert_class_field_components(extension):
    datum = extension("hilbert_q_sqrt79")
    G = datum.group
    table = character_table(G)
    odd_plane = table.by_label("chi5")
    assert odd_plane.degree == 2
    # 2 の上で V^{G_w} が 1 次元残るので L_S(0, χ̌) = 0
    assert vanishing_order(odd_plane, datum) == 1
    result = stickelberger(datum)
    components = {c["character"]: CyclotomicNumber.from_json(c["component"]) for c in result.components}
    chi_m4 = next(chi for chi in table if chi.is_linear() and chi(datum.j.index) == -1
                  and chi(G.element("(3,4)")) == 1)
    # δ_T = 1 + 3、L_S = L(0, χ_{−4})·(1 + 1) = 1
    assert delta_t(chi_m4, datum) == 4
    assert components[chi_m4.label] == 4
    assert all(value == 0 for label, value in components.items() if label != chi_m4.label)
    assert set(result.theta.rational_class_coordinates()) == {Fraction(1, 3), Fraction(-1, 3)}


def test_induced_l_value_matches_certificate(extension):
    datum = extension("hilbert_q_sqrt79")
    chi = character_table(datum.group).by_label("chi5")
    value = primitive_l_value(chi, datum)
    assert value.provenance == PROVENANCE_INDUCED
    assert value.value == 4
    assert value.detail["narrow_class_number"] == 6
    stripped = replace(datum, certificates=[])
    assert primitive_l_value(chi, stripped).value == 4
    assert stickelberger(stripped).theta == stickelberger(datum).theta


def test_induced_even_plane_vanishes(extension):
    datum = extension("hilbert_q_sqrt79")
    G = datum.group
    even_plane = next(chi for chi in character_table(G) if chi.degree == 2 and chi(datum.j.index) == 2)
    assert primitive_l_value(even_plane, datum).value == 0


def test_induced_value_disagreeing_with_certificate(extension):
    datum = extension("hilbert_q_sqrt79")
    cert = replace(datum.certificates[0], value=CyclotomicNumber.rational(3))
    chi = character_table(datum.group).by_label("chi5")
    with pytest.raises(InconsistentPlaceData):
        primitive_l_value(chi, replace(datum, certificates=[cert]))


def test_induction_catches_wrong_frobenius(extension):
    datum = extension("hilbert_q_sqrt79")
    G = datum.group
    # 5 は F で分解し、φ_w は形式 (5, 4, −15) の像 (3,4,5) と共役でなければならない
    places = [replace(v, frobenius=G.element("(1,2)")) if v.label == "5" else v for v in datum.places]
    chi = character_table(G).by_label("chi5")
    with pytest.raises(InconsistentPlaceData):
        primitive_l_value(chi, replace(datum, places=places, certificates=[]))


def test_induction_catches_swapped_images(extension):
    datum = extension("hilbert_q_sqrt79")
    G = datum.group
    induction = datum.inductions[0]
    swap = {0: datum.j.index, datum.j.index: 0}
    classes = [(form, swap.get(g, g)) for form, g in induction.classes]
    broken = replace(induction, classes=classes)
    chi = character_table(G).by_label("chi5")
    # 単位類と J の像を入れ替えると ψ = χ_{−4} で類和 −9/2 ≠ L(0, χ_{−4})·L(0, χ_{−79}) = 5/2
    with pytest.raises(InconsistentPlaceData):
        primitive_l_value(chi, replace(datum, inductions=[broken], certificates=[]))


def test_missing_certificate(extension):
    datum = replace(extension("hilbert_q_sqrt79"), certificates=[], inductions=[])
    chi = character_table(datum.group).by_label("chi5")
    with pytest.raises(MissingLValue):
        primitive_l_value(chi, datum)


def test_inconsistent_frobenius_detected(extension):
    datum = extension("q_sqrt_m23")
    places = [replace(v, frobenius=0) if v.label == "5" else v for v in datum.places]
    with pytest.raises(InconsistentPlaceData):
        check_place_consistency(replace(datum, places=places))


def test_computed_certificates(extension):
    datum = extension("q_sqrt_m23")
    certificates = computed_certificates(datum)
    assert len(certificates) == 2
    assert all(c.provenance == "computed" and c.fingerprint for c in certificates)
    # 一次指標 4 個は native、2 次元指標 2 個は誘導
    assert len(computed_certificates(extension("hilbert_q_sqrt79"))) == 6


def test_p_adic_stickelberger(extension):
    datum = extension("q_sqrt_m23")
    result = p_adic_stickelberger(datum, 23)
    assert result.provenance == PROVENANCE_MONOMIAL
    assert result.theta == stickelberger(datum).theta
    with pytest.raises(NotCheckable):
        p_adic_stickelberger(datum, 3)


def test_integrality_modes(extension):
    theta = stickelberger(with_t_set(extension("q_sqrt_m23"), [])).theta
    assert integrality_report(theta, "Z[G]").verdict == "fail"
    assert integrality_report(theta, "Z_p[G]", 3).verdict == "pass"
    assert integrality_report(theta, "Z_p[G]", 2).verdict == "fail"
    assert integrality_report(theta, "I-sample", 3).verdict == "pass"
    with pytest.raises(InputError):
        integrality_report(theta, "Z_p[G]")
