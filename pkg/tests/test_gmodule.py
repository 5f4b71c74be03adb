import pytest

from tools.conjectures import load_module
from tools.group_ring import CenterElement, CoefficientRing, GroupRingElement, e_minus_center
from tools.gmodule import GModule, gmodule_from_json
from tools.groups import CentralInvolution
from utils.errors import InputError, PrecisionTooLow, PresentationError


@pytest.fixture
def c2(group):
    G = group("C2")
    return G, CentralInvolution.from_index(G, G.element("(1,2)"))


def minus_three(G, j, precision=4):
    """ℤ/3（j は −1 で作用）"""
    return GModule.from_invariant_factors(G, 3, [3], {j.index: [[-1]]}, precision=precision)


def test_p_part_of_invariant_factors(group):
    G = group("C1")
    M = GModule.from_invariant_factors(G, 3, [9, 3, 4], {}, precision=4)
    assert M.rank == 2
    assert M.order == 27
    assert M.invariant_factors() == [2, 1]
    assert M.exponent() == 2
    assert GModule.from_invariant_factors(G, 5, [9, 3, 4], {}).is_trivial()


def test_precision_is_raised_to_cover_the_exponent(group):
    G = group("C1")
    M = GModule.from_invariant_factors(G, 3, [3 ** 6], {}, precision=2)
    assert M.precision == 7
    with pytest.raises(PrecisionTooLow):
        GModule.from_invariant_factors(G, 3, [3 ** 6], {}, precision=2, precision_cap=5)


def test_infinite_factor_rejected(group):
    with pytest.raises(InputError):
        GModule.from_invariant_factors(group("C2"), 3, [0], {})


def test_action_must_respect_group_relations(group):
    G = group("C3")
    g = G.element("(1,2,3)")
    with pytest.raises(InputError):
        GModule.from_invariant_factors(G, 3, [3], {g: [[2]]})


def test_annihilation_by_group_ring_elements(c2):
    G, j = c2
    M = minus_three(G, j)
    Q = CoefficientRing.rational()
    one = GroupRingElement.one(G, Q)
    jj = GroupRingElement.basis(G, j.index, Q)
    assert M.is_minus_module(j)
    assert M.annihilated_by(one + jj).annihilates
    assert not M.annihilated_by(one - jj).annihilates
    assert M.annihilated_by(CenterElement.scalar(G, 3)).annihilates
    assert not M.annihilated_by(e_minus_center(j)).annihilates


def test_pontryagin_dual_keeps_order_and_sign(c2):
    G, j = c2
    M = GModule.from_invariant_factors(G, 3, [9, 3], {j.index: [[-1, 0], [0, -1]]}, precision=4)
    dual = M.pontryagin_dual()
    assert dual.order == M.order
    assert dual.invariant_factors() == [2, 1]
    assert dual.is_minus_module(j)


def test_presentation_over_the_minus_ring(c2):
    G, j = c2
    M = minus_three(G, j)
    presented = M.derive_presentation(j)
    assert presented.minus is j
    assert presented.to_module().order == 3


def test_presentation_over_the_group_ring(c2):
    G, j = c2
    M = minus_three(G, j)
    presented = M.derive_presentation()
    a, b = presented.shape
    assert b == 1 and a >= 1
    assert presented.to_module().order == 3


def test_plus_module_has_no_minus_presentation(c2):
    G, j = c2
    M = GModule.from_invariant_factors(G, 3, [3], {j.index: [[1]]}, precision=4)
    with pytest.raises(PresentationError):
        M.derive_presentation(j)


def test_from_json(c2):
    G, j = c2
    M = gmodule_from_json(G, {"invariant_factors": [6], "action": {"(1,2)": [[-1]]}}, 3, precision=4)
    assert M.order == 3
    assert M.is_minus_module(j)
    with pytest.raises(InputError):
        gmodule_from_json(G, {"action": {}}, 3)


@pytest.mark.parametrize("name, key, p", [
    ("q_sqrt_m23", "class_group", 3),
    ("q_sqrt_m23", "minus_module", 3),
    ("q_sqrt_m23", "ray_class_group", 3),
    ("q_sqrt_m23_partial", "class_group", 3),
    ("q_zeta3", "class_group", 3),
    ("hilbert_q_sqrt79", "class_group", 5),
    ("hilbert_q_sqrt79", "minus_module", 5),
])
def test_corpus_modules_do_not_depend_on_precision(extension, name, key, p):
    datum = extension(name)
    low = load_module(datum, key, p, precision=20)
    high = load_module(datum, key, p, precision=40)
    assert low.invariant_factors() == high.invariant_factors()
    assert low.order == high.order
