from fractions import Fraction
from itertools import combinations, permutations

import numpy as np
import pytest
from sympy.combinatorics import Permutation

from tools.fitting import (
    CONTAINED,
    EQUAL,
    FULL_CENTER,
    KIND_EXACT,
    KIND_FRACTION,
    KIND_LOWER_BOUND,
    KIND_ZERO,
    PROPER,
    UNDECIDED_AT_BOUND,
    FittingInvariant,
    PresentedModule,
    annihilation_check,
    compare_up_to_units,
    denominator_certificate,
    denominator_dichotomy,
    fitting_of_presentation,
    fitting_of_two_term_complex,
    fitting_product,
    idempotent_cut,
    lattice_relation,
    member_up_to_units,
    safe_denominator,
)
from tools.gmodule import GModule
from tools.group_ring import CenterElement, CoefficientRing, GroupRingElement, GroupRingMatrix, e_minus_center
from tools.groups import CentralInvolution
from tools.padic import MEMBER, NON_MEMBER
from utils.errors import NotCheckable


@pytest.fixture
def c2(group):
    G = group("C2")
    return G, CentralInvolution.from_index(G, G.element("(1,2)"))


def scalar(G, value):
    return CenterElement.scalar(G, value)


def test_square_presentation_is_exact(c2):
    G, _ = c2
    fitt = fitting_of_presentation(PresentedModule.from_integers(G, [[3]], 3, precision=4))
    assert fitt.kind == KIND_EXACT
    assert fitt.contains(scalar(G, 3))[0] == MEMBER
    assert fitt.contains(scalar(G, -6))[0] == MEMBER
    assert fitt.contains(scalar(G, 1))[0] == NON_MEMBER


def test_fewer_relations_than_generators_gives_zero(c2):
    G, _ = c2
    fitt = fitting_of_presentation(PresentedModule.from_integers(G, [[3, 0]], 3))
    assert fitt.kind == KIND_ZERO
    assert fitt.contains(scalar(G, 0))[0] == MEMBER
    assert fitt.contains(scalar(G, 3))[0] == NON_MEMBER


def test_commutative_minors(c2):
    # 可換のとき Fitting イデアルは極大小行列式で生成される
    G, _ = c2
    fitt = fitting_of_presentation(PresentedModule.from_integers(G, [[9, 0], [0, 3], [3, 3]], 3, precision=5))
    assert fitt.kind == KIND_LOWER_BOUND
    assert fitt.contains(scalar(G, 9))[0] == MEMBER
    assert fitt.contains(scalar(G, 3))[0] == NON_MEMBER


def test_product_formula_matches_direct_sum(c2):
    G, _ = c2
    M = PresentedModule.from_integers(G, [[3]], 3, precision=4)
    N = PresentedModule.from_integers(G, [[9]], 3, precision=4)
    product = fitting_product(M, N)
    assert product.kind == KIND_EXACT
    assert product.notes["direct_sum"] == EQUAL
    assert product.contains(scalar(G, 27))[0] == MEMBER
    assert product.contains(scalar(G, 9))[0] == NON_MEMBER


def test_two_term_complex_quotient(c2):
    G, _ = c2
    A = PresentedModule.from_integers(G, [[3]], 3, precision=4)
    B = PresentedModule.from_integers(G, [[27]], 3, precision=4)
    fitt = fitting_of_two_term_complex(A, B)
    assert fitt.kind == KIND_FRACTION
    assert fitt.generators[0] == 9


def test_lattice_relation(c2):
    G, _ = c2
    three = fitting_of_presentation(PresentedModule.from_integers(G, [[3]], 3, precision=4))
    nine = fitting_of_presentation(PresentedModule.from_integers(G, [[9]], 3, precision=4))
    assert lattice_relation(three, nine) == CONTAINED
    assert lattice_relation(three, three) == EQUAL
    assert lattice_relation(nine, three) == NON_MEMBER


def test_minus_part_of_a_class_group(c2):
    G, j = c2
    M = GModule.from_invariant_factors(G, 3, [3], {j.index: [[-1]]}, precision=4)
    fitt = fitting_of_presentation(M.derive_presentation(j))
    assert fitt.kind == KIND_EXACT
    e = e_minus_center(j)
    assert fitt.contains(e * 3)[0] == MEMBER
    assert fitt.contains(e * 6)[0] == MEMBER
    assert fitt.contains(e)[0] == NON_MEMBER


def test_member_up_to_units(c2):
    G, j = c2
    M = GModule.from_invariant_factors(G, 3, [3], {j.index: [[-1]]}, precision=4)
    fitt = fitting_of_presentation(M.derive_presentation(j))
    e = e_minus_center(j)
    assert member_up_to_units(fitt, e * -3).status == MEMBER
    result = member_up_to_units(fitt, e, bound=2)
    assert result.status == UNDECIDED_AT_BOUND
    assert result.explored > 1


def test_compare_up_to_units(c2):
    G, _ = c2
    three = fitting_of_presentation(PresentedModule.from_integers(G, [[3]], 3, precision=4))
    minus_three = fitting_of_presentation(PresentedModule.from_integers(G, [[-3]], 3, precision=4))
    assert compare_up_to_units(three, minus_three, bound=1).status == EQUAL


def test_denominator_dichotomy(group):
    S3 = group("S3")
    assert denominator_dichotomy(S3, 3) == PROPER
    assert denominator_dichotomy(S3, 5) == FULL_CENTER
    assert denominator_dichotomy(group("C6"), 3) == FULL_CENTER
    assert safe_denominator(S3, 3) == 3
    assert safe_denominator(S3, 5) == 1


def test_denominator_certificate(group):
    S3 = group("S3")
    granted = denominator_certificate(scalar(S3, 3), 3, sample_size=2)
    assert granted.verdict == "member-verified-on-sample"
    assert granted.granted
    refused = denominator_certificate(scalar(S3, Fraction(1, 3)), 3)
    assert refused.verdict == "non-member-with-witness"
    assert denominator_certificate(scalar(S3, 1), 5).verdict == "member-by-dichotomy"


def test_denominator_certificate_needs_rational_coordinates(group):
    # 7 ≡ 1 mod 3 なので e_χ は ζ(ℤ_7[C3]) に入るが、ここでは判定しない
    C3 = group("C3")
    idempotent = CenterElement(C3, [0, 1, 0])
    assert not idempotent.is_rational()
    with pytest.raises(NotCheckable):
        denominator_certificate(idempotent, 7)


def test_annihilation_check(c2):
    G, j = c2
    M = GModule.from_invariant_factors(G, 3, [3], {j.index: [[-1]]}, precision=4)
    fitt = fitting_of_presentation(M.derive_presentation(j))
    assert annihilation_check(scalar(G, 1), fitt, M).verdict == "pass"


def test_idempotent_cut(c2):
    G, _ = c2
    presented = PresentedModule.from_integers(G, [[3]], 3, precision=4)
    fitt = fitting_of_presentation(presented)
    cut = idempotent_cut(fitt, CenterElement(G, [1, 0]), presented)
    assert cut.notes["idempotent_integral"]
    assert cut.notes["cut_module_equality"]


# ============================================================================
# 可換群環での小行列式との照合（ランダムな表示）
# ============================================================================
def leibniz_determinant(rows):
    """可換な群環上の行列式を置換の和で"""
    n = len(rows)
    G = rows[0][0].group
    total = GroupRingElement.zero(G, CoefficientRing.rational())
    for perm in permutations(range(n)):
        term = GroupRingElement.one(G, CoefficientRing.rational())
        for i, k in enumerate(perm):
            term = term * rows[i][k]
        total = total + term if Permutation(list(perm)).signature() > 0 else total - term
    return total


def minors_oracle(module):
    """b×b 小行列式すべて（Z/p^k の成分は整数に持ち上げる）"""
    a, b = module.shape
    lifted = module.matrix.lift()
    out = []
    for rows in combinations(range(a), b):
        minor = [[lifted[i, k] for k in range(b)] for i in rows]
        out.append(CenterElement.from_element(leibniz_determinant(minor)))
    return out


def random_presentation(G, rng, a, b, precision=20):
    ring = CoefficientRing.zmod(3, precision)
    rows = [[GroupRingElement.from_terms(G, {g: int(rng.integers(-9, 10)) for g in range(G.order)}, ring)
             for _ in range(b)] for _ in range(a)]
    return PresentedModule(GroupRingMatrix(rows), 3, precision)


@pytest.mark.parametrize("name", ["C2", "C6"])
def test_random_presentations_match_commutative_minors(group, name):
    G = group(name)
    rng = np.random.default_rng(7101)
    for _ in range(50):
        a, b = int(rng.integers(1, 4)), int(rng.integers(1, 3))
        module = random_presentation(G, rng, a, b)
        fitt = fitting_of_presentation(module)
        if a < b:
            assert fitt.kind == KIND_ZERO
            continue
        minors = minors_oracle(module)
        assert all(any(z == f for f in fitt.generators) for z in minors)
        assert all(any(f == z for z in minors) for f in fitt.generators)
        # 階数が落ちた格子では所属が未決になる
        if fitt.lattice().resolved():
            for z in minors:
                assert fitt.contains(z)[0] == MEMBER
            oracle = FittingInvariant(G, 3, fitt.kind, minors, precision=20)
            assert lattice_relation(fitt, oracle) == EQUAL


@pytest.mark.parametrize("name", ["C2", "C6", "S3"])
def test_product_formula_on_random_square_presentations(group, name):
    G = group(name)
    rng = np.random.default_rng(7102)
    for _ in range(10):
        b, c = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        M = random_presentation(G, rng, b, b)
        N = random_presentation(G, rng, c, c)
        assert fitting_product(M, N).notes["direct_sum"] == EQUAL
