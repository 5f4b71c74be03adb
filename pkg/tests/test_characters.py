import pytest

from tools.characters import (
    Character,
    character_table,
    contragredient,
    frobenius_induction_check,
    induce,
    inflate,
    inner_product,
    is_monomial,
    kernel,
    linear_characters,
    parity,
    restrict,
    table_from_json,
    table_to_json,
    verify_monomial_witness,
)
from tools.cyclotomic import CyclotomicNumber
from tools.groups import CentralInvolution, all_subgroups, frobenius_structure, quotient
from utils.errors import InputError, NotIrreducible
from utils.io import corpus_listing

CORPUS_GROUPS = [entry["name"] for entry in corpus_listing()["groups"]]


@pytest.mark.parametrize("name,degrees", [
    ("S3", [1, 1, 2]),
    ("S4", [1, 1, 2, 3, 3]),
    ("Q8", [1, 1, 1, 1, 2]),
    ("D4", [1, 1, 1, 1, 2]),
    ("A4", [1, 1, 1, 3]),
    ("SL23", [1, 1, 1, 2, 2, 2, 3]),
    ("C7C3", [1, 1, 1, 3, 3]),
    ("Aff5", [1, 1, 1, 1, 4]),
    ("C2xS3", [1, 1, 1, 1, 2, 2]),
])
def test_degrees_and_sum_of_squares(group, name, degrees):
    G = group(name)
    table = character_table(G)
    assert sorted(table.degrees) == degrees
    assert sum(d * d for d in table.degrees) == G.order
    assert table.trivial().is_trivial()


def test_row_orthogonality_on_sl23(group):
    table = character_table(group("SL23"))
    for a, chi in enumerate(table):
        for b, psi in enumerate(table):
            assert inner_product(chi, psi) == (1 if a == b else 0)


def test_cyclic_values_need_roots_of_unity(group):
    G = group("C3")
    table = character_table(G)
    assert table.value_conductor == 3
    g = G.element("(1,2,3)")
    values = {chi(g) for chi in table if not chi.is_trivial()}
    assert values == {CyclotomicNumber.zeta(3), CyclotomicNumber.zeta(3, 2)}


def test_standard_representation_of_s3(group):
    # 置換表現の指標（固定点の数）から自明指標を引いたものが 2 次元既約指標
    G = group("S3")
    fixed = Character(G, [sum(1 for i in range(3) if G.elements[c[0]](i) == i) for c in G.classes])
    table = character_table(G)
    standard = fixed - table.trivial()
    assert [v.to_fraction() for v in standard.values] == [2, 0, -1]
    assert table.index_of(standard) == 2
    assert table.decompose(fixed) == [1, 0, 1]


def test_contragredient_swaps_complex_characters(group):
    table = character_table(group("C7C3"))
    cubic = [chi for chi in table if chi.degree == 3]
    assert contragredient(cubic[0]) == cubic[1]
    assert contragredient(table.trivial()) == table.trivial()


def test_parity_with_central_involution(group):
    G = group("C2xS3")
    j = CentralInvolution.from_index(G, G.element("(1,2)"))
    table = character_table(G)
    parities = [parity(chi, j) for chi in table]
    assert parities.count("odd") == 3
    assert parity(table.by_label("chi5"), j) == "odd"
    # 元の番号でも同じ
    assert [parity(chi, j.index) for chi in table] == parities
    with pytest.raises(InputError):
        parity(character_table(group("C2")).trivial(), j)
    with pytest.raises(NotIrreducible):
        parity(table[0] + table[1], j)


def test_frobenius_reciprocity(group):
    G = group("S4")
    U = G.subgroup_from_cycles(["(1,2,3)"])
    for lam in linear_characters(U.view):
        induced = induce(lam, U)
        assert induced.degree == 8
        for chi in character_table(G):
            assert inner_product(induced, chi) == inner_product(lam, restrict(chi, U))


@pytest.mark.parametrize("name", CORPUS_GROUPS)
def test_frobenius_reciprocity_on_every_subgroup(group, name):
    G = group(name)
    table = character_table(G)
    for U in all_subgroups(G):
        restricted = [restrict(chi, U) for chi in table]
        for lam in character_table(U.view):
            induced = induce(lam, U)
            assert induced.degree == lam.degree * U.index
            for chi, res in zip(table, restricted):
                assert inner_product(induced, chi) == inner_product(lam, res)


def test_inflation_from_s4_mod_v4(group):
    G = group("S4")
    V4 = G.subgroup_from_cycles(["(1,2)(3,4)", "(1,3)(2,4)"])
    Q, projection = quotient(G, V4)
    table = character_table(G)
    inflated = [inflate(phi, G, projection) for phi in character_table(Q)]
    assert sorted(chi.degree for chi in inflated) == [1, 1, 2]
    for chi in inflated:
        table.index_of(chi)
        assert V4.elements <= kernel(chi).elements


@pytest.mark.parametrize("name", ["S3", "S4", "A4", "Q8", "D4", "C7C3", "Aff5", "C2xS3"])
def test_monomial_groups(group, name):
    G = group(name)
    result = is_monomial(G)
    assert result.is_monomial
    for label, witness in result.witnesses.items():
        assert verify_monomial_witness(G, label, witness)


def test_sl23_is_not_monomial(group):
    result = is_monomial(group("SL23"))
    assert not result.is_monomial
    missing = [label for label, w in result.witnesses.items() if w is None]
    assert len(missing) == 3


@pytest.mark.parametrize("name", ["S3", "A4", "C7C3", "Aff5"])
def test_frobenius_characters_are_induced_from_kernel(group, name):
    G = group(name)
    assert frobenius_induction_check(G, frobenius_structure(G))


def test_table_json_is_checked_on_load(group):
    G = group("S3")
    data = table_to_json(character_table(G))
    assert data["class_sizes"] == [1, 3, 2]
    reloaded = table_from_json(G, data)
    assert reloaded.degrees == character_table(G).degrees
    width = len(data["characters"][2]["values"][0])
    data["characters"][2]["values"][0] = ["3"] + ["0"] * (width - 1)
    with pytest.raises(AssertionError):
        table_from_json(G, data)
