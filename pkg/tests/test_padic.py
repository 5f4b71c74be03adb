from fractions import Fraction

import numpy as np

from tools.padic import (
    MEMBER,
    NON_MEMBER,
    UNDECIDED,
    PAdicLattice,
    decide_membership,
    howell_form,
    howell_residue,
    log_order,
    nullspace_mod,
    rank_mod,
    reduce_rational,
    valuation,
)


def test_valuation_of_rationals():
    assert valuation(18, 3) == 2
    assert valuation(Fraction(5, 9), 3) == -2
    assert valuation(0, 3) is None


def test_reduce_rational():
    assert reduce_rational(Fraction(1, 2), 3, 2) == 5  # 2·5 = 10 ≡ 1 mod 9
    assert reduce_rational(-1, 5, 1) == 4


def test_rank_and_nullspace_mod_p():
    M = np.array([[1, 2], [2, 4]])
    assert rank_mod(M, 5) == 1
    basis = nullspace_mod(M, 5)
    assert basis.shape == (2, 1)
    assert not ((M @ basis) % 5).any()


def test_howell_form_spans_the_same_group():
    rows = howell_form([[3, 0], [0, 9]], 3, 3, 2)
    # ⟨3⟩ × ⟨9⟩ ⊂ (ℤ/27)^2 は 9·3 = 27 元
    assert log_order(rows, 3, 3) == 3
    assert not any(howell_residue(rows, [6, 18], 3, 3))
    assert any(howell_residue(rows, [1, 0], 3, 3))


def test_full_rank_lattice_membership():
    L = PAdicLattice(3, 2, [(3, 0), (0, 1)], precision=5)
    assert L.resolved()
    assert L.contains((6, 5)) == MEMBER
    assert L.contains((1, 0)) == NON_MEMBER
    assert L.contains((0, 0)) == MEMBER


def test_negative_valuations_are_shifted():
    L = PAdicLattice(3, 1, [(Fraction(1, 3),)], precision=4)
    assert L.shift == 1
    assert L.contains((1,)) == MEMBER
    assert L.contains((Fraction(1, 9),)) == NON_MEMBER


def test_rank_deficient_lattice_needs_ambient():
    L = PAdicLattice(3, 2, [(1, 0)], precision=3)
    assert L.contains((1, 0)) == UNDECIDED
    assert decide_membership(L, (1, 0), cap=6) == (UNDECIDED, 6)
    saturated = PAdicLattice(3, 2, [(1, 0)], precision=3, ambient=[(1, 0)])
    assert saturated.contains((2, 0)) == MEMBER


def test_scale():
    L = PAdicLattice(5, 1, [(1,)], precision=3).scale(5)
    assert L.contains((1,)) == NON_MEMBER
    assert L.contains((10,)) == MEMBER


def test_howell_rows_reduce_from_higher_precision():
    # k = 40 の Howell 行を p^20 で割った余りは k = 20 の格子と同じ群を張る
    rng = np.random.default_rng(7201)
    for _ in range(30):
        n = int(rng.integers(1, 4))
        generators = []
        for _ in range(int(rng.integers(1, 5))):
            generators.append(tuple(Fraction(int(rng.integers(-20, 21)) * 3 ** int(rng.integers(0, 4)),
                                             3 ** int(rng.integers(0, 2))) for _ in range(n)))
        low = PAdicLattice(3, n, generators, precision=20)
        high = PAdicLattice(3, n, generators, precision=40)
        assert low.shift == high.shift
        reduced = howell_form([[x % 3 ** 20 for x in row] for row in high.rows], 3, 20, n)
        assert log_order(reduced, 3, 20) == log_order(low.rows, 3, 20)
        for row in reduced:
            assert not any(howell_residue(low.rows, row, 3, 20))
        for row in low.rows:
            assert not any(howell_residue(reduced, row, 3, 20))
