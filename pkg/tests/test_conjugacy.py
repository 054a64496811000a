from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pamaps.algebra import normalize_right, same_equivalence_class
from pamaps.conjugacy import (
    MarkovSkeleton, RecurrenceKind, SlopeMode, a_star, check_slope_matrix, classify,
    conjugate_by_index, construct_conjugate, construct_conjugate_slope1,
    default_slopes, dump_matrix, index_map, index_maps_from_a_star, load_matrix,
    monotone_partition, nullspace, reverse_index, same_class_from_index, stationary,
    support,
)
from pamaps.construct import random_G
from pamaps.dynamics import markov_partition
from pamaps.errors import DomainError, InfeasibleError, ParseError
from pamaps.map_core import (
    compose, f_A, f_B, identity, is_in_G, is_lambda_preserving, reflection, tent,
)

F = Fraction
SIX_CELL_S = [0, 2, 6, 5, 6, 1, 0]
SIX_CELL_ASTAR = [
    [1, 1, 0, 0, 0, 0],
    [0, 0, 1, 1, 1, 1],
    [0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 0, 1],
    [0, 1, 1, 1, 1, 1],
    [1, 0, 0, 0, 0, 0],
]
h, q, e = F(1, 2), F(1, 4), F(1, 8)
SIX_CELL_A1 = [
    [h, h, 0, 0, 0, 0],
    [0, 0, h, h, h, h],
    [0, 0, 0, 0, 0, q],
    [0, 0, 0, 0, 0, e],
    [0, h, h, h, h, e],
    [h, 0, 0, 0, 0, 0],
]
SIX_CELL_A2 = [row[:5] + [c] for row, c in zip(SIX_CELL_A1, [0, q, h, e, e, 0])]
TRANSIENT_ASTAR = [
    [0, 1, 1, 0, 0],
    [0, 1, 1, 0, 0],
    [1, 0, 0, 0, 0],
    [1, 1, 1, 1, 1],
    [1, 1, 1, 1, 1],
]
TWO_BLOCK_ASTAR = [[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]]
OFF_DIAGONAL_ASTAR = [
    [0, 0, 1, 1, 0, 0],
    [0, 0, 1, 1, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [0, 1, 1, 1, 1, 1],
    [0, 1, 1, 1, 1, 1],
    [1, 0, 0, 0, 0, 0],
]


def mat_vec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


# -- index maps ------------------------------------------------------------

def test_index_map_examples():
    assert index_map(MarkovSkeleton.from_map(tent())) == [0, 2, 0]
    assert index_map(MarkovSkeleton.from_map(identity())) == [0, 1]
    t = construct_conjugate(SIX_CELL_S, SIX_CELL_A1)
    assert index_map(MarkovSkeleton.from_map(t)) == SIX_CELL_S


def test_index_map_rejects_off_partition_value():
    with pytest.raises(DomainError):
        index_map(MarkovSkeleton([0, h, 1], [0, F(1, 3), 0]))


def test_skeleton_text():
    sk = MarkovSkeleton.from_map(tent())
    text = sk.to_text()
    assert text == "skeleton/1\n0 0\n1/2 1\n1 0\n"
    assert MarkovSkeleton.from_text(text) == sk
    with pytest.raises(ParseError) as err:
        MarkovSkeleton.from_text("skeleton/1\n0 0\n1/2\n1 0\n")
    assert err.value.lineno == 3


def test_a_star_examples():
    assert a_star([0, 2, 0]) == [[1, 1], [1, 1]]
    assert a_star(SIX_CELL_S) == SIX_CELL_ASTAR
    assert a_star([0, 1]) == [[1]]


def test_a_star_reconstruction():
    assert index_maps_from_a_star(SIX_CELL_ASTAR) == [SIX_CELL_S]
    assert index_maps_from_a_star([[1, 1], [1, 1]]) == [[0, 2, 0], [2, 0, 2]]


def test_reverse_and_block_coven():
    assert reverse_index([0, 2, 0]) == [2, 0, 2]
    assert conjugate_by_index([0, 2, 0], [0, 2, 0])
    assert conjugate_by_index([0, 2, 0], [2, 0, 2])
    assert reverse_index([1, 0]) == [1, 0]
    assert not conjugate_by_index([0, 1], [1, 0])


# -- classification and stationary vectors ---------------------------------

def test_classify_examples():
    assert classify(SIX_CELL_ASTAR).kind is RecurrenceKind.Irreducible
    assert classify(TRANSIENT_ASTAR).kind is RecurrenceKind.HasTransient
    rc = classify(TWO_BLOCK_ASTAR)
    assert rc.kind is RecurrenceKind.MultipleRecurrent and rc.count == 2
    assert str(rc) == "MultipleRecurrent(2)"


def test_default_slopes():
    A = default_slopes(SIX_CELL_ASTAR)
    assert A == SIX_CELL_A1
    col = lambda A, j: sorted((row[j] for row in A if row[j]), reverse=True)
    assert col(A, 0) == [h, h]
    assert col(default_slopes([[1, 1, 0], [1, 0, 1], [1, 0, 0]]), 0) == [h, q, q]
    assert default_slopes([[1]]) == [[1]]
    assert default_slopes(SIX_CELL_ASTAR, SlopeMode.Uniform)[1][5] == F(1, 4)
    with pytest.raises(DomainError):
        default_slopes([[1, 0], [1, 0]])


def test_stationary_examples():
    assert stationary(SIX_CELL_A1).vector == (q, q, F(1, 32), F(1, 64), F(21, 64), e)
    assert stationary(SIX_CELL_A2).vector == (F(4, 17), F(4, 17), F(1, 17), F(1, 68),
                                          F(23, 68), F(2, 17))
    assert stationary([[1]]).vector == (1,)


def test_stationary_transient_has_no_solution():
    with pytest.raises(InfeasibleError):
        stationary(default_slopes(TRANSIENT_ASTAR))


def test_stationary_multiple_classes():
    st_ = stationary(default_slopes(TWO_BLOCK_ASTAR))
    assert not st_.unique and len(st_.basis) == 2
    assert st_.vector == (q, q, q, q)
    assert len(nullspace([[a - (i == j) for j, a in enumerate(row)]
                          for i, row in enumerate(default_slopes(TWO_BLOCK_ASTAR))])) == 2


def test_nullspace_dimension_one_when_irreducible():
    M = [[a - (i == j) for j, a in enumerate(row)] for i, row in enumerate(SIX_CELL_A1)]
    assert len(nullspace(M)) == 1


def test_slope_matrix_check():
    with pytest.raises(DomainError):
        check_slope_matrix([[h, 0], [q, 1]])


# -- synthesis -------------------------------------------------------------

def test_construct_examples():
    t1 = construct_conjugate(SIX_CELL_S, SIX_CELL_A1)
    assert is_in_G(t1)
    t2 = construct_conjugate(SIX_CELL_S, SIX_CELL_A2)
    assert is_lambda_preserving(t2) and not is_in_G(t2)
    assert construct_conjugate([0, 2, 0], default_slopes(a_star([0, 2, 0]))) == tent()


def test_construct_monotone_partition_points():
    t = construct_conjugate(SIX_CELL_S, SIX_CELL_A1)
    expected = [F(v) / 16 for v in (0, 4, 8, F(17, 2), F(35, 4), 14, 16)]
    assert monotone_partition(t) == expected
    assert len(markov_partition(t)) > len(expected)


def test_construct_rejects_unit_slopes_and_transients():
    with pytest.raises(DomainError):
        construct_conjugate([0, 1], [[1]])
    with pytest.raises(DomainError):
        construct_conjugate([0, 2, 0], default_slopes(a_star([0, 1, 0])))


def test_slope1_plus_case():
    s = [2, 0, 2, 3, 5, 3]
    t = construct_conjugate_slope1(s, default_slopes(a_star(s)))
    assert index_map(MarkovSkeleton.from_map(t)) == s
    assert is_lambda_preserving(t) and is_in_G(t)


def test_slope1_minus_case():
    s = [3, 5, 3, 2, 0, 2]
    t = construct_conjugate_slope1(s, default_slopes(a_star(s)))
    assert index_map(MarkovSkeleton.from_map(t)) == s
    assert is_lambda_preserving(t) and is_in_G(t)
    assert t.slope(2) == -1


def test_slope1_off_diagonal_case():
    (s,) = index_maps_from_a_star(OFF_DIAGONAL_ASTAR)
    t = construct_conjugate_slope1(s, default_slopes(OFF_DIAGONAL_ASTAR))
    assert is_lambda_preserving(t) and not is_in_G(t)
    assert all(abs(v) > 1 for v in compose(t, t).slopes)


def test_slope1_assumption_violation():
    s = [0, 1, 3, 2]
    with pytest.raises(DomainError):
        construct_conjugate_slope1(s, default_slopes(a_star(s)))


def test_reversal_symmetry():
    rs = reverse_index(SIX_CELL_S)
    N = len(SIX_CELL_A1)
    A_rev = [[SIX_CELL_A1[N - 1 - i][N - 1 - j] for j in range(N)] for i in range(N)]
    t = construct_conjugate(SIX_CELL_S, SIX_CELL_A1)
    t_rev = construct_conjugate(rs, A_rev)
    assert t_rev == compose(reflection(), compose(t, reflection()))


# -- class test through index maps ----------------------------------------

def test_same_class_from_index():
    assert same_class_from_index(tent(), tent())
    rebuilt = construct_conjugate([0, 2, 0], default_slopes(a_star([0, 2, 0])))
    assert same_class_from_index(rebuilt, tent())
    g1 = construct_conjugate(SIX_CELL_S, SIX_CELL_A1)
    f2 = normalize_right(f_B(), g1)
    g2 = compose(compose(f_B(), g1), f2)
    assert is_in_G(g2)
    assert not same_class_from_index(g1, g2)
    assert same_equivalence_class(g1, g2)


@given(st.integers(0, 10**6), st.integers(1, 3))
def test_index_map_equality_implies_same_class(seed, c):
    g = random_G(seed, c)
    f2 = normalize_right(f_A(), g)
    g2 = compose(compose(f_A(), g), f2)
    same_class_from_index(g, g2)


@given(st.integers(0, 10**6), st.integers(1, 3))
def test_construct_from_random_skeletons(seed, c):
    g = random_G(seed, c)
    s = index_map(MarkovSkeleton.from_map(g))
    A = default_slopes(a_star(s))
    if classify(a_star(s)).kind is RecurrenceKind.HasTransient:
        return
    if any(v == 1 for row in A for v in row):
        return
    t = construct_conjugate(s, A)
    assert index_map(MarkovSkeleton.from_map(t)) == s
    assert is_lambda_preserving(t)
    assert all(abs(v) > 1 for v in t.slopes)
    v = stationary(A).vector
    assert mat_vec(A, v) == list(v) and sum(v) == 1


def test_matrix_text():
    text = dump_matrix(SIX_CELL_A1)
    assert text.splitlines()[0] == "1/2 1/2 0 0 0 0"
    assert load_matrix(text) == SIX_CELL_A1
    with pytest.raises(ParseError):
        load_matrix("1 0\n1\n")
