import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pamaps.construct import (
    WindowSpec, approximate_in_G, approximate_in_G_stages, approximate_increasing_in_F,
    basic_maps, make_leo, make_window, min_entropy_exponents, partition_point,
    random_G, random_pa_lambda, rewrite_slopes_min_entropy, solve_dynamic_matching,
    target_entropy,
)
from pamaps.dynamics import c_min, entropy, is_LEO, is_TM
from pamaps.errors import DomainError, InfeasibleError
from pamaps.map_core import (
    Interval, PAMap, block_map, compose, identity, is_in_F, is_in_G,
    is_lambda_preserving, preimage_interval, reflection, sup_distance, tent,
    w2_right_quarter, w3_basic,
)
from pamaps.numeric import is_dyadic, log2_exact, pow2

from conftest import dyadics
from oracles import brute_matching, prefix_feasible

H = Fraction(1, 2)
Q4 = Fraction(1, 4)


# -- partition points ------------------------------------------------------

def test_partition_point_examples():
    assert partition_point((0, 0), (H, Fraction(3, 4))) == (Q4, H)
    x, y = partition_point((0, 0), (Q4, Fraction(3, 4)))
    assert (x, y) == (Fraction(1, 8), H)
    assert y / x == 4 and (Fraction(3, 4) - y) / (Q4 - x) == 2
    with pytest.raises(DomainError):
        partition_point((0, 0), (1, 1))


@given(st.integers(0, 30), st.integers(1, 40), st.integers(1, 64), st.integers(2, 8))
def test_partition_point_property(x1n, w, h, e):
    den = 1 << e
    x1, x2 = Fraction(x1n, 64), Fraction(x1n, 64) + Fraction(w, 64)
    y1, y2 = Fraction(0), Fraction(h, den) + Fraction(w, 64)
    if log2_exact((y2 - y1) / (x2 - x1)) is not None:
        return
    x3, y3 = partition_point((x1, y1), (x2, y2))
    assert is_dyadic(x3) and is_dyadic(y3)
    assert x1 < x3 < x2 and y1 < y3 < y2
    assert log2_exact((y3 - y1) / (x3 - x1)) is not None
    assert log2_exact((y2 - y3) / (x2 - x3)) is not None


# -- F approximation -------------------------------------------------------

def test_approx_F_identity():
    assert approximate_increasing_in_F(identity(), Fraction(1, 8)) == identity()


@pytest.mark.parametrize("a, eps", [
    (PAMap([(0, 0), (Q4, Fraction(1, 16)), (H, Q4), (Fraction(3, 4), Fraction(9, 16)), (1, 1)]),
     Fraction(1, 8)),
    (PAMap([(0, 0), (Fraction(1, 3), Fraction(2, 3)), (1, 1)]), Fraction(1, 16)),
])
def test_approx_F(a, eps):
    f = approximate_increasing_in_F(a, eps)
    assert is_in_F(f) and sup_distance(a, f) < eps


# -- G approximation -------------------------------------------------------

def test_approx_G_examples():
    assert approximate_in_G(tent(), Fraction(1, 8)) == tent()
    h = PAMap([(0, 0), (Fraction(1, 3), 1), (1, 0)])
    g = approximate_in_G(h, Fraction(1, 16))
    assert is_in_G(g) and sup_distance(h, g) < Fraction(1, 16)


def test_approx_G_non_dyadic_value():
    h = random_pa_lambda(3)
    assert is_lambda_preserving(h) and not all(is_dyadic(y) for y in h.ys)
    stages = approximate_in_G_stages(h, Fraction(1, 8))
    assert all(is_lambda_preserving(s) for s in stages)
    assert all(is_dyadic(y) for y in stages[0].ys)
    assert is_in_G(stages[-1]) and sup_distance(h, stages[-1]) < Fraction(1, 8)


def test_approx_G_rejects_non_preserving():
    with pytest.raises(DomainError):
        approximate_in_G(PAMap([(0, 0), (H, Q4), (1, 1)]), Fraction(1, 8))


@settings(max_examples=10)
@given(st.integers(0, 10**6))
def test_approx_G_stage_budgets(seed):
    eps = Fraction(1, 16)
    h = random_pa_lambda(seed)
    prev = h
    for s in approximate_in_G_stages(h, eps):
        assert is_lambda_preserving(s) and sup_distance(prev, s) < eps / 6
        prev = s
    assert is_in_G(prev)


# -- windows ---------------------------------------------------------------

def test_window_examples():
    assert make_window(WindowSpec((Q4, H), (1, 2, 2))) == w3_basic()
    assert make_window(WindowSpec((0, 1), (1, 1))) == tent()
    assert make_window(WindowSpec((Fraction(3, 4), 1), (1, 1))) == w2_right_quarter()
    with pytest.raises(DomainError):
        WindowSpec((0, 1), (1, 2))


@given(st.sampled_from([(1, 1), (1, 2, 2), (2, 2, 2, 2), (1, 2, 3, 3), (2, 1, 3, 3)]),
       dyadics(5), dyadics(5), st.booleans())
def test_window_entropy(ks, a, b, falling):
    lo, hi = sorted((a, b))
    if lo == hi:
        return
    if len(ks) % 2 == 0:
        lo = 0
    w = make_window(WindowSpec((lo, hi), ks, falling))
    assert is_in_G(w)
    assert entropy(w) == sum(k * pow2(-k) for k in ks) * (hi - lo)
    outside = [x for x in (lo / 2, (hi + 1) / 2) if not lo <= x <= hi]
    for x in outside:
        assert w(x) == (1 - x if falling else x)


# -- LEO repair ------------------------------------------------------------

@pytest.mark.parametrize("g, eps", [
    (identity(), Fraction(1, 4)),
    (block_map(), Fraction(1, 8)),
    (reflection(), Fraction(1, 8)),
])
def test_make_leo(g, eps):
    g1 = make_leo(g, eps)
    assert is_in_G(g1) and is_LEO(g1) and is_TM(g1)
    assert sup_distance(g, g1) < eps


def test_make_leo_keeps_tent():
    assert make_leo(tent(), Fraction(1, 8)) == tent()


# -- dynamic matching ------------------------------------------------------

def test_matching_examples():
    alpha = [H, Q4, Fraction(1, 8), Fraction(1, 8)]
    beta = [Q4] * 4
    s = solve_dynamic_matching(alpha, beta)
    assert s.amounts(alpha) == beta
    assert sum(d for d, _ in s.entries) == 1
    s = solve_dynamic_matching([H, H], [H, H])
    assert s.entries == ((Fraction(1), (0, 1)),)


def test_matching_infeasible_index():
    with pytest.raises(InfeasibleError) as err:
        solve_dynamic_matching([H, H], [Fraction(3, 4), Q4])
    assert err.value.index == 1


def test_matching_input_checks():
    with pytest.raises(DomainError):
        solve_dynamic_matching([Q4, H], [H, Q4])
    with pytest.raises(DomainError):
        solve_dynamic_matching([H], [Q4])


def _random_instance(rng, m):
    a = sorted((Fraction(rng.randint(1, 12)) for _ in range(m)), reverse=True)
    b = sorted((Fraction(rng.randint(1, 12)) for _ in range(m)), reverse=True)
    sa, sb = sum(a), sum(b)
    return [x / sa for x in a], [x / sb for x in b]


@given(st.integers(0, 10**6), st.integers(1, 8))
def test_matching_criterion(seed, m):
    alpha, beta = _random_instance(random.Random(seed), m)
    if prefix_feasible(alpha, beta):
        s = solve_dynamic_matching(alpha, beta)
        assert s.amounts(alpha) == beta
    else:
        with pytest.raises(InfeasibleError):
            solve_dynamic_matching(alpha, beta)


@settings(max_examples=25)
@given(st.integers(0, 10**6), st.integers(2, 3))
def test_matching_brute_force(seed, m):
    rng = random.Random(seed)
    alpha = sorted((Fraction(rng.randint(1, 6)) for _ in range(m)), reverse=True)
    alpha = [a / sum(alpha) for a in alpha]
    # a target reachable with durations in quarters, or a random one
    if rng.random() < 0.5:
        import itertools
        perms = list(itertools.permutations(range(m)))
        beta = [Fraction(0)] * m
        for _ in range(4):
            p = rng.choice(perms)
            for i in range(m):
                beta[i] += alpha[p[i]] / 4
        beta.sort(reverse=True)
    else:
        beta = sorted((Fraction(rng.randint(1, 6)) for _ in range(m)), reverse=True)
        beta = [b / sum(beta) for b in beta]
    if brute_matching(alpha, beta, 4):
        assert prefix_feasible(alpha, beta)
    if not prefix_feasible(alpha, beta):
        assert not brute_matching(alpha, beta, 4)


# -- minimum-entropy slopes ------------------------------------------------

def test_min_entropy_exponents():
    assert min_entropy_exponents(4) == (1, 2, 3, 3)
    assert sum(pow2(-k) for k in min_entropy_exponents(9)) == 1
    assert sum(k * pow2(-k) for k in min_entropy_exponents(5)) == c_min(5)


def test_rewrite_four_equal_legs():
    g = compose(tent(), tent())
    Y = (0, 1)
    g1 = rewrite_slopes_min_entropy(g, Y, Fraction(1, 8))
    assert is_in_G(g1) and sup_distance(g, g1) < Fraction(1, 8)
    assert entropy(g1) == c_min(4)
    for y in (Fraction(1, 3), Fraction(5, 7)):
        slopes = []
        for leg in preimage_interval(g1, Interval(y, y)):
            x = leg.lo
            for (x0, y0), (x1, y1) in zip(g1.points, g1.points[1:]):
                if x0 <= x <= x1 and x1 > x0:
                    slopes.append(abs((y1 - y0) / (x1 - x0)))
                    break
        assert sorted(slopes) == [2, 4, 8, 8]


def test_rewrite_already_minimal():
    assert rewrite_slopes_min_entropy(tent(), (0, 1), Fraction(1, 8)) == tent()


def test_grouping_identity():
    ls = [3] * 6 + [4] * 4
    ks = min_entropy_exponents(10)
    assert sum(pow2(-l) for l in ls) == sum(pow2(-k) for k in ks) == 1
    assert pow2(-1) == 4 * pow2(-3)
    solve_dynamic_matching([pow2(-k) for k in ks], [pow2(-l) for l in ls])


# -- entropy targeting -----------------------------------------------------

@pytest.mark.parametrize("c, eps", [(2, Fraction(1, 4)), (3, Fraction(1, 8))])
def test_target_entropy(c, eps):
    g = target_entropy(tent(), c, eps)
    assert is_in_G(g) and is_LEO(g)
    assert abs(entropy(g) - c) < eps and sup_distance(tent(), g) < eps


def test_target_entropy_rejects_low_target():
    with pytest.raises(DomainError):
        target_entropy(tent(), 1, Fraction(1, 4))


# -- generators ------------------------------------------------------------

def test_random_G_contract():
    basics = basic_maps()
    assert all(random_G(s, 1) in basics for s in range(10))
    assert random_G(7, 4) == random_G(7, 4)
    assert all(is_in_G(random_G(s, 5)) for s in range(20))


@settings(max_examples=20)
@given(st.integers(0, 10**6))
def test_random_pa_lambda(seed):
    h = random_pa_lambda(seed)
    assert is_lambda_preserving(h)
