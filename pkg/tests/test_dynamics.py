from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pamaps.construct import random_G
from pamaps.dynamics import (
    Mode, c_min, entropy, has_period3_certificate, is_LEO, is_TM, j_collection,
    markov_partition, minimal_period, orbit, periodic_points, transition_graph,
)
from pamaps.errors import DomainError
from pamaps.map_core import (
    Interval, PAMap, block_map, common_denominator_exponent, compose, sharkovsky_family,
    eval_map, identity, image_interval, is_in_G, reflection, tent,
)
from pamaps.numeric import is_dyadic

from conftest import dyadics, g_maps

H = Fraction(1, 2)


def sharkovsky_key(n):
    """Sort key: 3 < 5 < 7 < ... < 2*3 < 2*5 < ... < 4 < 2 < 1."""
    k = 0
    while n % 2 == 0:
        n //= 2
        k += 1
    if n == 1:
        return (1, -k)
    return (0, k, n)


def leo_by_simulation(g, cells=64, steps=60):
    """Brute force: every grid cell must grow onto [0,1] under iteration."""
    full = Interval(Fraction(0), Fraction(1))
    for i in range(cells):
        J = Interval(Fraction(i, cells), Fraction(i + 1, cells))
        for _ in range(steps):
            J = image_interval(g, J)
            if J == full:
                break
        else:
            return False
    return True


def test_orbit_examples():
    r = orbit(tent(), Fraction(1, 8))
    assert r.orbit == (Fraction(1, 8), Fraction(1, 4), H, 1, 0)
    assert (r.preperiod, r.period) == (4, 1)
    r = orbit(identity(), Fraction(1, 3))
    assert (r.preperiod, r.period) == (0, 1)
    r = orbit(reflection(), Fraction(1, 4))
    assert (r.preperiod, r.period) == (0, 2)
    assert r.cycle == (Fraction(1, 4), Fraction(3, 4))


def test_markov_partition_examples():
    assert markov_partition(tent()) == [0, H, 1]
    assert markov_partition(reflection()) == [0, 1]
    P = markov_partition(sharkovsky_family(Fraction(1, 4)))
    M = common_denominator_exponent(sharkovsky_family(Fraction(1, 4)))
    assert all((p * 2**M).denominator == 1 for p in P)


def test_tent_period_two():
    rep = periodic_points(tent(), 2)
    assert rep.points[1] == [0, Fraction(2, 3)]
    assert rep.points[2] == [Fraction(2, 5), Fraction(4, 5)]


def test_periods_of_sharkovsky_family():
    rep = periodic_points(sharkovsky_family(Fraction(1, 32)), 7)
    assert not rep.has_period(3)
    assert rep.has_period(5) and rep.has_period(7)
    rep = periodic_points(sharkovsky_family(Fraction(1, 8)), 7)
    assert rep.has_period(3) and rep.has_period(5) and rep.has_period(7)


def test_period_points_are_minimal():
    g = sharkovsky_family(Fraction(1, 8))
    rep = periodic_points(g, 6)
    for n, pts in rep.points.items():
        for p in pts:
            assert minimal_period(g, p, n) == n


def test_period_interval_for_identity():
    rep = periodic_points(identity(), 2)
    assert rep.intervals[1] == [Interval(Fraction(0), Fraction(1))]
    assert rep.intervals[2] == []


def test_period3_certificate():
    I0, I1, I2 = has_period3_certificate(tent())
    assert I0 == Interval(Fraction(0), Fraction(1))
    assert {I1, I2} == {Interval(Fraction(0), H), Interval(H, Fraction(1))}
    assert has_period3_certificate(identity()) is None


def test_j_collection_examples():
    jc = j_collection(tent())
    assert jc.intervals == (Interval(Fraction(0), Fraction(1)),)
    jc = j_collection(block_map())
    assert jc.intervals == (Interval(Fraction(0), H), Interval(H, Fraction(1)))
    assert jc.mode is Mode.Identity
    jc = j_collection(reflection())
    assert jc.intervals == () and jc.mode is Mode.Reflection


def test_mixing_examples():
    assert is_TM(tent()) and is_LEO(tent())
    assert not is_TM(block_map()) and not is_LEO(block_map())
    assert not is_TM(identity()) and not is_LEO(identity())
    # tent with a full-height fold in the middle third of its rising leg
    g = PAMap([(0, 0), (Fraction(1, 4), 1), (Fraction(3, 8), 0), (H, 1), (1, 0)])
    assert is_in_G(g) and is_LEO(g)


def test_entropy_examples():
    assert entropy(tent()) == 1
    assert entropy(reflection()) == 0
    g = PAMap([(0, 0), (H, 1), (Fraction(3, 4), 0), (1, 1)])
    assert entropy(g) == Fraction(3, 2)
    with pytest.raises(DomainError):
        entropy(PAMap([(0, 0), (H, H), (Fraction(3, 4), H), (1, 1)]))


def test_entropy_float_path():
    g = PAMap([(0, 0), (Fraction(1, 3), 1), (1, 0)])
    assert isinstance(entropy(g), float)


def test_c_min():
    assert [c_min(m) for m in (1, 2, 3, 4)] == [0, 1, Fraction(3, 2), Fraction(7, 4)]
    vals = [c_min(m) for m in range(1, 31)]
    assert all(a < b for a, b in zip(vals, vals[1:])) and vals[-1] < 2
    with pytest.raises(DomainError):
        c_min(0)


def test_transition_graph_of_tent():
    cg = transition_graph(tent())
    assert cg.matrix.toarray().tolist() == [[1, 1], [1, 1]]
    assert cg.is_primitive()


@given(g_maps, dyadics(6))
def test_orbit_stays_on_grid(g, c):
    r = orbit(g, c)
    M = max(common_denominator_exponent(g), 6)
    assert all((v * 2**M).denominator == 1 for v in r.orbit)
    assert eval_map(g, r.orbit[-1]) == r.orbit[r.preperiod]


@given(g_maps)
def test_tm_equals_leo_and_simulation(g):
    leo = is_LEO(g)
    assert is_TM(g) == leo
    assert leo_by_simulation(g) == leo


@given(g_maps)
def test_j_collection_invariants(g):
    jc = j_collection(g)
    for J in jc.intervals:
        assert is_dyadic(J.lo) and is_dyadic(J.hi)
        im = image_interval(g, J)
        assert im in jc.intervals
        assert image_interval(g, im) == J


@given(g_maps)
def test_entropy_chain_rule(g):
    assert entropy(compose(g, g)) == 2 * entropy(g)


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_sharkovsky_consistency(seed):
    g = random_G(seed, 2)
    if not is_TM(g):
        return
    nmax = 6
    rep = periodic_points(g, nmax)
    for n in range(1, nmax + 1):
        if rep.has_period(n):
            for m in range(1, nmax + 1):
                if sharkovsky_key(m) > sharkovsky_key(n):
                    assert rep.has_period(m), (n, m)
