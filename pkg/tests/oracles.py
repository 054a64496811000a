"""Brute-force reference implementations used as independent test oracles."""

import itertools
from fractions import Fraction

from pamaps.map_core import Interval, compose, f_A, f_B, identity, image_interval, inverse


def fiber_sums(g, y):
    """Sum of 1/|slope| over the segments whose open image contains ``y``."""
    total = Fraction(0)
    for (x0, y0), (x1, y1) in zip(g.points, g.points[1:]):
        if min(y0, y1) < y < max(y0, y1):
            total += (x1 - x0) / abs(y1 - y0)
    return total


def leo_by_simulation(g, cells=64, steps=60):
    """Every cell of a uniform grid must grow onto [0,1] under iteration."""
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


def prefix_feasible(alpha, beta):
    acc = 0
    for a, b in zip(alpha, beta):
        acc += a - b
        if acc < 0:
            return False
    return True


def brute_matching(alpha, beta, K):
    """Search schedules whose durations are multiples of ``1/K``."""
    m = len(alpha)
    perms = list(itertools.permutations(range(m)))
    for combo in itertools.combinations_with_replacement(range(len(perms)), K):
        out = [Fraction(0)] * m
        for p in combo:
            for i in range(m):
                out[i] += Fraction(1, K) * alpha[perms[p][i]]
        if out == list(beta):
            return True
    return False


def short_F_words(max_len):
    """All distinct maps given by words of length <= ``max_len`` in f_A^±1, f_B^±1."""
    gens = [f_A(), f_B(), inverse(f_A()), inverse(f_B())]
    seen = {identity()}
    frontier = {identity()}
    for _ in range(max_len):
        frontier = {compose(w, g) for w in frontier for g in gens} - seen
        seen |= frontier
    return seen


def brute_same_class(g1, g2, words):
    """Look for ``f1, f2`` among ``words`` with ``g1 = f1∘g2∘f2``.

    Rewritten as ``f1^-1∘g1 = g2∘f2`` so both sides can be hashed.
    """
    left = {compose(inverse(f), g1) for f in words}
    return any(compose(g2, f) in left for f in words)
