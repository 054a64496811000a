"""Constructive approximation, window surgery, mixing repair and entropy
control for maps in the dyadic measure-preserving monoid.

Most routines here build a candidate, then verify the promised distance
and membership properties exactly before returning.  When a verification
fails the construction is repeated on a finer grid; a hard cap on the
number of refinements turns a runaway search into :class:`BudgetExceeded`.
"""

import random
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from .dynamics import Mode, entropy, is_LEO, j_collection
from .errors import BudgetExceeded, DomainError, InfeasibleError
from .map_core import (
    Interval,
    PAMap,
    _eval_at,
    compose_all,
    f_A,
    f_B,
    identity,
    inverse,
    is_in_F,
    is_in_G,
    is_lambda_preserving,
    preimage_interval,
    reflection,
    sup_distance,
    tent,
    w2_right_quarter,
    w3_basic,
    window_from_exponents,
)
from .numeric import Q, dyadic_exponent, floor_log2, is_dyadic, log2_exact, pow2

MAX_REFINEMENTS = 60

ZERO = Fraction(0)
ONE = Fraction(1)


def ceil_log2(a):
    """Smallest integer k with ``2**k >= a``."""
    k = floor_log2(a)
    return k if pow2(k) == a else k + 1


def _grid_round(v, p):
    """Nearest multiple of ``2**-p`` (ties go down)."""
    scaled = v * (1 << p) if p >= 0 else v / (1 << -p)
    n = scaled.numerator // scaled.denominator
    if scaled - n > Fraction(1, 2):
        n += 1
    return Fraction(n) * pow2(-p)


def _sign(v):
    return 1 if v > 0 else -1


# -- partition points ------------------------------------------------------

def partition_point(p1, p2):
    """Dyadic point between ``p1`` and ``p2`` splitting the chord into two
    power-of-two slopes.

    With ``s`` the chord slope, ``k2 = floor(log2 s)`` and ``k1 = k2 + 1``;
    the left piece gets slope ``2**k1`` and the right piece ``2**k2``.  A
    chord flatter than the diagonal is handled by swapping coordinates, so
    the left piece then carries the smaller slope.
    """
    (x1, y1), (x2, y2) = [(Q(a), Q(b)) for a, b in (p1, p2)]
    if not all(is_dyadic(v) for v in (x1, y1, x2, y2)):
        raise DomainError("partition points need dyadic endpoints")
    if not (x1 < x2 and y1 < y2):
        raise DomainError("partition points need x1 < x2 and y1 < y2")
    dx, dy = x2 - x1, y2 - y1
    if log2_exact(dy / dx) is not None:
        raise DomainError("chord slope is already a power of two")
    if dy < dx:
        y3, x3 = partition_point((y1, x1), (y2, x2))
        return x3, y3
    k2 = floor_log2(dy / dx)
    k1 = k2 + 1
    x3 = x1 + (pow2(-k2) * dy - dx) / (pow2(k1 - k2) - 1)
    y3 = y1 + pow2(k1) * (x3 - x1)
    return x3, y3


def connect(p1, p2):
    """Interior points of a power-of-two path from ``p1`` to ``p2``.

    Works for rising and falling chords; returns ``[]`` when the chord
    already has a power-of-two slope.
    """
    (x1, y1), (x2, y2) = p1, p2
    if y1 == y2:
        raise DomainError("cannot connect points at the same height")
    if log2_exact(abs((y2 - y1) / (x2 - x1))) is not None:
        return []
    if y2 > y1:
        return [partition_point(p1, p2)]
    x3, y3 = partition_point((x1, -y1), (x2, -y2))
    return [(x3, -y3)]


# -- approximation inside F ------------------------------------------------

def approximate_increasing_in_F(a, eps):
    """Thompson-group map within ``eps`` of an increasing homeomorphism ``a``."""
    eps = Q(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    if a.ys[0] != 0 or a.ys[-1] != 1 or any(s <= 0 for s in a.slopes):
        raise DomainError("map must increase strictly from (0,0) to (1,1)")
    if is_in_F(a):
        return a
    L = max(a.slopes)
    n = ceil_log2(3 * L / eps) + 1
    n2 = ceil_log2(12 / eps) + 1
    for _ in range(MAX_REFINEMENTS):
        tau = pow2(-n2)
        pts = []
        for i in range((1 << n) + 1):
            x = Fraction(i, 1 << n)
            if i == 0 or i == 1 << n:
                pts.append((x, x))
                continue
            v = _eval_at(a, x)
            yf = Fraction((v.numerator << n2) // v.denominator, 1 << n2)
            pts.append((x, (1 - tau) * yf + tau * x))
        out = [pts[0]]
        for p, q in zip(pts, pts[1:]):
            out.extend(connect(p, q))
            out.append(q)
        f = PAMap(out)
        if is_in_F(f) and sup_distance(a, f) < eps:
            return f
        n += 1
        n2 += 1
    raise BudgetExceeded("F-approximation did not converge")


# -- band / crossing representation ----------------------------------------
#
# A map onto [0,1] with no plateau is recorded as its sorted breakpoint
# values (levels), the level of g(0), and the list of band crossings in
# x-order.  Each crossing is (band, direction, r) with r = 1/|slope|, so
# its width is r times the band height.  Any level sequence combined with
# the same itinerary gives a continuous map, and it preserves Lebesgue
# measure exactly when the r values of every band add up to 1.


@dataclass
class _Bands:
    levels: list
    start: int
    items: list


def _to_bands(g):
    levels = sorted(set(g.ys))
    idx = {v: i for i, v in enumerate(levels)}
    items = []
    for x0, x1, y0, y1, s in g.segments():
        if s == 0:
            raise DomainError("map has a plateau")
        a, b = idx[y0], idx[y1]
        r = 1 / abs(s)
        if b > a:
            items.extend((k, 1, r) for k in range(a, b))
        else:
            items.extend((k, -1, r) for k in range(a - 1, b - 1, -1))
    return _Bands(levels, idx[g.ys[0]], items)


def _from_bands(bands):
    L = bands.levels
    cur = bands.start
    x = ZERO
    pts = [(x, L[cur])]
    for k, d, r in bands.items:
        x += (L[k + 1] - L[k]) * r
        cur += d
        pts.append((x, L[cur]))
    if x != 1:
        raise AssertionError("band widths do not fill [0,1]")
    return PAMap(pts)


def _refine_bands(bands, extra):
    """Split bands at the extra levels; every sub-crossing keeps its r."""
    new_levels = sorted(set(bands.levels) | set(extra))
    pos = {v: i for i, v in enumerate(new_levels)}
    items = []
    for k, d, r in bands.items:
        lo, hi = pos[bands.levels[k]], pos[bands.levels[k + 1]]
        subs = range(lo, hi) if d > 0 else range(hi - 1, lo - 1, -1)
        items.extend((j, d, r) for j in subs)
    return _Bands(new_levels, pos[bands.levels[bands.start]], items)


def _binary_terms(r):
    """Odd-length list of powers of two summing to the dyadic ``r``."""
    terms = []
    n, k = r.numerator, dyadic_exponent(r)
    bit = 0
    while n:
        if n & 1:
            terms.append(pow2(bit - k))
        n >>= 1
        bit += 1
    terms.sort(reverse=True)
    if len(terms) % 2 == 0:
        last = terms.pop()
        terms.extend([last / 2, last / 2])
    return terms


def _snap_levels(bands, tol):
    L = bands.levels
    if all(is_dyadic(v) for v in L):
        return None
    gap = min(b - a for a, b in zip(L, L[1:]))
    p = ceil_log2(4 / gap)
    base = _from_bands(bands)
    for _ in range(MAX_REFINEMENTS):
        new = [v if is_dyadic(v) else _grid_round(v, p) for v in L]
        if all(a < b for a, b in zip(new, new[1:])):
            cand = _Bands(new, bands.start, bands.items)
            g = _from_bands(cand)
            if sup_distance(base, g) < tol:
                return cand
        p += 1
    raise BudgetExceeded("level snapping did not converge")


def _round_fractions(bands, tol):
    if all(is_dyadic(r) for _, _, r in bands.items):
        return None
    by_band = {}
    for i, (k, _, r) in enumerate(bands.items):
        by_band.setdefault(k, []).append(i)
    base = _from_bands(bands)
    p = ceil_log2(4 / min(r for _, _, r in bands.items))
    for _ in range(MAX_REFINEMENTS):
        new = list(bands.items)
        ok = True
        for k, members in by_band.items():
            rs = [bands.items[i][2] for i in members]
            if all(is_dyadic(r) for r in rs):
                continue
            rounded = [max(_grid_round(r, p), pow2(-p)) for r in rs]
            big = max(range(len(rs)), key=lambda j: (rs[j], -j))
            rounded[big] += 1 - sum(rounded)
            if rounded[big] <= 0:
                ok = False
                break
            for i, r2 in zip(members, rounded):
                kk, d, _ = new[i]
                new[i] = (kk, d, r2)
        if ok:
            cand = _Bands(bands.levels, bands.start, new)
            g = _from_bands(cand)
            if sup_distance(base, g) < tol:
                return cand
        p += 1
    raise BudgetExceeded("fraction rounding did not converge")


def _zigzag(bands, eps):
    if all(log2_exact(r) is not None for _, _, r in bands.items):
        return None
    m0 = floor_log2(6 / eps) + 1
    grid = [Fraction(i, 1 << m0) for i in range((1 << m0) + 1)]
    fine = _refine_bands(bands, grid)
    items = []
    for k, d, r in fine.items:
        if log2_exact(r) is not None:
            items.append((k, d, r))
            continue
        for j, t in enumerate(_binary_terms(r)):
            items.append((k, d if j % 2 == 0 else -d, t))
    return _Bands(fine.levels, fine.start, items)


def approximate_in_G_stages(h, eps):
    """The three intermediate maps of :func:`approximate_in_G`.

    Stage one moves non-dyadic breakpoint values onto a dyadic grid while
    keeping every crossing's width fraction.  Stage two rounds the width
    fractions to dyadic numbers band by band.  Stage three replaces each
    crossing whose slope is not a power of two by an odd zigzag inside a
    band of height below ``eps/6``.  Each stage preserves Lebesgue measure
    and moves the graph by less than ``eps/6``.
    """
    eps = Q(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    try:
        ok = is_lambda_preserving(h)
    except DomainError:
        ok = False
    if not ok:
        raise DomainError("map is not Lebesgue-measure preserving")
    tol = eps / 6
    bands = _to_bands(h)
    stages = []
    prev = h
    for step in (lambda b: _snap_levels(b, tol),
                 lambda b: _round_fractions(b, tol),
                 lambda b: _zigzag(b, eps)):
        nxt = step(bands)
        if nxt is not None:
            bands = nxt
        g = _from_bands(bands)
        assert is_lambda_preserving(g)
        assert sup_distance(prev, g) < tol
        stages.append(g)
        prev = g
    return stages


def approximate_in_G(h, eps):
    """Map in G within ``eps`` of the measure-preserving map ``h``."""
    eps = Q(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    if is_in_G(h):
        return h
    g = approximate_in_G_stages(h, eps)[-1]
    if not is_in_G(g) or not sup_distance(h, g) < eps:
        raise AssertionError("G-approximation failed its own verification")
    return g


# -- windows ---------------------------------------------------------------

@dataclass(frozen=True)
class WindowSpec:
    """Alternating window on ``interval`` with leg slopes ``±2**k_i``."""

    interval: Interval
    exponents: tuple
    falling: bool = False

    @property
    def folds(self):
        return len(self.exponents)

    def __post_init__(self):
        lo, hi = Q(self.interval[0]), Q(self.interval[1])
        object.__setattr__(self, "interval", Interval(lo, hi))
        object.__setattr__(self, "exponents", tuple(int(k) for k in self.exponents))
        if not self.exponents:
            raise DomainError("a window needs at least one leg")
        if sum(pow2(-k) for k in self.exponents) != 1:
            raise DomainError("leg exponents must satisfy sum 2^-k = 1")


def make_window(spec):
    lo, hi = spec.interval
    return window_from_exponents(lo, hi, spec.exponents, spec.falling)


# -- mixing repair ---------------------------------------------------------

def _gaps(intervals):
    out = []
    prev = ZERO
    for c in intervals:
        if c.lo > prev:
            out.append(Interval(prev, c.lo))
        prev = c.hi
    if prev < 1:
        out.append(Interval(prev, ONE))
    return out


def _fill_gaps(g, jc, ell):
    """Put a small 3-fold window on each dyadic piece of the gaps."""
    pts = dict(zip(g.xs, g.ys))
    pieces = []
    for a, b in _gaps(jc.intervals):
        if not (is_dyadic(a) and is_dyadic(b)):
            raise DomainError("invariant family has non-dyadic endpoints")
        step = min(ell, pow2(-dyadic_exponent(a)), pow2(-dyadic_exponent(b)))
        for x in list(pts):
            if a < x < b:
                del pts[x]
        p = a
        while p < b:
            q = p + step
            if jc.mode is Mode.Identity:
                pts[p], pts[p + step / 2], pts[p + 3 * step / 4], pts[q] = p, q, p, q
            else:
                pts[p], pts[p + step / 2], pts[p + 3 * step / 4], pts[q] = 1 - p, 1 - q, 1 - p, 1 - q
            pieces.append(Interval(p, q))
            p = q
    parts = sorted(list(jc.intervals) + pieces)
    return PAMap(sorted(pts.items())), parts


def _boundary_surgery(g, b, room, eps):
    """Six-segment zigzag that couples the two sides of boundary ``b``.

    Returns the replaced x-range and the new breakpoints inside it.
    """
    xs = g.xs
    i = bisect_left(xs, b) - 1
    j = bisect_right(xs, b) - 1
    s1 = g.slope(i)
    s2 = g.slope(j)
    if s1 * s2 <= 0:
        raise DomainError(f"slopes change sign at boundary {b}")
    k1 = log2_exact(abs(s1))
    k2 = log2_exact(abs(s2))
    sigma = _sign(s1)
    m = -floor_log2(min(eps / 4, room)) + 1
    while b - pow2(-m - k1) < xs[i] or b + pow2(-m - k2) > xs[j + 1]:
        m += 1
    h = pow2(-m)
    yb = _eval_at(g, b)
    ay, cy = yb - sigma * h, yb + sigma * h
    ax = b - h * pow2(-k1)
    steps = [pow2(-m - k1 - 1), pow2(-m - k2 - 1), pow2(-m - k2 - 2),
             pow2(-m - k1 - 2), pow2(-m - k1 - 2), pow2(-m - k2 - 2)]
    levels = [yb, cy, yb, ay, yb, cy]
    pts = [(ax, ay)]
    x = ax
    for dx, y in zip(steps, levels):
        x += dx
        pts.append((x, y))
    return ax, x, pts


def _merge_boundaries(g, parts, eps):
    cuts = []
    for left, right in zip(parts, parts[1:]):
        room = min(left.measure, right.measure) / 2
        cuts.append(_boundary_surgery(g, left.hi, room, eps))
    out = []
    k = 0
    for x, y in zip(g.xs, g.ys):
        while k < len(cuts) and cuts[k][1] < x:
            out.extend(cuts[k][2])
            k += 1
        if k < len(cuts) and cuts[k][0] <= x <= cuts[k][1]:
            continue
        out.append((x, y))
    for c in cuts[k:]:
        out.extend(c[2])
    return PAMap(out)


def make_leo(g, eps):
    """Locally eventually onto map in G within ``eps`` of ``g``.

    Gaps left by the invariant interval family are filled with tiny 3-fold
    windows, then every interior boundary between neighbouring members is
    bridged by a six-segment zigzag so that orbits can cross it.
    """
    eps = Q(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    if not is_in_G(g):
        raise DomainError("make_leo needs a map in G")
    if is_LEO(g, in_G=True):
        return g
    jc = j_collection(g, in_G=True)
    ell = pow2(-ceil_log2(2 / eps))
    for _ in range(MAX_REFINEMENTS):
        filled, parts = _fill_gaps(g, jc, ell)
        cur = _merge_boundaries(filled, parts, eps)
        if is_in_G(cur) and sup_distance(g, cur) < eps and is_LEO(cur, in_G=True):
            return cur
        ell /= 2
    raise BudgetExceeded("mixing repair did not converge")


# -- dynamic matching ------------------------------------------------------

@dataclass(frozen=True)
class MatchingSchedule:
    """Time-sharing of pumps over buckets.

    ``entries`` holds ``(duration, perm)`` pairs; ``perm[i]`` is the
    0-based pump that fills bucket ``i`` during that share of time.
    """

    entries: tuple

    def amounts(self, alpha):
        m = len(alpha)
        out = [ZERO] * m
        for d, perm in self.entries:
            for i in range(m):
                out[i] += d * alpha[perm[i]]
        return out


def _birkhoff(P):
    m = len(P)
    P = [row[:] for row in P]
    entries = []
    while True:
        G = nx.Graph()
        G.add_nodes_from(range(m))
        G.add_nodes_from(range(m, 2 * m))
        G.add_edges_from((i, m + j) for i in range(m) for j in range(m) if P[i][j] > 0)
        if G.number_of_edges() == 0:
            break
        match = nx.bipartite.hopcroft_karp_matching(G, top_nodes=range(m))
        perm = tuple(match[i] - m for i in range(m))
        theta = min(P[i][perm[i]] for i in range(m))
        for i in range(m):
            P[i][perm[i]] -= theta
        entries.append((theta, perm))
    return entries


def solve_dynamic_matching(alpha, beta):
    """Schedule that lets pumps with rates ``alpha`` fill buckets to ``beta``.

    Both sequences must be positive, non-increasing and have equal sums.
    Raises :class:`InfeasibleError` with the 1-based ``index`` of the first
    negative prefix sum of ``alpha - beta``.
    """
    a = [Q(v) for v in alpha]
    b = [Q(v) for v in beta]
    m = len(a)
    if m == 0 or len(b) != m:
        raise DomainError("alpha and beta must be non-empty and equally long")
    if any(v <= 0 for v in a + b):
        raise DomainError("rates and targets must be positive")
    if any(x < y for x, y in zip(a, a[1:])) or any(x < y for x, y in zip(b, b[1:])):
        raise DomainError("alpha and beta must be sorted in descending order")
    if sum(a) != sum(b):
        raise DomainError("total rate and total target differ")
    acc = ZERO
    for i in range(m):
        acc += a[i] - b[i]
        if acc < 0:
            raise InfeasibleError(f"prefix sum {i + 1} is negative", index=i + 1)
    # move excess from the last surplus bucket to the next deficit one;
    # each move is a two-bucket swap mixed with the identity
    P = [[ONE if i == j else ZERO for j in range(m)] for i in range(m)]
    cur = a[:]
    while cur != b:
        j = max(i for i in range(m) if cur[i] > b[i])
        k = min(i for i in range(j + 1, m) if cur[i] < b[i])
        delta = min(cur[j] - b[j], b[k] - cur[k])
        lam = (cur[j] - delta - cur[k]) / (cur[j] - cur[k])
        rj, rk = P[j], P[k]
        P[j] = [lam * u + (1 - lam) * v for u, v in zip(rj, rk)]
        P[k] = [lam * v + (1 - lam) * u for u, v in zip(rj, rk)]
        cur[j] -= delta
        cur[k] += delta
    merged = {}
    for d, perm in _birkhoff(P):
        merged[perm] = merged.get(perm, ZERO) + d
    sched = MatchingSchedule(tuple((d, perm) for perm, d in merged.items()))
    assert sched.amounts(a) == b
    return sched


def min_entropy_exponents(m):
    """Exponents ``(1, 2, ..., m-1, m-1)`` minimising entropy for m legs."""
    if m < 1:
        raise DomainError("need at least one leg")
    if m == 1:
        return (0,)
    return tuple(range(1, m)) + (m - 1,)


# -- slope rewriting -------------------------------------------------------

def _affine_legs(g, Y):
    legs = preimage_interval(g, Y)
    for leg in legs:
        if not leg.onto or leg.lo == leg.hi:
            raise DomainError("preimage of Y has a leg that is not onto Y")
        if any(leg.lo < x < leg.hi for x in g.xs):
            raise DomainError("preimage of Y has a non-affine leg")
    return legs


def rewrite_slopes_min_entropy(g, Y, eps):
    """Rewrite the legs over ``Y`` so every fiber sees slopes 2, 4, ..., 2^(m-1), 2^(m-1).

    The legs over ``Y`` keep their order and sign; only their widths move
    slightly, and everything between them is translated unchanged.
    """
    eps = Q(eps)
    y0, y1 = Q(Y[0]), Q(Y[1])
    if not (is_dyadic(y0) and is_dyadic(y1) and 0 <= y0 < y1 <= 1):
        raise DomainError("Y needs dyadic endpoints with Y0 < Y1")
    if not is_in_G(g):
        raise DomainError("map must lie in G")
    legs = _affine_legs(g, (y0, y1))
    m = len(legs)
    ls = [log2_exact(abs(_eval_at(g, l.hi) - _eval_at(g, l.lo)) / (l.hi - l.lo)) for l in legs]
    ks = min_entropy_exponents(m)
    if sorted(ls) == list(ks):
        return g
    order = sorted(range(m), key=lambda i: (ls[i], i))
    alpha = [pow2(-k) for k in ks]
    beta = [pow2(-ls[i]) for i in order]
    sched = solve_dynamic_matching(alpha, beta)
    H = y1 - y0
    M = ceil_log2(2 * H / eps) + 1
    R = ceil_log2(2 / min(d for d, _ in sched.entries)) + 1
    for _ in range(MAX_REFINEMENTS):
        cum, acc = [ZERO], ZERO
        for d, _ in sched.entries:
            acc += d
            cum.append(_grid_round(acc, R))
        if all(u < v for u, v in zip(cum, cum[1:])):
            g1 = _rebuild_legs(g, legs, order, ks, sched, cum, M, y0, H)
            if sup_distance(g, g1) < eps:
                assert is_in_G(g1)
                return g1
        M += 1
        R += 1
    raise BudgetExceeded("slope rewriting did not converge")


def _rebuild_legs(g, legs, order, ks, sched, cum, M, y0, H):
    # slope exponent of each leg on each sub-fiber
    bucket_of = {leg_i: b for b, leg_i in enumerate(order)}
    fibers = []
    n = 1 << M
    for s in range(n):
        for t, (_, perm) in enumerate(sched.entries):
            lo = y0 + H * (s + cum[t]) / n
            hi = y0 + H * (s + cum[t + 1]) / n
            fibers.append((lo, hi, perm))
    pts = dict(zip(g.xs, g.ys))
    for leg in legs:
        pts[leg.lo] = _eval_at(g, leg.lo)
        pts[leg.hi] = _eval_at(g, leg.hi)
    src = sorted(pts.items())
    leg_at = {leg.lo: (i, leg) for i, leg in enumerate(legs)}
    out = [src[0]]
    x = ZERO
    for (xa, ya), (xb, yb) in zip(src, src[1:]):
        hit = leg_at.get(xa)
        if hit is not None and hit[1].hi == xb:
            bucket = bucket_of[hit[0]]
            seq = fibers if hit[1].increasing else reversed(fibers)
            for lo, hi, perm in seq:
                x += (hi - lo) * pow2(-ks[perm[bucket]])
                out.append((x, hi if hit[1].increasing else lo))
        else:
            x += xb - xa
            out.append((x, yb))
    return PAMap(out)


def minimize_entropy(g, eps):
    """Apply :func:`rewrite_slopes_min_entropy` on every band of ``g``."""
    eps = Q(eps)
    levels = sorted(set(g.ys))
    bands = list(zip(levels, levels[1:]))
    budget = eps / len(bands)
    cur = g
    for lo, hi in bands:
        cur = rewrite_slopes_min_entropy(cur, (lo, hi), budget / 2)
    return cur


# -- entropy targeting -----------------------------------------------------

def _fold_gain(l):
    return l - pow2(1 - l)


def _insert_windows(g, need, eps):
    """Raise the entropy of ``g`` by about ``need`` using small windows.

    Each window replaces a dyadic piece of an affine segment of slope
    ``±2**k`` by ``2**l - 1`` legs, adding ``width * (l - 2**(1-l))``.
    """
    l = 1
    while _fold_gain(l) * Fraction(7, 8) < need:
        l += 1
    gain = _fold_gain(l)
    out = [(g.xs[0], g.ys[0])]
    acc = ZERO
    for x0, x1, y0, y1, s in g.segments():
        k = log2_exact(abs(s))
        width = pow2(floor_log2(min(eps / (3 * pow2(k)), eps / (2 * gain))) - 1)
        width = min(width, pow2(-dyadic_exponent(x0)), pow2(-dyadic_exponent(x1)))
        p = x0
        while p < x1:
            q = p + width
            yp, yq = y0 + s * (p - x0), y0 + s * (q - x0)
            if acc + width * gain <= need + eps / 4:
                acc += width * gain
                n = (1 << l) - 1
                x = p
                for i in range(n):
                    x += width * (pow2(-l) if i < n - 1 else pow2(1 - l))
                    out.append((x, yq if i % 2 == 0 else yp))
            else:
                out.append((q, yq))
            p = q
    return PAMap(out)


def target_entropy(h, c, eps):
    """Markov LEO map in G near ``h`` whose entropy lies within ``eps`` of ``c``."""
    c, eps = Q(c), Q(eps)
    if c < 2:
        raise DomainError("entropy targets below 2 are not supported")
    if eps <= 0:
        raise DomainError("eps must be positive")
    g0 = h if is_in_G(h) else approximate_in_G(h, eps / 6)
    g0 = make_leo(g0, eps / 6)
    g1 = minimize_entropy(g0, eps / 3)
    need = c - entropy(g1)
    g = g1 if need < eps else _insert_windows(g1, need, eps)
    if not is_LEO(g):
        g = make_leo(g, eps / 12)
    if not (is_in_G(g) and sup_distance(h, g) < eps and abs(entropy(g) - c) < eps):
        raise BudgetExceeded("entropy target not reached within tolerance")
    return g


# -- random generators -----------------------------------------------------

def basic_maps():
    """The five basic maps: identity, reflection, 3-fold window, two 2-fold windows."""
    return [identity(), reflection(), w3_basic(), w2_right_quarter(), tent()]


def _random_exponents(rng, m, kmax=6):
    ks = [0]
    while len(ks) < m:
        cand = [i for i, k in enumerate(ks) if k < kmax]
        i = rng.choice(cand)
        k = ks.pop(i)
        ks[i:i] = [k + 1, k + 1]
    return ks


def random_window(rng, kmax=6, depth=4):
    m = rng.choice([2, 3, 3])
    den = 1 << rng.randint(1, depth)
    if m == 2:
        if rng.random() < 0.5:
            lo, hi = Fraction(rng.randint(0, den - 1), den), ONE
        else:
            lo, hi = ZERO, Fraction(rng.randint(1, den), den)
    else:
        a, b = sorted(rng.sample(range(den + 1), 2))
        lo, hi = Fraction(a, den), Fraction(b, den)
    ks = _random_exponents(rng, m, kmax)
    return window_from_exponents(lo, hi, ks, falling=rng.random() < 0.25)


def random_G(seed, complexity):
    """Deterministic pseudo-random element of G built from ``complexity`` factors."""
    if complexity < 1:
        raise DomainError("complexity must be at least 1")
    rng = random.Random(seed)
    basics = basic_maps()
    if complexity == 1:
        return rng.choice(basics)
    factors = []
    for _ in range(complexity):
        if rng.random() < 0.4:
            factors.append(rng.choice(basics))
        else:
            factors.append(random_window(rng))
    g = compose_all(factors)
    assert is_in_G(g)
    return g


def random_F(seed, size=4):
    """Deterministic pseudo-random Thompson-group element."""
    rng = random.Random(seed)
    gens = [f_A(), f_B()]
    pool = gens + [inverse(f) for f in gens]
    return compose_all(rng.choice(pool) for _ in range(size))


def random_pa_lambda(seed, bands=3, crossings=6):
    """Deterministic measure-preserving map with non-dyadic data.

    Levels are random rationals with small odd denominators; the graph
    is a random walk across them that touches 0 and 1, with random width
    fractions normalised per band.
    """
    rng = random.Random(seed)
    den = rng.choice([3, 5, 6, 7, 9, 10])
    while True:
        inner = sorted(rng.sample(range(1, den * 4), bands - 1))
        levels = [ZERO] + [Fraction(v, den * 4) for v in inner] + [ONE]
        if len(set(levels)) == bands + 1:
            break
    cur = rng.randint(0, bands)
    start = cur
    path = []
    seen = {cur}
    while len(path) < crossings or not {0, bands} <= seen:
        if cur == 0:
            d = 1
        elif cur == bands:
            d = -1
        else:
            d = rng.choice([1, -1])
        path.append((cur if d > 0 else cur - 1, d))
        cur += d
        seen.add(cur)
    by_band = {}
    for i, (k, _) in enumerate(path):
        by_band.setdefault(k, []).append(i)
    rs = [None] * len(path)
    for k, members in by_band.items():
        raw = [rng.randint(1, 6) for _ in members]
        tot = sum(raw)
        for i, w in zip(members, raw):
            rs[i] = Fraction(w, tot)
    items = [(k, d, r) for (k, d), r in zip(path, rs)]
    return _from_bands(_Bands(levels, start, items))
