"""Orbits, Markov partitions, periodic points, invariant interval families,
mixing tests and entropy for piecewise-affine interval maps."""

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .errors import BudgetExceeded, DomainError
from .map_core import (
    DEFAULT_SEGMENT_BUDGET,
    Interval,
    _eval_at,
    _values_on,
    common_denominator_exponent,
    compose,
    image_interval,
    is_in_G,
    preimage_interval,
    preimage_point,
    preimage_points,
)
from .numeric import Q, log2_exact

DEFAULT_ORBIT_BUDGET = 10**6
DEFAULT_NMAX = 12


@dataclass(frozen=True)
class OrbitResult:
    preperiod: int
    period: int
    orbit: tuple

    @property
    def cycle(self):
        return self.orbit[self.preperiod:]


def orbit(g, c, budget=DEFAULT_ORBIT_BUDGET):
    """Forward orbit of ``c`` until the first repeated value."""
    x = Q(c)
    if not 0 <= x <= 1:
        raise DomainError("orbit start must lie in [0,1]")
    seen = {}
    values = []
    while x not in seen:
        if len(values) >= budget:
            raise BudgetExceeded(f"orbit of {c} did not close within {budget} steps")
        seen[x] = len(values)
        values.append(x)
        x = _eval_at(g, x)
    m = seen[x]
    return OrbitResult(m, len(values) - m, tuple(values))


def _integer_grid(g):
    """``(2^M, X, Y)`` with breakpoints scaled to integers, or ``None``.

    Only offered when every slope is an integer, so the ``2^-M`` grid is
    mapped into itself and orbits can run on plain ints.
    """
    try:
        M = common_denominator_exponent(g)
    except DomainError:
        return None
    D = 1 << M
    X = [x.numerator * (D // x.denominator) for x in g.xs]
    Y = [y.numerator * (D // y.denominator) for y in g.ys]
    if any((Y[i + 1] - Y[i]) % (X[i + 1] - X[i]) for i in range(len(X) - 1)):
        return None
    return D, X, Y


def _grid_eval(X, Y, x):
    i = bisect_right(X, x) - 1
    if i >= len(X) - 1:
        return Y[-1]
    return Y[i] + (Y[i + 1] - Y[i]) * (x - X[i]) // (X[i + 1] - X[i])


def _grid_orbits(X, Y, budget):
    pts = set()
    for x in X:
        steps = 0
        while x not in pts:
            pts.add(x)
            x = _grid_eval(X, Y, x)
            steps += 1
            if steps > budget:
                raise BudgetExceeded("breakpoint orbit does not close; map is not Markov")
    return sorted(pts)


def markov_partition(g, budget=DEFAULT_ORBIT_BUDGET):
    """Sorted union of the forward orbits of all breakpoints."""
    grid = _integer_grid(g)
    if grid is not None:
        D, X, Y = grid
        return [Fraction(v, D) for v in _grid_orbits(X, Y, budget)]
    pts = set()
    for x in g.xs:
        if x in pts:
            continue
        y = x
        steps = 0
        while y not in pts:
            pts.add(y)
            y = _eval_at(g, y)
            steps += 1
            if steps > budget:
                raise BudgetExceeded("breakpoint orbit does not close; map is not Markov")
    return sorted(pts)


# -- periodic points -------------------------------------------------------

@dataclass
class PeriodReport:
    points: dict = field(default_factory=dict)
    intervals: dict = field(default_factory=dict)

    def has_period(self, n):
        return bool(self.points.get(n)) or bool(self.intervals.get(n))

    def periods(self):
        return sorted(n for n in self.points if self.has_period(n))


def _fixed_set(h):
    """Fixed points and fixed intervals of ``h``."""
    points, intervals = [], []
    for x0, x1, y0, y1, s in h.segments():
        if s == 1:
            if y0 == x0:
                if intervals and intervals[-1].hi == x0:
                    intervals[-1] = Interval(intervals[-1].lo, x1)
                else:
                    intervals.append(Interval(x0, x1))
            continue
        x = (y0 - s * x0) / (1 - s)
        if x0 <= x <= x1:
            points.append(x)
    covered = lambda p: any(iv.lo <= p <= iv.hi for iv in intervals)
    pts = sorted({p for p in points if not covered(p)})
    return pts, intervals


def minimal_period(g, x, n):
    """Least ``d <= n`` with ``g^d(x) = x``; ``None`` when no such d exists."""
    y = x
    for d in range(1, n + 1):
        y = _eval_at(g, y)
        if y == x:
            return d
    return None


def periodic_points(g, n_max=DEFAULT_NMAX, budget=DEFAULT_SEGMENT_BUDGET):
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    report = PeriodReport()
    h = None
    for n in range(1, n_max + 1):
        h = g if h is None else compose(g, h, budget)
        pts, ivs = _fixed_set(h)
        report.points[n] = [p for p in pts if minimal_period(g, p, n) == n]
        report.intervals[n] = [iv for iv in ivs
                               if minimal_period(g, (iv.lo + iv.hi) / 2, n) == n]
    return report


def has_period3_certificate(g, budget=DEFAULT_ORBIT_BUDGET):
    """Look for ``I1, I2 ⊂ I0`` with disjoint interiors and ``g(I1) = g(I2) = I0``.

    ``I0`` runs over unions of Markov cells and ``I1, I2`` over unions of
    cells of the partition refined by one preimage step.  A ``None`` result
    proves nothing; use :func:`periodic_points` to decide.
    """
    P = markov_partition(g, budget)
    R = set(P)
    for p in P:
        R.update(preimage_points(g, p))
    R = sorted(R)
    images = {}

    def img(a, b):
        key = (a, b)
        if key not in images:
            images[key] = image_interval(g, (R[a], R[b]))
        return images[key]

    pos = {x: i for i, x in enumerate(R)}
    pairs = sorted(((a, b) for a in P for b in P if a < b), key=lambda ab: (ab[0], -ab[1]))
    for lo, hi in pairs:
        I0 = Interval(lo, hi)
        a, b = pos[lo], pos[hi]
        subs = []
        for i in range(a, b):
            for j in range(i + 1, b + 1):
                im = img(i, j)
                if im.lo < I0.lo or im.hi > I0.hi:
                    break
                if im == I0:
                    subs.append((i, j))
                    break
        for k, (i1, j1) in enumerate(subs):
            for i2, j2 in subs[k + 1:]:
                if j1 <= i2 or j2 <= i1:
                    return I0, Interval(R[i1], R[j1]), Interval(R[i2], R[j2])
    return None


# -- invariant interval families -------------------------------------------

class Mode(Enum):
    Identity = "Identity"
    Reflection = "Reflection"


@dataclass(frozen=True)
class JCollection:
    intervals: tuple
    mode: Mode


def _overlaps(a, b):
    return max(a.lo, b.lo) < min(a.hi, b.hi)


def _merge(cands, parts):
    lo = min(p.lo for p in parts)
    hi = max(p.hi for p in parts)
    hull = Interval(lo, hi)
    while True:
        grow = [c for c in cands if _overlaps(c, hull) and (c.lo < hull.lo or c.hi > hull.hi)]
        if not grow:
            break
        hull = Interval(min([hull.lo] + [c.lo for c in grow]), max([hull.hi] + [c.hi for c in grow]))
    kept = [c for c in cands if not _overlaps(c, hull)]
    kept.append(hull)
    return sorted(kept)


def _seeds_from_fixed_set(g, budget):
    g2 = compose(g, g, budget)
    pts, ivs = _fixed_set(g2)
    cuts = sorted(set(pts) | {iv.lo for iv in ivs} | {iv.hi for iv in ivs} | {Fraction(0), Fraction(1)})
    cands = []
    for a, b in zip(cuts, cuts[1:]):
        mid = (a + b) / 2
        if any(iv.lo <= mid <= iv.hi for iv in ivs):
            continue
        cands.append(Interval(a, b))
    return cands


def _cyclic_classes(M, nodes):
    """Split a strongly connected set of cells into its period classes."""
    sub = M[nodes][:, nodes]
    order, pred = breadth_first_order(sub, 0, directed=True, return_predecessors=True)
    level = np.zeros(len(nodes), dtype=np.int64)
    for v in order[1:]:
        level[v] = level[pred[v]] + 1
    coo = sub.tocoo()
    d = int(np.gcd.reduce(np.abs(level[coo.row] + 1 - level[coo.col]))) if coo.nnz else 0
    d = d or 1
    return [nodes[level % d == r] for r in range(d)], d


def _seeds_from_markov(g, cg=None):
    cg = cg or transition_graph(g)
    P = cg.points
    cands = []
    for nodes in cg.components():
        if all(int(c) in cg.unit for c in nodes):
            continue
        for cls in _cyclic_classes(cg.matrix, nodes)[0]:
            lo = hi = None
            for c in sorted(int(v) for v in cls):
                if hi is not None and P[c] == hi:
                    hi = P[c + 1]
                    continue
                if lo is not None:
                    cands.append(Interval(lo, hi))
                lo, hi = P[c], P[c + 1]
            cands.append(Interval(lo, hi))
    return sorted(cands)


def j_collection(g, budget=DEFAULT_SEGMENT_BUDGET, method="auto", in_G=None):
    """Minimal family of intervals permuted by ``g`` with ``g² (J) = J``.

    Seeds come from the Markov cell graph for maps in G (components of
    the non-isometric strongly connected pieces, split by period), and
    from the gaps of the fixed set of ``g²`` otherwise.  Seeds are merged
    until every member's image is a member, the image of that image is
    the member itself, and the full preimage of the image stays inside it.
    ``method`` forces ``"markov"`` or ``"fixed"`` seeding.
    """
    if method == "auto":
        method = "markov" if (is_in_G(g) if in_G is None else in_G) else "fixed"
    if method == "markov":
        cands = _seeds_from_markov(g)
    elif method == "fixed":
        cands = _seeds_from_fixed_set(g, budget)
    else:
        raise DomainError(f"unknown seeding method {method!r}")

    changed = True
    while changed:
        changed = False
        for J in cands:
            im = image_interval(g, J)
            hits = [C for C in cands if _overlaps(C, im)]
            if hits != [im]:
                merged = _merge(cands, hits + [im]) if hits else cands
                if merged == cands and len(hits) == 1:
                    # the image sits strictly inside one member: everything
                    # mapping into that member belongs together
                    pre = [C for C in cands if _overlaps(image_interval(g, C), hits[0])]
                    merged = _merge(cands, pre)
                if merged == cands:
                    merged = _merge(cands, hits + [J])
                cands = merged
                changed = True
                break
            im2 = image_interval(g, im)
            if im2 != J:
                cands = _merge(cands, [J, im2])
                changed = True
                break
            outside = [Interval(l.lo, l.hi) for l in preimage_interval(g, im)
                       if l.lo < l.hi and (l.lo < J.lo or l.hi > J.hi)]
            if outside:
                cands = _merge(cands, [J] + outside)
                changed = True
                break

    mode = _complement_mode(g, cands)
    return JCollection(tuple(cands), mode)


def _complement_mode(g, cands):
    gaps = []
    prev = Fraction(0)
    for c in cands:
        if c.lo > prev:
            gaps.append((prev, c.lo))
        prev = c.hi
    if prev < 1:
        gaps.append((prev, Fraction(1)))
    if not gaps:
        return Mode.Identity
    probes = []
    for a, b in gaps:
        probes.extend(x for x in g.xs if a <= x <= b)
        probes.extend([a, b, (a + b) / 2])
    if all(_eval_at(g, x) == x for x in probes):
        return Mode.Identity
    if all(_eval_at(g, x) == 1 - x for x in probes):
        return Mode.Reflection
    raise DomainError("map is neither the identity nor the reflection off its invariant family")


def is_TM(g):
    jc = j_collection(g)
    return list(jc.intervals) == [Interval(Fraction(0), Fraction(1))]


@dataclass
class CellGraph:
    """Transition graph of the Markov cells of a map.

    ``matrix[i, j] = 1`` when cell ``j`` lies in the image of cell ``i``;
    ``unit`` holds the cells on which ``|g'| = 1``.
    """

    points: list
    matrix: object
    unit: frozenset

    def components(self):
        n, labels = connected_components(self.matrix, directed=True, connection="strong")
        return [np.flatnonzero(labels == k) for k in range(n)]

    def is_primitive(self):
        n, _ = connected_components(self.matrix, directed=True, connection="strong")
        if n != 1:
            return False
        _, d = _cyclic_classes(self.matrix, np.arange(self.matrix.shape[0]))
        return d == 1

    def unit_cycle(self):
        """True when the unit-slope cells carry a directed cycle."""
        if not self.unit:
            return False
        coo = self.matrix.tocoo()
        G = nx.DiGraph()
        G.add_edges_from((int(u), int(v)) for u, v in zip(coo.row, coo.col)
                         if int(u) in self.unit and int(v) in self.unit)
        return not nx.is_directed_acyclic_graph(G)

    def to_networkx(self):
        G = nx.DiGraph()
        G.add_nodes_from(range(self.matrix.shape[0]))
        coo = self.matrix.tocoo()
        G.add_edges_from(zip(coo.row.tolist(), coo.col.tolist()))
        return G


def transition_graph(g, budget=DEFAULT_ORBIT_BUDGET):
    grid = _integer_grid(g)
    if grid is None:
        P = markov_partition(g, budget)
        vals = _values_on(g, P)
    else:
        # same construction on the integer grid; P is rescaled at the end
        D, X, Y = grid
        P = _grid_orbits(X, Y, budget)
        vals = [_grid_eval(X, Y, x) for x in P]
    pos = {p: i for i, p in enumerate(P)}
    n = len(P) - 1
    lo = np.empty(n, dtype=np.int64)
    hi = np.empty(n, dtype=np.int64)
    unit = set()
    for i in range(n):
        a, b = pos[vals[i]], pos[vals[i + 1]]
        lo[i], hi[i] = min(a, b), max(a, b)
        if abs(vals[i + 1] - vals[i]) == P[i + 1] - P[i]:
            unit.add(i)
    counts = hi - lo
    rows = np.repeat(np.arange(n), counts)
    starts = np.cumsum(counts) - counts
    cols = np.arange(int(counts.sum())) - np.repeat(starts, counts) + np.repeat(lo, counts)
    M = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    if grid is not None:
        P = [Fraction(v, D) for v in P]
    return CellGraph(P, M, frozenset(unit))


def is_LEO(g, in_G=None):
    """Locally eventually onto test.

    For maps in G the Markov cell graph decides it: the graph must be
    primitive, and the cells of slope ``±1`` must not carry a cycle, since
    such a cycle is an interval that never expands.  Other maps go through
    the invariant-family test plus a check that 0 and 1 have interior
    preimages under ``g∘g``.
    """
    if in_G is None:
        in_G = is_in_G(g)
    if in_G:
        cg = transition_graph(g)
        return cg.is_primitive() and not cg.unit_cycle()
    if not is_TM(g):
        return False
    g2 = compose(g, g)

    def meets_interior(y):
        for p in preimage_point(g2, y):
            if isinstance(p, Interval):
                if p.lo < 1 and p.hi > 0:
                    return True
            elif 0 < p < 1:
                return True
        return False

    return meets_interior(Fraction(0)) and meets_interior(Fraction(1))


# -- entropy ---------------------------------------------------------------

def entropy(g):
    """Integral of ``log2 |g'|``; exact when every slope is a power of two."""
    total = Fraction(0)
    exact = True
    parts = []
    for x0, x1, _, _, s in g.segments():
        if s == 0:
            raise DomainError("entropy is undefined on a plateau")
        k = log2_exact(abs(s))
        if k is None:
            exact = False
            a = abs(s)
            parts.append((x1 - x0, math.log2(a.numerator) - math.log2(a.denominator)))
        else:
            total += (x1 - x0) * k
            parts.append((x1 - x0, k))
    if exact:
        return total
    return math.fsum(float(w) * float(v) for w, v in parts)


def c_min(m):
    """Smallest entropy of an m-leg band with power-of-two slopes."""
    if m < 1:
        raise DomainError("c_min needs m >= 1")
    total = sum((Fraction(i, 2**i) for i in range(1, m)), Fraction(0))
    return total + Fraction(m - 1, 2 ** (m - 1))
