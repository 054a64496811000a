"""Continuous piecewise-affine maps of the unit interval.

A :class:`PAMap` is stored as its breakpoints ``(x_i, y_i)`` with
``x_0 = 0 < x_1 < ... < x_n = 1``.  Collinear interior points are removed
on construction, so two maps are equal exactly when their breakpoint lists
are equal.
"""

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple

from .errors import BudgetExceeded, DomainError, ParseError
from .numeric import Q, format_rational, is_dyadic, log2_exact, parse_rational

DEFAULT_SEGMENT_BUDGET = 10**6

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


class Interval(NamedTuple):
    lo: Fraction
    hi: Fraction

    @property
    def measure(self):
        return self.hi - self.lo

    def __contains__(self, x):
        return self.lo <= x <= self.hi

    def __str__(self):
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)}]"


class BreakpointKind(Enum):
    Endpoint = "Endpoint"
    TypeI = "TypeI"
    TypeII = "TypeII"


@dataclass(frozen=True)
class Leg:
    """A maximal monotone piece of ``g^{-1}(Y)``."""

    lo: Fraction
    hi: Fraction
    increasing: bool
    onto: bool

    @property
    def interval(self):
        return Interval(self.lo, self.hi)


def _collinear(p, q, r):
    return (q[1] - p[1]) * (r[0] - q[0]) == (r[1] - q[1]) * (q[0] - p[0])


class PAMap:
    """Immutable continuous piecewise-affine map ``[0,1] -> [0,1]``."""

    __slots__ = ("xs", "ys", "_hash", "_slopes", "_memo")

    def __init__(self, points, *, check=True):
        pts = [(Q(x), Q(y)) for x, y in points]
        if check:
            if len(pts) < 2:
                raise DomainError("a map needs at least two breakpoints")
            if pts[0][0] != 0 or pts[-1][0] != 1:
                raise DomainError("breakpoints must start at x=0 and end at x=1")
            for (x0, _), (x1, _) in zip(pts, pts[1:]):
                if not x0 < x1:
                    raise DomainError("breakpoint x-coordinates must be strictly increasing")
            for _, y in pts:
                if not 0 <= y <= 1:
                    raise DomainError(f"value {y} lies outside [0,1]")
        out = [pts[0]]
        for p in pts[1:]:
            while len(out) >= 2 and _collinear(out[-2], out[-1], p):
                out.pop()
            out.append(p)
        self.xs = tuple(p[0] for p in out)
        self.ys = tuple(p[1] for p in out)
        self._hash = None
        self._slopes = None
        self._memo = {}

    # -- basic protocol -------------------------------------------------
    @property
    def points(self):
        return list(zip(self.xs, self.ys))

    def __len__(self):
        return len(self.xs) - 1

    def __eq__(self, other):
        if not isinstance(other, PAMap):
            return NotImplemented
        return self.xs == other.xs and self.ys == other.ys

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.xs, self.ys))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"({format_rational(x)}, {format_rational(y)})" for x, y in self.points)
        return f"PAMap([{body}])"

    def __call__(self, x):
        return eval_map(self, x)

    def slope(self, i):
        return self._slope_list()[i]

    def _slope_list(self):
        if self._slopes is None:
            xs, ys = self.xs, self.ys
            self._slopes = tuple((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
                                 for i in range(len(xs) - 1))
        return self._slopes

    @property
    def slopes(self):
        return list(self._slope_list())

    def segments(self):
        """Yield ``(x0, x1, y0, y1, slope)`` for every affine piece."""
        xs, ys, ss = self.xs, self.ys, self._slope_list()
        for i in range(len(xs) - 1):
            yield xs[i], xs[i + 1], ys[i], ys[i + 1], ss[i]

    def to_text(self):
        return dump_map(self)


# -- construction helpers --------------------------------------------------

def identity():
    return PAMap([(0, 0), (1, 1)])


def reflection():
    return PAMap([(0, 1), (1, 0)])


def from_pieces(pieces):
    """Build a map from consecutive ``(x0, x1, y0, y1)`` pieces, checking continuity."""
    pts = []
    for x0, x1, y0, y1 in pieces:
        if pts:
            if pts[-1] != (Q(x0), Q(y0)):
                raise DomainError(f"pieces are not continuous at x={x0}")
        else:
            pts.append((Q(x0), Q(y0)))
        pts.append((Q(x1), Q(y1)))
    return PAMap(pts)


# -- evaluation and composition --------------------------------------------

def eval_map(g, x):
    x = Q(x)
    if not 0 <= x <= 1:
        raise DomainError(f"x={x} outside [0,1]")
    xs, ys = g.xs, g.ys
    i = bisect_right(xs, x) - 1
    if i >= len(xs) - 1:
        return ys[-1]
    if xs[i] == x:
        return ys[i]
    return ys[i] + (ys[i + 1] - ys[i]) * (x - xs[i]) / (xs[i + 1] - xs[i])


def compose(g1, g2, budget=DEFAULT_SEGMENT_BUDGET):
    """Return ``g1 ∘ g2`` exactly."""
    bx = g1.xs
    xs2, ys2 = g2.xs, g2.ys
    pts_x = [xs2[0]]
    for i in range(len(xs2) - 1):
        x0, x1, y0, y1 = xs2[i], xs2[i + 1], ys2[i], ys2[i + 1]
        if y0 != y1:
            lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
            a = bisect_right(bx, lo)
            b = bisect_left(bx, hi)
            if b > a:
                inner = bx[a:b] if y0 < y1 else reversed(bx[a:b])
                dx = x1 - x0
                dy = y1 - y0
                for t in inner:
                    pts_x.append(x0 + (t - y0) * dx / dy)
        pts_x.append(x1)
        if len(pts_x) > budget + 1:
            raise BudgetExceeded(f"composition exceeds segment budget {budget}")
    ys = [_eval_at(g1, _eval_at(g2, x)) for x in pts_x]
    return PAMap(zip(pts_x, ys), check=False)


def _eval_at(g, x):
    xs, ys = g.xs, g.ys
    i = bisect_right(xs, x) - 1
    if i >= len(xs) - 1:
        return ys[-1]
    if xs[i] == x:
        return ys[i]
    return ys[i] + (ys[i + 1] - ys[i]) * (x - xs[i]) / (xs[i + 1] - xs[i])


def compose_all(maps, budget=DEFAULT_SEGMENT_BUDGET):
    """Compose a sequence right-to-left: ``maps[0] ∘ maps[1] ∘ ...``."""
    result = identity()
    for m in reversed(list(maps)):
        result = compose(m, result, budget)
    return result


def iterate(g, n, budget=DEFAULT_SEGMENT_BUDGET):
    if n < 0:
        raise DomainError("iterate needs n >= 0")
    result = identity()
    for _ in range(n):
        result = compose(g, result, budget)
    return result


def inverse(f):
    """Inverse of a strictly monotone map onto [0,1]."""
    s = f.slopes
    if all(v > 0 for v in s):
        pts = zip(f.ys, f.xs)
    elif all(v < 0 for v in s):
        pts = reversed(list(zip(f.ys, f.xs)))
    else:
        raise DomainError("only strictly monotone maps are invertible")
    if min(f.ys) != 0 or max(f.ys) != 1:
        raise DomainError("map is not onto [0,1]")
    return PAMap(list(pts))


# -- preimages -------------------------------------------------------------

def preimage_point(g, y):
    """Exact ``g^{-1}(y)`` as a sorted list of points and plateau intervals."""
    y = Q(y)
    if not 0 <= y <= 1:
        raise DomainError(f"y={y} outside [0,1]")
    out = []
    for x0, x1, y0, y1, s in g.segments():
        if s == 0:
            if y0 == y:
                if out and not isinstance(out[-1], Interval) and out[-1] == x0:
                    out.pop()
                if out and isinstance(out[-1], Interval) and out[-1].hi == x0:
                    out[-1] = Interval(out[-1].lo, x1)
                else:
                    out.append(Interval(x0, x1))
            continue
        lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
        if lo <= y <= hi:
            x = x0 + (y - y0) / s
            if out:
                last = out[-1]
                if isinstance(last, Interval):
                    if last.hi == x:
                        continue
                elif last == x:
                    continue
            out.append(x)
    return out


def preimage_points(g, y):
    """Isolated solutions of ``g(x) = y`` (ignores plateaus)."""
    return [p for p in preimage_point(g, y) if not isinstance(p, Interval)]


def preimage_interval(g, Y):
    """Legs of ``g^{-1}(Y)``: maximal monotone pieces mapping into ``Y``."""
    lo_y, hi_y = Q(Y[0]), Q(Y[1])
    pieces = []
    for x0, x1, y0, y1, s in g.segments():
        if s == 0:
            if lo_y <= y0 <= hi_y:
                pieces.append([x0, x1, 0])
            continue
        a = x0 + (lo_y - y0) / s
        b = x0 + (hi_y - y0) / s
        if a > b:
            a, b = b, a
        a, b = max(a, x0), min(b, x1)
        if a < b or (a == b and lo_y == hi_y):
            d = 1 if s > 0 else -1
            if pieces and pieces[-1][1] == a and pieces[-1][2] == d and a != b:
                pieces[-1][1] = b
            else:
                pieces.append([a, b, d])
    legs = []
    for a, b, d in pieces:
        va, vb = _eval_at(g, a), _eval_at(g, b)
        onto = min(va, vb) == lo_y and max(va, vb) == hi_y
        legs.append(Leg(a, b, d > 0, onto))
    return legs


def image_interval(g, I):
    """Exact image ``g(I)`` of a closed interval."""
    lo, hi = Q(I[0]), Q(I[1])
    vals = [_eval_at(g, lo), _eval_at(g, hi)]
    a = bisect_right(g.xs, lo)
    b = bisect_left(g.xs, hi)
    vals.extend(g.ys[a:b])
    return Interval(min(vals), max(vals))


# -- classification --------------------------------------------------------

def classify_breakpoints(g):
    out = [(g.xs[0], BreakpointKind.Endpoint)]
    s = g.slopes
    for i in range(1, len(g.xs) - 1):
        kind = BreakpointKind.TypeII if s[i - 1] * s[i] < 0 else BreakpointKind.TypeI
        out.append((g.xs[i], kind))
    out.append((g.xs[-1], BreakpointKind.Endpoint))
    return out


def turning_indices(g):
    """Indices ``i`` of interior breakpoints where the slope changes sign."""
    s = g.slopes
    return [i for i in range(1, len(s)) if s[i - 1] * s[i] < 0]


def count_type2(g):
    return len(turning_indices(g))


def is_onto(g):
    return min(g.ys) == 0 and max(g.ys) == 1


def band_sums(g):
    """Per band between consecutive breakpoint values: ``(lo, hi, sum of 1/|slope|)``."""
    levels = sorted(set(g.ys))
    pos = {v: i for i, v in enumerate(levels)}
    diff = [Fraction(0)] * (len(levels) + 1)
    for x0, x1, y0, y1, s in g.segments():
        if s == 0:
            continue
        a, b = sorted((pos[y0], pos[y1]))
        w = (x1 - x0) / abs(y1 - y0)
        diff[a] += w
        diff[b] -= w
    out = []
    acc = Fraction(0)
    for i in range(len(levels) - 1):
        acc += diff[i]
        out.append((levels[i], levels[i + 1], acc))
    return out


def _memoized(fn):
    """Cache a predicate on the map itself; maps are immutable."""
    key = fn.__name__

    def wrapper(g):
        memo = g._memo
        if key not in memo:
            memo[key] = fn(g)
        return memo[key]

    wrapper.__name__ = key
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_memoized
def is_lambda_preserving(g):
    if not is_onto(g):
        raise DomainError("λ-preservation is defined here for maps onto [0,1]")
    if any(s == 0 for s in g.slopes):
        return False
    return all(total == 1 for _, _, total in band_sums(g))


@_memoized
def is_in_F(g):
    if g.ys[0] != 0 or g.ys[-1] != 1:
        return False
    for s in g.slopes:
        if s <= 0 or log2_exact(s) is None:
            return False
    return all(is_dyadic(x) for x in g.xs)


@_memoized
def is_in_G(g):
    if not is_onto(g):
        return False
    for s in g.slopes:
        if s == 0 or log2_exact(abs(s)) is None:
            return False
    if not all(is_dyadic(x) and is_dyadic(y) for x, y in zip(g.xs, g.ys)):
        return False
    return is_lambda_preserving(g)


def _values_on(g, xs):
    """Evaluate ``g`` on the sorted points ``xs`` with a single sweep."""
    gx, gy = g.xs, g.ys
    out = []
    i = 0
    last = len(gx) - 2
    for x in xs:
        while i < last and gx[i + 1] <= x:
            i += 1
        x0, x1 = gx[i], gx[i + 1]
        if x == x0:
            out.append(gy[i])
        elif x == x1:
            out.append(gy[i + 1])
        else:
            out.append(gy[i] + (gy[i + 1] - gy[i]) * (x - x0) / (x1 - x0))
    return out


def _integer_points(g, L):
    return ([x.numerator * (L // x.denominator) for x in g.xs],
            [y.numerator * (L // y.denominator) for y in g.ys])


def _int_values_on(X, Y, xs):
    """Values at the sorted integer points ``xs`` as ``(numerator, denominator)``."""
    out = []
    i = 0
    last = len(X) - 2
    for x in xs:
        while i < last and X[i + 1] <= x:
            i += 1
        d = X[i + 1] - X[i]
        out.append((Y[i] * d + (Y[i + 1] - Y[i]) * (x - X[i]), d))
    return out


def sup_distance(h1, h2):
    """Exact sup-norm distance; the maximum sits at a breakpoint of either map.

    Coordinates are scaled to integers over a common denominator so the
    sweep needs no Fraction normalisation.
    """
    L = math.lcm(*(v.denominator for v in h1.xs + h1.ys + h2.xs + h2.ys))
    X1, Y1 = _integer_points(h1, L)
    X2, Y2 = _integer_points(h2, L)
    xs = sorted(set(X1) | set(X2))
    p, q = 0, 1
    for (n1, d1), (n2, d2) in zip(_int_values_on(X1, Y1, xs), _int_values_on(X2, Y2, xs)):
        a, b = abs(n1 * d2 - n2 * d1), d1 * d2
        if a * q > p * b:
            p, q = a, b
    return Fraction(p, q * L)


def common_denominator_exponent(g):
    """Smallest M such that every breakpoint coordinate lies on the ``2^-M`` grid."""
    m = 0
    for v in g.xs + g.ys:
        d = v.denominator
        if d & (d - 1):
            raise DomainError("breakpoints are not dyadic")
        m = max(m, d.bit_length() - 1)
    return m


# -- reference maps --------------------------------------------------------

def tent():
    return PAMap([(0, 0), (HALF, 1), (1, 0)])


def f_A():
    return PAMap([(0, 0), (HALF, Fraction(1, 4)), (Fraction(3, 4), HALF), (1, 1)])


def f_B():
    return PAMap([(0, 0), (HALF, HALF), (Fraction(3, 4), Fraction(5, 8)),
                  (Fraction(7, 8), Fraction(3, 4)), (1, 1)])


def sharkovsky_family(delta):
    """The λ-preserving family with slopes 4, 2, -2, 2, 4 (``0 < δ < 1/2``).

    Small ``δ`` loses period 3 while keeping periods 5 and 7, which makes
    it a handy test case for period detection.
    """
    d = Q(delta)
    if not 0 < d < HALF:
        raise DomainError("δ must satisfy 0 < δ < 1/2")
    return PAMap([
        (0, HALF - d), (d / 2, HALF + d), (Fraction(1, 4), 1),
        (Fraction(3, 4), 0), (1 - d / 2, HALF - d), (1, HALF + d),
    ])


def block_map():
    """Two invariant halves, each folded once; not topologically mixing."""
    return PAMap([(0, HALF), (Fraction(1, 4), 0), (Fraction(3, 4), 1), (1, HALF)])


def window(J0, J1, widths, falling=False):
    """Alternating window on ``[J0, J1]`` whose legs have the given width fractions.

    ``widths`` are fractions of ``|J|`` summing to 1.  Outside ``J`` the map is
    the identity, or ``1 - x`` when ``falling`` is set.  An even number of legs
    needs ``J0 = 0`` or ``J1 = 1`` so the graph stays continuous.
    """
    J0, J1 = Q(J0), Q(J1)
    widths = [Q(w) for w in widths]
    if not 0 <= J0 < J1 <= 1:
        raise DomainError("window interval must satisfy 0 <= J0 < J1 <= 1")
    if not widths or any(w <= 0 for w in widths) or sum(widths) != 1:
        raise DomainError("leg widths must be positive and sum to 1")
    m = len(widths)
    if m % 2 == 1:
        start_high = False
    else:
        if J0 != 0 and J1 != 1:
            raise DomainError("an even window must touch 0 or 1")
        start_high = J0 == 0 and J1 != 1
    L = J1 - J0
    pts = []
    if J0 > 0:
        pts.append((ZERO, ZERO))
    x = J0
    level_high = start_high
    pts.append((x, J1 if level_high else J0))
    for w in widths:
        x += L * w
        level_high = not level_high
        pts.append((x, J1 if level_high else J0))
    if J1 < 1:
        pts.append((ONE, ONE))
    g = PAMap(pts)
    if falling:
        g = PAMap([(x, 1 - y) for x, y in g.points])
    return g


def window_from_exponents(J0, J1, exponents, falling=False):
    return window(J0, J1, [Fraction(1, 2**k) for k in exponents], falling)


def w3_basic():
    """The basic 3-fold window on [1/4, 1/2] with slopes 2, -4, 4."""
    return window_from_exponents(Fraction(1, 4), HALF, [1, 2, 2])


def w2_right_quarter():
    return window_from_exponents(Fraction(3, 4), ONE, [1, 1])


def w2(J0, J1):
    return window_from_exponents(J0, J1, [1, 1])


# -- text format -----------------------------------------------------------

HEADER = "pamap/1"


def dump_map(g):
    lines = [HEADER]
    lines.extend(f"{format_rational(x)} {format_rational(y)}" for x, y in g.points)
    return "\n".join(lines) + "\n"


def load_map(text):
    lines = text.splitlines()
    rows = [(i + 1, ln.strip()) for i, ln in enumerate(lines)]
    rows = [(i, ln) for i, ln in rows if ln and not ln.startswith("#")]
    if not rows or rows[0][1] != HEADER:
        raise ParseError(f"expected header {HEADER!r}", rows[0][0] if rows else 1)
    pts = []
    for lineno, ln in rows[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ParseError("expected 'x y'", lineno)
        try:
            pts.append((parse_rational(parts[0]), parse_rational(parts[1])))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(str(exc), lineno) from None
    try:
        return PAMap(pts)
    except DomainError as exc:
        raise ParseError(str(exc), rows[-1][0]) from None


def read_map(path):
    with open(path, encoding="utf-8") as fh:
        return load_map(fh.read())


def write_map(g, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_map(g))
