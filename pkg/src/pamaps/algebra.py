"""Factorizations of maps in G, generator words for Thompson's group F, and
the characteristic-sequence test for equivalence classes.

Every factorization here is checked by exact recomposition before it is
returned.  Words are lists of factors applied right to left, so
``[a, b, c]`` stands for ``a ∘ b ∘ c``.
"""

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple

from .construct import connect
from .errors import DomainError, PamapsError, ParseError
from .map_core import (
    PAMap,
    _eval_at,
    compose,
    compose_all,
    dump_map,
    f_A,
    f_B,
    identity,
    inverse,
    is_in_F,
    is_in_G,
    load_map,
    preimage_interval,
    reflection,
    tent,
    turning_indices,
    w2_right_quarter,
    w3_basic,
    window_from_exponents,
)
from .numeric import Q, format_rational, is_dyadic, log2_exact, pow2

ZERO = Fraction(0)
ONE = Fraction(1)
QUARTER = Fraction(1, 4)
HALF = Fraction(1, 2)
THREE_QUARTERS = Fraction(3, 4)


# -- generator words for F -------------------------------------------------

class Letter(NamedTuple):
    """One of ``f_A``, ``f_B`` or their inverses."""

    gen: str
    power: int

    def __str__(self):
        return f"f_{self.gen}" if self.power == 1 else f"f_{self.gen}^-1"

    @classmethod
    def parse(cls, text):
        table = {"f_A": ("A", 1), "f_B": ("B", 1), "f_A^-1": ("A", -1), "f_B^-1": ("B", -1)}
        if text not in table:
            raise ValueError(f"unknown generator {text!r}")
        return cls(*table[text])

    def inverse(self):
        return Letter(self.gen, -self.power)

    def to_map(self):
        return _GENERATOR_MAPS[self]


_GENERATOR_MAPS = {
    Letter("A", 1): f_A(),
    Letter("B", 1): f_B(),
    Letter("A", -1): inverse(f_A()),
    Letter("B", -1): inverse(f_B()),
}


def word_to_map(word):
    """Composition of a generator word; the empty word is the identity."""
    if not word:
        return identity()
    return compose_all([Letter(*w).to_map() for w in word])


def _free_reduce(word):
    out = []
    for w in word:
        if out and out[-1] == w.inverse():
            out.pop()
        else:
            out.append(w)
    return out


def _x_letters(k, power):
    """Letters of ``X_k^power`` where ``X_0 = f_A`` and ``X_k = f_A^{1-k} f_B f_A^{k-1}``."""
    if k == 0:
        return [Letter("A", power)]
    return ([Letter("A", -1)] * (k - 1) + [Letter("B", power)]
            + [Letter("A", 1)] * (k - 1))


def _leaves(f):
    """Standard dyadic intervals ``(a, k)`` on which ``f`` is affine onto a
    standard dyadic interval."""
    xs = f.xs
    out = []
    stack = [(ZERO, 0)]
    while stack:
        a, k = stack.pop()
        b = a + pow2(-k)
        i = bisect_right(xs, a)
        clean = i >= len(xs) or xs[i] >= b
        if clean:
            fa, fb = _eval_at(f, a), _eval_at(f, b)
            j = log2_exact(fb - fa)
            if j is not None and (fa / (fb - fa)).denominator == 1:
                out.append((a, k))
                continue
        stack.append((a + pow2(-k - 1), k + 1))
        stack.append((a, k + 1))
    return out


def _tree(leaves):
    """Nested-pair tree of a standard dyadic subdivision (``None`` is a leaf)."""
    pos = 0

    def build(a, k):
        nonlocal pos
        if leaves[pos] == (a, k):
            pos += 1
            return None
        return (build(a, k + 1), build(a + pow2(-k - 1), k + 1))

    t = build(ZERO, 0)
    if pos != len(leaves):
        raise PamapsError("subdivision is not a dyadic tree")
    return t


def _rotations_to_comb(t):
    """Spine positions of the rotations ``((a b) c) -> (a (b c))`` that turn
    ``t`` into the right comb."""
    spine = []
    node = t
    while node is not None:
        spine.append(node[0])
        node = node[1]
    out = []
    k = 0
    while k < len(spine):
        left = spine[k]
        if left is None:
            k += 1
            continue
        a, b = left
        spine[k:k + 1] = [a, b]
        out.append(k)
    return out


def f_to_generator_word(f):
    """Word in ``f_A``, ``f_B`` and inverses whose composition is ``f``.

    ``f`` is read as a pair of standard dyadic subdivisions.  Each side is
    rotated into the right comb; the two rotation sequences give
    ``f = phi_R^{-1} ∘ phi_D``.  The word is freely reduced but not minimal.
    """
    if not is_in_F(f):
        raise DomainError("map is not in Thompson's group F")
    dom = sorted(_leaves(f))
    rng = []
    for a, k in dom:
        lo, hi = _eval_at(f, a), _eval_at(f, a + pow2(-k))
        rng.append((lo, -log2_exact(hi - lo)))
    rot_d = _rotations_to_comb(_tree(dom))
    rot_r = _rotations_to_comb(_tree(rng))
    word = []
    for k in rot_r:
        word.extend(_x_letters(k, 1))
    for k in reversed(rot_d):
        word.extend(_x_letters(k, -1))
    word = _free_reduce(word)
    if word_to_map(word) != f:
        raise PamapsError("generator word does not recompose")
    return word


# -- factors and words -----------------------------------------------------

class FactorKind(Enum):
    G0Plus = "G0Plus"
    G0Minus = "G0Minus"
    BasicW3 = "BasicW3"
    W2RightQuarter = "W2RightQuarter"
    W2Full = "W2Full"
    FMap = "FMap"
    FWord = "FWord"


_BASIC = {
    FactorKind.G0Plus: identity,
    FactorKind.G0Minus: reflection,
    FactorKind.BasicW3: w3_basic,
    FactorKind.W2RightQuarter: w2_right_quarter,
    FactorKind.W2Full: tent,
}


@dataclass(frozen=True)
class Factor:
    """A basic map, an element of F, or a generator word for one."""

    kind: FactorKind
    payload: object = None

    def __post_init__(self):
        if self.kind is FactorKind.FMap and not isinstance(self.payload, PAMap):
            raise DomainError("FMap factor needs a map")
        if self.kind is FactorKind.FWord:
            object.__setattr__(self, "payload", tuple(Letter(*w) for w in self.payload))

    @classmethod
    def basic(cls, kind):
        return cls(FactorKind(kind))

    @property
    def is_basic(self):
        return self.kind in _BASIC

    def to_map(self):
        if self.kind in _BASIC:
            return _BASIC[self.kind]()
        if self.kind is FactorKind.FMap:
            return self.payload
        return word_to_map(self.payload)

    def expanded(self):
        """FMap factors become FWord factors; others are returned unchanged."""
        if self.kind is FactorKind.FMap:
            return Factor(FactorKind.FWord, f_to_generator_word(self.payload))
        return self

    def __str__(self):
        if self.kind is FactorKind.FWord:
            return " ".join(["FWord"] + [str(w) for w in self.payload])
        return self.kind.value


WORD_HEADER = "word/1"


class DecompositionWord:
    """Ordered factors composed right to left."""

    def __init__(self, factors):
        self.factors = list(factors)

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)

    def __eq__(self, other):
        return isinstance(other, DecompositionWord) and self.factors == other.factors

    def __repr__(self):
        return f"DecompositionWord({[str(f) for f in self.factors]})"

    def compose(self):
        if not self.factors:
            return identity()
        return compose_all([f.to_map() for f in self.factors])

    def expanded(self):
        return DecompositionWord(f.expanded() for f in self.factors)

    def to_text(self):
        lines = [WORD_HEADER]
        for f in self.factors:
            if f.kind is FactorKind.FMap:
                lines.append("FMap")
                lines.extend(dump_map(f.payload).splitlines())
                lines.append("end")
            else:
                lines.append(str(f))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        rows = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
        rows = [(i, ln) for i, ln in rows if ln and not ln.startswith("#")]
        if not rows or rows[0][1] != WORD_HEADER:
            raise ParseError(f"expected header {WORD_HEADER!r}", rows[0][0] if rows else 1)
        factors = []
        it = iter(rows[1:])
        for lineno, ln in it:
            head, *rest = ln.split()
            if head == "FMap":
                block = []
                for _, inner in it:
                    if inner == "end":
                        break
                    block.append(inner)
                else:
                    raise ParseError("unterminated FMap block", lineno)
                factors.append(Factor(FactorKind.FMap, load_map("\n".join(block))))
            elif head == "FWord":
                try:
                    factors.append(Factor(FactorKind.FWord, [Letter.parse(w) for w in rest]))
                except ValueError as exc:
                    raise ParseError(str(exc), lineno) from None
            else:
                try:
                    kind = FactorKind(head)
                except ValueError:
                    raise ParseError(f"unknown factor {head!r}", lineno) from None
                if rest or kind not in _BASIC:
                    raise ParseError(f"malformed factor line {ln!r}", lineno)
                factors.append(Factor(kind))
        return cls(factors)


def recompose(word):
    return word.compose()


# -- Thompson maps through prescribed points -------------------------------

def f_through(pairs):
    """Element of F sending each ``x`` to ``y`` for the given dyadic pairs.

    The pairs must be strictly increasing in both coordinates and lie in
    ``(0, 1)``; the endpoints are added automatically.
    """
    pts = [(ZERO, ZERO)] + [(Q(x), Q(y)) for x, y in pairs] + [(ONE, ONE)]
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if not (x0 < x1 and y0 < y1):
            raise DomainError("points must increase in both coordinates")
        if not all(is_dyadic(v) for v in (x1, y1)):
            raise DomainError("points must be dyadic")
    out = [pts[0]]
    for p, q in zip(pts, pts[1:]):
        out.extend(connect(p, q))
        out.append(q)
    return PAMap(out)


# -- cell re-widthing ------------------------------------------------------

def _cells(g, levels):
    """Cut points of ``[0,1]`` at every breakpoint of ``g`` and every
    crossing of a level, so ``g`` is affine on each cell."""
    cuts = set(g.xs)
    lv = sorted(set(levels))
    for x0, x1, y0, y1, s in g.segments():
        lo, hi = min(y0, y1), max(y0, y1)
        for y in lv[bisect_right(lv, lo):bisect_left(lv, hi)]:
            cuts.add(x0 + (y - y0) / s)
    return sorted(cuts)


def _rewidth(g, cuts, widths):
    """Split ``g = g1 ∘ f1`` where cell ``i`` of ``g`` is stretched to
    ``widths[i]`` and ``g1`` keeps the same values on the stretched cells."""
    if sum(widths) != 1 or any(w <= 0 for w in widths):
        raise DomainError("new cell widths must be positive and sum to 1")
    xn = [ZERO]
    for w in widths:
        xn.append(xn[-1] + w)
    g1 = PAMap([(x, _eval_at(g, c)) for x, c in zip(xn, cuts)])
    f1 = PAMap(list(zip(cuts, xn)))
    return g1, f1


def _checked(g, g1, f1):
    if compose(g1, f1) != g:
        raise PamapsError("factorization does not recompose")
    return g1, f1


# -- breakpoint elimination ------------------------------------------------

def _leg_exponent(g, lo, hi):
    s = (_eval_at(g, hi) - _eval_at(g, lo)) / (hi - lo)
    k = log2_exact(abs(s))
    if k is None:
        raise DomainError("slope on a leg is not a power of two")
    return k


def rebalance_slopes(g, legs, new_exponents):
    """Replace the slopes ``±2^{k_i}`` of affine legs with a common image by
    ``±2^{l_i}``; returns ``(g1, f1)`` with ``g = g1 ∘ f1``.

    The gaps between legs keep their lengths, so ``f1`` is a translation
    there.  The exponent sums ``Σ 2^{-k_i}`` and ``Σ 2^{-l_i}`` must agree.
    """
    legs = sorted((Q(a), Q(b)) for a, b in legs)
    ls = list(new_exponents)
    if len(ls) != len(legs):
        raise DomainError("one new exponent per leg is needed")
    images = set()
    ks = []
    for a, b in legs:
        i = bisect_right(g.xs, a)
        if i < len(g.xs) and g.xs[i] < b:
            raise DomainError("g must be affine on every leg")
        va, vb = _eval_at(g, a), _eval_at(g, b)
        images.add((min(va, vb), max(va, vb)))
        ks.append(_leg_exponent(g, a, b))
    if len(images) != 1:
        raise DomainError("legs must share one image")
    if sum(pow2(-k) for k in ks) != sum(pow2(-l) for l in ls):
        raise DomainError("exponent sums differ")
    (ylo, yhi), = images
    H = yhi - ylo
    cuts = _cells(g, [])
    cuts = sorted(set(cuts) | {p for leg in legs for p in leg})
    new_w = dict(zip(legs, (H * pow2(-l) for l in ls)))
    widths = []
    for c0, c1 in zip(cuts, cuts[1:]):
        widths.append(None)
        for (a, b), w in new_w.items():
            if a <= c0 and c1 <= b:
                widths[-1] = w * (c1 - c0) / (b - a)
                break
        else:
            widths[-1] = c1 - c0
    g1, f1 = _rewidth(g, cuts, widths)
    return _checked(g, g1, f1)


def eliminate_type1_in_band(g, Y):
    """Straighten every leg over ``Y`` when ``g^{-1}(Y)`` is exactly those legs.

    Each leg becomes affine with the slope it had at the bottom of ``Y``;
    returns ``(g1, f1)`` with ``g = g1 ∘ f1``.
    """
    ylo, yhi = Q(Y[0]), Q(Y[1])
    if not ylo < yhi:
        raise DomainError("band must have positive height")
    legs = preimage_interval(g, (ylo, yhi))
    if not legs or not all(l.onto for l in legs):
        raise DomainError("every piece over the band must be an onto leg")
    for leg in legs:
        for i in turning_indices(g):
            if leg.lo < g.xs[i] < leg.hi:
                raise DomainError("legs must be monotone")
    ls = []
    for leg in legs:
        x = leg.lo if _eval_at(g, leg.lo) == ylo else leg.hi
        i = bisect_right(g.xs, x) - 1 if x == leg.lo else bisect_left(g.xs, x) - 1
        ls.append(log2_exact(abs(g.slope(min(i, len(g.xs) - 2)))))
    if sum(pow2(-l) for l in ls) != 1:
        raise DomainError("band is not the full preimage of its legs")
    H = yhi - ylo
    cuts = sorted(set(_cells(g, [ylo, yhi])))
    widths = []
    for c0, c1 in zip(cuts, cuts[1:]):
        for leg, l in zip(legs, ls):
            if leg.lo <= c0 and c1 <= leg.hi:
                v0, v1 = _eval_at(g, c0), _eval_at(g, c1)
                widths.append(abs(v1 - v0) * pow2(-l))
                break
        else:
            widths.append(c1 - c0)
    g1, f1 = _rewidth(g, cuts, widths)
    return _checked(g, g1, f1)


def _odd_part(total):
    """``(L, K)`` with ``total = L * 2^-K`` and ``L`` odd."""
    K = 0
    while (total * (1 << K)).denominator != 1:
        K += 1
    L = total * (1 << K)
    while K > 0 and L.numerator % 2 == 0:
        L /= 2
        K -= 1
    return int(L), K


def _pick_sum(exps, idx, target):
    """Indices (from ``idx``) whose ``2^-k`` add up to ``target``; small
    exponents first, skipping terms larger than the target."""
    chosen, acc = [], ZERO
    for i in sorted(idx, key=lambda i: exps[i]):
        t = pow2(-exps[i])
        if acc + t <= target:
            chosen.append(i)
            acc += t
            if acc == target:
                return chosen
    raise PamapsError("no dyadic subset reaches the target")


def _reduce_L(ks):
    """Leg exponents after the odd-numerator reduction, plus the list of
    steps ``K`` used (one per decrement of ``L``)."""
    ks = list(ks)
    steps = []
    while True:
        L, K = _odd_part(sum(pow2(-k) for k in ks))
        if L == 1:
            return ks, steps
        idx = range(len(ks))
        phi1 = _pick_sum(ks, idx, pow2(-K))
        L2, K2 = _odd_part((L - 1) * pow2(-K))
        rest = [i for i in idx if i not in phi1]
        phi2 = _pick_sum(ks, rest, pow2(-K2))
        for i in phi1:
            ks[i] += K2 + 1 - K
        for i in phi2:
            ks[i] += 1
        steps.append(K)


def normalize_partial_band(g, legs):
    """Rewrite affine legs over a common band so their ``2^-k`` sum is a
    power of two, compensating on the other pieces over the same band.

    Returns ``(g1, f1)`` with ``g = g1 ∘ f1``.
    """
    legs = sorted((Q(a), Q(b)) for a, b in legs)
    ks = []
    images = set()
    for a, b in legs:
        i = bisect_right(g.xs, a)
        if i < len(g.xs) and g.xs[i] < b:
            raise DomainError("g must be affine on every leg")
        va, vb = _eval_at(g, a), _eval_at(g, b)
        images.add((min(va, vb), max(va, vb)))
        ks.append(_leg_exponent(g, a, b))
    if len(images) != 1:
        raise DomainError("legs must share one image")
    (ylo, yhi), = images
    new_ks, steps = _reduce_L(ks)
    if not steps:
        return g, identity()
    levels = [y for y in set(g.ys) if ylo < y < yhi] + [ylo, yhi]
    cuts = _cells(g, levels)
    cuts = sorted(set(cuts) | {p for leg in legs for p in leg})
    # cells over each sub-band of Y, split into leg cells and outside cells
    widths = [c1 - c0 for c0, c1 in zip(cuts, cuts[1:])]
    sub = {}
    for i, (c0, c1) in enumerate(zip(cuts, cuts[1:])):
        v0, v1 = _eval_at(g, c0), _eval_at(g, c1)
        lo, hi = min(v0, v1), max(v0, v1)
        if ylo <= lo and hi <= yhi:
            sub.setdefault((lo, hi), []).append(i)
    leg_of = {}
    for i, (c0, c1) in enumerate(zip(cuts, cuts[1:])):
        for j, (a, b) in enumerate(legs):
            if a <= c0 and c1 <= b:
                leg_of[i] = j
    for (lo, hi), cells in sub.items():
        outside = [i for i in cells if i not in leg_of]
        if not outside:
            raise DomainError("every fiber over the band must leave the legs")
        exps = {i: log2_exact((hi - lo) / widths[i]) for i in outside}
        for K in steps:
            psi = _pick_sum(exps, outside, pow2(-K))
            for i in psi:
                exps[i] -= 1
        for i in outside:
            widths[i] = (hi - lo) * pow2(-exps[i])
        for i in cells:
            if i in leg_of:
                widths[i] = (hi - lo) * pow2(-new_ks[leg_of[i]])
    g1, f1 = _rewidth(g, cuts, widths)
    return _checked(g, g1, f1)


def factor_out_window(g, I):
    """Split ``g = g1 ∘ w1`` where ``g`` is a window perturbation on ``I``.

    ``w1`` is the window on ``I`` with the relative leg slopes of ``g`` and
    ``g1`` is affine on ``I`` with slope ``±2^K``.
    """
    I0, I1 = Q(I[0]), Q(I[1])
    if not 0 <= I0 < I1 <= 1:
        raise DomainError("bad interval")
    inner = [x for x in g.xs if I0 < x < I1]
    xs = [I0] + inner + [I1]
    vals = [_eval_at(g, x) for x in xs]
    lo, hi = min(vals), max(vals)
    if any(v not in (lo, hi) for v in vals):
        raise DomainError("g is not a window perturbation on the interval")
    H = hi - lo
    K = log2_exact(H / (I1 - I0))
    if K is None:
        raise DomainError("interval and image lengths are not related by 2^K")
    exps = []
    for x0, x1 in zip(xs, xs[1:]):
        k = log2_exact((x1 - x0) / (I1 - I0))
        if k is None:
            raise DomainError("leg widths are not powers of two")
        exps.append(-k)
    if len(exps) == 1:
        return g, identity()
    w1 = window_from_exponents(I0, I1, exps)
    x_end = xs[1]
    rising = _eval_at(w1, x_end) > _eval_at(w1, I0)
    if rising:
        a, b = _eval_at(g, I0), _eval_at(g, x_end)
    else:
        a, b = _eval_at(g, x_end), _eval_at(g, I0)
    pts = [(x, y) for x, y in g.points if x < I0]
    pts += [(I0, a), (I1, b)]
    pts += [(x, y) for x, y in g.points if x > I1]
    g1 = PAMap(pts)
    if compose(g1, w1) != g:
        raise DomainError("g is not a window perturbation on the interval")
    return g1, w1


# -- decomposition ---------------------------------------------------------

def _lap_ends(g):
    return [ZERO] + [g.xs[i] for i in turning_indices(g)] + [ONE]


def _turning_values(g):
    return [_eval_at(g, x) for x in _lap_ends(g)]


def _solve_on(g, lo, hi, y):
    """The ``x`` in ``[lo, hi]`` with ``g(x) = y`` where ``g`` is monotone."""
    i = max(bisect_right(g.xs, lo) - 1, 0)
    while i < len(g.xs) - 1 and g.xs[i] < hi:
        x0, x1, y0, y1 = g.xs[i], g.xs[i + 1], g.ys[i], g.ys[i + 1]
        if min(y0, y1) <= y <= max(y0, y1):
            x = x0 if y0 == y1 else x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            if lo <= x <= hi:
                return x
        i += 1
    raise PamapsError("value not reached on the lap")


def _lap_moves(values):
    """Reduce a zigzag of lap values to a monotone one.

    Repeatedly drops the lap with the smallest range.  A last lap is undone
    by a right-end fold, a first lap by a left-end fold and an interior lap
    together with its successor by a 3-fold window.
    """
    v = list(values)
    moves = []
    while len(v) > 2:
        n = len(v) - 1
        best = None
        for j in range(n):
            rank = 0 if j == n - 1 else 1 if j == 0 else 2
            key = (abs(v[j + 1] - v[j]), rank, j)
            if best is None or key < best:
                best = key
        _, rank, j = best
        if rank == 0:
            moves.append(("right", v[-1]))
            v.pop()
        elif rank == 1:
            moves.append(("left", v[0]))
            v.pop(0)
        else:
            moves.append(("tri", j - 1, v[j + 1], v[j]))
            del v[j:j + 2]
    return v, moves


def _window_factors(kind, a, b=None):
    """Factors of a fold that is the identity off its interval."""
    F = lambda m: Factor(FactorKind.FMap, m)
    if kind == "tri":
        if (a, b) == (QUARTER, HALF):
            return [Factor(FactorKind.BasicW3)]
        phi = f_through([(QUARTER, a), (HALF, b)])
        return [F(phi), Factor(FactorKind.BasicW3), F(inverse(phi))]
    if kind == "right":
        if a == 0:
            return [Factor(FactorKind.W2Full)]
        if a == THREE_QUARTERS:
            return [Factor(FactorKind.W2RightQuarter)]
        phi = f_through([(THREE_QUARTERS, a)])
        return [F(phi), Factor(FactorKind.W2RightQuarter), F(inverse(phi))]
    inner = _window_factors("right", 1 - a)
    return [Factor(FactorKind.G0Minus)] + inner + [Factor(FactorKind.G0Minus)]


def _simplify(factors):
    out = []
    for f in factors:
        if f.kind is FactorKind.FMap and f.payload == identity():
            continue
        if out and f.kind is FactorKind.FMap and out[-1].kind is FactorKind.FMap:
            m = compose(out[-1].payload, f.payload)
            out.pop()
            if m != identity():
                out.append(Factor(FactorKind.FMap, m))
            continue
        if out and f.kind is FactorKind.G0Minus and out[-1].kind is FactorKind.G0Minus:
            out.pop()
            continue
        out.append(f)
    return out


def _lapwise_quotient(g, M):
    """The increasing map ``f`` with ``g = M ∘ f`` when ``g`` and ``M`` share
    their sequence of lap values."""
    ge, me = _lap_ends(g), _lap_ends(M)
    pts = {}
    for (a, b), (c, d) in zip(zip(ge, ge[1:]), zip(me, me[1:])):
        for x in g.xs[bisect_left(g.xs, a):bisect_right(g.xs, b)]:
            pts[x] = _solve_on(M, c, d, _eval_at(g, x))
        for t in M.xs[bisect_right(M.xs, c):bisect_left(M.xs, d)]:
            pts[_solve_on(g, a, b, _eval_at(M, t))] = t
    return PAMap(sorted(pts.items()))


def decompose(g):
    """Word over the five basic maps and F whose composition is ``g``.

    The sequence of lap values of ``g`` is reduced to a monotone one by
    :func:`_lap_moves`.  Replaying the moves backwards builds a model map
    ``M`` with the same lap values out of reflections and folds, each fold
    being a basic window conjugated by an element of F.  Finally
    ``g = M ∘ f`` for an increasing ``f`` that is in F.
    """
    if not is_in_G(g):
        raise DomainError("map is not in G")
    base, moves = _lap_moves(_turning_values(g))
    factors = [Factor(FactorKind.G0Minus)] if base[0] == 1 else []
    M = reflection() if base[0] == 1 else identity()
    for move in reversed(moves):
        ends = _lap_ends(M)
        if move[0] == "tri":
            _, j, r, q = move
            u = _solve_on(M, ends[j], ends[j + 1], r)
            v = _solve_on(M, ends[j], ends[j + 1], q)
            new = _window_factors("tri", u, v)
        elif move[0] == "right":
            a = _solve_on(M, ends[-2], ends[-1], move[1])
            new = _window_factors("right", a)
        else:
            a = _solve_on(M, ends[0], ends[1], move[1])
            new = _window_factors("left", a)
        M = compose(M, compose_all([f.to_map() for f in new]))
        factors.extend(new)
    f = _lapwise_quotient(g, M)
    factors.append(Factor(FactorKind.FMap, f))
    factors = _simplify(factors)
    if not factors:
        factors = [Factor(FactorKind.G0Plus)]
    word = DecompositionWord(factors)
    if word.compose() != g:
        raise PamapsError("decomposition does not recompose")
    return word


# -- evolution and characteristic sequences --------------------------------

@dataclass(frozen=True)
class CharSeq:
    """Signed sequence of band indices visited by a map, left to right."""

    sign: int
    indices: tuple
    m: int

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(self.indices))
        if self.sign not in (1, -1):
            raise DomainError("sign must be +1 or -1")
        if any(not 1 <= l <= self.m for l in self.indices):
            raise DomainError("index outside 1..m")
        if any(abs(a - b) > 1 for a, b in zip(self.indices, self.indices[1:])):
            raise DomainError("adjacent indices differ by more than one")

    @property
    def n(self):
        return len(self.indices)

    @property
    def size(self):
        return self.m * self.n

    def __str__(self):
        return ("+" if self.sign > 0 else "-") + "«" + ",".join(map(str, self.indices)) + "»"


def _levels(bands):
    lv = sorted({Q(b) for b in bands} | {ZERO, ONE})
    if lv[0] != 0 or lv[-1] != 1:
        raise DomainError("band levels must lie in [0,1]")
    return lv


def evolution_sequence(g, bands):
    """Band indices of the affine cells of ``g`` for the band cut levels
    ``bands`` (0 and 1 are implied)."""
    lv = _levels(bands)
    pos = {y: i for i, y in enumerate(lv)}
    if any(y not in pos for y in g.ys):
        raise DomainError("a breakpoint value lies inside a band")
    out = []
    for _, _, y0, y1, s in g.segments():
        a, b = pos[y0], pos[y1]
        if a < b:
            out.extend(range(a + 1, b + 1))
        else:
            out.extend(range(a, b, -1))
    return CharSeq(1 if g.slope(0) > 0 else -1, out, len(lv) - 1)


def characteristic_sequence(g):
    """Evolution sequence over the coarsest admissible bands: cuts at every
    breakpoint value."""
    return evolution_sequence(g, g.ys)


def class_levels(g):
    """Values at the turning points and endpoints, plus 0 and 1."""
    return _levels(_turning_values(g))


def class_characteristic_sequence(g):
    """Characteristic sequence of the class of ``g`` under ``f1 ∘ g ∘ f2``.

    Only turning values and endpoint values cut the bands; every other
    breakpoint can be straightened away inside the class, so the sequence
    is read off lap by lap.
    """
    lv = class_levels(g)
    pos = {y: i for i, y in enumerate(lv)}
    tv = _turning_values(g)
    out = []
    for y0, y1 in zip(tv, tv[1:]):
        a, b = pos[y0], pos[y1]
        out.extend(range(a + 1, b + 1) if a < b else range(a, b, -1))
    return CharSeq(1 if g.slope(0) > 0 else -1, out, len(lv) - 1)


def same_equivalence_class(g1, g2):
    return class_characteristic_sequence(g1) == class_characteristic_sequence(g2)


def class_witness(g1, g2):
    """``(f1, f2)`` in F with ``g2 = f1 ∘ g1 ∘ f2``, or ``None``.

    ``f1`` matches the class levels of the two maps and ``f2`` is read off
    lap by lap.
    """
    if not same_equivalence_class(g1, g2):
        return None
    a1, a2 = class_levels(g1), class_levels(g2)
    f1 = f_through(list(zip(a1[1:-1], a2[1:-1])))
    h = compose(f1, g1)
    f2 = inverse(_lapwise_quotient(h, g2))
    if compose(compose(f1, g1), f2) != g2:
        raise PamapsError("class witness does not recompose")
    return f1, f2


def normalize_right(f1, g):
    """Element ``f2`` of F with ``f1 ∘ g ∘ f2`` in G.

    Each piece of ``g^{-1}(f1^{-1}(Y_i))`` is stretched horizontally by the
    slope of ``f1`` above it, which cancels the vertical stretch.
    """
    if not is_in_F(f1):
        raise DomainError("f1 must be in F")
    if not is_in_G(g):
        raise DomainError("g must be in G")
    cuts = _cells(g, f1.xs)
    widths = []
    for c0, c1 in zip(cuts, cuts[1:]):
        mid = _eval_at(g, (c0 + c1) / 2)
        i = min(bisect_right(f1.xs, mid) - 1, len(f1.xs) - 2)
        widths.append((c1 - c0) * f1.slope(i))
    _, phi = _rewidth(g, cuts, widths)
    return inverse(phi)
