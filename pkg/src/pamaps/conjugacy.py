"""Index maps of Markov skeletons, transition structure, exact stationary
vectors and synthesis of measure-preserving maps with a prescribed index map.

Matrices are lists of rows.  ``A[i][j]`` (0-based here, 1-based in the
docstrings) refers to piece ``i`` of the partition mapping over cell ``j``.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import networkx as nx

from .algebra import same_equivalence_class
from .dynamics import DEFAULT_ORBIT_BUDGET, markov_partition, orbit
from .errors import DomainError, InfeasibleError, ParseError
from .map_core import (
    PAMap, _eval_at, compose, is_in_G, is_lambda_preserving, turning_indices,
)
from .numeric import Q, format_rational, parse_rational

ZERO = Fraction(0)
ONE = Fraction(1)


# -- skeletons and index maps ----------------------------------------------

SKELETON_HEADER = "skeleton/1"


@dataclass(frozen=True)
class MarkovSkeleton:
    """Partition points ``x_0 < ... < x_N`` with ``s(x_i)`` on the partition."""

    xs: tuple
    values: tuple

    def __post_init__(self):
        xs = tuple(Q(x) for x in self.xs)
        vs = tuple(Q(v) for v in self.values)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", vs)
        if len(xs) < 2 or len(xs) != len(vs):
            raise DomainError("skeleton needs at least two points and one value per point")
        if xs[0] != 0 or xs[-1] != 1 or any(a >= b for a, b in zip(xs, xs[1:])):
            raise DomainError("partition must increase strictly from 0 to 1")

    @property
    def N(self):
        return len(self.xs) - 1

    @classmethod
    def from_map(cls, g, pieces="monotone"):
        """Skeleton of a Markov map.

        With ``pieces="monotone"`` the partition is the forward orbit of the
        endpoints of the monotone pieces (0, 1 and the turning points);
        ``"affine"`` uses every breakpoint instead.
        """
        if pieces == "affine":
            P = markov_partition(g)
        elif pieces == "monotone":
            P = monotone_partition(g)
        else:
            raise DomainError(f"unknown piece type {pieces!r}")
        return cls(P, [_eval_at(g, x) for x in P])

    def to_text(self):
        lines = [SKELETON_HEADER]
        lines += [f"{format_rational(x)} {format_rational(v)}" for x, v in zip(self.xs, self.values)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        rows = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
        rows = [(i, ln) for i, ln in rows if ln and not ln.startswith("#")]
        if not rows or rows[0][1] != SKELETON_HEADER:
            raise ParseError(f"expected header {SKELETON_HEADER!r}", rows[0][0] if rows else 1)
        xs, vs = [], []
        for lineno, ln in rows[1:]:
            parts = ln.split()
            if len(parts) != 2:
                raise ParseError("expected 'x s(x)'", lineno)
            try:
                xs.append(parse_rational(parts[0]))
                vs.append(parse_rational(parts[1]))
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(str(exc), lineno) from None
        try:
            return cls(xs, vs)
        except DomainError as exc:
            raise ParseError(str(exc), rows[-1][0]) from None


def monotone_partition(g, budget=DEFAULT_ORBIT_BUDGET):
    """Sorted union of the forward orbits of 0, 1 and the turning points."""
    starts = [g.xs[0]] + [g.xs[i] for i in turning_indices(g)] + [g.xs[-1]]
    pts = set()
    for x in starts:
        pts.update(orbit(g, x, budget).orbit)
    return sorted(pts)


def index_map(sk):
    """``s*(i) = j`` where ``s(x_i) = x_j``."""
    pos = {x: i for i, x in enumerate(sk.xs)}
    out = []
    for v in sk.values:
        if v not in pos:
            raise DomainError(f"value {format_rational(v)} is not a partition point")
        out.append(pos[v])
    return out


def reverse_index(s):
    """``*s(i) = N - s*(N - i)``."""
    N = len(s) - 1
    return [N - s[N - i] for i in range(N + 1)]


def conjugate_by_index(s1, s2):
    """Index-map criterion for conjugacy of linear or expanding Markov maps.

    Only meaningful for such maps; for anything else it is just a
    comparison of index maps.
    """
    s1, s2 = list(s1), list(s2)
    return s1 == s2 or s1 == reverse_index(s2)


# -- transition matrices ---------------------------------------------------

def a_star(s):
    """0/1 matrix with row ``i`` covering ``min(s*(i-1), s*(i)) < j <= max(...)``."""
    N = len(s) - 1
    if N < 1 or any(not 0 <= v <= N for v in s):
        raise DomainError("index map values must lie in 0..N")
    rows = []
    for i in range(1, N + 1):
        lo, hi = sorted((s[i - 1], s[i]))
        rows.append([1 if lo < j <= hi else 0 for j in range(1, N + 1)])
    return rows


def index_maps_from_a_star(a):
    """All index maps whose 0/1 matrix is ``a`` (each row must be one run)."""
    N = len(a)
    pairs = []
    for row in a:
        js = [j + 1 for j, v in enumerate(row) if v]
        if not js or js != list(range(js[0], js[-1] + 1)):
            raise DomainError("every row must be a nonempty run of ones")
        pairs.append((js[0] - 1, js[-1]))
    out = []
    for start in sorted(set(pairs[0])):
        s = [start]
        for lo, hi in pairs:
            if s[-1] == lo:
                s.append(hi)
            elif s[-1] == hi:
                s.append(lo)
            else:
                break
        if len(s) == N + 1:
            out.append(s)
    return out


class RecurrenceKind(Enum):
    Irreducible = "Irreducible"
    MultipleRecurrent = "MultipleRecurrent"
    HasTransient = "HasTransient"


@dataclass(frozen=True)
class RecurrenceClass:
    kind: RecurrenceKind
    classes: tuple

    @property
    def count(self):
        return len(self.classes)

    def __str__(self):
        if self.kind is RecurrenceKind.MultipleRecurrent:
            return f"MultipleRecurrent({self.count})"
        return self.kind.value


def _graph(a):
    """Edge ``j -> i`` whenever cell ``j`` is covered by piece ``i``."""
    G = nx.DiGraph()
    G.add_nodes_from(range(len(a)))
    for i, row in enumerate(a):
        for j, v in enumerate(row):
            if v:
                G.add_edge(j, i)
    return G


def classify(a):
    """Communicating-class structure of the 0/1 matrix ``a``.

    ``classes`` lists the closed classes (0-based, sorted) when there is no
    transient state, otherwise every class.
    """
    G = _graph(a)
    C = nx.condensation(G)
    members = [tuple(sorted(C.nodes[c]["members"])) for c in C.nodes]
    if len(members) == 1:
        return RecurrenceClass(RecurrenceKind.Irreducible, tuple(members))
    if any(C.out_degree(c) > 0 for c in C.nodes):
        return RecurrenceClass(RecurrenceKind.HasTransient, tuple(sorted(members)))
    return RecurrenceClass(RecurrenceKind.MultipleRecurrent, tuple(sorted(members)))


class SlopeMode(Enum):
    PowersOfTwo = "PowersOfTwo"
    Uniform = "Uniform"


def default_slopes(a, mode=SlopeMode.PowersOfTwo):
    """Column-stochastic matrix on the support of ``a``.

    With ``PowersOfTwo`` a column with ``c`` entries gets ``1/2, 1/4, ...,
    2^-(c-1), 2^-(c-1)`` down its rows; ``Uniform`` gives ``1/c`` each.
    """
    mode = SlopeMode(mode)
    N = len(a)
    A = [[ZERO] * N for _ in range(N)]
    for j in range(N):
        rows = [i for i in range(N) if a[i][j]]
        if not rows:
            raise DomainError(f"column {j + 1} has no entry")
        c = len(rows)
        if mode is SlopeMode.Uniform:
            ws = [Fraction(1, c)] * c
        elif c == 1:
            ws = [ONE]
        else:
            ws = [Fraction(1, 2 ** k) for k in range(1, c)] + [Fraction(1, 2 ** (c - 1))]
        for i, w in zip(rows, ws):
            A[i][j] = w
    return A


def support(A):
    return [[1 if v else 0 for v in row] for row in A]


def check_slope_matrix(A):
    N = len(A)
    if any(len(row) != N for row in A):
        raise DomainError("matrix must be square")
    if any(v < 0 for row in A for v in row):
        raise DomainError("entries must be non-negative")
    for j in range(N):
        if sum(A[i][j] for i in range(N)) != 1:
            raise DomainError(f"column {j + 1} does not sum to 1")


# -- exact linear algebra --------------------------------------------------

def nullspace(M):
    """Basis of the right nullspace of a rational matrix (exact RREF)."""
    rows = [[Q(v) for v in row] for row in M]
    n = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [ZERO] * n
        v[fc] = ONE
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        basis.append(v)
    return basis


@dataclass(frozen=True)
class Stationary:
    """Solution of ``A v = v`` with ``sum(v) = 1``.

    ``unique`` is false for several closed classes; ``vector`` is then the
    average of the per-class solutions listed in ``basis``.
    """

    vector: tuple
    basis: tuple
    unique: bool


def _minus_identity(A):
    N = len(A)
    return [[A[i][j] - (1 if i == j else 0) for j in range(N)] for i in range(N)]


def stationary(A):
    """Exact stationary vector of a column-stochastic matrix."""
    check_slope_matrix(A)
    N = len(A)
    rc = classify(support(A))
    if rc.kind is RecurrenceKind.HasTransient:
        raise InfeasibleError("no positive solution: the chain has transient states")
    basis = []
    for cls in rc.classes:
        sub = [[A[i][j] for j in cls] for i in cls]
        ns = nullspace(_minus_identity(sub))
        if len(ns) != 1:
            raise DomainError("closed class without a one-dimensional solution")
        w = ns[0]
        tot = sum(w)
        v = [ZERO] * N
        for i, x in zip(cls, w):
            v[i] = x / tot
        basis.append(tuple(v))
    vec = tuple(sum(b[i] for b in basis) / len(basis) for i in range(N))
    if any(x <= 0 for x in vec):
        raise InfeasibleError("stationary vector is not positive")
    return Stationary(vec, tuple(basis), len(basis) == 1)


# -- synthesis -------------------------------------------------------------

def _assemble(s, A, v):
    """Piecewise-affine map with cells of lengths ``v`` whose piece ``i``
    sweeps cells ``s*(i-1) -> s*(i)``, spending ``A[i][j] * v[j]`` on cell ``j``."""
    N = len(v)
    xs = [ZERO]
    for w in v:
        xs.append(xs[-1] + w)
    pts = [(ZERO, xs[s[0]])]
    x = ZERO
    for i in range(1, N + 1):
        a, b = s[i - 1], s[i]
        if a == b:
            raise DomainError(f"piece {i} is constant")
        cells = range(a + 1, b + 1) if a < b else range(a, b, -1)
        for j in cells:
            x += A[i - 1][j - 1] * v[j - 1]
            pts.append((x, xs[j] if a < b else xs[j - 1]))
        if x != xs[i]:
            raise DomainError("cell lengths are not a fixed point of the matrix")
    return PAMap(pts)


def _check_index(s, A):
    if len(s) != len(A) + 1:
        raise DomainError("index map and matrix sizes disagree")
    if support(A) != a_star(s):
        raise DomainError("matrix support differs from the index map's 0/1 matrix")


def construct_conjugate(s, A):
    """Expanding measure-preserving map ``t`` with ``t* = s*`` and slopes
    ``1/A[i][j]`` in absolute value."""
    s = list(s)
    check_slope_matrix(A)
    _check_index(s, A)
    if any(v == 1 for row in A for v in row):
        raise DomainError("a slope of magnitude 1 needs construct_conjugate_slope1")
    st = stationary(A)
    t = _assemble(s, A, st.vector)
    if not is_lambda_preserving(t):
        raise DomainError("assembled map does not preserve Lebesgue measure")
    return t


def _unit_pair(A):
    N = len(A)
    cols = [j for j in range(N) if sum(1 for i in range(N) if A[i][j]) == 1]
    if len(cols) != 1:
        raise DomainError(f"expected exactly one single-entry column, found {len(cols)}")
    j0 = cols[0]
    i0 = next(i for i in range(N) if A[i][j0])
    if any(A[i0][j] for j in range(N) if j != j0):
        raise DomainError("the row of the unit slope has other entries")
    return i0, j0


def construct_conjugate_slope1(s, A, alpha=Fraction(1, 2)):
    """Measure-preserving ``t`` with ``t* = s*`` when one piece has slope ±1.

    For a piece mapped onto itself the remaining index map is solved with
    the piece contracted away, the cells before it are shrunk by ``alpha``
    and the freed length is given to the unit-slope piece.  When the piece
    is sent to a different cell the full stationary vector is used; then
    ``t∘t`` is expanding.
    """
    s = list(s)
    alpha = Q(alpha)
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    check_slope_matrix(A)
    _check_index(s, A)
    i0, j0 = _unit_pair(A)
    N = len(A)
    if i0 != j0:
        if s[i0] < s[i0 + 1]:
            raise DomainError("an increasing unit-slope piece must map onto itself")
        st = stationary(A)
        t = _assemble(s, A, st.vector)
        tt = compose(t, t)
        if any(abs(sl) <= 1 for sl in tt.slopes):
            raise DomainError("t∘t is not expanding")
    else:
        keep = [k for k in range(N) if k != i0]
        sub = [[A[i][j] for j in keep] for i in keep]
        sub_s = [v if v <= i0 else v - 1 for k, v in enumerate(s) if k != i0 + 1]
        st = stationary(sub)
        w = list(st.vector)
        beta = sum(w[:i0])
        gap = (1 - alpha) * beta
        if s[i0] < s[i0 + 1]:
            v = [alpha * x for x in w[:i0]] + [gap] + w[i0:]
        else:
            v = [(1 - gap) * x for x in w[:i0]] + [gap] + [(1 - gap) * x for x in w[i0:]]
        if sub_s and a_star(sub_s) != support(sub):
            raise DomainError("contracted index map is inconsistent")
        t = _assemble(s, A, v)
    if not is_lambda_preserving(t):
        raise DomainError("assembled map does not preserve Lebesgue measure")
    return t


def same_class_from_index(g1, g2):
    """True when both maps have the same index map over their Markov
    partitions; equal index maps imply the same equivalence class."""
    s1 = index_map(MarkovSkeleton.from_map(g1))
    s2 = index_map(MarkovSkeleton.from_map(g2))
    if s1 != s2:
        return False
    if not same_equivalence_class(g1, g2):
        raise AssertionError("equal index maps but different classes")
    return True


# -- dense matrix text -----------------------------------------------------

def dump_matrix(A):
    return "\n".join(" ".join(format_rational(Q(v)) for v in row) for row in A) + "\n"


def load_matrix(text):
    rows = []
    width = None
    for lineno, ln in enumerate(text.splitlines(), 1):
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        try:
            row = [parse_rational(p) for p in ln.split()]
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(str(exc), lineno) from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError("rows have different lengths", lineno)
        rows.append(row)
    if not rows:
        raise ParseError("empty matrix", 1)
    return rows


def conjugate_in_G(t):
    return is_in_G(t)
