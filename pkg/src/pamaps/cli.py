"""Command-line front end.

Every subcommand wraps one library operation.  Maps are read and written
in the ``pamap/1`` text format (``-`` means stdin/stdout).  Exit status is
0 on success, 1 when the library rejects the input and 2 on usage errors.

Default budgets may be set through the environment variables
``PAMAPS_SEGMENT_BUDGET``, ``PAMAPS_ORBIT_BUDGET`` and ``PAMAPS_NMAX``.
"""

import argparse
import json
import os
import sys

from . import algebra, conjugacy, construct, dynamics, map_core, plot
from .errors import InfeasibleError, PamapsError
from .numeric import format_rational, parse_rational

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}") from None


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return " ".join(_fmt(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return "none"
    try:
        return format_rational(v)
    except (TypeError, ValueError):
        return str(v)


def _jsonable(v):
    if isinstance(v, (bool, int, float, str)) or v is None:
        return v
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    try:
        return format_rational(v)
    except (TypeError, ValueError):
        return str(v)


class Report:
    """Ordered fields for structured output plus optional human text.

    ``document`` is a file body (map, word, skeleton) that text and
    structured modes print verbatim.
    """

    def __init__(self, fields=None, text=None, document=None):
        self.fields = list(fields or [])
        self.text = text
        self.document = document

    def render(self, fmt):
        if fmt == "json":
            data = {k: _jsonable(v) for k, v in self.fields}
            if self.document is not None:
                data["document"] = self.document
            return json.dumps(data, indent=2, sort_keys=False) + "\n"
        if self.document is not None:
            return self.document
        if fmt == "text" and self.text is not None:
            return "\n".join(self.text) + "\n"
        return "".join(f"{k}: {_fmt(v)}\n" for k, v in self.fields)


# -- input helpers ---------------------------------------------------------

def _read(path):
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _map(path):
    return map_core.load_map(_read(path))


def _rational(text):
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _int_list(text):
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from None


def _map_report(g, **extra):
    fields = [("breakpoints", len(g.points))] + list(extra.items())
    return Report(fields + [("map", [f"{_fmt(x)},{_fmt(y)}" for x, y in g.points])],
                  document=map_core.dump_map(g))


def _check_fields(g):
    return [
        ("in-G", map_core.is_in_G(g)),
        ("in-F", map_core.is_in_F(g)),
        ("lambda-preserving", map_core.is_lambda_preserving(g)),
        ("onto", map_core.is_onto(g)),
        ("typeII", map_core.count_type2(g)),
        ("breakpoints", len(g.points)),
    ]


# -- commands --------------------------------------------------------------

def cmd_check(a):
    g = _map(a.map)
    fields = _check_fields(g)
    d = dict(fields)
    text = [
        f"in-G {_fmt(d['in-G'])}",
        f"in-F {_fmt(d['in-F'])}",
        f"λ-preserving {_fmt(d['lambda-preserving'])}",
        f"onto {_fmt(d['onto'])}",
        f"#typeII {d['typeII']}",
        f"breakpoints {d['breakpoints']}",
    ]
    return Report(fields, text)


def cmd_eval(a):
    g = _map(a.map)
    vals = [map_core.eval_map(g, x) for x in a.x]
    return Report([("x", a.x), ("y", vals)],
                  [f"{_fmt(x)} -> {_fmt(y)}" for x, y in zip(a.x, vals)])


def cmd_compose(a):
    maps = [_map(p) for p in a.maps]
    return _map_report(map_core.compose_all(maps, a.segment_budget))


def cmd_iterate(a):
    return _map_report(map_core.iterate(_map(a.map), a.n, a.segment_budget))


def cmd_orbit(a):
    r = dynamics.orbit(_map(a.map), a.x, a.orbit_budget)
    fields = [("preperiod", r.preperiod), ("period", r.period), ("orbit", list(r.orbit))]
    text = [f"preperiod {r.preperiod}, period {r.period}", "orbit " + _fmt(list(r.orbit))]
    return Report(fields, text)


def cmd_markov(a):
    g = _map(a.map)
    sk = conjugacy.MarkovSkeleton.from_map(g, a.pieces)
    s = conjugacy.index_map(sk)
    if a.skeleton:
        return Report([("N", sk.N), ("index", s)], document=sk.to_text())
    fields = [("N", sk.N), ("partition", list(sk.xs)), ("index", s)]
    return Report(fields, [f"N {sk.N}", "partition " + _fmt(list(sk.xs)), "index " + _fmt(s)])


def cmd_periods(a):
    g = _map(a.map)
    rep = dynamics.periodic_points(g, a.nmax, a.segment_budget)
    fields, detail = [], []
    for n in range(1, a.nmax + 1):
        pts, ivs = rep.points.get(n, []), rep.intervals.get(n, [])
        fields.append((f"period {n}", "present" if rep.has_period(n) else "none"))
        fields.append((f"points {n}", list(pts)))
        fields.append((f"intervals {n}", [f"[{_fmt(i.lo)},{_fmt(i.hi)}]" for i in ivs]))
        detail.append(f"period {n}: {len(pts)} points, {len(ivs)} intervals")
    odd = [f"{n}: {'present' if rep.has_period(n) else 'none'}"
           for n in range(3, a.nmax + 1, 2)]
    text = (["; ".join(odd)] if odd else []) + detail
    return Report(fields, text)


def cmd_jcollection(a):
    jc = dynamics.j_collection(_map(a.map), a.segment_budget)
    ivs = [f"[{_fmt(i.lo)},{_fmt(i.hi)}]" for i in jc.intervals]
    fields = [("count", len(ivs)), ("intervals", ivs), ("mode", jc.mode.value)]
    return Report(fields, [f"{len(ivs)} intervals: " + " ".join(ivs), f"outside: {jc.mode.value}"])


def cmd_mixing(a):
    g = _map(a.map)
    tm = dynamics.is_TM(g)
    leo = dynamics.is_LEO(g)
    fields = [("TM", tm), ("LEO", leo)]
    if a.certificate:
        cert = dynamics.has_period3_certificate(g, a.orbit_budget)
        fields.append(("period3-certificate", cert is not None))
    return Report(fields, [f"{k} {_fmt(v)}" for k, v in fields])


def cmd_entropy(a):
    e = dynamics.entropy(_map(a.map))
    exact = not isinstance(e, float)
    return Report([("entropy", e), ("exact", exact)], [_fmt(e)])


def cmd_approx_f(a):
    h = _map(a.map)
    f = construct.approximate_increasing_in_F(h, a.eps)
    return _map_report(f, distance=map_core.sup_distance(h, f))


def cmd_approx_g(a):
    h = _map(a.map)
    g = construct.approximate_in_G(h, a.eps)
    return _map_report(g, distance=map_core.sup_distance(h, g))


def cmd_leoize(a):
    h = _map(a.map)
    g = construct.make_leo(h, a.eps)
    return _map_report(g, distance=map_core.sup_distance(h, g))


def cmd_window(a):
    spec = construct.WindowSpec((a.lo, a.hi), a.exponents, a.falling)
    return _map_report(construct.make_window(spec))


def cmd_target_entropy(a):
    h = _map(a.map)
    g = construct.target_entropy(h, a.c, a.eps)
    return _map_report(g, entropy=dynamics.entropy(g), distance=map_core.sup_distance(h, g))


def cmd_matching(a):
    try:
        sched = construct.solve_dynamic_matching(a.alpha, a.beta)
    except InfeasibleError as exc:
        exc.args = (f"{exc.args[0]} (prefix index {exc.index})",)
        raise
    rows = [f"{_fmt(d)} {' '.join(str(p) for p in perm)}" for d, perm in sched.entries]
    fields = [("entries", len(rows))] + [(f"entry {i + 1}", r) for i, r in enumerate(rows)]
    return Report(fields, ["duration permutation"] + rows)


def cmd_decompose(a):
    word = algebra.decompose(_map(a.map))
    if a.expand:
        word = word.expanded()
    return Report([("factors", len(word.factors))], document=word.to_text())


def cmd_recompose(a):
    word = algebra.DecompositionWord.from_text(_read(a.word))
    return _map_report(algebra.recompose(word))


def cmd_fword(a):
    w = algebra.f_to_generator_word(_map(a.map))
    s = " ".join(str(x) for x in w)
    return Report([("length", len(w)), ("word", s)], [s or "identity"])


def cmd_eqclass(a):
    g1, g2 = _map(a.first), _map(a.second)
    c1 = algebra.class_characteristic_sequence(g1)
    c2 = algebra.class_characteristic_sequence(g2)
    same = algebra.same_equivalence_class(g1, g2)
    fields = [("same-class", same), ("C1", str(c1)), ("C2", str(c2))]
    text = [f"same class {_fmt(same)}", f"C1 {c1}", f"C2 {c2}"]
    if same and a.witness:
        f1, f2 = algebra.class_witness(g1, g2)
        fields += [("f1", map_core.dump_map(f1).split("\n", 1)[1].strip().replace("\n", "; ")),
                   ("f2", map_core.dump_map(f2).split("\n", 1)[1].strip().replace("\n", "; "))]
        text += ["f1 = " + fields[-2][1], "f2 = " + fields[-1][1]]
    return Report(fields, text)


def cmd_charseq(a):
    g = _map(a.map)
    c = algebra.class_characteristic_sequence(g) if a.cls else algebra.characteristic_sequence(g)
    return Report([("sequence", str(c)), ("size", c.size)], [str(c)])


def _load_matrix(path):
    return conjugacy.load_matrix(_read(path))


def _slope_matrix(m, mode):
    if all(v in (0, 1) for row in m for v in row):
        try:
            conjugacy.check_slope_matrix(m)
            return m
        except PamapsError:
            return conjugacy.default_slopes(m, mode)
    return m


def cmd_conjugate(a):
    if a.index is not None:
        s = a.index
    elif a.source is not None:
        text = _read(a.source)
        head = text.lstrip().split("\n", 1)[0].strip()
        if head == conjugacy.SKELETON_HEADER:
            s = conjugacy.index_map(conjugacy.MarkovSkeleton.from_text(text))
        else:
            s = conjugacy.index_map(conjugacy.MarkovSkeleton.from_map(map_core.load_map(text)))
    else:
        raise UsageError("conjugate needs a skeleton/map file or --index")
    A = _load_matrix(a.matrix) if a.matrix else conjugacy.default_slopes(conjugacy.a_star(s), a.mode)
    if any(v == 1 for row in A for v in row):
        t = conjugacy.construct_conjugate_slope1(s, A, a.alpha)
    else:
        t = conjugacy.construct_conjugate(s, A)
    return _map_report(t, index=s, in_G=map_core.is_in_G(t))


def cmd_classify(a):
    m = _load_matrix(a.matrix)
    rc = conjugacy.classify(conjugacy.support(m))
    classes = [",".join(str(i + 1) for i in c) for c in rc.classes]
    fields = [("kind", rc.kind.value), ("count", rc.count), ("classes", classes)]
    return Report(fields, [str(rc), "classes " + " ".join("{" + c + "}" for c in classes)])


def cmd_stationary(a):
    A = _slope_matrix(_load_matrix(a.matrix), a.mode)
    st = conjugacy.stationary(A)
    fields = [("vector", list(st.vector)), ("unique", st.unique),
              ("basis", [" ".join(_fmt(x) for x in b) for b in st.basis])]
    text = [_fmt(list(st.vector))]
    if not st.unique:
        text += ["basis:"] + ["  " + _fmt(list(b)) for b in st.basis]
    return Report(fields, text)


def cmd_plot(a):
    svg = plot.render_svg(_map(a.map), a.diagonal, a.iterate, a.segment_budget)
    target = a.svg if a.svg != "-" else (a.out or "-")
    a.out = None
    if target == "-":
        return Report(document=svg)
    with open(target, "w", encoding="utf-8") as fh:
        fh.write(svg)
    return Report([("written", target)], [f"wrote {target}"])


def cmd_random(a):
    seed = 0 if a.seed is None else a.seed
    if a.kind == "g":
        g = construct.random_G(seed, a.complexity)
    elif a.kind == "f":
        g = construct.random_F(seed, a.complexity)
    else:
        g = construct.random_pa_lambda(seed)
    return _map_report(g)


# -- parser ----------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "structured", "json"], default="text",
                        help="human text, key: value lines, or JSON")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--segment-budget", type=int,
                        default=_env_int("PAMAPS_SEGMENT_BUDGET", map_core.DEFAULT_SEGMENT_BUDGET))
    common.add_argument("--orbit-budget", type=int,
                        default=_env_int("PAMAPS_ORBIT_BUDGET", dynamics.DEFAULT_ORBIT_BUDGET))
    common.add_argument("--out", "-o", default=None, help="write the output to a file")

    p = argparse.ArgumentParser(prog="pamaps", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    add("check", cmd_check, "membership and breakpoint summary").add_argument("map")
    sp = add("eval", cmd_eval, "evaluate at points")
    sp.add_argument("map")
    sp.add_argument("x", nargs="+", type=_rational)
    add("compose", cmd_compose, "compose maps, first argument outermost").add_argument("maps", nargs="+")
    sp = add("iterate", cmd_iterate, "n-th iterate")
    sp.add_argument("map")
    sp.add_argument("n", type=int)
    sp = add("orbit", cmd_orbit, "forward orbit of a point")
    sp.add_argument("map")
    sp.add_argument("x", type=_rational)
    sp = add("markov", cmd_markov, "Markov partition and index map")
    sp.add_argument("map")
    sp.add_argument("--skeleton", action="store_true", help="emit a skeleton/1 file")
    sp.add_argument("--pieces", choices=["monotone", "affine"], default="monotone",
                    help="partition from turning points or from every breakpoint")
    sp = add("periods", cmd_periods, "periodic points up to --nmax")
    sp.add_argument("map")
    sp.add_argument("--nmax", type=int, default=_env_int("PAMAPS_NMAX", dynamics.DEFAULT_NMAX))
    add("jcollection", cmd_jcollection, "invariant interval family").add_argument("map")
    sp = add("mixing", cmd_mixing, "topological mixing and LEO tests")
    sp.add_argument("map")
    sp.add_argument("--certificate", action="store_true", help="also search a period-3 certificate")
    add("entropy", cmd_entropy, "entropy with respect to Lebesgue measure").add_argument("map")
    for name, func, help_ in [("approx-f", cmd_approx_f, "approximate an increasing map in F"),
                              ("approx-g", cmd_approx_g, "approximate a measure-preserving map in G"),
                              ("leoize", cmd_leoize, "nearby locally eventually onto map")]:
        sp = add(name, func, help_)
        sp.add_argument("map")
        sp.add_argument("--eps", type=_rational, required=True)
    sp = add("window", cmd_window, "window perturbation on [lo,hi]")
    sp.add_argument("lo", type=_rational)
    sp.add_argument("hi", type=_rational)
    sp.add_argument("exponents", type=int, nargs="+")
    sp.add_argument("--falling", action="store_true")
    sp = add("target-entropy", cmd_target_entropy, "nearby map with prescribed entropy")
    sp.add_argument("map")
    sp.add_argument("--c", type=_rational, required=True)
    sp.add_argument("--eps", type=_rational, required=True)
    sp = add("matching", cmd_matching, "dynamic matching schedule")
    sp.add_argument("--alpha", type=_rational, nargs="+", required=True)
    sp.add_argument("--beta", type=_rational, nargs="+", required=True)
    sp = add("decompose", cmd_decompose, "factor a map in G into basic maps and F maps")
    sp.add_argument("map")
    sp.add_argument("--expand", action="store_true", help="write F factors as generator words")
    add("recompose", cmd_recompose, "compose a word/1 file").add_argument("word")
    add("fword", cmd_fword, "generator word of a map in F").add_argument("map")
    sp = add("eqclass", cmd_eqclass, "compare equivalence classes")
    sp.add_argument("first")
    sp.add_argument("second")
    sp.add_argument("--witness", action="store_true", help="print f1, f2 with g1 = f1∘g2∘f2")
    sp = add("charseq", cmd_charseq, "characteristic sequence")
    sp.add_argument("map")
    sp.add_argument("--class", dest="cls", action="store_true", help="class version")
    sp = add("conjugate", cmd_conjugate, "measure-preserving map with a given index map")
    sp.add_argument("source", nargs="?", help="skeleton/1 or pamap/1 file")
    sp.add_argument("--index", type=_int_list, default=None, help="index map, e.g. 0,2,6,5,6,1,0")
    sp.add_argument("--matrix", default=None, help="slope matrix file")
    sp.add_argument("--mode", choices=["PowersOfTwo", "Uniform"], default="PowersOfTwo")
    sp.add_argument("--alpha", type=_rational, default=parse_rational("1/2"))
    add("classify", cmd_classify, "recurrence structure of a matrix").add_argument("matrix")
    sp = add("stationary", cmd_stationary, "exact stationary vector of a slope matrix")
    sp.add_argument("matrix")
    sp.add_argument("--mode", choices=["PowersOfTwo", "Uniform"], default="PowersOfTwo",
                    help="slopes used when the file holds a 0/1 matrix")
    sp = add("plot", cmd_plot, "SVG graph")
    sp.add_argument("map")
    sp.add_argument("svg", nargs="?", default="-")
    sp.add_argument("--diagonal", action="store_true")
    sp.add_argument("--iterate", type=int, default=1, help="draw g, g^2, ..., g^n")
    sp = add("random", cmd_random, "deterministic random map")
    sp.add_argument("kind", choices=["g", "f", "pa"])
    sp.add_argument("--complexity", type=int, default=4)
    return p


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        parser = build_parser()
    except UsageError as exc:
        print(f"pamaps: {exc}", file=stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        report = args.func(args)
        body = report.render(args.format)
    except UsageError as exc:
        print(f"pamaps: {exc}", file=stderr)
        return EXIT_USAGE
    except (PamapsError, AssertionError) as exc:
        print(f"pamaps: error: {exc}", file=stderr)
        return EXIT_DOMAIN
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        stdout.write(body)
    return EXIT_OK


def main():
    sys.exit(run())
