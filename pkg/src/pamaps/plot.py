"""Deterministic SVG graphs of interval maps.

Coordinates are the only place floats appear; each is rounded to 12
decimals so identical inputs give byte-identical files.
"""

from .map_core import DEFAULT_SEGMENT_BUDGET, iterate

SIZE = 400
MARGIN = 20
COLORS = ["#000000", "#1f4e9c", "#2a8a3e", "#8a5a00", "#6a2c8a"]


def _num(v):
    s = f"{round(float(v), 12):.12f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def polyline_points(g):
    return " ".join(f"{_num(x)},{_num(y)}" for x, y in g.points)


def render_svg(g, diagonal=False, iterates=1, budget=DEFAULT_SEGMENT_BUDGET):
    """SVG of the unit square with the graph of ``g``.

    ``iterates = n`` also draws ``g^2 ... g^n``; ``diagonal`` adds ``y = x``.
    """
    full = SIZE + 2 * MARGIN
    scale = SIZE
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{full}" height="{full}" '
        f'viewBox="0 0 {full} {full}">',
        f'<g transform="translate({MARGIN},{MARGIN + SIZE}) scale({scale},-{scale})" '
        'fill="none" stroke-linejoin="round">',
        '<rect x="0" y="0" width="1" height="1" stroke="#999999" stroke-width="0.004"/>',
    ]
    if diagonal:
        out.append('<line class="diagonal" x1="0" y1="0" x2="1" y2="1" '
                   'stroke="#d62728" stroke-width="0.003"/>')
    for n in range(1, max(1, iterates) + 1):
        h = g if n == 1 else iterate(g, n, budget)
        color = COLORS[(n - 1) % len(COLORS)]
        out.append(f'<polyline class="iterate-{n}" stroke="{color}" stroke-width="0.004" '
                   f'points="{polyline_points(h)}"/>')
    out += ["</g>", "</svg>"]
    return "\n".join(out) + "\n"
