"""
Exact convex-polygon helpers over Fractions.

Polygons are tuples of (x, y) Fraction pairs in counter-clockwise order.
A line is a triple (a, b, c) read as a*x + b*y + c; its positive side is
the half-plane a*x + b*y + c > 0.
"""

from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

Point = Tuple[Fraction, Fraction]
Polygon = Tuple[Point, ...]
Line = Tuple[Fraction, Fraction, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)

UNIT_SQUARE: Polygon = ((ZERO, ZERO), (ONE, ZERO), (ONE, ONE), (ZERO, ONE))


def point(x, y) -> Point:
    return (Fraction(x), Fraction(y))


def rectangle(x0, x1, y0, y1) -> Polygon:
    x0, x1, y0, y1 = (Fraction(v) for v in (x0, x1, y0, y1))
    return ((x0, y0), (x1, y0), (x1, y1), (x0, y1))


def segments(polygon: Sequence[Point]):
    if len(polygon) >= 1:
        return zip(polygon, tuple(polygon[1:]) + (polygon[0],))
    return []


def cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def signed_area(polygon: Sequence[Point]) -> Fraction:
    return sum((x0 * y1 - x1 * y0 for (x0, y0), (x1, y1) in segments(polygon)), ZERO) / 2


def area(polygon: Sequence[Point]) -> Fraction:
    return abs(signed_area(polygon))


def line_value(line: Line, p: Point) -> Fraction:
    return line[0] * p[0] + line[1] * p[1] + line[2]


def line_through(p: Point, q: Point) -> Line:
    """Line through p and q, positive on the left of p -> q."""
    a = -(q[1] - p[1])
    b = q[0] - p[0]
    return (a, b, -(a * p[0] + b * p[1]))


def normalize_line(line: Line) -> Line:
    """Scale so the first nonzero of (a, b) is +-1 with a > 0 or (a == 0 and b > 0)."""
    a, b, c = line
    lead = a if a != 0 else b
    if lead == 0:
        return line
    scale = abs(lead)
    sign = 1 if lead > 0 else -1
    return (sign * a / scale, sign * b / scale, sign * c / scale)


def edge_lines(polygon: Polygon) -> List[Line]:
    return [line_through(p, q) for p, q in segments(polygon)]


def clip_halfplane(polygon: Sequence[Point], line: Line) -> List[Point]:
    """Sutherland-Hodgman step: keep the closed positive side of ``line``."""
    if not polygon:
        return []

    def inside(p):
        return line_value(line, p) >= 0

    def compute_intersection(s, e):
        vs, ve = line_value(line, s), line_value(line, e)
        t = vs / (vs - ve)
        return (s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1]))

    output = []
    s = polygon[-1]
    for e in polygon:
        if inside(e):
            if not inside(s):
                output.append(compute_intersection(s, e))
            output.append(e)
        elif inside(s):
            output.append(compute_intersection(s, e))
        s = e
    return output


def clip(subject: Polygon, clip_polygon: Polygon) -> Optional[Polygon]:
    """Intersection of two convex polygons, or None when it has no area."""
    output: List[Point] = list(subject)
    for line in edge_lines(clip_polygon):
        output = clip_halfplane(output, line)
        if not output:
            return None
    return normalize(output)


def split(polygon: Polygon, line: Line) -> Tuple[Optional[Polygon], Optional[Polygon]]:
    """(positive part, negative part) of a convex polygon cut by a line."""
    pos = normalize(clip_halfplane(polygon, line))
    neg = normalize(clip_halfplane(polygon, (-line[0], -line[1], -line[2])))
    return pos, neg


def normalize(points: Iterable[Point]) -> Optional[Polygon]:
    """Drop repeated and collinear vertices, orient CCW, start at the lowest vertex.

    Returns None for polygons without area.
    """
    pts: List[Point] = []
    for p in points:
        if not pts or pts[-1] != p:
            pts.append(p)
    while len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    if len(pts) < 3:
        return None
    if signed_area(pts) < 0:
        pts.reverse()
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        for i in range(len(pts)):
            if cross(pts[i - 1], pts[i], pts[(i + 1) % len(pts)]) == 0:
                del pts[i]
                changed = True
                break
    if len(pts) < 3 or signed_area(pts) == 0:
        return None
    start = min(range(len(pts)), key=lambda i: (pts[i][1], pts[i][0]))
    return tuple(pts[start:] + pts[:start])


def convex_hull(points: Iterable[Point]) -> Optional[Polygon]:
    """Andrew's monotone chain over exact coordinates."""
    pts = sorted(set(points))
    if len(pts) < 3:
        return None
    lower: List[Point] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: List[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return normalize(lower[:-1] + upper[:-1])


def translate(polygon: Polygon, dx, dy) -> Polygon:
    dx, dy = Fraction(dx), Fraction(dy)
    return tuple((x + dx, y + dy) for x, y in polygon)


def centroid(polygon: Polygon) -> Point:
    """Vertex average; strictly interior for a convex polygon with area."""
    n = len(polygon)
    return (sum((p[0] for p in polygon), ZERO) / n, sum((p[1] for p in polygon), ZERO) / n)


def strictly_inside(p: Point, polygon: Polygon) -> bool:
    return all(line_value(line, p) > 0 for line in edge_lines(polygon))


def inside_closed(p: Point, polygon: Polygon) -> bool:
    return all(line_value(line, p) >= 0 for line in edge_lines(polygon))


def bbox(polygon: Polygon) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    xs = [p[0] for p in polygon]
    ys = [p[1] for p in polygon]
    return min(xs), max(xs), min(ys), max(ys)


def refine(polygon: Polygon, lines: Iterable[Line]) -> List[Polygon]:
    """Cut a convex polygon by every line; the pieces tile it."""
    pieces = [polygon]
    for line in lines:
        nxt = []
        for piece in pieces:
            values = [line_value(line, p) for p in piece]
            if all(v >= 0 for v in values) or all(v <= 0 for v in values):
                nxt.append(piece)
                continue
            for part in split(piece, line):
                if part is not None:
                    nxt.append(part)
        pieces = nxt
    return pieces
