"""Independent reference computations used by the tests.

Nothing here calls into ksol: exponentials come from integer fixed-point
Taylor series, integrals from Delaunay triangulations and Gauss-Legendre rules.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy.spatial import ConvexHull, Delaunay


def exp_bounds(q: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Rational lo <= exp(q) <= hi with hi - lo of relative size about 2^-bits."""
    q = Fraction(q)
    a = abs(q)
    scale = 1 << (bits + 16)
    # reduce: exp(a) = exp(a / 2^s)^(2^s) with a / 2^s <= 1/2
    s = 0
    while a / (1 << s) > Fraction(1, 2):
        s += 1
    x = a / (1 << s)
    x_lo = (x.numerator * scale) // x.denominator
    x_hi = -((-x.numerator * scale) // x.denominator)
    lo = hi = scale
    term_lo = term_hi = scale
    k = 1
    while True:
        term_lo = term_lo * x_lo // (scale * k)
        term_hi = -((-term_hi * x_hi) // (scale * k))
        lo += term_lo
        hi += term_hi
        k += 1
        if term_hi <= 1:
            break
    hi += 2  # remaining terms shrink at least geometrically by 1/2 from below one unit
    lo_f, hi_f = Fraction(lo, scale), Fraction(hi, scale)
    for _ in range(s):
        lo_f = lo_f * lo_f
        hi_f = hi_f * hi_f
        lo_f = _round(lo_f, bits + 16, down=True)
        hi_f = _round(hi_f, bits + 16, down=False)
    if q < 0:
        lo_f, hi_f = 1 / hi_f, 1 / lo_f
    return lo_f, hi_f


def _round(x: Fraction, bits: int, down: bool) -> Fraction:
    """Round x to a dyadic with about `bits` significant bits, in the given direction."""
    if x == 0:
        return x
    e = x.numerator.bit_length() - x.denominator.bit_length() - bits
    if e >= 0:
        num, den = x.numerator, x.denominator << e
        n = num // den if down else -((-num) // den)
        return Fraction(n << e)
    num, den = x.numerator << -e, x.denominator
    n = num // den if down else -((-num) // den)
    return Fraction(n, 1 << -e)


# -- quadrature ------------------------------------------------------------


def _simplex_rule(dim: int, order: int):
    """Collapsed (Duffy) Gauss-Legendre rule on the unit simplex: points, weights."""
    x, w = np.polynomial.legendre.leggauss(order)
    x = (x + 1) / 2
    w = w / 2
    if dim == 1:
        return x[:, None], w
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    wgrid = np.meshgrid(*([w] * dim), indexing="ij")
    s = [g.ravel() for g in grids]
    weight = np.prod([g.ravel() for g in wgrid], axis=0)
    # map the cube onto the simplex: u_1 = s_1, u_2 = (1 - s_1) s_2, ...
    pts = np.zeros((len(weight), dim))
    rest = np.ones(len(weight))
    for i in range(dim):
        pts[:, i] = rest * s[i]
        weight = weight * rest
        rest = rest * (1 - s[i])
    return pts, weight


def _simplex_integral(verts: np.ndarray, f, order: int) -> float:
    dim = verts.shape[1]
    pts, w = _simplex_rule(dim, order)
    base = verts[0]
    edges = verts[1:] - base
    jac = abs(np.linalg.det(edges))
    x = base + pts @ edges
    return float(np.sum(w * f(x)) * jac)


def polytope_integral(vertices, f, order: int = 64) -> float:
    """Integral of f over conv(vertices), f taking an (m, d) array of points."""
    pts = np.array([[float(c) for c in v] for v in vertices])
    dim = pts.shape[1]
    if dim == 1:
        a, b = pts.min(), pts.max()
        return _simplex_integral(np.array([[a], [b]]), f, order)
    hull = ConvexHull(pts)
    tri = Delaunay(pts[hull.vertices])
    total = 0.0
    for s in tri.simplices:
        v = tri.points[s]
        if abs(np.linalg.det(v[1:] - v[0])) < 1e-14:
            continue
        total += _simplex_integral(v, f, order)
    return total


def exp_integral(vertices, xi, v=None, order: int = 64) -> float:
    xi = np.array([float(c) for c in xi])
    if v is None:
        return polytope_integral(vertices, lambda x: np.exp(x @ xi), order)
    vv = np.array([float(c) for c in v])
    return polytope_integral(vertices, lambda x: (x @ vv) * np.exp(x @ xi), order)


def abs_exp_integral(vertices, xi, v, order: int = 64) -> float:
    xi = np.array([float(c) for c in xi])
    vv = np.array([float(c) for c in v])
    return polytope_integral(vertices, lambda x: np.abs(x @ vv) * np.exp(x @ xi), order)


def shoelace(points) -> Fraction:
    pts = [tuple(Fraction(c) for c in p) for p in points]
    s = Fraction(0)
    for (x1, y1), (x2, y2) in zip(pts, pts[1:] + pts[:1]):
        s += x1 * y2 - x2 * y1
    return abs(s) / 2


def lattice_points(vertices, box_lo, box_hi):
    """Integer points of a polygon given by counter-clockwise or clockwise vertices."""
    pts = [tuple(Fraction(c) for c in p) for p in vertices]
    out = []
    for x in range(math.floor(box_lo[0]), math.ceil(box_hi[0]) + 1):
        for y in range(math.floor(box_lo[1]), math.ceil(box_hi[1]) + 1):
            signs = set()
            for (x1, y1), (x2, y2) in zip(pts, pts[1:] + pts[:1]):
                c = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
                if c != 0:
                    signs.add(c > 0)
            if len(signs) <= 1:
                out.append((x, y))
    return out
