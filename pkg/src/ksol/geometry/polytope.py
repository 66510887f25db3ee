"""Exact rational convex polytopes: hulls, H-representations, triangulations."""

from __future__ import annotations

from functools import cached_property
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Iterable, Sequence

from ..errors import DegenerateInput
from . import linalg as la

Point = tuple  # tuple[Fraction, ...]


def as_point(p) -> Point:
    return tuple(Fraction(x) for x in p)


class Halfspace(tuple):
    """Inequality <normal, x> <= offset with a primitive integer outer normal."""

    def __new__(cls, normal, offset):
        return super().__new__(cls, (tuple(int(a) for a in normal), Fraction(offset)))

    @property
    def normal(self) -> tuple[int, ...]:
        return self[0]

    @property
    def offset(self) -> Fraction:
        return self[1]

    def slack(self, p) -> Fraction:
        return self.offset - la.dot(self.normal, p)

    def contains(self, p) -> bool:
        return self.slack(p) >= 0

    def is_tight(self, p) -> bool:
        return self.slack(p) == 0


def _hyperplane_through(points: Sequence[Point]):
    """Normal and offset of the hyperplane spanned by d affinely independent points in R^d."""
    base = points[0]
    diffs = [la.sub(p, base) for p in points[1:]]
    ns = la.nullspace(diffs, len(base))
    if len(ns) != 1:
        return None
    normal = la.primitive_integer(ns[0])
    return normal, la.dot(normal, base)


def _affine_rank(points: Sequence[Point]) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    return la.rank([la.sub(p, base) for p in points[1:]])


class Polytope:
    """Full-dimensional convex polytope stored by its (lexicographically sorted) vertices."""

    __slots__ = ("vertices", "dim", "__dict__")

    def __init__(self, vertices: Iterable, _trusted: bool = False):
        pts = sorted({as_point(v) for v in vertices})
        if not pts:
            raise DegenerateInput("empty point set")
        dim = len(pts[0])
        if any(len(p) != dim for p in pts):
            raise ValueError("points of mixed dimension")
        self.dim = dim
        if _trusted:
            self.vertices = tuple(pts)
            return
        if _affine_rank(pts) < dim:
            raise DegenerateInput(f"points span less than {dim} dimensions")
        self.vertices = tuple(pts)
        facets = self._compute_facets(pts)
        self.__dict__["halfspaces"] = facets
        extreme = [p for p in pts if self._is_vertex(p, facets)]
        self.vertices = tuple(extreme)

    @classmethod
    def from_points(cls, points: Iterable) -> "Polytope":
        return cls(points)

    @classmethod
    def from_halfspaces(cls, halfspaces: Sequence, dim: int) -> "Polytope | None":
        """Polytope cut out by (normal, offset) inequalities; None if empty or not full-dimensional."""
        hs = [(tuple(Fraction(a) for a in h[0]), Fraction(h[1])) for h in halfspaces]
        pts = set()
        for combo in combinations(range(len(hs)), dim):
            rows = [hs[i][0] for i in combo]
            x = la.solve(rows, [hs[i][1] for i in combo])
            if x is None:
                continue
            if all(la.dot(a, x) <= b for a, b in hs):
                pts.add(x)
        if len(pts) <= dim or _affine_rank(sorted(pts)) < dim:
            return None
        return cls(pts)

    @staticmethod
    def _compute_facets(pts: Sequence[Point]) -> tuple[Halfspace, ...]:
        dim = len(pts[0])
        if dim == 1:
            lo, hi = pts[0][0], pts[-1][0]
            return tuple(sorted({Halfspace((-1,), -lo), Halfspace((1,), hi)}))
        found = set()
        for combo in combinations(pts, dim):
            hp = _hyperplane_through(combo)
            if hp is None:
                continue
            normal, off = hp
            vals = [la.dot(normal, p) for p in pts]
            if all(v <= off for v in vals):
                found.add(Halfspace(normal, off))
            elif all(v >= off for v in vals):
                found.add(Halfspace(tuple(-a for a in normal), -off))
        return tuple(sorted(found))

    @staticmethod
    def _is_vertex(p: Point, facets: Sequence[Halfspace]) -> bool:
        tight = [h.normal for h in facets if h.is_tight(p)]
        return len(tight) >= len(p) and la.rank(tight) == len(p)

    @cached_property
    def halfspaces(self) -> tuple[Halfspace, ...]:
        return self._compute_facets(self.vertices)

    def facet_vertices(self, h: Halfspace) -> tuple[Point, ...]:
        return tuple(v for v in self.vertices if h.is_tight(v))

    def contains(self, p) -> bool:
        p = as_point(p)
        return all(h.contains(p) for h in self.halfspaces)

    def interior_contains(self, p) -> bool:
        p = as_point(p)
        return all(h.slack(p) > 0 for h in self.halfspaces)

    @cached_property
    def triangulation(self) -> tuple[tuple[Point, ...], ...]:
        return tuple(_fan_triangulation(self))

    @cached_property
    def volume(self) -> Fraction:
        return sum((simplex_volume(s) for s in self.triangulation), Fraction(0))

    def vertex_centroid(self) -> Point:
        n = len(self.vertices)
        return tuple(sum(c) / n for c in zip(*self.vertices))

    def __eq__(self, other):
        return isinstance(other, Polytope) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        vs = ", ".join("(" + ",".join(str(x) for x in v) + ")" for v in self.vertices)
        return f"Polytope[{vs}]"


def simplex_det(s: Sequence[Point]) -> Fraction:
    base = s[0]
    return la.det([la.sub(p, base) for p in s[1:]])


def simplex_volume(s: Sequence[Point]) -> Fraction:
    n = len(s) - 1
    return abs(simplex_det(s)) / factorial(n)


def _fan_triangulation(p: Polytope) -> list[tuple[Point, ...]]:
    verts = p.vertices
    if p.dim == 1:
        return [(verts[0], verts[-1])]
    apex = verts[0]
    out = []
    for h in p.halfspaces:
        if h.is_tight(apex):
            continue
        fverts = p.facet_vertices(h)
        # project along a coordinate the facet normal does not annihilate
        j = next(i for i, a in enumerate(h.normal) if a != 0)
        proj = {tuple(x for i, x in enumerate(v) if i != j): v for v in fverts}
        if len(proj) == p.dim:
            pieces = [tuple(sorted(proj))]  # simplex facet
        else:
            pieces = _fan_triangulation(Polytope(proj.keys()))
        for s in pieces:
            out.append((apex,) + tuple(proj[q] for q in s))
    return out


def triangulate(p: Polytope) -> list[tuple[Point, ...]]:
    """Deterministic fan triangulation from the lexicographically smallest vertex."""
    return list(p.triangulation)


def intersect(a: Polytope, b: Polytope) -> Polytope | None:
    return Polytope.from_halfspaces(list(a.halfspaces) + list(b.halfspaces), a.dim)
