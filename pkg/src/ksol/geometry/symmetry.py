"""Lattice symmetries of the base polytope that preserve deg Phi."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from . import linalg as la
from .divisorial import DivisorialPolytope, _require_valid
from .polytope import Polytope


@dataclass(frozen=True)
class Symmetry:
    matrix: tuple  # rows of an integer matrix

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def apply(self, u) -> tuple:
        return la.mat_vec(self.matrix, u)

    def transpose(self) -> "Symmetry":
        return Symmetry(tuple(tuple(r) for r in la.transpose(self.matrix)))

    def apply_transpose(self, xi) -> tuple:
        return la.mat_vec(la.transpose(self.matrix), xi)

    @property
    def is_identity(self) -> bool:
        n = self.dim
        return all(self.matrix[i][j] == int(i == j) for i in range(n) for j in range(n))

    def __str__(self):
        return "[" + "; ".join(" ".join(str(x) for x in row) for row in self.matrix) + "]"


def _basis_indices(vertices) -> list[int]:
    chosen = []
    for i, v in enumerate(vertices):
        if la.rank([vertices[j] for j in chosen] + [v]) == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == len(v):
                break
    return chosen


def _preserves_deg(dp: DivisorialPolytope, m) -> bool:
    mt = la.transpose(m)
    for a in dp.cells:
        for b in dp.cells:
            # u in a and sigma(u) in b
            hs = [(h.normal, h.offset) for h in a.polytope.halfspaces]
            hs += [(la.mat_vec(mt, h.normal), h.offset) for h in b.polytope.halfspaces]
            region = Polytope.from_halfspaces(hs, dp.dim)
            if region is None:
                continue
            for w in region.vertices:
                if a.deg(w) != b.deg(la.mat_vec(m, w)):
                    return False
    return True


def symmetries(dp: DivisorialPolytope) -> list[Symmetry]:
    """All unimodular linear maps permuting the box vertices and preserving deg Phi."""
    _require_valid(dp)
    verts = dp.box.vertices
    vset = set(verts)
    n = dp.dim
    basis = _basis_indices(verts)
    if len(basis) < n:
        return [Symmetry(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))]
    b_cols = la.transpose([verts[i] for i in basis])
    b_inv = la.inverse(b_cols)
    found = set()
    for targets in permutations(range(len(verts)), n):
        w_cols = la.transpose([verts[i] for i in targets])
        m = la.mat_mul(w_cols, b_inv)
        if not all(x.denominator == 1 for row in m for x in row):
            continue
        if abs(la.det(m)) != 1:
            continue
        if {la.mat_vec(m, v) for v in verts} != vset:
            continue
        if not _preserves_deg(dp, m):
            continue
        found.add(tuple(tuple(int(x) for x in row) for row in m))
    ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    ordered = sorted(found, key=lambda m: (m != ident, m))
    return [Symmetry(m) for m in ordered]


def fixed_subspace(sigmas) -> list[tuple[Fraction, ...]]:
    """Rational basis of the common fixed space of the transposed symmetries."""
    sigmas = list(sigmas)
    if not sigmas:
        raise ValueError("need at least one symmetry to fix the dimension")
    n = sigmas[0].dim
    rows = []
    for s in sigmas:
        mt = la.transpose(s.matrix)
        for i in range(n):
            rows.append([Fraction(mt[i][j]) - (1 if i == j else 0) for j in range(n)])
    if all(x == 0 for r in rows for x in r):
        return la.nullspace([], n)
    return la.nullspace(rows, n)
