"""Cox ring presentations and catalog matching."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .errors import AmbiguousMatch
from .geometry.divisorial import (
    DivisorialPolytope,
    MarkedPoint,
    _require_valid,
    cell_vertices,
    degree,
    single_function_cells,
)


@dataclass(frozen=True)
class CoxVariable:
    name: str
    exponent: int
    point: MarkedPoint | None  # None for the S variables attached to box facets


@dataclass(frozen=True)
class CoxPresentation:
    """Trinomial presentation T^mu(0) + c T^mu(inf) + T^mu(y) of the Cox ring."""

    variables: tuple  # CoxVariable, T's first then S's
    monomials: tuple  # per support point: tuple of (variable index, exponent)
    points: tuple  # support points in normalised order
    relations: tuple  # (i, j, k, coefficient label) monomial indices

    @property
    def n_relations(self) -> int:
        return len(self.relations)

    @property
    def n_t(self) -> int:
        return sum(1 for v in self.variables if v.point is not None)

    @property
    def n_s(self) -> int:
        return sum(1 for v in self.variables if v.point is None)

    def monomial_str(self, idx: int) -> str:
        parts = []
        for var, e in self.monomials[idx]:
            name = self.variables[var].name
            parts.append(name if e == 1 else f"{name}^{e}")
        return "*".join(parts)

    def relation_str(self, rel) -> str:
        i, j, k, coef = rel
        mid = self.monomial_str(j)
        if coef:
            mid = f"{coef}*{mid}"
        return f"{self.monomial_str(i)} + {mid} + {self.monomial_str(k)}"

    def __str__(self):
        if not self.relations:
            return "0"
        return "; ".join(self.relation_str(r) for r in self.relations)

    def canonical_key(self) -> tuple:
        """Invariant under renaming variables and reordering support points and relations."""
        per_point = tuple(sorted(tuple(sorted(e for _, e in m)) for m in self.monomials))
        return (self.n_relations, per_point, self.n_s)


def cox_ring(dp: DivisorialPolytope) -> CoxPresentation:
    _require_valid(dp)
    box = dp.box
    variables = []
    monomials = []
    points = dp.support
    for y in points:
        f = dp.phi_of(y)
        used = []
        seen = set()
        for _, piece in single_function_cells(box, f):
            if piece not in seen:
                seen.add(piece)
                used.append(piece)
        used.sort(key=lambda p: (p.mu, p.v))
        mono = []
        for piece in used:
            variables.append(CoxVariable(f"T{len(variables) + 1}", piece.mu, y))
            mono.append((len(variables) - 1, piece.mu))
        monomials.append(tuple(mono))
    verts = cell_vertices(dp)
    n_t = len(variables)
    for h in box.halfspaces:
        on_facet = [w for w in verts if h.is_tight(w)]
        if not all(dp.deg_phi(w) == -2 for w in on_facet):
            variables.append(CoxVariable(f"S{len(variables) - n_t + 1}", 1, None))
    relations = []
    for k in range(2, len(points)):
        y = points[k]
        coef = "" if y.kind == "one" else y.name
        relations.append((0, 1, k, coef))
    return CoxPresentation(tuple(variables), tuple(monomials), tuple(points), tuple(relations))


@lru_cache(maxsize=None)
def _entry_key(entry) -> tuple:
    deg = entry.expected.degree if entry.expected.degree is not None else degree(entry.dp)
    return deg, cox_ring(entry.dp).canonical_key()


def match_catalog(dp: DivisorialPolytope, catalog: Iterable | None = None):
    """Catalog entry with equal degree and canonically equal Cox presentation, or None."""
    if catalog is None:
        from .catalog import load_builtin

        catalog = load_builtin()
    key = (degree(dp), cox_ring(dp).canonical_key())
    hits = [e for e in catalog if _entry_key(e) == key]
    if len(hits) > 1:
        raise AmbiguousMatch([e.id for e in hits])
    return hits[0] if hits else None
