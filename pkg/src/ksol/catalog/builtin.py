"""Shipped datasets: the 34 Gorenstein del Pezzo surfaces with C*-action and two Fano threefolds."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from ..geometry.divisorial import (
    INFINITY,
    ONE,
    ZERO,
    AffinePiece,
    DivisorialPolytope,
    Param,
    PLFunction,
)
from ..geometry.polytope import Polytope
from .entry import CatalogEntry, Expected

# Surfaces: box [lo, hi]; Phi_0, Phi_inf, Phi_1 and optional Phi_c given as
# lists of (v, mu) for the pieces (<v,u> - mu + 1)/mu; degree; singularity type;
# Picard rank; K-stability with respect to the soliton candidate; xi.
_SURFACES = [
    (1, (-1, 1), [(-2, 1), (-1, 1)], [(1, 2)], [(1, 2)], [(1, 2)], 1, "2D4", 1, True, "0"),
    (2, (-1, 5), [(1, 5), (0, 1)], [(1, 3)], [(-1, 2)], None, 1, "E8", 1, True, "-1.99761"),
    (3, (-1, 3), [(1, 3), (0, 1)], [(1, 4)], [(-1, 2)], None, 1, "E7A1", 1, True, "-1.94024"),
    (4, (-1, 2), [(1, 2), (0, 1)], [(1, 3)], [(-2, 3)], None, 1, "E6A2", 1, True, "-1.69131"),
    (5, (-1, 1), [(-2, 1), (0, 1)], [(1, 2)], [(1, 2)], None, 2, "2A3A1", 1, True, "0"),
    (6, (-1, 2), [(-1, 1), (0, 1)], [(1, 3)], [(1, 3)], None, 2, "A5A2", 1, True, "-0.97052"),
    (7, (-1, 3), [(1, 2), (0, 1)], [(1, 4)], [(-1, 2)], None, 2, "D6A1", 1, True, "-1.79675"),
    (8, (-1, 5), [(1, 4), (0, 1)], [(1, 3)], [(-1, 2)], None, 2, "E7", 1, True, "-1.99186"),
    (9, (-1, 3), [(1, 3), (0, 1)], [(1, 3), (0, 1)], [(-1, 2)], None, 2, "E6", 2, True, "-1.94024"),
    (10, (-1, 1), [(-1, 1), (0, 1)], [(-1, 1), (0, 1)], [(1, 2)], [(1, 2)], 2, "2A3", 2, True, "0"),
    (11, (-1, 2), [(1, 2), (0, 1)], [(1, 2), (0, 1)], [(-2, 3)], None, 2, "D5A1", 2, True, "-1.69131"),
    (12, (-1, 1), [(1, 2)], [(1, 2)], [(-1, 2)], None, 2, "D43A1", 1, True, "-1.34399"),
    (13, (-1, 3), [(-1, 1), (0, 1)], [(1, 4)], [(1, 2)], None, 3, "A5A1", 1, False, "-1.24607"),
    (14, (-1, 5), [(1, 3), (0, 1)], [(1, 3)], [(-1, 2)], None, 3, "E6", 1, True, "-1.96766"),
    (15, (-1, 2), [(1, 2), (0, 1)], [(-1, 1), (0, 1)], [(1, 3)], None, 3, "A4A1", 2, True, "-1.19618"),
    (16, (-1, 1), [(-1, 1), (1, 1)], [(-1, 1), (0, 1)], [(1, 2)], None, 3, "2A2A1", 2, False, "0"),
    (17, (-1, 3), [(1, 3), (0, 1)], [(1, 2), (0, 1)], [(-1, 2)], None, 3, "D5", 2, True, "-1.83879"),
    (18, (-1, 1), [(0, 1), (1, 1)], [(-1, 1), (0, 1)], [(-1, 1), (0, 1)], [(1, 2)], 3, "2A2", 3, False, "0"),
    (19, (-1, 2), [(-1, 1), (-1, 2)], [(0, 1), (1, 2)], [(0, 1), (1, 2)], None, 3, "D4", 3, True, "-1.69131"),
    (20, (-1, 1), [(0, 1), (1, 1)], [(1, 2)], [(-1, 2)], None, 3, "A32A1", 2, True, "-0.94468"),
    (21, (-1, 5), [(1, 2), (0, 1)], [(1, 3)], [(-1, 2)], None, 4, "D5", 1, True, "-1.85969"),
    (22, (-1, 2), [(0, 1), (1, 1)], [(0, 1), (1, 1)], [(-2, 3)], None, 4, "A3A1", 2, False, "-0.97052"),
    (23, (-1, 3), [(1, 2), (0, 1)], [(1, 2), (0, 1)], [(-1, 2)], None, 4, "D4", 2, True, "-1.79675"),
    (24, (-1, 3), [(1, 3), (0, 1)], [(1, 1), (0, 1)], [(-1, 2)], None, 4, "A4", 2, True, "-1.38176"),
    (25, (-1, 1), [(0, 1), (2, 1)], [(-1, 1), (0, 1)], [(-1, 1), (0, 1)], None, 4, "3A1", 3, False, "0"),
    (26, (-1, 2), [(-1, 1), (0, 1)], [(0, 1), (1, 2)], [(0, 1), (1, 2)], None, 4, "A3", 3, True, "-1.31047"),
    (27, (-1, 1), [(0, 1), (1, 1)], [(0, 1), (1, 1)], [(-1, 1), (0, 1)], [(-1, 1), (0, 1)], 4, "2A1", 4, True, "0"),
    (28, (-1, 1), [(0, 1), (1, 1)], [(0, 1), (1, 1)], [(-1, 2)], None, 4, "A2A1", 3, False, "-0.74373"),
    (29, (-1, 5), [(-1, 1), (0, 1)], [(1, 3)], [(1, 2)], None, 5, "A4", 1, True, "-1.42059"),
    (30, (-1, 3), [(1, 2), (0, 1)], [(1, 1), (0, 1)], [(-1, 2)], None, 5, "A3", 2, True, "-1.43886"),
    (31, (-1, 2), [(0, 1), (1, 1)], [(0, 1), (1, 1)], [(-1, 1), (-1, 2)], None, 5, "A2", 3, False, "-1.10613"),
    (32, (-1, 1), [(0, 1), (1, 1)], [(0, 1), (1, 1)], [(-1, 1), (0, 1)], None, 5, "A1", 4, True, "-0.61790"),
    (33, (-1, 3), [(0, 1), (1, 1)], [(0, 1), (1, 1)], [(-1, 2)], None, 6, "A2", 2, False, "-1.24607"),
    (34, (-1, 2), [(-1, 1), (0, 1)], [(0, 1), (1, 1)], [(0, 1), (1, 1)], None, 6, "A1", 3, True, "-0.97052"),
]

_NOTES = {
    16: "printed as min{-u,u} with a stray min; read as the two pieces -u and u",
    18: "printed with a stray min before (u-1)/2; read as the affine piece (u-1)/2",
    31: "Phi_1 printed as min{0,(-u-1)/2}, which has a non-integral graph vertex at u=2 and "
        "degree 11/2; the special fiber drawn for this row forces min{-u,(-u-1)/2}",
}


def _pl(pairs, dim=1):
    return PLFunction(AffinePiece((v,) if dim == 1 else v, mu) for v, mu in pairs)


def _surface(row) -> CatalogEntry:
    num, (lo, hi), p0, pinf, p1, pc, deg, sing, rho, stable, xi = row
    phi = {ZERO: _pl(p0), INFINITY: _pl(pinf), ONE: _pl(p1)}
    if pc is not None:
        phi[Param("c")] = _pl(pc)
    dp = DivisorialPolytope(Polytope([(lo,), (hi,)]), phi)
    xi_ref = None if xi == "0" else (xi,)
    if xi == "0":
        xi_ref = ("0",)
    meta = [("family", "parameter c") if pc is not None else None,
            ("transcription_note", _NOTES[num]) if num in _NOTES else None,
            ("row", str(num))]
    return CatalogEntry(
        f"dp/{num}",
        dp,
        Expected(Fraction(deg), sing, rho, stable, xi_ref, False),
        tuple(sorted(m for m in meta if m is not None)),
    )


def _threefold_230() -> CatalogEntry:
    box = Polytope([(-3, 0), (-2, 1), (2, 1), (3, 0), (0, -3)])
    phi = {
        ZERO: _pl([((0, 0), 1), ((-1, 0), 1)], 2),
        ONE: _pl([((0, 0), 1), ((0, 1), 1)], 2),
        INFINITY: _pl([((1, -1), 2)], 2),
    }
    return CatalogEntry(
        "3fold/2.30",
        DivisorialPolytope(box, phi),
        Expected(Fraction(46), None, None, True, ("0", "0.51489"), False),
        (("source", "Mori-Mukai 2.30"),),
    )


def _threefold_323() -> CatalogEntry:
    box = Polytope([(-3, 0), (-2, 1), (1, 1), (2, 0), (2, -1), (0, -3)])
    phi = {
        ZERO: _pl([((0, 0), 1), ((-1, 0), 1)], 2),
        ONE: _pl([((0, 0), 1), ((0, 1), 1)], 2),
        INFINITY: _pl([((0, -1), 1), ((1, -1), 2)], 2),
    }
    return CatalogEntry(
        "3fold/3.23",
        DivisorialPolytope(box, phi),
        Expected(Fraction(42), None, None, True, ("0.26618", "0.67164"), False),
        (("source", "Mori-Mukai 3.23"),),
    )


@lru_cache(maxsize=1)
def load_builtin() -> tuple[CatalogEntry, ...]:
    """All shipped entries: surfaces dp/1..dp/34, then 3fold/2.30 and 3fold/3.23."""
    return tuple([_surface(r) for r in _SURFACES] + [_threefold_230(), _threefold_323()])


def surfaces() -> tuple[CatalogEntry, ...]:
    return tuple(e for e in load_builtin() if e.id.startswith("dp/"))


def threefolds() -> tuple[CatalogEntry, ...]:
    return tuple(e for e in load_builtin() if e.id.startswith("3fold/"))


def get(entry_id: str) -> CatalogEntry:
    for e in load_builtin():
        if e.id == entry_id:
            return e
    raise KeyError(entry_id)
