from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from ksol.catalog import get, load_builtin, surfaces
from ksol.errors import DegenerateInput, InvalidData
from ksol.geometry import (
    GENERIC,
    INFINITY,
    ONE,
    ZERO,
    AffinePiece,
    DivisorialPolytope,
    PLFunction,
    Polytope,
    admissible_points,
    degree,
    fiber_bounds,
    fixed_subspace,
    special_fiber,
    subdivision_cells,
    symmetries,
    triangulate,
    validate,
)
from ksol.geometry.divisorial import MarkedPoint, Param, cell_vertices
from ksol.geometry.polytope import simplex_volume
from ksol.geometry.symmetry import Symmetry
from oracles import shoelace

F = Fraction


def pl(*pieces):
    return PLFunction([AffinePiece(v, mu) for v, mu in pieces])


def cubic(phi_one=((1,), 2)):
    box = Polytope([(-1,), (3,)])
    return DivisorialPolytope(box, {
        ZERO: pl(((-1,), 1), ((0,), 1)),
        INFINITY: pl(((1,), 4)),
        ONE: pl(phi_one),
    })


small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def points(dim, n_min=None, n_max=8):
    return st.lists(st.tuples(*[small] * dim), min_size=n_min or dim + 1, max_size=n_max, unique=True)


# -- polytopes -----------------------------------------------------------------


def test_triangle_triangulates_to_itself():
    t = Polytope([(0, 0), (2, 0), (0, 1)])
    assert [sorted(s) for s in triangulate(t)] == [sorted(t.vertices)]


def test_unit_square():
    sq = Polytope([(0, 0), (1, 0), (0, 1), (1, 1)])
    simplices = triangulate(sq)
    assert len(simplices) == 2
    assert sum(simplex_volume(s) for s in simplices) == 1 == sq.volume


def test_interior_points_are_dropped():
    p = Polytope([(0, 0), (2, 0), (0, 2), (2, 2), (1, 1), (1, 0)])
    assert p.vertices == ((0, 0), (0, 2), (2, 0), (2, 2))


def test_degenerate_polytope_rejected():
    with pytest.raises(DegenerateInput):
        Polytope([(0, 0), (1, 1), (2, 2)])


@given(points(2))
def test_area_matches_shoelace(pts):
    try:
        p = Polytope(pts)
    except DegenerateInput:
        assume(False)
    assert p.volume == shoelace(_ccw(p.vertices))


def _ccw(verts):
    cx = sum(v[0] for v in verts) / len(verts)
    cy = sum(v[1] for v in verts) / len(verts)
    import math

    return sorted(verts, key=lambda v: math.atan2(float(v[1] - cy), float(v[0] - cx)))


@given(st.integers(1, 3).flatmap(lambda d: points(d)))
def test_hv_round_trip_and_triangulation_conservation(pts):
    try:
        p = Polytope(pts)
    except DegenerateInput:
        assume(False)
    q = Polytope.from_halfspaces([(h.normal, h.offset) for h in p.halfspaces], p.dim)
    assert q.vertices == p.vertices
    simplices = triangulate(p)
    assert sum(simplex_volume(s) for s in simplices) == p.volume
    vs = set(p.vertices)
    assert all(set(s) <= vs for s in simplices)
    assert triangulate(Polytope(list(reversed(pts)))) == simplices  # deterministic


# -- pieces and validation -------------------------------------------------------


def test_affine_piece_encoding():
    p = AffinePiece((1,), 4)
    assert p((3,)) == 0 and p((-1,)) == -1
    assert AffinePiece.from_affine((F(1, 4),), F(-3, 4)) == p
    assert AffinePiece.zero(2).is_constant_zero
    with pytest.raises(ValueError):
        AffinePiece.from_affine((F(1, 2),), 0)


def test_cubic_validates():
    rep = validate(cubic())
    assert rep.ok
    assert [r.condition for r in rep.results] == ["i", "ii", "iii", "iv", "v"]


def test_cubic_with_bad_phi_one_fails_ii():
    # Phi_1 = (u - 2)/3 puts a graph vertex at (3, 1/3)
    rep = validate(cubic(((1,), 3)))
    assert not rep["ii"].passed
    assert rep["ii"].witness == ("1", "(3, 1/3)")
    assert rep.first_failure().condition == "ii"


def test_one_third_slope_with_offset_is_not_a_piece():
    # (u - 1)/3 is not of the form (<v,u> - mu + 1)/mu
    with pytest.raises(ValueError):
        AffinePiece.from_affine((F(1, 3),), F(-1, 3))


def test_condition_iii_failure_has_witness():
    box = Polytope([(-1,), (3,)])
    dp = DivisorialPolytope(box, {ZERO: pl(((-3,), 1))})
    rep = validate(dp)
    assert not rep["iii"].passed and rep["iii"].witness is not None


def test_condition_iv_non_primitive():
    box = Polytope([(-1,), (1,)])
    dp = DivisorialPolytope(box, {ZERO: pl(((2,), 2)), INFINITY: pl(((-1,), 2)), ONE: pl(((1,), 2))})
    assert not validate(dp)["iv"].passed


def test_row_12_validates():
    assert validate(get("dp/12").dp).ok


def test_all_builtins_validate():
    for e in load_builtin():
        assert validate(e.dp).ok, e.id


def test_invalid_data_raises_in_degree():
    with pytest.raises(InvalidData):
        degree(cubic(((1,), 3)))


# -- degree ------------------------------------------------------------------------


def test_cubic_degree():
    assert degree(cubic()) == 3


def test_row_2_degree():
    assert degree(get("dp/2").dp) == 1


def test_threefold_degrees():
    assert degree(get("3fold/2.30").dp) == 46
    assert degree(get("3fold/3.23").dp) == 42


def test_surface_degrees_match_recorded_column():
    for e in surfaces():
        assert degree(e.dp) == e.expected.degree, e.id


def test_fiber_volume_cross_checks_degree():
    # the printed vertex list of Delta_0 for 2.30, triangulated independently of the dp
    d0 = Polytope([(-3, 0, 1), (-2, 1, 1), (2, 1, -1), (3, 0, -2), (0, -3, 1), (0, 1, 1)])
    dp = get("3fold/2.30").dp
    assert d0 == special_fiber(dp, ZERO).polytope
    assert 6 * d0.volume == 46


# -- fibers ------------------------------------------------------------------------


def test_cubic_fiber_at_infinity():
    fib = special_fiber(cubic(), INFINITY)
    assert fib.polytope == Polytope([(-1, 0), (0, F(-1, 2)), (3, 1)])


def test_threefold_fiber_at_one():
    fib = special_fiber(get("3fold/2.30").dp, ONE)
    expected = Polytope([(-3, 0, 1), (-2, 1, 1), (0, 1, 0), (2, 1, 1), (3, 0, 1), (0, -3, -2)])
    assert fib.polytope == expected


def test_row_22_fiber_at_one():
    fib = special_fiber(get("dp/22").dp, ONE)
    assert fib.polytope == Polytope([(-1, 1), (0, -1), (2, -1)])


@pytest.mark.parametrize("entry_id", ["dp/13", "dp/1", "dp/31", "3fold/2.30", "3fold/3.23"])
def test_fiber_heights_and_volumes(entry_id):
    import random

    dp = get(entry_id).dp
    rng = random.Random(7)
    verts = dp.box.vertices
    ys = list(dp.support) + [GENERIC]
    for y in ys:
        fib = special_fiber(dp, y)
        assert fib.volume == degree(dp) / _fact(dp.dim + 1)
        for _ in range(100):
            w = [F(rng.randint(0, 50)) for _ in verts]
            s = sum(w) or F(1)
            u = tuple(sum(wi * v[k] for wi, v in zip(w, verts)) / s for k in range(dp.dim))
            lo, hi = fiber_bounds(dp, y, u)
            assert hi - lo == 2 + dp.deg_phi(u)


def _fact(n):
    import math

    return math.factorial(n)


# -- subdivision, admissibility ----------------------------------------------------


def test_cubic_cells():
    cells = sorted(c.polytope.vertices for c in subdivision_cells(cubic()))
    assert cells == [((-1,), (0,)), ((0,), (3,))]


def test_affine_phi_gives_one_cell():
    dp = get("dp/12").dp
    assert [c.polytope for c in subdivision_cells(dp)] == [dp.box]


def test_threefold_cells_cut_by_axes():
    cells = subdivision_cells(get("3fold/2.30").dp)
    assert len(cells) == 4
    for c in cells:
        xs = {v[0] for v in c.polytope.vertices}
        ys = {v[1] for v in c.polytope.vertices}
        assert min(xs) >= 0 or max(xs) <= 0
        assert min(ys) >= 0 or max(ys) <= 0


def test_admissible_points():
    assert admissible_points(cubic()) == [INFINITY, ONE]
    assert admissible_points(get("dp/2").dp) == []
    assert set(admissible_points(get("3fold/2.30").dp)) == {ZERO, ONE, INFINITY, GENERIC}


def test_marked_points():
    assert MarkedPoint.parse("inf") == MarkedPoint.parse("∞") == INFINITY
    assert MarkedPoint.parse("c") == Param("c")
    assert sorted([GENERIC, Param("c"), ONE, INFINITY, ZERO]) == [ZERO, INFINITY, ONE, Param("c"), GENERIC]


# -- symmetries --------------------------------------------------------------------


def test_threefold_230_reflection():
    syms = symmetries(get("3fold/2.30").dp)
    assert Symmetry(((-1, 0), (0, 1))) in syms
    assert syms[0].is_identity
    assert fixed_subspace(syms) == [(0, 1)]


def test_threefold_323_identity_only():
    syms = symmetries(get("3fold/3.23").dp)
    assert len(syms) == 1 and syms[0].is_identity


def test_fixed_subspace_examples():
    ident = Symmetry(((1, 0), (0, 1)))
    assert len(fixed_subspace([ident])) == 2
    assert fixed_subspace([Symmetry(((1,),)), Symmetry(((-1,),))]) == []


def _deg_even(dp):
    # oracle: compare deg Phi at u and -u on a fine rational grid of the box
    lo, hi = dp.box.vertices[0][0], dp.box.vertices[-1][0]
    if lo != -hi:
        return False
    grid = [lo + (hi - lo) * F(k, 96) for k in range(97)]
    return all(dp.deg_phi((u,)) == dp.deg_phi((-u,)) for u in grid)


def test_one_dimensional_symmetries_match_oracle():
    for e in surfaces():
        syms = symmetries(e.dp)
        has_flip = any(not s.is_identity for s in syms)
        assert has_flip == _deg_even(e.dp), e.id


@pytest.mark.parametrize("entry_id", ["3fold/2.30", "dp/12", "dp/16", "dp/1"])
def test_symmetry_soundness(entry_id):
    dp = get(entry_id).dp
    verts = cell_vertices(dp)
    for s in symmetries(dp):
        for w in verts:
            assert dp.deg_phi(s.apply(w)) == dp.deg_phi(w)
        assert {s.apply(v) for v in dp.box.vertices} == set(dp.box.vertices)
