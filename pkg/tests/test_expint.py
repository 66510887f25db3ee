import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ksol.catalog import get
from ksol.errors import DegenerateInput
from ksol.expint import (
    Simplex,
    exp_divided_difference,
    integrate_exp,
    integrate_linear_exp,
    point,
    simplex_exp,
    weighted_exp,
)
from ksol.geometry import INFINITY, ZERO, Polytope, special_fiber
from ksol.rigor import Interval, IntervalVector
from oracles import abs_exp_integral, exp_bounds, exp_integral

F = Fraction


def contains(x: Interval, q) -> bool:
    return x.lower <= Fraction(q) <= x.upper


def rel_width(x: Interval) -> float:
    mid = abs(float(x.mid_fraction()))
    return float(x.width()) / mid if mid else float(x.width())


# -- examples --------------------------------------------------------------------


def test_cubic_fiber_at_zero_field_is_its_area():
    delta = special_fiber(get("dp/13").dp, INFINITY).polytope
    assert contains(integrate_exp(delta, point([0, 0])), F(3, 2))


def test_unit_interval():
    lo, hi = exp_bounds(F(1), 80)
    x = integrate_exp(Polytope([(0,), (1,)]), point([1]))
    assert x.lower <= lo - 1 and hi - 1 <= x.upper


def test_cubic_destabilizing_integral():
    delta = special_fiber(get("dp/13").dp, INFINITY).polytope
    xi = IntervalVector.from_bounds([(F(-1247, 1000), F(-1246, 1000)), (0, 0)], 53)
    val = integrate_linear_exp(delta, xi, (0, 1))
    assert val.upper < 0
    assert Interval.from_bounds(F(-12, 1000), F(-5, 1000)).overlaps(val)
    assert val.lower >= F(-12, 1000) and val.upper <= F(-5, 1000)


def test_symmetric_polytope_odd_integrand():
    sq = Polytope([(-1, -2), (2, -1), (1, 2), (-2, 1)])
    for v in [(1, 0), (0, 1), (3, -7)]:
        assert contains(integrate_linear_exp(sq, point([0, 0]), v), 0)


def test_threefold_230_h0_bracket():
    delta = special_fiber(get("3fold/2.30").dp, ZERO).polytope
    xi = IntervalVector.from_bounds([(0, 0), (F(514, 1000), F(515, 1000)), (0, 0)], 53)
    raw = integrate_linear_exp(delta, xi, (0, 0, 1))
    assert raw.lower > F(1087, 1000) and raw.upper < F(1458, 1000)


def test_threefold_230_exp_integral_against_quadrature():
    delta = special_fiber(get("3fold/2.30").dp, ZERO).polytope
    xi2 = F(5145, 10000)
    val = integrate_exp(delta, point([0, xi2, 0]))
    ref = exp_integral(delta.vertices, (0, xi2, 0))
    assert abs(float(val.mid_fraction()) - ref) <= 1e-6 * abs(ref)


# -- simplices ---------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_unit_simplex_zero_field(n):
    verts = [tuple(int(i == j) for j in range(n)) for i in range(-1, n)]
    s = Simplex(tuple(verts))
    assert contains(simplex_exp(s, point([0] * n)), F(1, math.factorial(n)))


def test_first_divided_difference():
    a, b = F(-2, 3), F(5, 4)
    x = simplex_exp(Simplex(((a,), (b,))), point([1], 106))
    ea, eb = exp_bounds(a, 120), exp_bounds(b, 120)
    assert x.lower <= (eb[0] - ea[1]) and (eb[1] - ea[0]) <= x.upper


def test_weighted_exp_examples():
    s = Simplex(((0,), (1,)))
    assert contains(weighted_exp(s, point([1], 106), 1), 1)  # int_0^1 u e^u du = 1
    tri = Simplex(((0, 0), (3, 1), (1, 2)))
    for i in range(3):
        assert contains(weighted_exp(tri, point([0, 0]), i), tri.volume / 3)


def test_weighted_sum_reproduces_linear_integral():
    tri = Simplex(((0, 0), (3, 1), (1, 2)))
    xi = point([F(1, 3), F(-2, 5)], 106)
    v = (2, -1)
    total = sum(
        (weighted_exp(tri, xi, i) * Interval.from_rational(v[0] * p[0] + v[1] * p[1], 106)
         for i, p in enumerate(tri.vertices)),
        Interval.from_rational(0, 106),
    )
    direct = integrate_linear_exp(Polytope(tri.vertices), xi, v)
    assert total.overlaps(direct)


def test_degenerate_simplex():
    with pytest.raises(DegenerateInput):
        Simplex(((0, 0), (1, 1), (2, 2)))


def test_divided_difference_all_equal_nodes():
    # exp[t, t, t] = e^t / 2
    t = Interval.from_rational(F(1, 7), 106)
    lo, hi = exp_bounds(F(1, 7), 120)
    x = exp_divided_difference([t, t, t])
    assert x.lower <= lo / 2 and hi / 2 <= x.upper


def test_close_nodes_continuity():
    rng = random.Random(3)
    for _ in range(20):
        verts = tuple((F(rng.randint(-20, 20), 4), F(rng.randint(-20, 20), 4)) for _ in range(3))
        try:
            s = Simplex(verts)
        except DegenerateInput:
            continue
        # choose xi with <xi, v1 - v0> = 1e-14, making two nodes nearly collide
        d = (verts[1][0] - verts[0][0], verts[1][1] - verts[0][1])
        if d == (0, 0):
            continue
        perp = (-d[1], d[0])
        norm2 = d[0] ** 2 + d[1] ** 2
        shift = F(1, 10**14) / norm2
        xi = (perp[0] + shift * d[0], perp[1] + shift * d[1])
        base = simplex_exp(s, point(xi, 106))
        for delta in [(F(1, 10**12), 0), (0, F(1, 10**12)), (F(-1, 10**12), F(1, 10**12))]:
            moved = simplex_exp(s, point((xi[0] + delta[0], xi[1] + delta[1]), 106))
            assert base.overlaps(moved) or abs(float(base.mid_fraction() - moved.mid_fraction())) < \
                1e-10 * abs(float(base.mid_fraction()))
            assert rel_width(base) < 1e-20


@given(st.lists(st.fractions(-3, 3, max_denominator=50), min_size=2, max_size=5))
def test_divided_difference_perturbation(ts):
    nodes = [Interval.from_rational(t, 106) for t in ts]
    moved = [Interval.from_rational(t + F(1, 10**12) * (i + 1), 106) for i, t in enumerate(ts)]
    a, b = exp_divided_difference(nodes), exp_divided_difference(moved)
    gap = abs(float(a.mid_fraction() - b.mid_fraction()))
    # the divided difference is smooth with derivatives bounded by e^3
    assert gap <= 1e-10 * math.e**3
    assert rel_width(a) < 1e-20


# -- random polytopes against quadrature --------------------------------------------


def _random_instances(n, seed=20240611):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        dim = rng.randint(1, 3)
        nv = rng.randint(dim + 1, 8)
        pts = [tuple(F(rng.randint(-20, 20), 4) for _ in range(dim)) for _ in range(nv)]
        try:
            p = Polytope(pts)
        except DegenerateInput:
            continue
        if p.volume < F(1, 2):
            continue
        xi = [rng.uniform(-1, 1) for _ in range(dim)]
        norm = math.sqrt(sum(x * x for x in xi)) or 1.0
        r = rng.uniform(0, 3)
        xi = tuple(F(round(x / norm * r * 1000), 1000) for x in xi)
        v = tuple(rng.randint(-3, 3) for _ in range(dim))
        out.append((p, xi, v))
    return out


INSTANCES = _random_instances(200)


def test_oracle_agreement_exp():
    for p, xi, _ in INSTANCES:
        val = integrate_exp(p, point(xi, 106))
        ref = exp_integral(p.vertices, xi)
        assert rel_width(val) <= 1e-6
        assert abs(float(val.mid_fraction()) - ref) <= 1e-6 * abs(ref), (p, xi)


def test_oracle_agreement_linear():
    for p, xi, v in INSTANCES:
        if not any(v):
            continue
        val = integrate_linear_exp(p, point(xi, 106), v)
        ref = exp_integral(p.vertices, xi, v)
        scale = abs_exp_integral(p.vertices, xi, v)
        assert float(val.width()) <= 1e-6 * scale
        assert abs(float(val.mid_fraction()) - ref) <= 1e-6 * scale, (p, xi, v)


def test_zero_field_exactness():
    for p, _, _ in INSTANCES[:50]:
        val = integrate_exp(p, point([0] * p.dim, 53))
        assert contains(val, p.volume)
        assert val.width() <= Fraction(2) ** (4 - 53) * p.volume


def test_affine_equivariance():
    rng = random.Random(11)
    unimodular = [((1, 1), (0, 1)), ((0, 1), (-1, 0)), ((2, 1), (1, 1)), ((1, 0), (3, 1))]
    for p, xi, _ in [inst for inst in INSTANCES if inst[0].dim == 2][:25]:
        a = rng.choice(unimodular)
        b = (rng.randint(-3, 3), rng.randint(-3, 3))
        moved = Polytope([(a[0][0] * u[0] + a[0][1] * u[1] + b[0], a[1][0] * u[0] + a[1][1] * u[1] + b[1])
                          for u in p.vertices])
        lhs = integrate_exp(moved, point(xi, 106))
        at_xi = (a[0][0] * xi[0] + a[1][0] * xi[1], a[0][1] * xi[0] + a[1][1] * xi[1])
        from ksol.rigor import iexp

        shift = iexp(Interval.from_rational(xi[0] * b[0] + xi[1] * b[1], 106))
        rhs = shift * integrate_exp(p, point(at_xi, 106))
        assert lhs.overlaps(rhs)


def test_linearity_in_direction():
    rng = random.Random(5)
    for p, xi, v in INSTANCES[:60]:
        w = tuple(rng.randint(-3, 3) for _ in range(p.dim))
        al, be = rng.randint(-2, 2), rng.randint(-2, 2)
        x = point(xi, 106)
        comb = tuple(al * a + be * b for a, b in zip(v, w))
        lhs = integrate_linear_exp(p, x, comb)
        rhs = (Interval.from_rational(al, 106) * integrate_linear_exp(p, x, v)
               + Interval.from_rational(be, 106) * integrate_linear_exp(p, x, w))
        assert lhs.overlaps(rhs)


def test_interval_xi_encloses_point_values():
    p = special_fiber(get("dp/13").dp, INFINITY).polytope
    box = IntervalVector.from_bounds([(F(-13, 10), F(-11, 10)), (F(-1, 10), F(1, 10))], 53)
    val = integrate_linear_exp(p, box, (0, 1))
    for x in [(F(-13, 10), F(-1, 10)), (F(-12, 10), 0), (F(-11, 10), F(1, 10))]:
        pt = integrate_linear_exp(p, point(x), (0, 1))
        assert val.lower <= pt.lower and pt.upper <= val.upper
