"""Certified exponential integrals over rational polytopes.

Every simplex S = conv(v_0, ..., v_n) satisfies

    int_S exp<xi, u> du            = n! vol(S) exp[t_0, ..., t_n]
    int_S lambda_i(u) exp<xi, u> du = n! vol(S) exp[t_0, ..., t_n, t_i]

with t_i = <xi, v_i> and exp[...] the divided difference of the exponential.
Polytopes are handled through their deterministic fan triangulation; linear
weights are expanded in barycentric coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import factorial, log2
from typing import Sequence

import mpmath.libmp as _mp

from .geometry import linalg as la
from .geometry.polytope import Polytope, simplex_det
from .errors import DegenerateInput
from .rigor import DEFAULT_BITS, Interval, IntervalVector, iexp, isum

TAYLOR_MAX_TERMS = 60
_LOG2E = 1.4426950408889634
CLUSTER_DIAMETER = 0.25


@dataclass(frozen=True)
class Simplex:
    vertices: tuple

    def __post_init__(self):
        if len(self.vertices) != len(self.vertices[0]) + 1:
            raise DegenerateInput("a simplex in R^n needs n+1 vertices")
        if self.scaled_volume == 0:
            raise DegenerateInput("degenerate simplex")

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    @cached_property
    def scaled_volume(self) -> Fraction:
        """n! vol(S) = |det(v_i - v_0)|."""
        return abs(simplex_det(self.vertices))

    @property
    def volume(self) -> Fraction:
        return self.scaled_volume / factorial(self.dim)


# ---------------------------------------------------------------------------
# divided differences of exp


@lru_cache(maxsize=None)
def _inv_factorial(k: int, prec: int) -> Interval:
    return Interval.from_rational(Fraction(1, factorial(k)), prec)


class _TaylorState:
    """Centre, offsets and complete homogeneous sums h_k for one node cluster."""

    __slots__ = ("c", "r", "K", "h")

    def __init__(self, c, r, K, h):
        self.c, self.r, self.K, self.h = c, r, K, h


def _taylor_terms(r: float, prec: int) -> int:
    """Smallest K with tail bound r^K e^r / K! below 2^-(prec+4)."""
    K = 1
    if r > 0.0:
        lr = log2(r)
        while K < TAYLOR_MAX_TERMS and K * lr + r * _LOG2E - _log2_factorial(K) > -(prec + 4):
            K += 1
    return K


def _taylor_state(nodes: Sequence[Interval], prec: int) -> _TaylorState:
    lo, hi = nodes[0].lo, nodes[0].hi
    for t in nodes[1:]:
        if _mp.mpf_lt(t.lo, lo):
            lo = t.lo
        if _mp.mpf_gt(t.hi, hi):
            hi = t.hi
    c = _mp.mpf_shift(_mp.mpf_add(lo, hi, prec, _mp.round_nearest), -1)
    ci = Interval(c, c, prec)
    deltas = [t - ci for t in nodes]
    r = max(_mp.to_float(x.abs_upper(), rnd=_mp.round_ceiling) for x in deltas)
    K = _taylor_terms(r, prec)
    h = [Interval(_mp.fone, _mp.fone, prec)] + [Interval(_mp.fzero, _mp.fzero, prec)] * (K - 1)
    for x in deltas:
        _absorb(h, x)
    return _TaylorState(c, r, K, h)


def _absorb(h: list, x: Interval) -> None:
    """h_k(x_1..x_m, x) = h_k(x_1..x_m) + x h_{k-1}(x_1..x_m, x), in place."""
    for k in range(1, len(h)):
        h[k] = h[k] + x * h[k - 1]


def _taylor_value(st: _TaylorState, d: int, prec: int) -> Interval:
    """exp[t_0..t_d] = e^c sum_k h_k(t - c)/(k+d)!, plus the tail bound r^K e^r/(K! d!)."""
    series = isum((hk * _inv_factorial(k + d, prec) for k, hk in enumerate(st.h)), prec)
    ru = Interval(_mp.from_float(st.r), _mp.from_float(st.r), prec)
    tail = iexp(ru) * _inv_factorial(st.K, prec) * _inv_factorial(d, prec)
    for _ in range(st.K):
        tail = tail * ru
    t = tail.hi
    series = series + Interval(_mp.mpf_neg(t), t, prec)
    return iexp(Interval(st.c, st.c, prec)) * series


def _taylor_dd(nodes: Sequence[Interval], prec: int) -> Interval:
    return _taylor_value(_taylor_state(nodes, prec), len(nodes) - 1, prec)


@lru_cache(maxsize=256)
def _log2_factorial(k: int) -> float:
    return log2(factorial(k))


class _DividedDifferences:
    """Memoised divided differences of exp over sub-multisets of a node list."""

    def __init__(self, nodes: Sequence[Interval], prec: int):
        order = sorted(range(len(nodes)), key=lambda i: _mp.to_float(nodes[i].lo) + _mp.to_float(nodes[i].hi))
        self.rank = {i: r for r, i in enumerate(order)}
        self.nodes = [nodes[i] for i in order]
        self.prec = prec
        tmax = max(max(abs(_mp.to_float(t.lo)), abs(_mp.to_float(t.hi))) for t in nodes)
        wmax = max(_mp.to_float(_mp.mpf_sub(t.hi, t.lo, 53, _mp.round_ceiling)) for t in nodes)
        # The recurrence loses about log2(1/gap) bits per level, so clusters up to
        # unit diameter go to the certified Taylor branch instead.
        self.tau = max(CLUSTER_DIAMETER, 2.0 ** (-prec / 2) * (1.0 + tmax), 4.0 * wmax)
        self.memo: dict[tuple, Interval] = {}
        self.states: dict[tuple, _TaylorState] = {}

    def __call__(self, indices: Sequence[int]) -> Interval:
        key = tuple(sorted(self.rank[i] for i in indices))
        return self._dd(key)

    def _diameter(self, key) -> float:
        lo = min(_mp.to_float(self.nodes[i].lo, rnd=_mp.round_floor) for i in key)
        hi = max(_mp.to_float(self.nodes[i].hi, rnd=_mp.round_ceiling) for i in key)
        return hi - lo

    def _taylor(self, key: tuple) -> Interval:
        # a repeated node does not change the cluster hull, so the h-vector of
        # the multiset without one copy extends by a single pass
        st = None
        for pos in range(1, len(key)):
            if key[pos] == key[pos - 1]:
                parent = self.states.get(key[:pos] + key[pos + 1:])
                if parent is not None:
                    h = list(parent.h)
                    ci = Interval(parent.c, parent.c, self.prec)
                    _absorb(h, self.nodes[key[pos]] - ci)
                    st = _TaylorState(parent.c, parent.r, parent.K, h)
                    break
        if st is None:
            st = _taylor_state([self.nodes[i] for i in key], self.prec)
        self.states[key] = st
        return _taylor_value(st, len(key) - 1, self.prec)

    def _dd(self, key: tuple) -> Interval:
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        nodes = self.nodes
        if len(key) == 1:
            val = iexp(nodes[key[0]])
        elif self._diameter(key) < self.tau:
            val = self._taylor(key)
        else:
            a, b = key[0], key[-1]
            gap = nodes[b] - nodes[a]
            if gap.contains_zero():
                val = self._taylor(key)
            else:
                val = (self._dd(key[1:]) - self._dd(key[:-1])) / gap
        self.memo[key] = val
        return val


def exp_divided_difference(nodes: Sequence[Interval], prec: int | None = None) -> Interval:
    """Enclosure of exp[t_0, ..., t_d] over all representatives of the node intervals."""
    if not nodes:
        raise ValueError("need at least one node")
    prec = prec or max(t.prec for t in nodes)
    return _DividedDifferences(nodes, prec)(range(len(nodes)))


# ---------------------------------------------------------------------------
# simplices


def _nodes(s: Simplex, xi: IntervalVector) -> list[Interval]:
    if len(xi) != s.dim:
        raise ValueError("dimension mismatch between simplex and xi")
    return [xi.dot(v) for v in s.vertices]


def simplex_exp(s: Simplex, xi: IntervalVector) -> Interval:
    """Enclosure of int_S exp<xi, u> du."""
    prec = xi.prec
    dd = _DividedDifferences(_nodes(s, xi), prec)
    return dd(range(s.dim + 1)) * Interval.from_rational(s.scaled_volume, prec)


def weighted_exp(s: Simplex, xi: IntervalVector, i: int) -> Interval:
    """Enclosure of int_S lambda_i(u) exp<xi, u> du for the i-th barycentric coordinate."""
    if not 0 <= i <= s.dim:
        raise IndexError(i)
    prec = xi.prec
    dd = _DividedDifferences(_nodes(s, xi), prec)
    return dd(list(range(s.dim + 1)) + [i]) * Interval.from_rational(s.scaled_volume, prec)


def _simplex_moments(s: Simplex, xi: IntervalVector, v: Sequence | None):
    """(int_S e, int_S <v,u> e) sharing one divided-difference table."""
    prec = xi.prec
    dd = _DividedDifferences(_nodes(s, xi), prec)
    base = list(range(s.dim + 1))
    scale = Interval.from_rational(s.scaled_volume, prec)
    e = dd(base) * scale
    if v is None:
        return e, None
    terms = []
    for i, vert in enumerate(s.vertices):
        w = la.dot(v, vert)
        if w == 0:
            continue
        terms.append(dd(base + [i]) * Interval.from_rational(w, prec))
    lin = isum(terms, prec) * scale
    return e, lin


# ---------------------------------------------------------------------------
# polytopes


def _simplices(p: Polytope) -> list[Simplex]:
    cache = p.__dict__.get("_expint_simplices")
    if cache is None:
        cache = [Simplex(s) for s in p.triangulation]
        p.__dict__["_expint_simplices"] = cache
    return cache


def _moments_direct(p: Polytope, xi: IntervalVector, v):
    prec = xi.prec
    es, ls = [], []
    for s in _simplices(p):
        e, lin = _simplex_moments(s, xi, v)
        es.append(e)
        if lin is not None:
            ls.append(lin)
    return isum(es, prec), (isum(ls, prec) if v is not None else None)


def _is_thin(xi: IntervalVector) -> bool:
    for c in xi:
        w = _mp.mpf_sub(c.hi, c.lo, 53, _mp.round_ceiling)
        if _mp.to_float(w) > 2.0 ** (8 - c.prec) * (1.0 + abs(_mp.to_float(c.lo))):
            return False
    return True


def _moments(p: Polytope, xi: IntervalVector, v, centered: bool = True):
    """Exponential and linear-exponential moments, certified for every xi in the box.

    Thin boxes are evaluated directly.  Wider boxes use the mean-value form
    F(xi) in F(m) + sum_j [-r_j, r_j] sup|dF/dxi_j|, where the derivative bound
    uses sup over P of |u_j| (and |<v,u>|) times an upper bound of int_P e<xi,u>.
    The direct interval evaluation is intersected in when the box is wide.
    """
    if len(xi) != p.dim:
        raise ValueError("dimension mismatch between polytope and xi")
    if not centered or _is_thin(xi):
        return _moments_direct(p, xi, v)
    prec = xi.prec
    mid = xi.mid()
    radii = xi.radius_fractions()
    e_mid, l_mid = _moments_direct(p, mid, v)
    mx = [max(abs(u[j]) for u in p.vertices) for j in range(p.dim)]
    spread = sum((r * m for r, m in zip(radii, mx)), Fraction(0))
    e_up = Interval(e_mid.hi, e_mid.hi, prec) * iexp(Interval.from_rational(spread, prec))
    e_err = (Interval.from_rational(spread, prec) * e_up).hi
    e = e_mid + Interval(_mp.mpf_neg(e_err), e_err, prec)
    lin = None
    if v is not None:
        wmax = max(abs(la.dot(v, u)) for u in p.vertices)
        l_err = (Interval.from_rational(spread * wmax, prec) * e_up).hi
        lin = l_mid + Interval(_mp.mpf_neg(l_err), l_err, prec)
    if spread > Fraction(1, 2):
        e_naive, l_naive = _moments_direct(p, xi, v)
        e = e.intersect(e_naive)
        if lin is not None:
            lin = lin.intersect(l_naive)
    return e, lin


def integrate_exp(p: Polytope, xi: IntervalVector, centered: bool = True) -> Interval:
    """Enclosure of int_P exp<xi, u> du for every xi in the box."""
    return _moments(p, xi, None, centered)[0]


def integrate_linear_exp(p: Polytope, xi: IntervalVector, v: Sequence, centered: bool = True) -> Interval:
    """Enclosure of int_P <v, u> exp<xi, u> du for every xi in the box."""
    v = la.frac_vec(v)
    if len(v) != p.dim:
        raise ValueError("dimension mismatch between polytope and v")
    if not any(v):
        prec = xi.prec
        return Interval(_mp.fzero, _mp.fzero, prec)
    return _moments(p, xi, v, centered)[1]


def integrate_moments(p: Polytope, xi: IntervalVector, v: Sequence, centered: bool = True):
    """Both int_P e<xi,u> and int_P <v,u> e<xi,u> from one pass over the triangulation."""
    return _moments(p, xi, la.frac_vec(v), centered)


def point(xs: Sequence, prec: int = DEFAULT_BITS) -> IntervalVector:
    """Thin interval vector around rational coordinates."""
    return IntervalVector.from_rationals([Fraction(x) for x in xs], prec)
