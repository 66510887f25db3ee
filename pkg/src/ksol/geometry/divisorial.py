"""Divisorial polytopes of complexity-one T-varieties and their exact invariants."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import factorial, gcd
from typing import Iterable, Mapping, Sequence

from ..errors import InvalidData
from . import linalg as la
from .polytope import Polytope, as_point


# ---------------------------------------------------------------------------
# marked points


@dataclass(frozen=True, order=False)
class MarkedPoint:
    """A point of P^1: one of 0, infinity, 1, a labelled parameter, or a generic point."""

    kind: str  # "zero" | "inf" | "one" | "param" | "generic"
    label: str = ""

    _RANK = {"zero": 0, "inf": 1, "one": 2, "param": 3, "generic": 4}

    def __post_init__(self):
        if self.kind not in self._RANK:
            raise ValueError(f"unknown marked point kind {self.kind!r}")
        if self.kind == "param" and not self.label:
            raise ValueError("parameter points need a label")

    @property
    def sort_key(self):
        return (self._RANK[self.kind], self.label)

    def __lt__(self, other):
        return self.sort_key < other.sort_key

    @property
    def name(self) -> str:
        return {"zero": "0", "inf": "inf", "one": "1", "generic": "generic"}.get(self.kind, self.label)

    @property
    def is_generic(self) -> bool:
        return self.kind == "generic"

    @classmethod
    def parse(cls, name: str) -> "MarkedPoint":
        name = str(name).strip()
        table = {"0": ZERO, "inf": INFINITY, "∞": INFINITY, "infinity": INFINITY, "1": ONE,
                 "generic": GENERIC}
        if name in table:
            return table[name]
        if not name:
            raise ValueError("empty marked point name")
        return cls("param", name)

    def __str__(self):
        return "∞" if self.kind == "inf" else self.name

    def __repr__(self):
        return f"MarkedPoint({self.name})"


ZERO = MarkedPoint("zero")
INFINITY = MarkedPoint("inf")
ONE = MarkedPoint("one")
GENERIC = MarkedPoint("generic")


def Param(label: str) -> MarkedPoint:
    return MarkedPoint("param", label)


# ---------------------------------------------------------------------------
# piecewise affine data


@dataclass(frozen=True)
class AffinePiece:
    """The affine function u -> (<v, u> - mu + 1) / mu."""

    v: tuple
    mu: int

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(int(x) for x in self.v))
        if int(self.mu) != self.mu or self.mu <= 0:
            raise ValueError(f"mu must be a positive integer, got {self.mu}")
        object.__setattr__(self, "mu", int(self.mu))

    @classmethod
    def from_affine(cls, coef: Sequence, const) -> "AffinePiece":
        """Piece representing u -> <coef, u> + const, when such (v, mu) exist."""
        const = Fraction(const)
        coef = la.frac_vec(coef)
        if const == -1:
            raise ValueError("constant term -1 has no (v, mu) representation")
        mu = 1 / (1 + const)
        v = tuple(mu * c for c in coef)
        if mu.denominator != 1 or mu <= 0 or not la.is_integral(v):
            raise ValueError(f"affine form {coef}·u + {const} is not of the form (<v,u>-mu+1)/mu")
        return cls(tuple(int(x) for x in v), int(mu))

    @classmethod
    def zero(cls, dim: int) -> "AffinePiece":
        return cls((0,) * dim, 1)

    @property
    def dim(self) -> int:
        return len(self.v)

    @property
    def coef(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.mu) for x in self.v)

    @property
    def const(self) -> Fraction:
        return Fraction(1 - self.mu, self.mu)

    @property
    def is_constant_zero(self) -> bool:
        return self.mu == 1 and not any(self.v)

    @property
    def is_primitive(self) -> bool:
        g = self.mu
        for x in self.v:
            g = gcd(g, abs(x))
        return g == 1

    def __call__(self, u) -> Fraction:
        return (la.dot(self.v, u) - self.mu + 1) / Fraction(self.mu)

    def __str__(self):
        terms = []
        names = ("x", "y", "z", "w") if self.dim > 1 else ("u",)
        for i, c in enumerate(self.v):
            if c:
                terms.append(f"{c}*{names[i] if i < len(names) else f'u{i}'}")
        lin = " + ".join(terms) if terms else "0"
        return f"({lin} - {self.mu - 1})/{self.mu}" if self.mu != 1 else lin


class PLFunction:
    """Concave piecewise-affine function, the pointwise minimum of its pieces."""

    __slots__ = ("pieces",)

    def __init__(self, pieces: Iterable[AffinePiece]):
        ps = tuple(sorted(set(pieces), key=lambda p: (p.mu, p.v)))
        if not ps:
            raise ValueError("a piecewise affine function needs at least one piece")
        if len({p.dim for p in ps}) != 1:
            raise ValueError("pieces of mixed dimension")
        self.pieces = ps

    @property
    def dim(self) -> int:
        return self.pieces[0].dim

    def __call__(self, u) -> Fraction:
        return min(p(u) for p in self.pieces)

    @property
    def is_zero(self) -> bool:
        return len(self.pieces) == 1 and self.pieces[0].is_constant_zero

    def __eq__(self, other):
        return isinstance(other, PLFunction) and self.pieces == other.pieces

    def __hash__(self):
        return hash(self.pieces)

    def __repr__(self):
        return "min{" + ", ".join(str(p) for p in self.pieces) + "}"


# ---------------------------------------------------------------------------
# divisorial polytopes


@dataclass(frozen=True)
class Cell:
    """A maximal region of the base polytope on which every Phi_y is a single piece."""

    polytope: Polytope
    pieces: tuple  # tuple of (MarkedPoint, AffinePiece)

    def piece(self, y: MarkedPoint) -> AffinePiece:
        return dict(self.pieces)[y]

    def deg(self, u) -> Fraction:
        return sum((p(u) for _, p in self.pieces), Fraction(0))


class DivisorialPolytope:
    """Base polytope `box` together with piecewise-affine concave Phi_y per marked point."""

    def __init__(self, box: Polytope, phi: Mapping[MarkedPoint, PLFunction] | Iterable):
        items = phi.items() if isinstance(phi, Mapping) else phi
        pairs = []
        for y, f in items:
            if not isinstance(y, MarkedPoint):
                y = MarkedPoint.parse(y)
            if y.is_generic:
                raise ValueError("Phi cannot be assigned to the generic point")
            if not isinstance(f, PLFunction):
                f = PLFunction(f)
            if f.dim != box.dim:
                raise ValueError(f"Phi_{y.name} has dimension {f.dim}, box has {box.dim}")
            pairs.append((y, f))
        pairs.sort(key=lambda t: t[0].sort_key)
        if len({y for y, _ in pairs}) != len(pairs):
            raise ValueError("duplicate marked point")
        if sum(1 for y, _ in pairs if y.kind == "param") > 1:
            raise ValueError("at most one parameter point is supported")
        self.box = box
        self.phi = tuple(pairs)

    @property
    def dim(self) -> int:
        return self.box.dim

    @property
    def points(self) -> tuple[MarkedPoint, ...]:
        return tuple(y for y, _ in self.phi)

    def phi_of(self, y: MarkedPoint) -> PLFunction | None:
        for z, f in self.phi:
            if z == y:
                return f
        return None

    @property
    def support(self) -> tuple[MarkedPoint, ...]:
        return tuple(y for y, f in self.phi if not f.is_zero)

    def deg_phi(self, u) -> Fraction:
        u = as_point(u)
        return sum((f(u) for _, f in self.phi), Fraction(0))

    def __eq__(self, other):
        return isinstance(other, DivisorialPolytope) and self.box == other.box and self.phi == other.phi

    def __hash__(self):
        return hash((self.box, self.phi))

    def __repr__(self):
        body = "; ".join(f"Phi_{y.name}={f!r}" for y, f in self.phi)
        return f"DivisorialPolytope(box={self.box!r}; {body})"

    # cached derived data -------------------------------------------------

    @cached_property
    def cells(self) -> tuple[Cell, ...]:
        return tuple(_cells(self.box, self.phi))

    @cached_property
    def validation(self) -> "ValidationReport":
        return _validate(self)


def _region_halfspaces(box: Polytope, choice: Sequence[tuple[PLFunction, AffinePiece]]):
    hs = [(h.normal, h.offset) for h in box.halfspaces]
    for f, p in choice:
        for q in f.pieces:
            if q is p:
                continue
            # p(u) <= q(u)  <=>  <p.coef - q.coef, u> <= q.const - p.const
            hs.append((la.sub(p.coef, q.coef), q.const - p.const))
    return hs


def _cells(box: Polytope, phi) -> list[Cell]:
    multi = [(y, f) for y, f in phi if len(f.pieces) > 1]
    single = [(y, f.pieces[0]) for y, f in phi if len(f.pieces) == 1]
    out = []
    for combo in product(*[f.pieces for _, f in multi]):
        hs = _region_halfspaces(box, [(f, p) for (_, f), p in zip(multi, combo)])
        region = box if not multi else Polytope.from_halfspaces(hs, box.dim)
        if region is None:
            continue
        chosen = dict(single)
        chosen.update({y: p for (y, _), p in zip(multi, combo)})
        pieces = tuple((y, chosen[y]) for y, _ in phi)
        out.append(Cell(region, pieces))
    return out


def single_function_cells(box: Polytope, f: PLFunction) -> list[tuple[Polytope, AffinePiece]]:
    """Linearity regions of one PL function on the box; redundant pieces get no region."""
    if len(f.pieces) == 1:
        return [(box, f.pieces[0])]
    out = []
    for p in f.pieces:
        region = Polytope.from_halfspaces(_region_halfspaces(box, [(f, p)]), box.dim)
        if region is not None:
            out.append((region, p))
    return out


def subdivision_cells(dp: DivisorialPolytope) -> list[Cell]:
    """Common refinement of the linearity subdivisions of all Phi_y."""
    _require_valid(dp)
    return list(dp.cells)


def cell_vertices(dp: DivisorialPolytope) -> list[tuple]:
    return sorted({v for c in dp.cells for v in c.polytope.vertices})


# ---------------------------------------------------------------------------
# validation


CONDITIONS = ("i", "ii", "iii", "iv", "v")


@dataclass(frozen=True)
class ConditionResult:
    condition: str
    passed: bool
    witness: object = None
    message: str = ""


@dataclass(frozen=True)
class ValidationReport:
    results: tuple  # ConditionResult per condition, in order
    origin_interior: bool
    notes: tuple = ()

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, cond: str) -> ConditionResult:
        for r in self.results:
            if r.condition == cond:
                return r
        raise KeyError(cond)

    def failures(self) -> list[ConditionResult]:
        return [r for r in self.results if not r.passed]

    def first_failure(self) -> ConditionResult | None:
        fs = self.failures()
        return fs[0] if fs else None


def _fmt_point(u) -> str:
    return "(" + ", ".join(str(x) for x in u) + ")"


def _validate(dp: DivisorialPolytope) -> ValidationReport:
    box = dp.box
    results = []
    notes = []

    # (i): a minimum of finitely many affine pieces is piecewise affine on the
    # subdivision by linearity regions; pieces minimal only on a lower-dimensional
    # set are harmless and only noted
    results.append(ConditionResult("i", True))
    for y, f in dp.phi:
        regions = {p for _, p in single_function_cells(box, f)}
        for p in f.pieces:
            if p not in regions:
                notes.append(f"piece {p} of Phi_{y.name} is redundant")

    # (ii): graph vertices of every Phi_y are lattice points
    res_ii = ConditionResult("ii", True)
    if not all(la.is_integral(v) for v in box.vertices):
        bad = next(v for v in box.vertices if not la.is_integral(v))
        res_ii = ConditionResult("ii", False, _fmt_point(bad), "box vertex is not a lattice point")
    else:
        for y, f in dp.phi:
            verts = sorted({w for region, _ in single_function_cells(box, f) for w in region.vertices})
            for w in verts:
                val = f(w)
                if not la.is_integral(w) or val.denominator != 1:
                    res_ii = ConditionResult("ii", False, (y.name, _fmt_point(w + (val,))),
                                             f"graph of Phi_{y.name} has non-integral vertex")
                    break
            if not res_ii.passed:
                break
    results.append(res_ii)

    # (iii): deg Phi > -2 on the interior of the box
    res_iii = ConditionResult("iii", True)
    verts = sorted({v for c in dp.cells for v in c.polytope.vertices})
    low = [w for w in verts if dp.deg_phi(w) < -2]
    if low:
        res_iii = ConditionResult("iii", False, _fmt_point(low[0]), "deg Phi < -2")
    elif all(dp.deg_phi(w) == -2 for w in verts):
        c = box.vertex_centroid()
        res_iii = ConditionResult("iii", False, _fmt_point(c), "deg Phi is identically -2")
    results.append(res_iii)

    # (iv): pieces of the form (<v,u> - mu + 1)/mu with (v, mu) primitive
    res_iv = ConditionResult("iv", True)
    for y, f in dp.phi:
        bad = [p for p in f.pieces if not p.is_primitive]
        if bad:
            res_iv = ConditionResult("iv", False, (y.name, str(bad[0])),
                                     f"(v, mu) = ({bad[0].v}, {bad[0].mu}) is not primitive")
            break
    results.append(res_iv)

    # (v): facets where deg Phi is not identically -2 have lattice distance 1
    res_v = ConditionResult("v", True)
    origin = (Fraction(0),) * box.dim
    origin_interior = box.interior_contains(origin)
    if not box.contains(origin):
        res_v = ConditionResult("v", False, _fmt_point(origin), "origin is not in the box")
    else:
        for h in box.halfspaces:
            on_facet = [w for w in verts if h.is_tight(w)]
            if all(dp.deg_phi(w) == -2 for w in on_facet):
                continue
            if h.offset != 1:
                res_v = ConditionResult("v", False, _fmt_point(h.normal),
                                        f"facet with normal {h.normal} has lattice distance {h.offset}")
                break
    if not origin_interior and box.contains(origin):
        notes.append("origin lies on the boundary of the box")
    notes.append("lattice distance measured with primitive integer facet normals")
    results.append(res_v)
    return ValidationReport(tuple(results), origin_interior, tuple(notes))


def validate(dp: DivisorialPolytope) -> ValidationReport:
    return dp.validation


def _require_valid(dp: DivisorialPolytope):
    rep = dp.validation
    if not rep.ok:
        f = rep.first_failure()
        raise InvalidData(f"condition ({f.condition}) fails: {f.message}; witness {f.witness}")


# ---------------------------------------------------------------------------
# invariants


def degree(dp: DivisorialPolytope) -> Fraction:
    """Anticanonical degree (n+1)! * integral over the n-dimensional box of (2 + deg Phi), exactly."""
    _require_valid(dp)
    return _degree(dp)


def _degree(dp: DivisorialPolytope) -> Fraction:
    n = dp.dim
    total = Fraction(0)
    for c in dp.cells:
        for s in c.polytope.triangulation:
            vol = abs(la.det([la.sub(p, s[0]) for p in s[1:]])) / factorial(n)
            bary = tuple(sum(xs) / len(s) for xs in zip(*s))
            total += vol * (2 + c.deg(bary))
    return factorial(n + 1) * total


@dataclass(frozen=True)
class FiberPolytope:
    """Special fiber polytope Delta_y in M_R x R."""

    polytope: Polytope
    source_y: MarkedPoint

    @property
    def dim(self) -> int:
        return self.polytope.dim

    @property
    def vertices(self):
        return self.polytope.vertices

    @property
    def volume(self) -> Fraction:
        return self.polytope.volume


def fiber_bounds(dp: DivisorialPolytope, y: MarkedPoint, u) -> tuple[Fraction, Fraction]:
    """Lower and upper end of the fiber of Delta_y over u."""
    u = as_point(u)
    upper = Fraction(1)
    lower = Fraction(-1)
    for z, f in dp.phi:
        if z == y:
            upper += f(u)
        else:
            lower -= f(u)
    return lower, upper


def special_fiber(dp: DivisorialPolytope, y: MarkedPoint) -> FiberPolytope:
    _require_valid(dp)
    pts = set()
    for w in cell_vertices(dp):
        lo, hi = fiber_bounds(dp, y, w)
        pts.add(w + (lo,))
        pts.add(w + (hi,))
    return FiberPolytope(Polytope(pts), y)


def admissible_points(dp: DivisorialPolytope) -> list[MarkedPoint]:
    """Support points y (and the generic point) leaving at most one other non-integral Phi_z(0)."""
    _require_valid(dp)
    origin = (Fraction(0),) * dp.dim
    support = dp.support
    nonint = {y for y in support if dp.phi_of(y)(origin).denominator != 1}
    out = [y for y in support if len(nonint - {y}) <= 1]
    if len(nonint) <= 1:
        out.append(GENERIC)
    return out
