"""Futaki characters, soliton candidates and Donaldson-Futaki sign certification."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import mpmath.libmp as _mp

from .errors import (
    BoundaryFailure,
    CapReached,
    InadmissibleY,
    InvalidData,
    NoSignChange,
    PrecisionExhausted,
    TooLarge,
)
from .expint import integrate_exp, integrate_linear_exp
from .geometry import linalg as la
from .geometry.divisorial import (
    GENERIC,
    DivisorialPolytope,
    FiberPolytope,
    MarkedPoint,
    _require_valid,
    admissible_points,
    special_fiber,
)
from .geometry.polytope import Polytope
from .geometry.symmetry import Symmetry, fixed_subspace, symmetries
from .rigor import (
    DEFAULT_BITS,
    DEFAULT_MAX_BITS,
    Interval,
    IntervalVector,
    Precision,
    Sign,
    iexp,
    isum,
    mpf_to_fraction,
    refine_precision,
    sign_certified,
)

SEARCH_WINDOW = 64
DEFAULT_WIDTH = Fraction(1, 10**5)
DEFAULT_EPSILON = Fraction(1, 10**5)
DEFAULT_SEGMENTS = 3000  # per edge of the box, i.e. segments of length epsilon/1500


class Normalization(enum.Enum):
    RAW = "raw"
    VOLUME_NORMALIZED = "volume-normalized"


@dataclass(frozen=True)
class FutakiEvaluation:
    """Futaki integral over a fiber polytope; `raw` is the unnormalised integral."""

    raw: Interval
    volume: Fraction
    xi: IntervalVector
    direction: tuple
    exact: Fraction | None = None  # exact raw value, available when xi = 0

    @property
    def value(self) -> Interval:
        """Volume-normalised value (1/vol) * raw."""
        return self.raw / Interval.from_rational(self.volume, self.raw.prec)

    def get(self, normalization: Normalization = Normalization.VOLUME_NORMALIZED) -> Interval:
        return self.raw if normalization is Normalization.RAW else self.value

    @property
    def sign(self) -> Sign:
        if self.exact is not None:
            return Sign.POSITIVE if self.exact > 0 else Sign.NEGATIVE if self.exact < 0 else Sign.UNKNOWN
        return sign_certified(self.raw)


# ---------------------------------------------------------------------------
# evidence and candidates


@dataclass(frozen=True)
class IVT1D:
    axis: tuple
    lower: Fraction
    upper: Fraction
    f_lower: Interval
    f_upper: Interval
    precision: int

    @property
    def f_lower_sign(self) -> Sign:
        return sign_certified(self.f_lower)

    @property
    def f_upper_sign(self) -> Sign:
        return sign_certified(self.f_upper)


@dataclass(frozen=True)
class BoxGradient:
    center: tuple
    epsilon: Fraction
    segments: int
    min_lower: Fraction
    side_minima: tuple  # ((coordinate, side), min lower bound) per face
    precision: int
    segment_minima: tuple = ()  # ((coordinate, side), lower bound per segment) per face


@dataclass(frozen=True)
class ZeroField:
    directions: tuple
    exact_values: tuple  # exact F_{X,0}(e) per direction (all zero)
    symmetry_forced: bool


@dataclass(frozen=True)
class SolitonCandidate:
    box: IntervalVector
    evidence: object
    symmetry_used: Symmetry | None = None

    @property
    def is_zero(self) -> bool:
        return isinstance(self.evidence, ZeroField)

    @property
    def midpoint(self) -> tuple[float, ...]:
        return tuple(c.mid_float() for c in self.box)

    @property
    def kind(self) -> str:
        return {IVT1D: "ivt-1d", BoxGradient: "box-gradient", ZeroField: "zero-field"}[type(self.evidence)]


@dataclass(frozen=True)
class TestConfigurationId:
    y: MarkedPoint
    v: tuple = ()
    m: int = 1

    def __str__(self):
        vs = ",".join(str(x) for x in self.v) if any(self.v) else "0"
        return f"X_({self.y},{vs},{self.m})"


class Status(enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    KAHLER_EINSTEIN_CANDIDATE = "KahlerEinsteinCandidate"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class StabilityVerdict:
    status: Status
    candidate: SolitonCandidate | None
    df_results: tuple  # ((TestConfigurationId, FutakiEvaluation), ...)
    destabilizer: TestConfigurationId | None
    precision_used: int
    admissible: tuple = ()
    symmetries: tuple = ()
    notes: tuple = ()

    def df(self, y: MarkedPoint) -> FutakiEvaluation:
        for tc, ev in self.df_results:
            if tc.y == y:
                return ev
        raise KeyError(y)


@dataclass(frozen=True)
class CertifyConfig:
    precision: int = DEFAULT_BITS
    max_bits: int = DEFAULT_MAX_BITS
    width: Fraction = DEFAULT_WIDTH
    epsilon: Fraction = DEFAULT_EPSILON
    segments: int = DEFAULT_SEGMENTS
    jobs: int = 1
    center: tuple | None = None

    def __post_init__(self):
        Precision(self.precision)
        if self.precision > self.max_bits:
            raise ValueError("starting precision exceeds the cap")
        if self.width <= 0 or self.epsilon <= 0 or self.segments <= 0:
            raise ValueError("width, epsilon and segments must be positive")


# ---------------------------------------------------------------------------
# Futaki characters


def _fiber_cache(dp: DivisorialPolytope) -> dict:
    return dp.__dict__.setdefault("_fibers", {})


def fiber(dp: DivisorialPolytope, y: MarkedPoint) -> FiberPolytope:
    """Cached special fiber Delta_y."""
    cache = _fiber_cache(dp)
    if y not in cache:
        cache[y] = special_fiber(dp, y)
    return cache[y]


def reference_point(dp: DivisorialPolytope) -> MarkedPoint:
    sup = dp.support
    return sup[0] if sup else GENERIC


def _as_polytope(delta) -> Polytope:
    return delta.polytope if isinstance(delta, FiberPolytope) else delta


def exact_linear_integral(p: Polytope, v: Sequence) -> Fraction:
    """int_P <v, u> du in rational arithmetic."""
    total = Fraction(0)
    for s in p.triangulation:
        vol = abs(la.det([la.sub(q, s[0]) for q in s[1:]])) / math.factorial(len(s) - 1)
        bary = tuple(sum(c) / len(s) for c in zip(*s))
        total += vol * la.dot(v, bary)
    return total


def futaki_character(delta, xi_prime: IntervalVector, v_prime: Sequence) -> FutakiEvaluation:
    """Futaki integral of the toric fiber: raw int <u',v'> e^<u',xi'> and its volume normalisation."""
    p = _as_polytope(delta)
    v_prime = la.frac_vec(v_prime)
    raw = integrate_linear_exp(p, xi_prime, v_prime)
    return FutakiEvaluation(raw, p.volume, xi_prime, v_prime)


def _lift(xi: IntervalVector) -> IntervalVector:
    prec = xi.prec
    return IntervalVector(list(xi) + [Interval.from_rational(0, prec)])


def futaki(dp: DivisorialPolytope, xi: IntervalVector, v: Sequence, y: MarkedPoint | None = None) -> FutakiEvaluation:
    """F_{X,xi}(v), evaluated on the special fiber of `y` (default: first support point)."""
    _require_valid(dp)
    if len(xi) != dp.dim or len(v) != dp.dim:
        raise ValueError("dimension mismatch")
    delta = fiber(dp, y if y is not None else reference_point(dp))
    return futaki_character(delta, _lift(xi), tuple(v) + (0,))


def futaki_at_zero(dp: DivisorialPolytope, v: Sequence, y: MarkedPoint | None = None) -> Fraction:
    """Exact raw F_{X,0}(v)."""
    delta = fiber(dp, y if y is not None else reference_point(dp))
    return exact_linear_integral(delta.polytope, tuple(la.frac_vec(v)) + (Fraction(0),))


# ---------------------------------------------------------------------------
# one-dimensional candidates


def _axis_value(dp, axis, s: Fraction, prec: int) -> Interval:
    xi = IntervalVector.from_rationals([s * a for a in axis], prec)
    return futaki(dp, xi, axis).raw


def _decimal_fraction(x: float, digits: int = 14) -> Fraction:
    return Fraction(f"{x:.{digits}f}")


def _float_root(dp, axis, hint: float | None) -> float:
    from scipy.optimize import brentq

    def f(s: float) -> float:
        return _axis_value(dp, axis, _decimal_fraction(s), DEFAULT_BITS).mid_float()

    s0 = 0.0 if hint is None else float(hint)
    f0 = f(s0)
    if f0 == 0.0:
        return s0
    direction = -1.0 if f0 > 0 else 1.0  # F along the axis is increasing
    step = 0.25
    a, fa = s0, f0
    while True:
        b = s0 + direction * step
        if abs(b) > SEARCH_WINDOW:
            b = math.copysign(SEARCH_WINDOW, b)
        fb = f(b)
        if (fa < 0) != (fb < 0) or fb == 0.0:
            break
        if abs(b) >= SEARCH_WINDOW:
            raise NoSignChange(f"no sign change of the Futaki character in [-{SEARCH_WINDOW}, {SEARCH_WINDOW}]")
        a, fa = b, fb
        step *= 2
    lo, hi = (a, b) if a < b else (b, a)
    return brentq(f, lo, hi, xtol=1e-15, rtol=4 * 2.0**-52)


def _certified_sign(value_fn, s: Fraction, prec: int, cap: int):
    """Sign of value_fn(s) with precision escalation; returns (sign, interval, precision)."""
    while True:
        val = value_fn(s, prec)
        sg = sign_certified(val)
        if sg is not Sign.UNKNOWN:
            return sg, val, prec
        try:
            prec = int(refine_precision(Precision(prec), cap).bits)
        except CapReached:
            raise PrecisionExhausted(f"sign at {float(s)} undecided at the {cap}-bit cap")


def candidate_1d(
    dp: DivisorialPolytope,
    axis: Sequence,
    hint: float | None = None,
    width: Fraction = DEFAULT_WIDTH,
    precision: int = DEFAULT_BITS,
    max_bits: int = DEFAULT_MAX_BITS,
) -> SolitonCandidate:
    """Certified interval s in [a, b] with F_{X, s*axis}(axis) changing sign from - to +."""
    _require_valid(dp)
    axis = la.frac_vec(axis)
    width = Fraction(width)
    root = _float_root(dp, axis, hint)

    def value(s, prec):
        return _axis_value(dp, axis, s, prec)

    r = _decimal_fraction(root)
    h = width / 4
    a, b = r - h, r + h
    prec = precision
    while True:
        sa, fa, prec = _certified_sign(value, a, prec, max_bits)
        if sa is Sign.NEGATIVE:
            break
        a -= 4 * (b - a)
        if a < -SEARCH_WINDOW:
            raise NoSignChange("lower bracket end left the search window")
    while True:
        sb, fb, prec = _certified_sign(value, b, prec, max_bits)
        if sb is Sign.POSITIVE:
            break
        b += 4 * (b - a)
        if b > SEARCH_WINDOW:
            raise NoSignChange("upper bracket end left the search window")
    while b - a > width:
        m = (a + b) / 2
        sm, fm, prec = _certified_sign(value, m, prec, max_bits)
        if sm is Sign.NEGATIVE:
            a, fa = m, fm
        else:
            b, fb = m, fm
    # re-evaluate both ends at the final precision so the evidence is uniform
    fa, fb = value(a, prec), value(b, prec)
    box = IntervalVector(
        Interval.from_bounds(min(a * c, b * c), max(a * c, b * c), prec) for c in axis
    )
    return SolitonCandidate(box, IVT1D(axis, a, b, fa, fb, prec))


# ---------------------------------------------------------------------------
# boxes


def find_center(dp: DivisorialPolytope, start: Sequence[float] | None = None) -> tuple[float, ...]:
    """Non-certified zero of grad G, G(v) = int_box deg(Phi-bar)(u) e^<u,v> du."""
    from scipy.optimize import root

    n = dp.dim
    basis = [tuple(int(i == j) for j in range(n)) for i in range(n)]

    def grad(x):
        xi = IntervalVector.from_rationals([_decimal_fraction(t, 16) for t in x], DEFAULT_BITS)
        return [futaki(dp, xi, e).raw.mid_float() for e in basis]

    def hess(x, h=1e-6):
        cols = []
        for j in range(n):
            xp = list(x)
            xm = list(x)
            xp[j] += h
            xm[j] -= h
            gp, gm = grad(xp), grad(xm)
            cols.append([(p - q) / (2 * h) for p, q in zip(gp, gm)])
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    x0 = list(start) if start is not None else [0.0] * n
    sol = root(grad, x0, jac=hess, method="hybr", options={"xtol": 1e-14})
    return tuple(float(t) for t in sol.x)


def _segment_boxes(center, eps, segments, j, side):
    n = len(center)
    others = [k for k in range(n) if k != j]
    fixed = center[j] + side * eps
    if not others:
        yield (0,), [(fixed, fixed)]
        return
    step = 2 * eps / segments
    import itertools

    for idx in itertools.product(range(segments), repeat=len(others)):
        bounds = [None] * n
        bounds[j] = (fixed, fixed)
        for k, i in zip(others, idx):
            lo = center[k] - eps + i * step
            bounds[k] = (lo, lo + step)
        yield idx, bounds


def _face_minimum(args):
    dp, center, eps, segments, j, side, prec = args
    n = len(center)
    e = tuple(int(i == j) for i in range(n))
    lowers = []
    for idx, bounds in _segment_boxes(center, eps, segments, j, side):
        xi = IntervalVector.from_bounds(bounds, prec)
        val = futaki(dp, xi, e).raw
        lower = val.lo if side > 0 else _mp.mpf_neg(val.hi)
        if not _mp.mpf_gt(lower, _mp.fzero):
            return ("fail", (j, side, idx), mpf_to_fraction(lower))
        lowers.append(mpf_to_fraction(lower))
    return ("ok", (j, side), tuple(lowers))


def candidate_box(
    dp: DivisorialPolytope,
    center: Sequence,
    epsilon=DEFAULT_EPSILON,
    segments: int = DEFAULT_SEGMENTS,
    precision: int = DEFAULT_BITS,
    jobs: int = 1,
) -> SolitonCandidate:
    """Certify that grad G points outward on the whole boundary of D = prod [c_i - eps, c_i + eps].

    G is strictly convex, so an outward gradient on the boundary of D forces its
    unique critical point, the soliton candidate, into D.
    """
    _require_valid(dp)
    c = tuple(x if isinstance(x, Fraction) else _decimal_fraction(float(x), 12) for x in center)
    eps = Fraction(str(epsilon)) if isinstance(epsilon, float) else Fraction(epsilon)
    tasks = [(dp, c, eps, segments, j, side, precision) for j in range(dp.dim) for side in (-1, 1)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_face_minimum, tasks))
    else:
        results = [_face_minimum(t) for t in tasks]
    minima, per_segment = [], []
    for status, where, value in results:
        if status == "fail":
            raise BoundaryFailure(where, value)
        minima.append((where, min(value)))
        per_segment.append((where, value))
    box = IntervalVector.from_bounds([(x - eps, x + eps) for x in c], precision)
    evidence = BoxGradient(c, eps, segments, min(v for _, v in minima), tuple(minima), precision,
                           tuple(per_segment))
    return SolitonCandidate(box, evidence)


# ---------------------------------------------------------------------------
# Donaldson-Futaki invariants


def donaldson_futaki(
    dp: DivisorialPolytope,
    tc: TestConfigurationId,
    candidate: SolitonCandidate,
    precision: int | None = None,
) -> FutakiEvaluation:
    """F_{Delta_y,(xi,0)}((-m v, m)) with xi ranging over the candidate box.

    The raw integral carries the sign; `value` gives the volume-normalised number.
    """
    _require_valid(dp)
    if tc.y not in admissible_points(dp):
        raise InadmissibleY(f"{tc.y} is not admissible")
    n = dp.dim
    v = tuple(tc.v) if tc.v else (0,) * n
    v_prime = tuple(-tc.m * x for x in v) + (tc.m,)
    delta = fiber(dp, tc.y)
    prec = precision or candidate.box.prec
    if candidate.is_zero:
        exact = exact_linear_integral(delta.polytope, v_prime)
        raw = Interval.from_rational(exact, prec)
        xi0 = IntervalVector.from_rationals([0] * (n + 1), prec)
        return FutakiEvaluation(raw, delta.volume, xi0, la.frac_vec(v_prime), exact)
    xi = candidate.box.with_precision(prec)
    return futaki_character(delta, _lift(xi), v_prime)


# ---------------------------------------------------------------------------
# the pipeline


def _zero_field(dp: DivisorialPolytope, syms) -> SolitonCandidate | None:
    n = dp.dim
    fixed = fixed_subspace(syms)
    basis = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    exact = tuple(futaki_at_zero(dp, e) for e in basis)
    if not fixed:
        forced = next(s for s in syms if not s.is_identity)
        ev = ZeroField(tuple(basis), exact, True)
        return SolitonCandidate(IntervalVector.from_rationals([0] * n), ev, forced)
    if all(x == 0 for x in exact):
        return SolitonCandidate(IntervalVector.from_rationals([0] * n), ZeroField(tuple(basis), exact, False))
    return None


def find_candidate(dp: DivisorialPolytope, config: CertifyConfig = CertifyConfig(), syms=None) -> SolitonCandidate:
    syms = syms if syms is not None else symmetries(dp)
    zero = _zero_field(dp, syms)
    if zero is not None:
        return zero
    fixed = fixed_subspace(syms)
    nontrivial = next((s for s in syms if not s.is_identity), None)
    if len(fixed) == 1:
        cand = candidate_1d(dp, fixed[0], width=config.width, precision=config.precision,
                            max_bits=config.max_bits)
        return replace(cand, symmetry_used=nontrivial)
    center = config.center if config.center is not None else find_center(dp)
    prec = config.precision
    while True:
        try:
            return candidate_box(dp, center, config.epsilon, config.segments, prec, config.jobs)
        except BoundaryFailure:
            try:
                prec = int(refine_precision(Precision(prec), config.max_bits).bits)
            except CapReached:
                raise PrecisionExhausted("boundary gradient not certified at the precision cap")


def _refine_candidate(dp, cand: SolitonCandidate, config: CertifyConfig, prec: int) -> SolitonCandidate:
    ev = cand.evidence
    if isinstance(ev, IVT1D):
        narrower = max(config.width / 16, Fraction(1, 10**30))
        new = candidate_1d(dp, ev.axis, hint=cand.box[0].mid_float() if len(ev.axis) == 1 else None,
                           width=narrower, precision=prec, max_bits=config.max_bits)
        return replace(new, symmetry_used=cand.symmetry_used)
    if isinstance(ev, BoxGradient):
        return candidate_box(dp, ev.center, ev.epsilon, ev.segments, prec, config.jobs)
    return cand


def certify(dp: DivisorialPolytope, config: CertifyConfig = CertifyConfig()) -> StabilityVerdict:
    """Decide equivariant K-stability with respect to the soliton candidate."""
    rep = dp.validation
    if not rep.ok:
        f = rep.first_failure()
        raise InvalidData(f"condition ({f.condition}) fails: {f.message}; witness {f.witness}")
    syms = symmetries(dp)
    adm = tuple(admissible_points(dp))
    prec = config.precision
    notes = []
    try:
        cand = find_candidate(dp, config, syms)
    except (PrecisionExhausted, NoSignChange, BoundaryFailure) as exc:
        return StabilityVerdict(Status.INDETERMINATE, None, (), None, config.max_bits, adm, tuple(syms),
                                (f"candidate not certified: {exc}",))
    prec = max(prec, cand.box.prec)
    if not adm:
        notes.append("no admissible special test configuration")
        return StabilityVerdict(Status.STABLE, cand, (), None, prec, adm, tuple(syms), tuple(notes))
    tcs = [TestConfigurationId(y, (0,) * dp.dim, 1) for y in adm]
    while True:
        results = tuple((tc, donaldson_futaki(dp, tc, cand, prec)) for tc in tcs)
        signs = [ev.sign for _, ev in results]
        if cand.is_zero:
            bad = [(tc, ev) for tc, ev in results if ev.exact <= 0]
            if bad:
                tc = min(bad, key=lambda t: t[1].exact / t[1].volume)[0]
                return StabilityVerdict(Status.KAHLER_EINSTEIN_CANDIDATE, cand, results, tc, prec, adm,
                                        tuple(syms), tuple(notes))
            return StabilityVerdict(Status.STABLE, cand, results, None, prec, adm, tuple(syms), tuple(notes))
        if all(s is Sign.POSITIVE for s in signs):
            return StabilityVerdict(Status.STABLE, cand, results, None, prec, adm, tuple(syms), tuple(notes))
        negative = [(tc, ev) for (tc, ev), s in zip(results, signs) if s is Sign.NEGATIVE]
        if negative:
            tc = min(negative, key=lambda t: t[1].value.mid_float())[0]
            return StabilityVerdict(Status.UNSTABLE, cand, results, tc, prec, adm, tuple(syms), tuple(notes))
        try:
            prec = int(refine_precision(Precision(prec), config.max_bits).bits)
            cand = _refine_candidate(dp, cand, config, prec)
        except (CapReached, PrecisionExhausted, NoSignChange, BoundaryFailure):
            notes.append("Donaldson-Futaki sign undecided at the precision cap")
            return StabilityVerdict(Status.INDETERMINATE, cand, results, None, prec, adm, tuple(syms),
                                    tuple(notes))


# ---------------------------------------------------------------------------
# discrete Futaki oracle


def _a_range(halfspaces, u, k):
    lo, hi = None, None
    for normal, off in halfspaces:
        alpha, beta = normal[:-1], normal[-1]
        rest = k * off - la.dot(alpha, u)
        if beta == 0:
            if rest < 0:
                return None
        elif beta > 0:
            bound = math.floor(rest / beta)
            hi = bound if hi is None else min(hi, bound)
        else:
            bound = math.ceil(rest / beta)
            lo = bound if lo is None else max(lo, bound)
    if lo is None or hi is None or lo > hi:
        return None
    return lo, hi


def lattice_points_count(delta, k: int) -> int:
    p = _as_polytope(delta)
    return sum(hi - lo + 1 for _, lo, hi in _columns(p, k))


def _columns(p: Polytope, k: int):
    import itertools

    n = p.dim - 1
    hs = [(h.normal, h.offset) for h in p.halfspaces]
    ranges = []
    for j in range(n):
        lo = math.ceil(k * min(v[j] for v in p.vertices))
        hi = math.floor(k * max(v[j] for v in p.vertices))
        ranges.append(range(lo, hi + 1))
    for u in itertools.product(*ranges):
        r = _a_range(hs, u, k)
        if r is not None:
            yield u, r[0], r[1]


def discrete_futaki(delta, xi_prime: IntervalVector, v_prime: Sequence, k: int, budget: int = 10**8) -> Interval:
    """-w_k(v')/(k l_k): the lattice-point Futaki invariant of k*Delta with weights e^<u,xi'>/k.

    Its limit as k grows is minus the volume-normalised Futaki character.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    p = _as_polytope(delta)
    estimate = p.volume * k ** p.dim
    if estimate > budget:
        raise TooLarge(f"about {float(estimate):.3g} lattice points exceed the budget {budget}")
    v_prime = la.frac_vec(v_prime)
    prec = xi_prime.prec
    kk = Interval.from_rational(k, prec)
    last = xi_prime[-1]
    flat = last.lo == _mp.fzero and last.hi == _mp.fzero
    count = 0
    terms = []
    for u, lo, hi in _columns(p, k):
        n_a = hi - lo + 1
        count += n_a
        if flat:
            weight = n_a * la.dot(v_prime[:-1], u) + v_prime[-1] * Fraction(n_a * (lo + hi), 2)
            if weight == 0:
                continue
            e = iexp(IntervalVector(xi_prime[:-1]).dot(u) / kk)
            terms.append(e * Interval.from_rational(weight, prec))
        else:
            for a in range(lo, hi + 1):
                pt = tuple(u) + (a,)
                w = la.dot(v_prime, pt)
                if w:
                    terms.append(iexp(xi_prime.dot(pt) / kk) * Interval.from_rational(w, prec))
    if count > budget:
        raise TooLarge(f"{count} lattice points exceed the budget {budget}")
    w_k = isum(terms, prec)
    return -(w_k / Interval.from_rational(k * count, prec))
