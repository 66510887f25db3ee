"""Outward-rounded interval arithmetic at configurable binary precision.

Endpoints are raw mpmath ``mpf`` tuples and every operation passes its rounding
mode explicitly to the ``mpmath.libmp`` primitives, so no rounding state is
shared between threads or processes.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Sequence, Union

from mpmath import libmp as _mp

from .errors import CapReached

MIN_BITS = 11
DEFAULT_BITS = 53
DEFAULT_MAX_BITS = 4096

_F = "f"  # toward -inf
_C = "c"  # toward +inf

_ZERO = _mp.fzero
_INF = _mp.finf
_NINF = _mp.fninf
_NAN = _mp.fnan

# exponents beyond this are treated as overflow for exp()
_EXP_ARG_LIMIT = _mp.from_int(1 << 40)

Number = Union[int, Fraction, float]


@dataclass(frozen=True)
class Precision:
    bits: int = DEFAULT_BITS

    def __post_init__(self):
        if not isinstance(self.bits, int) or self.bits < MIN_BITS:
            raise ValueError(f"precision must be an integer >= {MIN_BITS} bits, got {self.bits!r}")

    def __int__(self):
        return self.bits


def max_bits_from_env(default: int = DEFAULT_MAX_BITS) -> int:
    raw = os.environ.get("KSOL_MAX_BITS")
    if not raw:
        return default
    bits = int(raw)
    if bits < MIN_BITS:
        raise ValueError(f"KSOL_MAX_BITS must be >= {MIN_BITS}")
    return bits


def refine_precision(p: Precision, cap: int = DEFAULT_MAX_BITS) -> Precision:
    """Double the bit count, capped at ``cap``; raise CapReached when already there."""
    if p.bits >= cap:
        raise CapReached(f"precision already at cap ({cap} bits)")
    return Precision(min(2 * p.bits, cap))


class Sign(enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    UNKNOWN = "Unknown"


def _bits(p) -> int:
    if isinstance(p, Precision):
        return p.bits
    return int(p)


def _rational_bound(q: Fraction, prec: int, rnd: str):
    return _mp.from_rational(q.numerator, q.denominator, prec, rnd)


def mpf_to_fraction(x) -> Fraction:
    if x in (_INF, _NINF, _NAN):
        raise ValueError("non-finite endpoint has no rational value")
    p, q = _mp.to_rational(x)
    return Fraction(int(p), int(q))


def _is_finite(x) -> bool:
    return x not in (_INF, _NINF, _NAN)


def _fix_nan(x, fallback):
    return fallback if x == _NAN else x


class Interval:
    """Closed interval [lo, hi] with mpf endpoints, carrying its working precision."""

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo, hi, prec: int = DEFAULT_BITS):
        if _mp.mpf_gt(lo, hi):
            raise ValueError("interval lower bound exceeds upper bound")
        self.lo = lo
        self.hi = hi
        self.prec = prec

    # -- construction -------------------------------------------------------

    @classmethod
    def from_rational(cls, q, p=DEFAULT_BITS) -> "Interval":
        prec = _bits(p)
        q = Fraction(q)
        lo = _rational_bound(q, prec, _F)
        hi = _rational_bound(q, prec, _C)
        return cls(lo, hi, prec)

    @classmethod
    def from_bounds(cls, a, b, p=DEFAULT_BITS) -> "Interval":
        """Smallest representable interval containing the rationals a <= b."""
        prec = _bits(p)
        a, b = Fraction(a), Fraction(b)
        if a > b:
            raise ValueError("lower bound exceeds upper bound")
        return cls(_rational_bound(a, prec, _F), _rational_bound(b, prec, _C), prec)

    @classmethod
    def entire(cls, p=DEFAULT_BITS) -> "Interval":
        return cls(_NINF, _INF, _bits(p))

    def _coerce(self, other) -> "Interval":
        if isinstance(other, Interval):
            return other
        if isinstance(other, float):
            other = Fraction(other)
        return Interval.from_rational(other, self.prec)

    # -- queries -------------------------------------------------------------

    @property
    def lower(self) -> Fraction:
        return mpf_to_fraction(self.lo)

    @property
    def upper(self) -> Fraction:
        return mpf_to_fraction(self.hi)

    def is_finite(self) -> bool:
        return _is_finite(self.lo) and _is_finite(self.hi)

    def width(self) -> Fraction:
        return self.upper - self.lower

    def width_float(self) -> float:
        if not self.is_finite():
            return float("inf")
        return float(_mp.to_float(_mp.mpf_sub(self.hi, self.lo, 64, _C)))

    def radius_upper(self):
        """Upper bound for the half-width, as an mpf."""
        return _mp.mpf_shift(_mp.mpf_sub(self.hi, self.lo, self.prec, _C), -1)

    def mid(self):
        """Midpoint as an mpf (not an enclosure)."""
        if not self.is_finite():
            raise ValueError("midpoint of unbounded interval")
        return _mp.mpf_shift(_mp.mpf_add(self.lo, self.hi, self.prec + 2, "n"), -1)

    def mid_fraction(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def mid_float(self) -> float:
        return _mp.to_float(self.mid())

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return _mp.mpf_le(self.lo, x.lo) and _mp.mpf_ge(self.hi, x.hi)
        if isinstance(x, float):
            x = Fraction(x)
        q = Fraction(x)
        lo_ok = self.lo == _NINF or mpf_to_fraction(self.lo) <= q
        hi_ok = self.hi == _INF or mpf_to_fraction(self.hi) >= q
        return lo_ok and hi_ok

    def contains_mpf(self, x) -> bool:
        return _mp.mpf_le(self.lo, x) and _mp.mpf_ge(self.hi, x)

    def overlaps(self, other: "Interval") -> bool:
        return _mp.mpf_le(self.lo, other.hi) and _mp.mpf_le(other.lo, self.hi)

    def contains_zero(self) -> bool:
        return _mp.mpf_le(self.lo, _ZERO) and _mp.mpf_ge(self.hi, _ZERO)

    def hull(self, other: "Interval") -> "Interval":
        lo = self.lo if _mp.mpf_le(self.lo, other.lo) else other.lo
        hi = self.hi if _mp.mpf_ge(self.hi, other.hi) else other.hi
        return Interval(lo, hi, max(self.prec, other.prec))

    def intersect(self, other: "Interval") -> "Interval":
        lo = self.lo if _mp.mpf_ge(self.lo, other.lo) else other.lo
        hi = self.hi if _mp.mpf_le(self.hi, other.hi) else other.hi
        if _mp.mpf_gt(lo, hi):
            raise ValueError("disjoint intervals")
        return Interval(lo, hi, max(self.prec, other.prec))

    def with_precision(self, p) -> "Interval":
        prec = _bits(p)
        return Interval(_mp.mpf_pos(self.lo, prec, _F), _mp.mpf_pos(self.hi, prec, _C), prec)

    # -- arithmetic ----------------------------------------------------------

    def __neg__(self):
        return Interval(_mp.mpf_neg(self.hi), _mp.mpf_neg(self.lo), self.prec)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = self._coerce(other)
        p = max(self.prec, o.prec)
        return Interval(
            _fix_nan(_mp.mpf_add(self.lo, o.lo, p, _F), _NINF),
            _fix_nan(_mp.mpf_add(self.hi, o.hi, p, _C), _INF),
            p,
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        p = max(self.prec, o.prec)
        return Interval(
            _fix_nan(_mp.mpf_sub(self.lo, o.hi, p, _F), _NINF),
            _fix_nan(_mp.mpf_sub(self.hi, o.lo, p, _C), _INF),
            p,
        )

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        p = max(self.prec, o.prec)
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        mul = _mp.mpf_mul
        if a[0] == 0 or a == _ZERO:  # self >= 0
            if c[0] == 0 or c == _ZERO:
                lo, hi = mul(a, c, p, _F), mul(b, d, p, _C)
            elif d[0] == 1 or d == _ZERO:  # other <= 0
                lo, hi = mul(b, c, p, _F), mul(a, d, p, _C)
            else:
                lo, hi = mul(b, c, p, _F), mul(b, d, p, _C)
        elif b[0] == 1 or b == _ZERO:  # self <= 0
            if c[0] == 0 or c == _ZERO:
                lo, hi = mul(a, d, p, _F), mul(b, c, p, _C)
            elif d[0] == 1 or d == _ZERO:
                lo, hi = mul(b, d, p, _F), mul(a, c, p, _C)
            else:
                lo, hi = mul(a, d, p, _F), mul(a, c, p, _C)
        else:  # self straddles zero
            if c[0] == 0 or c == _ZERO:
                lo, hi = mul(a, d, p, _F), mul(b, d, p, _C)
            elif d[0] == 1 or d == _ZERO:
                lo, hi = mul(b, c, p, _F), mul(a, c, p, _C)
            else:
                lo = _min_mpf([mul(a, d, p, _F), mul(b, c, p, _F)])
                hi = _max_mpf([mul(a, c, p, _C), mul(b, d, p, _C)])
        return Interval(_fix_nan(lo, _ZERO), _fix_nan(hi, _ZERO), p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.contains_zero():
            raise ZeroDivisionError("interval divisor contains zero")
        p = max(self.prec, o.prec)
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        los = []
        his = []
        for x in (a, b):
            for y in (c, d):
                los.append(_fix_nan(_mp.mpf_div(x, y, p, _F), _ZERO))
                his.append(_fix_nan(_mp.mpf_div(x, y, p, _C), _ZERO))
        lo = _min_mpf(los)
        hi = _max_mpf(his)
        return Interval(lo, hi, p)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def sqr(self) -> "Interval":
        p = self.prec
        if _mp.mpf_ge(self.lo, _ZERO):
            return Interval(_mp.mpf_mul(self.lo, self.lo, p, _F), _mp.mpf_mul(self.hi, self.hi, p, _C), p)
        if _mp.mpf_le(self.hi, _ZERO):
            return Interval(_mp.mpf_mul(self.hi, self.hi, p, _F), _mp.mpf_mul(self.lo, self.lo, p, _C), p)
        m = _max_mpf([_mp.mpf_neg(self.lo), self.hi])
        return Interval(_ZERO, _mp.mpf_mul(m, m, p, _C), p)

    def abs_upper(self):
        """Upper bound of |x| on the interval (mpf)."""
        return _max_mpf([_mp.mpf_abs(self.lo), _mp.mpf_abs(self.hi)])

    def scale_pow2(self, k: int) -> "Interval":
        return Interval(_mp.mpf_shift(self.lo, k), _mp.mpf_shift(self.hi, k), self.prec)

    # -- comparisons are deliberately absent: use sign_certified -------------

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        return f"Interval({self.str(12)})"

    def str(self, digits: int = 10) -> str:
        lo, hi = decimal_bounds(self, digits)
        return f"[{lo}, {hi}]"


def _min_mpf(xs):
    m = xs[0]
    for v in xs[1:]:
        if _mp.mpf_lt(v, m):
            m = v
    return m


def _max_mpf(xs):
    m = xs[0]
    for v in xs[1:]:
        if _mp.mpf_gt(v, m):
            m = v
    return m


def interval_from_rational(q, p=DEFAULT_BITS) -> Interval:
    return Interval.from_rational(q, p)


def iexp(x: Interval) -> Interval:
    """Enclosure of exp over x; both endpoints pushed one extra ulp outward."""
    p = x.prec
    if x.lo == _ZERO and x.hi == _ZERO:
        return Interval(_mp.fone, _mp.fone, p)
    if x.lo == _NINF:
        lo = _ZERO
    else:
        lo = _mp.mpf_exp(x.lo, p, _F)
        if lo != _ZERO:
            lo = _mp.mpf_perturb(lo, 1, p, _F)
    if x.hi == _INF or _mp.mpf_gt(x.hi, _EXP_ARG_LIMIT):
        hi = _INF
    else:
        hi = _mp.mpf_perturb(_mp.mpf_exp(x.hi, p, _C), 0, p, _C)
    if _mp.mpf_lt(lo, _ZERO):
        lo = _ZERO
    return Interval(lo, hi, p)


def sign_certified(x: Interval) -> Sign:
    if _mp.mpf_gt(x.lo, _ZERO):
        return Sign.POSITIVE
    if _mp.mpf_lt(x.hi, _ZERO):
        return Sign.NEGATIVE
    return Sign.UNKNOWN


def isum(xs: Iterable[Interval], p=DEFAULT_BITS) -> Interval:
    total = None
    for x in xs:
        total = x if total is None else total + x
    if total is None:
        return Interval(_ZERO, _ZERO, _bits(p))
    return total


def decimal_bounds(x: Interval, digits: int = 10) -> tuple[str, str]:
    """Decimal strings for the endpoints, rounded outward to ``digits`` significant digits."""
    return _decimal(x.lo, digits, ROUND_FLOOR), _decimal(x.hi, digits, ROUND_CEILING)


def _decimal(v, digits: int, rounding) -> str:
    if v == _INF:
        return "inf"
    if v == _NINF:
        return "-inf"
    q = mpf_to_fraction(v)
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = rounding
        d = Decimal(q.numerator) / Decimal(q.denominator)
    return format(d, "f") if abs(d.adjusted()) < 12 else str(d)


class IntervalVector(tuple):
    """Immutable vector of intervals."""

    def __new__(cls, components: Iterable[Interval]):
        return super().__new__(cls, tuple(components))

    @classmethod
    def from_rationals(cls, qs: Sequence, p=DEFAULT_BITS) -> "IntervalVector":
        return cls(Interval.from_rational(q, p) for q in qs)

    @classmethod
    def from_bounds(cls, bounds: Sequence[tuple], p=DEFAULT_BITS) -> "IntervalVector":
        return cls(Interval.from_bounds(a, b, p) for a, b in bounds)

    @property
    def dim(self) -> int:
        return len(self)

    @property
    def prec(self) -> int:
        return max((c.prec for c in self), default=DEFAULT_BITS)

    def dot(self, q: Sequence) -> Interval:
        """Enclosure of sum q_i * x_i for a rational vector q."""
        if len(q) != len(self):
            raise ValueError("dimension mismatch")
        p = self.prec
        total = Interval(_ZERO, _ZERO, p)
        for qi, xi in zip(q, self):
            qi = Fraction(qi)
            if qi == 0:
                continue
            if qi.denominator == 1 and abs(qi.numerator) == 1:
                total = total + (xi if qi > 0 else -xi)
            else:
                total = total + xi * Interval.from_rational(qi, p)
        return total

    def mid(self) -> "IntervalVector":
        return IntervalVector(Interval.from_rational(c.mid_fraction(), c.prec) for c in self)

    def mid_fractions(self) -> tuple[Fraction, ...]:
        return tuple(c.mid_fraction() for c in self)

    def radius_fractions(self) -> tuple[Fraction, ...]:
        return tuple(c.width() / 2 for c in self)

    def max_width(self) -> float:
        return max((c.width_float() for c in self), default=0.0)

    def with_precision(self, p) -> "IntervalVector":
        return IntervalVector(c.with_precision(p) for c in self)

    def overlaps(self, other: "IntervalVector") -> bool:
        return all(a.overlaps(b) for a, b in zip(self, other))

    def contains(self, point: Sequence) -> bool:
        return all(c.contains(x) for c, x in zip(self, point))

    def __repr__(self):
        return "IntervalVector(" + ", ".join(c.str(10) for c in self) + ")"
