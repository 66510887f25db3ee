"""Structured, deterministic certification reports and their re-verification.

A report is a JSON document. Every interval is stored twice: as decimal strings
rounded outward, for reading, and as the exact binary endpoints written as
rationals "p/q", for re-checking. Each case embeds its input data, so a report
can be re-verified without the catalog that produced it.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from . import __version__
from .catalog.entry import CatalogEntry
from .catalog.io import dumps as dump_entry
from .catalog.io import loads as load_entry
from .classify import cox_ring
from .geometry.divisorial import MarkedPoint, degree
from .rigor import Interval, IntervalVector, Sign, decimal_bounds, mpf_to_fraction, sign_certified
from .stability import (
    BoxGradient,
    CertifyConfig,
    IVT1D,
    SolitonCandidate,
    Status,
    StabilityVerdict,
    TestConfigurationId,
    ZeroField,
    _axis_value,
    _segment_boxes,
    donaldson_futaki,
    futaki,
    futaki_at_zero,
)

FORMAT = "ksol-report"
FORMAT_VERSION = 1
DIGITS = 12


def _q(x) -> str:
    return str(Fraction(x))


def sign_name(ev) -> str:
    """'positive', 'negative', 'zero' (exact values only) or 'unknown'."""
    if ev.exact is not None and ev.exact == 0:
        return "zero"
    return ev.sign.name.lower()


def interval_doc(x: Interval) -> dict:
    lo, hi = decimal_bounds(x, DIGITS)
    return {"lo": lo, "hi": hi, "lo_exact": _q(x.lower), "hi_exact": _q(x.upper)}


def interval_from_doc(d: dict, prec: int) -> Interval:
    return Interval.from_bounds(Fraction(d["lo_exact"]), Fraction(d["hi_exact"]), prec)


def config_doc(config: CertifyConfig) -> dict:
    return {
        "precision": config.precision,
        "max_bits": config.max_bits,
        "width": _q(config.width),
        "epsilon": _q(config.epsilon),
        "segments": config.segments,
    }


def _decimal(q: Fraction) -> str:
    """Decimal lower bound of q (rounded toward minus infinity)."""
    return decimal_bounds(Interval.from_rational(q, 128), DIGITS)[0]


def candidate_doc(cand: SolitonCandidate) -> dict:
    ev = cand.evidence
    doc: dict[str, Any] = {
        "kind": cand.kind,
        "box": [interval_doc(c) for c in cand.box],
        "midpoint": [f"{m:.6f}" for m in cand.midpoint],
        "symmetry_used": [list(r) for r in cand.symmetry_used.matrix] if cand.symmetry_used else None,
    }
    if isinstance(ev, IVT1D):
        doc["evidence"] = {
            "axis": [_q(a) for a in ev.axis],
            "lower": _q(ev.lower),
            "upper": _q(ev.upper),
            "f_lower": interval_doc(ev.f_lower),
            "f_upper": interval_doc(ev.f_upper),
            "precision": ev.precision,
        }
    elif isinstance(ev, BoxGradient):
        doc["evidence"] = {
            "center": [_q(c) for c in ev.center],
            "epsilon": _q(ev.epsilon),
            "segments": ev.segments,
            "precision": ev.precision,
            "min_lower": _q(ev.min_lower),
            "min_lower_decimal": _decimal(ev.min_lower),
            "faces": [
                {"coordinate": j, "side": side, "min_lower": _q(m),
                 "segment_lower_bounds": [_decimal(x) for x in segs]}
                for ((j, side), m), (_, segs) in zip(ev.side_minima, ev.segment_minima or
                                                     [(w, ()) for w, _ in ev.side_minima])
            ],
        }
    elif isinstance(ev, ZeroField):
        doc["evidence"] = {
            "directions": [list(d) for d in ev.directions],
            "exact_values": [_q(x) for x in ev.exact_values],
            "symmetry_forced": ev.symmetry_forced,
        }
    return doc


def verdict_doc(entry: CatalogEntry, verdict: StabilityVerdict, config: CertifyConfig) -> dict:
    dp = entry.dp
    dfs = []
    for tc, ev in verdict.df_results:
        dfs.append({
            "y": tc.y.name,
            "test_configuration": str(tc),
            "direction": [_q(x) for x in ev.direction],
            "raw": interval_doc(ev.raw),
            "normalized": interval_doc(ev.value),
            "volume": _q(ev.volume),
            "exact": None if ev.exact is None else _q(ev.exact),
            "sign": sign_name(ev),
        })
    return {
        "id": entry.id,
        "data": dump_entry(entry),
        "degree": _q(degree(dp)),
        "cox_ring": str(cox_ring(dp)),
        "status": verdict.status.value,
        "precision_used": verdict.precision_used,
        "admissible": [y.name for y in verdict.admissible],
        "symmetries": [[list(r) for r in s.matrix] for s in verdict.symmetries],
        "candidate": candidate_doc(verdict.candidate) if verdict.candidate else None,
        "donaldson_futaki": dfs,
        "destabilizer": verdict.destabilizer.y.name if verdict.destabilizer else None,
        "notes": list(verdict.notes),
        "expected_match": expected_match(entry, verdict),
        "config": config_doc(config),
    }


def expected_match(entry: CatalogEntry, verdict: StabilityVerdict) -> bool | None:
    """Whether the verdict agrees with the recorded K-stability flag (None if unrecorded)."""
    ks = entry.expected.kstable
    if ks is None:
        return None
    if verdict.status is Status.INDETERMINATE:
        return False
    return (verdict.status is Status.STABLE) == ks


def build_report(cases: list[dict], command: str, config: CertifyConfig) -> dict:
    return {
        "format": FORMAT,
        "version": FORMAT_VERSION,
        "producer": f"ksol {__version__}",
        "command": command,
        "config": config_doc(config),
        "cases": cases,
    }


def dumps(doc: dict) -> str:
    """Byte-stable serialization."""
    return json.dumps(doc, indent=1, ensure_ascii=False) + "\n"


def loads(text: str) -> dict:
    doc = json.loads(text)
    if doc.get("format") != FORMAT:
        raise ValueError("not a ksol report")
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported report version {doc.get('version')}")
    return doc


# -- re-verification ---------------------------------------------------------


def _box_from_doc(cand: dict, prec: int) -> IntervalVector:
    return IntervalVector(interval_from_doc(c, prec) for c in cand["box"])


def _check_candidate(dp, cand: dict, problems: list, stride: int) -> SolitonCandidate | None:
    ev = cand["evidence"]
    kind = cand["kind"]
    if kind == "zero-field":
        basis = [tuple(int(x) for x in d) for d in ev["directions"]]
        values = [futaki_at_zero(dp, e) for e in basis]
        if [_q(v) for v in values] != ev["exact_values"]:
            problems.append("zero-field: exact values differ")
        box = IntervalVector.from_rationals([0] * dp.dim)
        return SolitonCandidate(box, ZeroField(tuple(basis), tuple(values), ev["symmetry_forced"]))
    prec = int(ev["precision"])
    box = _box_from_doc(cand, prec)
    if kind == "ivt-1d":
        axis = tuple(Fraction(a) for a in ev["axis"])
        lo, hi = Fraction(ev["lower"]), Fraction(ev["upper"])
        fa, fb = _axis_value(dp, axis, lo, prec), _axis_value(dp, axis, hi, prec)
        if sign_certified(fa) is not Sign.NEGATIVE or sign_certified(fb) is not Sign.POSITIVE:
            problems.append("ivt-1d: endpoint signs not reproduced")
        for c, a in zip(box, axis):
            if not (c.contains(min(lo * a, hi * a)) and c.contains(max(lo * a, hi * a))):
                problems.append("ivt-1d: box does not cover the bracket")
        return SolitonCandidate(box, IVT1D(axis, lo, hi, fa, fb, prec))
    if kind == "box-gradient":
        center = tuple(Fraction(c) for c in ev["center"])
        eps = Fraction(ev["epsilon"])
        segs = int(ev["segments"])
        n = dp.dim
        for face in ev["faces"]:
            j, side = int(face["coordinate"]), int(face["side"])
            e = tuple(int(i == j) for i in range(n))
            for k, (idx, bounds) in enumerate(_segment_boxes(center, eps, segs, j, side)):
                if k % stride:
                    continue
                val = futaki(dp, IntervalVector.from_bounds(bounds, prec), e).raw
                lower = val.lower if side > 0 else -val.upper
                if lower <= 0:
                    problems.append(f"box-gradient: face ({j},{side}) segment {idx} not outward")
                    break
        return SolitonCandidate(box, BoxGradient(center, eps, segs, Fraction(ev["min_lower"]), (), prec))
    problems.append(f"unknown candidate kind {kind!r}")
    return None


def reverify_case(case: dict, stride: int = 1) -> list[str]:
    """Recompute the evidence of one case; returns a list of problems (empty if it checks out).

    ``stride`` > 1 re-checks only every stride-th boundary segment of a box candidate.
    """
    problems: list[str] = []
    entry = load_entry(case["data"])
    dp = entry.dp
    if _q(degree(dp)) != case["degree"]:
        problems.append("degree differs")
    status = Status(case["status"])
    if case["candidate"] is None:
        if status is not Status.INDETERMINATE:
            problems.append("verdict without a candidate")
        return problems
    cand = _check_candidate(dp, case["candidate"], problems, stride)
    if cand is None:
        return problems
    signs = {}
    for d in case["donaldson_futaki"]:
        y = MarkedPoint.parse(d["y"])
        prec = max(cand.box.prec, int(case["precision_used"]))
        ev = donaldson_futaki(dp, TestConfigurationId(y, (0,) * dp.dim, 1), cand, prec)
        recorded = interval_from_doc(d["raw"], prec)
        if not ev.raw.overlaps(recorded):
            problems.append(f"DF at y={d['y']} does not reproduce")
        if sign_name(ev) != d["sign"]:
            problems.append(f"DF sign at y={d['y']} differs")
        signs[d["y"]] = ev
    if status is Status.STABLE and not cand.is_zero:
        if any(ev.sign is not Sign.POSITIVE for ev in signs.values()):
            problems.append("Stable verdict with a non-positive DF")
    if status is Status.UNSTABLE:
        dest = case["destabilizer"]
        if dest not in signs or signs[dest].sign is not Sign.NEGATIVE:
            problems.append("destabilizer DF is not certified negative")
    if status is Status.KAHLER_EINSTEIN_CANDIDATE:
        if not cand.is_zero or all(ev.exact > 0 for ev in signs.values()):
            problems.append("KE candidate verdict not supported by exact DF values")
    return problems


def reverify(doc: dict, stride: int = 1) -> dict[str, list[str]]:
    """Problems per case id; every list empty means the report checks out."""
    return {case["id"]: reverify_case(case, stride) for case in doc["cases"]}
