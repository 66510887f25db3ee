"""Text data format for divisorial polytopes (one YAML document per variety).

Example::

    id: dp/13
    dimension: 1
    box:
      vertices:
      - ["-1"]
      - ["3"]
    phi:
      "0":
      - {v: [-1], mu: 1}
      - {v: [0], mu: 1}
      inf:
      - {coef: ["1/4"], const: "-3/4"}
      "1":
      - {v: [1], mu: 2}
    expected:
      degree: "3"
      kstable: false
    meta:
      source: example

Rationals are integers or strings "p/q". Floating point literals are rejected
in the geometry fields. A piece is either ``{v, mu}`` or the affine form
``{coef, const}`` meaning u -> <coef, u> + const.
"""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

import yaml

from ..errors import ParseError, ValidationError
from ..geometry.divisorial import (
    AffinePiece,
    DivisorialPolytope,
    MarkedPoint,
    PLFunction,
    degree,
    validate,
)
from ..geometry.polytope import Polytope
from .entry import CatalogEntry, Expected

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")
_INT_TAG = "tag:yaml.org,2002:int"
_STR_TAG = "tag:yaml.org,2002:str"
_BOOL_TAG = "tag:yaml.org,2002:bool"
_NULL_TAG = "tag:yaml.org,2002:null"
_FLOAT_TAG = "tag:yaml.org,2002:float"


def _fail(node, message: str):
    mark = node.start_mark if node is not None else None
    if mark is None:
        raise ParseError(message)
    raise ParseError(message, mark.line + 1, mark.column + 1)


def _mapping(node, what: str) -> dict:
    if not isinstance(node, yaml.MappingNode):
        _fail(node, f"{what}: expected a mapping")
    out = {}
    for k, v in node.value:
        if not isinstance(k, yaml.ScalarNode):
            _fail(k, f"{what}: keys must be scalars")
        if k.value in out:
            _fail(k, f"{what}: duplicate key {k.value!r}")
        out[k.value] = (k, v)
    return out


def _sequence(node, what: str) -> list:
    if not isinstance(node, yaml.SequenceNode):
        _fail(node, f"{what}: expected a list")
    return list(node.value)


def _rational(node, what: str) -> Fraction:
    if not isinstance(node, yaml.ScalarNode):
        _fail(node, f"{what}: expected a rational number")
    if node.tag == _FLOAT_TAG:
        _fail(node, f"{what}: floating point literal {node.value!r} not allowed; write p/q")
    text = node.value.strip()
    if node.tag not in (_INT_TAG, _STR_TAG) or not _RATIONAL.match(text):
        _fail(node, f"{what}: {node.value!r} is not an integer or p/q string")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        _fail(node, f"{what}: zero denominator")


def _integer(node, what: str) -> int:
    q = _rational(node, what)
    if q.denominator != 1:
        _fail(node, f"{what}: expected an integer")
    return int(q)


def _vector(node, what: str, dim: int | None) -> tuple:
    items = _sequence(node, what)
    if dim is not None and len(items) != dim:
        _fail(node, f"{what}: expected {dim} coordinates, got {len(items)}")
    return tuple(_rational(x, what) for x in items)


def _scalar(node, what: str):
    if not isinstance(node, yaml.ScalarNode):
        _fail(node, f"{what}: expected a scalar")
    return yaml.safe_load(yaml.serialize(node))


def _piece(node, dim: int, what: str) -> AffinePiece:
    fields = _mapping(node, what)
    keys = set(fields)
    if keys == {"v", "mu"}:
        v = _vector(fields["v"][1], f"{what}.v", dim)
        if any(x.denominator != 1 for x in v):
            _fail(fields["v"][1], f"{what}.v: expected integers")
        mu = _integer(fields["mu"][1], f"{what}.mu")
        if mu <= 0:
            _fail(fields["mu"][1], f"{what}.mu: must be positive")
        return AffinePiece(tuple(int(x) for x in v), mu)
    if keys == {"coef", "const"}:
        coef = _vector(fields["coef"][1], f"{what}.coef", dim)
        const = _rational(fields["const"][1], f"{what}.const")
        try:
            return AffinePiece.from_affine(coef, const)
        except ValueError as exc:
            _fail(node, f"{what}: {exc}")
    _fail(node, f"{what}: a piece needs keys {{v, mu}} or {{coef, const}}, got {sorted(keys)}")


def _expected(node) -> Expected:
    if node is None:
        return Expected()
    fields = _mapping(node, "expected")
    unknown = set(fields) - {"degree", "singularity", "rho", "kstable", "xi_reference", "toric"}
    if unknown:
        _fail(node, f"expected: unknown fields {sorted(unknown)}")

    def get(name):
        return fields[name][1] if name in fields else None

    deg = get("degree")
    xi = get("xi_reference")
    xi_ref = None
    if xi is not None and xi.tag != _NULL_TAG:
        xi_ref = []
        for x in _sequence(xi, "expected.xi_reference"):
            if not isinstance(x, yaml.ScalarNode):
                _fail(x, "expected.xi_reference: expected numbers")
            try:
                float(x.value)
            except ValueError:
                _fail(x, f"expected.xi_reference: {x.value!r} is not a number")
            xi_ref.append(x.value)
        xi_ref = tuple(xi_ref)

    def opt(name, kind):
        n = get(name)
        if n is None:
            return None
        val = _scalar(n, f"expected.{name}")
        if val is not None and not isinstance(val, kind):
            _fail(n, f"expected.{name}: wrong type")
        return val

    rho = opt("rho", int)
    return Expected(
        degree=_rational(deg, "expected.degree") if deg is not None and deg.tag != _NULL_TAG else None,
        singularity=opt("singularity", str),
        rho=rho,
        kstable=opt("kstable", bool),
        xi_reference=xi_ref,
        toric=opt("toric", bool),
    )


def loads(text: str, default_id: str = "user") -> CatalogEntry:
    """Parse and validate one document."""
    try:
        root = yaml.compose(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise ParseError(str(exc.problem), mark.line + 1 if mark else None, mark.column + 1 if mark else None)
    if root is None:
        raise ParseError("empty document")
    top = _mapping(root, "document")
    unknown = set(top) - {"id", "dimension", "box", "phi", "expected", "meta"}
    if unknown:
        _fail(root, f"unknown top-level fields {sorted(unknown)}")
    for required in ("dimension", "box", "phi"):
        if required not in top:
            _fail(root, f"missing field {required!r}")
    dim = _integer(top["dimension"][1], "dimension")
    if dim < 1:
        _fail(top["dimension"][1], "dimension must be positive")
    box_fields = _mapping(top["box"][1], "box")
    if set(box_fields) != {"vertices"}:
        _fail(top["box"][1], "box: expected exactly the field 'vertices'")
    vnode = box_fields["vertices"][1]
    verts = [_vector(v, "box.vertices", dim) for v in _sequence(vnode, "box.vertices")]
    try:
        box = Polytope(verts)
    except Exception as exc:  # degenerate hull
        _fail(vnode, f"box.vertices: {exc}")
    if box.dim != dim:
        _fail(vnode, "box.vertices: polytope is not full-dimensional")
    phi = {}
    for name, (knode, pnode) in _mapping(top["phi"][1], "phi").items():
        try:
            y = MarkedPoint.parse(name)
        except ValueError as exc:
            _fail(knode, f"phi: {exc}")
        if y.is_generic:
            _fail(knode, "phi: the generic point carries no data")
        pieces = [_piece(p, dim, f"phi.{name}") for p in _sequence(pnode, f"phi.{name}")]
        if not pieces:
            _fail(pnode, f"phi.{name}: empty list of pieces")
        if y in phi:
            _fail(knode, f"phi: point {name!r} given twice")
        phi[y] = PLFunction(pieces)
    dp = DivisorialPolytope(box, phi)
    report = validate(dp)
    bad = report.first_failure()
    if bad is not None:
        raise ValidationError(bad.condition, bad.witness, bad.message)
    expected = _expected(top["expected"][1] if "expected" in top else None)
    if expected.degree is not None and expected.degree != degree(dp):
        raise ValidationError(
            "degree", None, f"stated degree {expected.degree} differs from computed {degree(dp)}"
        )
    meta = ()
    if "meta" in top:
        items = []
        for k, (_, vnode) in _mapping(top["meta"][1], "meta").items():
            val = _scalar(vnode, f"meta.{k}")
            items.append((k, "" if val is None else str(val)))
        meta = tuple(sorted(items))
    entry_id = default_id
    if "id" in top:
        entry_id = str(_scalar(top["id"][1], "id"))
    return CatalogEntry(entry_id, dp, expected, meta)


def load_file(path) -> CatalogEntry:
    path = Path(path)
    return loads(path.read_text(encoding="utf-8"), default_id=path.stem)


# -- writing -----------------------------------------------------------------


def _q(x) -> str:
    return str(Fraction(x))


def _flow(items) -> str:
    return "[" + ", ".join(f'"{s}"' for s in items) + "]"


def _yaml_str(s: str) -> str:
    return yaml.safe_dump(s, default_style='"', width=10**6).strip()


def dumps(entry: CatalogEntry) -> str:
    """Deterministic serialization; loads(dumps(e)) reproduces e exactly."""
    dp = entry.dp
    lines = [f"id: {_yaml_str(entry.id)}", f"dimension: {dp.dim}", "box:", "  vertices:"]
    for v in dp.box.vertices:
        lines.append(f"  - {_flow(_q(x) for x in v)}")
    lines.append("phi:")
    for y, f in dp.phi:
        lines.append(f"  {_yaml_str(y.name)}:")
        for p in f.pieces:
            lines.append(f"  - {{v: [{', '.join(str(x) for x in p.v)}], mu: {p.mu}}}")
    ex = entry.expected
    exp_lines = []
    if ex.degree is not None:
        exp_lines.append(f"  degree: {_yaml_str(_q(ex.degree))}")
    if ex.singularity is not None:
        exp_lines.append(f"  singularity: {_yaml_str(ex.singularity)}")
    if ex.rho is not None:
        exp_lines.append(f"  rho: {ex.rho}")
    if ex.kstable is not None:
        exp_lines.append(f"  kstable: {'true' if ex.kstable else 'false'}")
    if ex.xi_reference is not None:
        exp_lines.append(f"  xi_reference: [{', '.join(ex.xi_reference)}]")
    if ex.toric is not None:
        exp_lines.append(f"  toric: {'true' if ex.toric else 'false'}")
    if exp_lines:
        lines.append("expected:")
        lines.extend(exp_lines)
    if entry.meta:
        lines.append("meta:")
        for k, v in entry.meta:
            lines.append(f"  {_yaml_str(k)}: {_yaml_str(v)}")
    return "\n".join(lines) + "\n"


def export(entry: CatalogEntry, path) -> None:
    Path(path).write_text(dumps(entry), encoding="utf-8")
