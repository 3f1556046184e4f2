"""JSON file formats for fields, points, polytopes, level sets and cycles."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .polyalg import AFFINE, MODES, RationalPoint, VectorField, parse_poly
from .polytope import LatticePolytope
from .witness import Cycle, hypersurface_component, point_component


class FormatError(ValueError):
    """A file or argument does not have the expected structure."""


def _load(source) -> object:
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith(("{", "[")):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise FormatError(f"cannot read {source}: {exc}") from exc
    else:
        text = source
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc


def rational(value) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise FormatError(f"expected an integer or a rational string, got {value!r}")
    try:
        return Fraction(value)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"not a rational number: {value!r}") from exc


def parse_point(text: str) -> RationalPoint:
    """``"1/2,0,3"`` or a JSON array of rationals."""
    text = text.strip()
    if text.startswith("["):
        data = _load(text)
        if not isinstance(data, list):
            raise FormatError("point must be a JSON array")
        return RationalPoint(rational(x) for x in data)
    return RationalPoint(rational(x.strip()) for x in text.split(","))


def load_field(source) -> VectorField:
    data = _load(source)
    if not isinstance(data, dict) or "components" not in data:
        raise FormatError('vector field file must be an object with "n", "mode" and "components"')
    n = data.get("n")
    mode = data.get("mode", AFFINE)
    comps = data["components"]
    if not isinstance(n, int) or n < 1 or mode not in MODES:
        raise FormatError("vector field file has an invalid n or mode")
    if not isinstance(comps, list) or len(comps) != n or not all(isinstance(c, str) for c in comps):
        raise FormatError(f"vector field needs exactly {n} component strings")
    return VectorField([parse_poly(c, n, mode) for c in comps], mode)


def dump_field(v: VectorField) -> dict:
    return {"n": v.n, "mode": v.mode, "components": [str(q) for q in v.components]}


def load_points(source) -> list[RationalPoint]:
    data = _load(source)
    if not isinstance(data, list) or not all(isinstance(p, list) for p in data):
        raise FormatError("point file must be a JSON array of arrays")
    return [RationalPoint(rational(x) for x in p) for p in data]


def load_polytope(source) -> LatticePolytope:
    data = _load(source)
    if not isinstance(data, dict) or not isinstance(data.get("n"), int) or "points" not in data:
        raise FormatError('polytope file must be an object with "n" and "points"')
    n = data["n"]
    pts = data["points"]
    if not isinstance(pts, list) or not pts:
        raise FormatError("polytope needs a nonempty point list")
    for p in pts:
        if not isinstance(p, list) or len(p) != n or not all(isinstance(x, int) and not isinstance(x, bool) for x in p):
            raise FormatError(f"polytope points must be integer arrays of length {n}")
    return LatticePolytope(pts, n)


def dump_polytope(p: LatticePolytope) -> dict:
    return {"n": p.n, "points": [list(v) for v in p.vertices]}


def load_levels(source) -> tuple[int, int, dict[int, list[RationalPoint]]]:
    data = _load(source)
    try:
        n = data["n"]
        D = data["D"]
        levels = {int(lv["i"]): [RationalPoint(rational(x) for x in p) for p in lv["points"]] for lv in data["levels"]}
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed level-set file: {exc}") from exc
    if not isinstance(n, int) or not isinstance(D, int):
        raise FormatError("level-set file needs integer n and D")
    return n, D, levels


def load_cycle(source, n: int) -> Cycle:
    data = _load(source)
    if not isinstance(data, list):
        raise FormatError("cycle file must be a JSON array")
    comps = []
    for item in data:
        try:
            kind, payload, coeff = item["type"], item["data"], item["coeff"]
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed cycle component: {item!r}") from exc
        if not isinstance(coeff, int):
            raise FormatError("cycle coefficients must be integers")
        if kind == "point":
            comps.append(point_component([rational(x) for x in payload], coeff))
        elif kind == "hypersurface":
            comps.append(hypersurface_component(parse_poly(payload, n), coeff))
        else:
            raise FormatError(f"unsupported cycle component type {kind!r}")
    return Cycle(tuple(comps))
