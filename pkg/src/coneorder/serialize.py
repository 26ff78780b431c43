"""JSON file formats and canonical report serialization.

Rationals travel as strings "p/q" (or "p" for integers) and are parsed
exactly; floats are rejected wherever exactness matters.  Canonical dumps
sort keys and use compact separators so identical inputs and seeds produce
byte-identical reports.
"""
from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .cones import PolyhedralCone, cone_from_facets, cone_from_generators
from .errors import ParseError
from .iso import (
    AffineIso,
    AffineMap,
    ComposeIso,
    DiagonalIso,
    IsoSpec,
    LinearIso,
    MonotoneBijection,
    OddPowerMap,
    PiecewiseLinearMap,
    ProductLiftIso,
    compose_isos,
    make_affine_iso,
    make_diagonal_iso,
    make_linear_iso,
    make_product_lift,
)
from .order import InfSupExpr, inf_expr, leaf, sup_expr
from .psd import SymMatrix


def parse_rational(x) -> Fraction:
    if isinstance(x, bool):
        raise ParseError(f"expected a rational, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational {x!r}") from exc
    if isinstance(x, float):
        raise ParseError(f"floats are not exact; write {x!r} as a 'p/q' string")
    raise ParseError(f"expected a rational, got {type(x).__name__}")


def fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_vec(obj) -> tuple[Fraction, ...]:
    if not isinstance(obj, list):
        raise ParseError("vector must be a JSON list")
    return tuple(parse_rational(x) for x in obj)


def vec_to_json(v) -> list[str]:
    return [fmt_rational(c) for c in v]


def _reject_unknown(obj: dict, allowed: set[str], what: str):
    unknown = set(obj) - allowed
    if unknown:
        raise ParseError(f"unknown fields in {what}: {sorted(unknown)}")


def parse_cone(obj) -> PolyhedralCone:
    """Cone file: {"dim": d, "generators": [...]} or {"dim": d, "facets": [...]}."""
    if not isinstance(obj, dict):
        raise ParseError("cone must be a JSON object")
    _reject_unknown(obj, {"dim", "generators", "facets"}, "cone")
    dim = obj.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError("cone needs a positive integer 'dim'")
    has_g, has_f = "generators" in obj, "facets" in obj
    if has_g == has_f:
        raise ParseError("cone needs exactly one of 'generators' or 'facets'")
    vecs = obj["generators"] if has_g else obj["facets"]
    if not isinstance(vecs, list):
        raise ParseError("'generators'/'facets' must be a list of vectors")
    parsed = [parse_vec(v) for v in vecs]
    if has_g:
        return cone_from_generators(obj["dim"], parsed)
    return cone_from_facets(obj["dim"], parsed)


def cone_to_json(cone: PolyhedralCone) -> dict:
    return {"dim": cone.dim, "generators": [vec_to_json(g) for g in cone.generators]}


def cone_report(cone: PolyhedralCone) -> dict:
    return {
        "dim": cone.dim,
        "generators": [vec_to_json(g) for g in cone.generators],
        "facets": [vec_to_json(f) for f in cone.facets],
        "pointed": cone.pointed,
        "generating": cone.generating,
    }


def parse_expr(obj) -> InfSupExpr:
    """Expression file: nested {"sup": [...]}, {"inf": [...]}, {"leaf": [...]}."""
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ParseError("expression node must be a single-key object")
    key, val = next(iter(obj.items()))
    if key == "leaf":
        return leaf(parse_vec(val))
    if key in ("sup", "inf"):
        if not isinstance(val, list) or not val:
            raise ParseError(f"'{key}' needs a nonempty list of children")
        children = [parse_expr(c) for c in val]
        return sup_expr(*children) if key == "sup" else inf_expr(*children)
    raise ParseError(f"unknown expression node {key!r}")


def expr_to_json(e: InfSupExpr) -> dict:
    if e.kind == "leaf":
        return {"leaf": vec_to_json(e.vec)}
    return {e.kind: [expr_to_json(c) for c in e.children]}


def parse_bijection(obj) -> MonotoneBijection:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ParseError("bijection must be a single-key object")
    key, val = next(iter(obj.items()))
    if key == "affine":
        _reject_unknown(val, {"slope", "intercept"}, "affine bijection")
        return AffineMap(parse_rational(val["slope"]),
                         parse_rational(val.get("intercept", 0)))
    if key == "piecewise":
        _reject_unknown(val, {"breakpoints"}, "piecewise bijection")
        bps = [(parse_rational(a), parse_rational(b)) for a, b in val["breakpoints"]]
        return PiecewiseLinearMap(tuple(bps))
    if key == "odd_power":
        if not isinstance(val, int):
            raise ParseError("odd_power takes an integer exponent")
        return OddPowerMap(val)
    raise ParseError(f"unknown bijection kind {key!r}")


def bijection_to_json(m: MonotoneBijection) -> dict:
    if isinstance(m, AffineMap):
        return {"affine": {"slope": fmt_rational(m.slope),
                           "intercept": fmt_rational(m.intercept)}}
    if isinstance(m, PiecewiseLinearMap):
        return {"piecewise": {"breakpoints": [[fmt_rational(a), fmt_rational(b)]
                                              for a, b in m.breakpoints]}}
    if isinstance(m, OddPowerMap):
        return {"odd_power": m.exponent}
    raise TypeError(f"unknown bijection {type(m).__name__}")


def parse_iso(obj) -> IsoSpec:
    """Iso spec file mirroring the kind tree; validated on construction."""
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ParseError("iso spec must be a single-key object")
    key, val = next(iter(obj.items()))
    if key == "linear":
        _reject_unknown(val, {"matrix", "source", "target"}, "linear iso")
        matrix = [parse_vec(r) for r in val["matrix"]]
        return make_linear_iso(matrix, parse_cone(val["source"]), parse_cone(val["target"]))
    if key == "affine":
        _reject_unknown(val, {"linear", "source_base", "target_base"}, "affine iso")
        return make_affine_iso(parse_iso(val["linear"]),
                               parse_vec(val["source_base"]),
                               parse_vec(val["target_base"]))
    if key == "diagonal":
        _reject_unknown(val, {"source", "target_frame", "maps"}, "diagonal iso")
        return make_diagonal_iso(parse_cone(val["source"]),
                                 [parse_vec(w) for w in val["target_frame"]],
                                 [parse_bijection(m) for m in val["maps"]])
    if key == "product_lift":
        _reject_unknown(val, {"cone", "ray_index", "ray_map", "sub"}, "product lift")
        return make_product_lift(parse_cone(val["cone"]), val["ray_index"],
                                 parse_bijection(val["ray_map"]), parse_iso(val["sub"]))
    if key == "compose":
        if not isinstance(val, list) or not val:
            raise ParseError("compose needs a nonempty list of specs")
        return compose_isos(*[parse_iso(p) for p in val])
    raise ParseError(f"unknown iso kind {key!r}")


def iso_to_json(spec: IsoSpec) -> dict:
    if isinstance(spec, LinearIso):
        return {"linear": {"matrix": [vec_to_json(r) for r in spec.matrix],
                           "source": cone_to_json(spec.source_cone),
                           "target": cone_to_json(spec.target_cone)}}
    if isinstance(spec, AffineIso):
        return {"affine": {"linear": iso_to_json(spec.inner),
                           "source_base": vec_to_json(spec.source_base),
                           "target_base": vec_to_json(spec.target_base)}}
    if isinstance(spec, DiagonalIso):
        return {"diagonal": {"source": cone_to_json(spec.source_cone),
                             "target_frame": [vec_to_json(w) for w in spec.target_frame],
                             "maps": [bijection_to_json(m) for m in spec.maps]}}
    if isinstance(spec, ProductLiftIso):
        return {"product_lift": {"cone": cone_to_json(spec.source_cone),
                                 "ray_index": spec.ray_index,
                                 "ray_map": bijection_to_json(spec.ray_map),
                                 "sub": iso_to_json(spec.sub)}}
    if isinstance(spec, ComposeIso):
        return {"compose": [iso_to_json(p) for p in spec.parts]}
    raise TypeError(f"unknown iso spec {type(spec).__name__}")


def parse_points(obj) -> list[tuple[Fraction, ...]]:
    if not isinstance(obj, dict):
        raise ParseError("points file must be a JSON object")
    _reject_unknown(obj, {"points"}, "points file")
    if "points" not in obj or not isinstance(obj["points"], list):
        raise ParseError("points file needs a 'points' list")
    return [parse_vec(p) for p in obj["points"]]


def parse_matrix(obj) -> SymMatrix:
    """Matrix file: {"n": n, "rows": [[...float...]]}."""
    if not isinstance(obj, dict):
        raise ParseError("matrix must be a JSON object")
    _reject_unknown(obj, {"n", "rows"}, "matrix")
    if "n" not in obj or "rows" not in obj:
        raise ParseError("matrix needs 'n' and 'rows'")
    rows = obj["rows"]
    if not isinstance(rows, list) or len(rows) != obj["n"]:
        raise ParseError("'rows' must be an n x n array")
    try:
        return SymMatrix(np.asarray(rows, dtype=float))
    except ValueError as exc:
        raise ParseError(f"bad matrix rows: {exc}") from exc


def matrix_to_json(m: SymMatrix) -> dict:
    return {"n": m.n, "rows": [[float(x) for x in row] for row in m.array]}


def canonical_dumps(obj) -> str:
    """Deterministic JSON: sorted keys, compact separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
