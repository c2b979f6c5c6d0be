"""Canonical JSON for norms, specs, groups and reports.

Documents are written with sorted keys and every float printed with 17
significant digits, so equal objects give identical bytes and doubles
round-trip exactly.  Inputs are validated against JSON schemas before
being turned into objects; violations raise :class:`SchemaError` with
the location of the offending value.
"""
import json
import math

import jsonschema
import numpy as np

from .errors import ArgumentError, RenormError, SchemaError

# ---------------------------------------------------------------- writing


def _to_plain(obj):
    if isinstance(obj, dict):
        return {str(k): _to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _to_plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return _to_plain(obj.to_dict())
    raise ArgumentError(f"cannot serialise object of type {type(obj).__name__}")


def _emit(obj, out, indent, level):
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," if indent else ", "
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, k in enumerate(sorted(obj)):
            out.append(("," if i else "") + pad + json.dumps(k) + ": ")
            _emit(obj[k], out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        if indent and all(not isinstance(v, (dict, list)) for v in obj):
            # flat numeric rows stay on one line
            out.append("[")
            for i, v in enumerate(obj):
                out.append(sep if i else "")
                _emit(v, out, 0, 0)
            out.append("]")
            return
        out.append("[")
        for i, v in enumerate(obj):
            out.append(("," if i else "") + pad)
            _emit(v, out, indent, level + 1)
        out.append(end + "]")
    elif isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if not math.isfinite(obj):
            out.append(json.dumps("inf" if obj > 0 else "-inf") if math.isinf(obj) else '"nan"')
        else:
            out.append(format(obj, ".17g"))
    else:
        out.append(json.dumps(obj))


def dumps(obj, indent=1):
    """Canonical JSON text (sorted keys, 17 significant digits, trailing newline)."""
    out = []
    _emit(_to_plain(obj), out, indent, 0)
    return "".join(out) + "\n"


def dump(obj, path, indent=1):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj, indent))


def loads(text):
    """Parse JSON text; syntax errors become :class:`SchemaError`."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise SchemaError(f"cannot read file: {exc.strerror}", str(path)) from exc


# ---------------------------------------------------------------- schemas

_NUM = {"type": "number"}
_VEC = {"type": "array", "items": _NUM, "minItems": 1}
_MAT = {"type": "array", "items": _VEC, "minItems": 1}
_NORM_REF = {"$ref": "#/$defs/norm"}

_KIND_FIELDS = {
    "euclidean": {"gram": _MAT},
    "weighted-lp": {"p": {"anyOf": [_NUM, {"const": "inf"}]}, "weights": _VEC},
    "day": {"base": _NUM},
    "max-seminorms": {"mats": {"type": "array", "items": _MAT, "minItems": 1}},
    "g-average": {"base": _NORM_REF, "group": {"type": "array", "items": _MAT, "minItems": 1}},
    "sum-squares": {"parts": {"type": "array", "items": _NORM_REF, "minItems": 1}},
    "l2-sum": {"parts": {"type": "array", "items": _NORM_REF, "minItems": 1}},
    "scaled-sum": {"parts": {"type": "array", "items": _NORM_REF, "minItems": 1},
                   "coefs": _VEC},
    "pimple-hull": {"spec": {"$ref": "#/$defs/pimple_spec"}},
    "extension-w": {"inner": _NORM_REF, "p": _NORM_REF, "x0": _VEC,
                    "rotations": {"type": "integer", "minimum": 4},
                    "normalization": {"type": "object"}},
}
_OPTIONAL = {"day": {"base"}, "extension-w": {"rotations", "normalization"}}

_NORM_SCHEMA = {
    "type": "object",
    "required": ["kind", "dim"],
    "properties": {"kind": {"enum": sorted(_KIND_FIELDS)},
                   "dim": {"type": "integer", "minimum": 1}},
    "allOf": [
        {"if": {"properties": {"kind": {"const": k}}},
         "then": {"properties": f, "required": sorted(set(f) - _OPTIONAL.get(k, set()))}}
        for k, f in _KIND_FIELDS.items()
    ],
}

_GROUP_SCHEMA = {
    "type": "object",
    "required": ["elements"],
    "properties": {"elements": {"type": "array", "items": _MAT, "minItems": 1}},
}

_PIMPLE_SCHEMA = {
    "type": "object",
    "required": ["base", "group", "points", "lambdas"],
    "properties": {
        "base": _NORM_REF,
        "group": {"$ref": "#/$defs/group"},
        "points": _MAT,
        "lambdas": _VEC,
        "widths": {"anyOf": [_VEC, {"type": "null"}]},
        "deltas": {"anyOf": [_VEC, {"type": "null"}]},
        "epsilons": {"anyOf": [_VEC, {"type": "null"}]},
        "notes": {"type": "object"},
    },
}

_DEFS = {"norm": _NORM_SCHEMA, "group": _GROUP_SCHEMA, "pimple_spec": _PIMPLE_SCHEMA}

SCHEMAS = {
    "norm": {"$ref": "#/$defs/norm", "$defs": _DEFS},
    "pimple_spec": {"$ref": "#/$defs/pimple_spec", "$defs": _DEFS},
    "matrix_group": {"$ref": "#/$defs/group", "$defs": _DEFS},
    "group_table": {
        "type": "object", "required": ["table"],
        "properties": {"table": {"type": "array", "minItems": 1,
                                 "items": {"type": "array", "items": {"type": "integer"}}},
                       "name": {"type": "string"}},
    },
    "point_family": {
        "type": "object",
        "required": ["alpha", "x0", "type2", "type1", "spanning"],
        "properties": {"alpha": _NUM, "x0": _VEC, "spanning": {"type": "boolean"},
                       "type2": {"type": "array", "items": {
                           "type": "object", "required": ["x", "g_index", "g", "beta", "a"]}},
                       "type1": {"type": "array", "items": {
                           "type": "object", "required": ["x", "y", "a", "distance"]}}},
    },
    "c2_spec": {
        "type": "object", "required": ["lambdas"],
        "properties": {"lambdas": {"type": "array", "minItems": 1,
                                   "items": {"type": "array", "items": _NUM,
                                             "minItems": 2, "maxItems": 2}}},
    },
    "extension_spec": {
        "type": "object", "required": ["inner", "p", "x0"],
        "properties": {"inner": _NORM_REF, "p": _NORM_REF, "x0": _VEC,
                       "rotations": {"type": "integer", "minimum": 4},
                       "normalization": {"type": "object"}},
        "$defs": _DEFS,
    },
}


def _location(path):
    return "/" + "/".join(str(p) for p in path)


def validate(doc, schema_name):
    """Check ``doc`` against a named schema; raise :class:`SchemaError` on failure."""
    validator = jsonschema.Draft202012Validator(SCHEMAS[schema_name])
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), e.message))
    if errors:
        # the deepest error usually names the real culprit
        err = max(errors, key=lambda e: len(e.absolute_path))
        raise SchemaError(err.message, _location(err.absolute_path))
    return doc


def _build(fn, doc, location=""):
    """Run a constructor, mapping semantic failures to SchemaError."""
    try:
        return fn(doc)
    except SchemaError:
        raise
    except (RenormError, ValueError, KeyError, TypeError) as exc:
        raise SchemaError(str(exc), location) from exc


# ---------------------------------------------------------------- norms

def norm_to_dict(norm):
    return norm.to_dict()


def _norm(d, loc):
    from . import norms as N

    kind = d["kind"]
    if kind == "euclidean":
        out = N.Euclidean(np.array(d["gram"], dtype=float))
    elif kind == "weighted-lp":
        p = np.inf if d["p"] == "inf" else float(d["p"])
        out = N.WeightedLp(p, np.array(d["weights"], dtype=float))
    elif kind == "day":
        out = N.Day(d["dim"], d.get("base", N.DEFAULT.day_base))
    elif kind == "max-seminorms":
        out = N.MaxSeminorms(tuple(np.array(m, dtype=float) for m in d["mats"]))
    elif kind == "g-average":
        from .matrix_groups import FiniteMatrixGroup
        out = N.GAverage(_norm(d["base"], loc + "/base"), FiniteMatrixGroup.from_elements(d["group"]))
    elif kind in ("sum-squares", "l2-sum"):
        cls = N.SumSquares if kind == "sum-squares" else N.L2Sum
        out = cls(tuple(_norm(p, f"{loc}/parts/{i}") for i, p in enumerate(d["parts"])))
    elif kind == "scaled-sum":
        out = N.ScaledSum(tuple(_norm(p, f"{loc}/parts/{i}") for i, p in enumerate(d["parts"])),
                          tuple(d["coefs"]))
    elif kind == "pimple-hull":
        from .pimple import pimple_norm
        out = pimple_norm(_pimple_spec(d["spec"], loc + "/spec"))
    elif kind == "extension-w":
        from .jarosz import ExtensionWSpec, extension_norm_w
        out = extension_norm_w(ExtensionWSpec(
            _norm(d["inner"], loc + "/inner"), _norm(d["p"], loc + "/p"),
            np.array(d["x0"], dtype=float), int(d.get("rotations", 720)),
            dict(d.get("normalization", {}))))
    else:  # pragma: no cover - excluded by the schema
        raise SchemaError(f"unknown norm kind {kind!r}", loc + "/kind")
    if out.dim != d["dim"]:
        raise SchemaError(f"declared dim {d['dim']} but the data define dim {out.dim}", loc + "/dim")
    return out


def norm_from_dict(d):
    """Build a norm object from its JSON descriptor."""
    validate(d, "norm")
    return _build(lambda x: _norm(x, ""), d)


# ---------------------------------------------------------------- pimple specs

def pimple_spec_to_dict(spec):
    opt = lambda a: None if a is None else np.asarray(a).tolist()
    return {
        "base": spec.base.to_dict(),
        "group": {"elements": np.asarray(spec.group.elements).tolist()},
        "points": np.asarray(spec.points).tolist(),
        "lambdas": np.asarray(spec.lambdas).tolist(),
        "widths": opt(spec.widths),
        "deltas": opt(spec.deltas),
        "epsilons": opt(spec.epsilons),
        "notes": _to_plain(spec.notes),
    }


def _pimple_spec(d, loc):
    from .matrix_groups import FiniteMatrixGroup
    from .pimple import PimpleSpec

    base = _norm(d["base"], loc + "/base")
    group = _build(lambda g: FiniteMatrixGroup.from_elements(g["elements"]), d["group"], loc + "/group")
    opt = lambda k: None if d.get(k) is None else np.array(d[k], dtype=float)
    return _build(lambda x: PimpleSpec(base, group, np.array(x["points"], dtype=float),
                                       np.array(x["lambdas"], dtype=float), opt("widths"),
                                       opt("deltas"), opt("epsilons"), dict(x.get("notes", {}))),
                  d, loc)


def pimple_spec_from_dict(d):
    validate(d, "pimple_spec")
    return _build(lambda x: _pimple_spec(x, ""), d)


# ---------------------------------------------------------------- other documents

def matrix_group_from_dict(d):
    from .matrix_groups import FiniteMatrixGroup
    validate(d, "matrix_group")
    return _build(lambda x: FiniteMatrixGroup.from_elements(x["elements"]), d)


def group_table_from_dict(d):
    from .group_rep import GroupTable
    validate(d, "group_table")
    return _build(GroupTable.from_dict, d)


def point_family_from_dict(d):
    from .orbit import PointFamily
    validate(d, "point_family")
    return _build(PointFamily.from_dict, d)


def c2_spec_from_dict(d):
    from .jarosz import C2NormSpec
    validate(d, "c2_spec")
    return _build(C2NormSpec.from_dict, d)


def extension_spec_from_dict(d):
    from .jarosz import ExtensionWSpec
    validate(d, "extension_spec")
    return _build(lambda x: ExtensionWSpec(
        _norm(x["inner"], "/inner"), _norm(x["p"], "/p"), np.array(x["x0"], dtype=float),
        int(x.get("rotations", 720)), dict(x.get("normalization", {}))), d)
