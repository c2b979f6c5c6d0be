"""Command-line front door.

Every invocation is turned into a :class:`RunManifest` (command, input
files, parameters, seed, config overrides, output directory) and handed
to :func:`run_command`.  A manifest saved as JSON can be replayed with
``renorm run manifest.json``; identical manifests give identical report
bytes.

Exit status: 0 on success, 2 for malformed input (with its location),
3 when a solver or construction step fails.
"""
import argparse
from dataclasses import asdict, dataclass, field, fields
import logging
import os
import sys

import numpy as np

from . import serialize as S
from .config import DEFAULT, Config
from .errors import (ArgumentError, ConstructionError, GroupError, OracleError, RenormError,
                     ScheduleError, SchemaError, SeparationError, SolverError, SpecError)

log = logging.getLogger("renorm")

INPUT_ERRORS = (SchemaError, ArgumentError, SpecError, GroupError, SeparationError)
SOLVER_ERRORS = (SolverError, ScheduleError, ConstructionError, OracleError)


@dataclass
class RunManifest:
    """Everything that determines a run.

    Attributes
    ----------
    command : list of str
        Subcommand path such as ``["pimple", "eval"]``.
    inputs : dict
        Named input file paths.
    params : dict
        Command parameters (vectors, counts, group names).
    seed : int
        Single source of randomness.
    config : dict
        Overrides of :class:`Config` fields.
    out_dir : str or None
        Where report files go; stdout when None.
    threads : int
        Upper bound for worker pools.
    """

    command: list
    inputs: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    seed: int = 0
    config: dict = field(default_factory=dict)
    out_dir: str = None
    threads: int = 1

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict) or "command" not in d:
            raise SchemaError("manifest needs a 'command' list", "/command")
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise SchemaError(f"unknown manifest keys {sorted(extra)}", "/")
        return cls(**d)


# ---------------------------------------------------------------- helpers

def parse_vector(text, where="--x"):
    try:
        v = np.array([float(t) for t in str(text).replace(";", ",").split(",") if t.strip()])
    except ValueError as exc:
        raise SchemaError(f"cannot parse vector {text!r}", where) from exc
    if v.size == 0:
        raise SchemaError("empty vector", where)
    return v


def make_config(manifest):
    types = {f.name: f.type for f in fields(Config)}
    changes = {"seed": int(manifest.seed)}
    for key, value in manifest.config.items():
        if key not in types:
            raise SchemaError(f"unknown config field {key!r}", f"/config/{key}")
        default = getattr(DEFAULT, key)
        try:
            if isinstance(default, bool):
                changes[key] = value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes")
            else:
                changes[key] = type(default)(value)
        except ValueError as exc:
            raise SchemaError(f"bad value {value!r}", f"/config/{key}") from exc
    return DEFAULT.with_(**changes)


def _input(manifest, name, required=True):
    path = manifest.inputs.get(name)
    if path is None:
        if required:
            raise SchemaError(f"missing input file '{name}'", f"/inputs/{name}")
        return None
    return S.load(path)


def _load_spec(manifest):
    return _unwrap_spec(_input(manifest, "spec"))


def _unwrap_spec(doc):
    # accept a `pimple build` report (or its inner part) as well as a bare spec
    if isinstance(doc, dict) and isinstance(doc.get("report"), dict):
        doc = doc["report"]
    if isinstance(doc, dict) and "base" not in doc and isinstance(doc.get("spec"), dict):
        doc = doc["spec"]
    return S.pimple_spec_from_dict(doc)


def _group(manifest):
    """Matrix group from an input file or a named preset with --dim."""
    from .group_rep import named_group
    from .matrix_groups import FiniteMatrixGroup
    from .pipeline import representation

    doc = _input(manifest, "group", required=False)
    p = manifest.params
    if doc is not None and "elements" in doc:
        return S.matrix_group_from_dict(doc), None
    if doc is not None:
        table = S.group_table_from_dict(doc)
    elif p.get("group"):
        table = named_group(p["group"])
    else:
        raise SchemaError("give a group preset or a group file", "/params/group")
    if p.get("dim") is None:
        raise SchemaError("--dim is required with an abstract group", "/params/dim")
    mats, target, _ = representation(table, int(p["dim"]))
    return FiniteMatrixGroup.from_elements([np.asarray(m, dtype=float) for m in mats]), target


def _base_and_x0(manifest, dim):
    from .norms import WeightedLp
    from .pipeline import generic_point

    doc = _input(manifest, "base", required=False)
    base = S.norm_from_dict(doc) if doc is not None else WeightedLp.lp(4, dim)
    if base.dim != dim:
        raise SchemaError(f"base norm has dim {base.dim}, group acts on R^{dim}", "/inputs/base")
    x0 = manifest.params.get("x0")
    if x0 is None:
        x0 = generic_point(base)
    else:
        x0 = parse_vector(x0, "--x0")
        x0 = x0 / base(x0)
    return base, x0


def _vectors(manifest, dim, key="x"):
    xs = manifest.params.get(key) or []
    if isinstance(xs, str):
        xs = [xs]
    out = [parse_vector(x, f"--{key}") for x in xs]
    for v in out:
        if v.size != dim:
            raise SchemaError(f"vector has {v.size} entries, expected {dim}", f"--{key}")
    return out


# ---------------------------------------------------------------- handlers

def cmd_norm_eval(m, cfg):
    norm = S.norm_from_dict(_input(m, "file"))
    xs = _vectors(m, norm.dim)
    return {"kind": norm.kind, "dim": norm.dim, "x": xs, "values": [norm(x) for x in xs]}


def cmd_orbit_build(m, cfg):
    from .orbit import build_point_family

    group, _ = _group(m)
    base, x0 = _base_and_x0(m, group.dim)
    return build_point_family(group, base, x0, cfg).to_dict()


def cmd_pimple_build(m, cfg):
    from .orbit import build_point_family
    from .pimple import schedule_parameters, validate_spec

    group, _ = _group(m)
    base, x0 = _base_and_x0(m, group.dim)
    fam = build_point_family(group, base, x0, cfg)
    spec = schedule_parameters(base, group, fam.points, cfg)
    val = validate_spec(spec, cfg)
    return {"spec": S.pimple_spec_to_dict(spec), "family": fam.to_dict(),
            "validation": {"passed": val.passed, "checks": val.checks}}


def cmd_pimple_eval(m, cfg):
    from .pimple import evaluate_batch

    spec = _load_spec(m)
    xs = _vectors(m, spec.dim)
    evs = evaluate_batch(spec, np.array(xs), cfg.pimple_tol, cfg) if xs else []
    return {"x": xs, "values": [e.value for e in evs], "lower": [e.lower for e in evs],
            "gap": [e.gap for e in evs], "tol": cfg.pimple_tol}


def cmd_pimple_check(m, cfg):
    from .pimple import validate_spec

    spec = _load_spec(m)
    val = validate_spec(spec, cfg)
    return {"passed": val.passed, "checks": val.checks, "separation": val.separation,
            "witnesses": val.witnesses, "lambda_floor": val.lambda_floor, "lur": val.lur,
            "notes": spec.notes}


def _target_table(m):
    from .group_rep import named_group

    name = m.params.get("target")
    return None if not name else named_group(name).table


def cmd_isometries_enumerate(m, cfg):
    from .isometry import isometry_group_report

    spec = _load_spec(m)
    rep = isometry_group_report(spec, _target_table(m), starts=0, config=cfg)
    return rep.to_dict()


def cmd_isometries_falsify(m, cfg):
    from .isometry import enumerate_tip_candidates, falsify_search, group_closure
    from .pimple import pimple_norm

    spec = _load_spec(m)
    norm = pimple_norm(spec, config=cfg)
    known = group_closure(enumerate_tip_candidates(spec, norm, cfg))
    rep = falsify_search(norm, known, int(m.params.get("starts", 200)), int(m.params.get("steps", 300)),
                         seed=cfg.seed, exclusion=float(m.params.get("exclusion", 1e-3)))
    return {"known_order": known.order, "falsifier": rep.to_dict()}


def cmd_represent(m, cfg):
    from .pipeline import represent

    p = m.params
    if p.get("dim") is None:
        raise SchemaError("--dim is required", "/params/dim")
    return represent(p["group"], int(p["dim"]), int(p.get("starts", 200)), int(p.get("steps", 300)), cfg)


def cmd_complex_structures(m, cfg):
    from .complex_structures import complex_structure_report
    from .isometry import enumerate_tip_candidates, group_closure
    from .pimple import pimple_norm

    if m.inputs.get("spec"):
        spec = _load_spec(m)
        norm = pimple_norm(spec, config=cfg)
        group = group_closure(enumerate_tip_candidates(spec, norm, cfg))
    else:
        group, _ = _group(m)
        norm = None
    rep = complex_structure_report(group, norm)
    out = rep.to_dict()
    out["group_order"] = group.order
    return out


def cmd_jarosz_c2(m, cfg):
    from .jarosz import C2NormSpec, c2_report

    doc = _input(m, "spec", required=False)
    spec = S.c2_spec_from_dict(doc) if doc is not None else C2NormSpec()
    return c2_report(spec, int(m.params.get("count", 64)), int(m.params.get("starts", 200)),
                     int(m.params.get("steps", 300)), seed=cfg.seed)


def cmd_jarosz_double(m, cfg):
    from .jarosz import disjoint_support_test, double_norm_build

    norm = double_norm_build(int(m.params.get("gamma", 2)), int(m.params.get("variant", 2)))
    xs = _vectors(m, norm.dim)
    out = {"norm": norm.to_dict(), "x": xs, "values": [norm(x) for x in xs]}
    pair = _vectors(m, norm.dim, "pair")
    if pair:
        if len(pair) != 2:
            raise SchemaError("--pair needs exactly two vectors", "--pair")
        out["pair"] = pair
        out["supports_overlap"] = disjoint_support_test(norm, pair[0], pair[1], seed=cfg.seed)
    return out


def cmd_jarosz_extend(m, cfg):
    from .jarosz import extension_norm_w

    spec = S.extension_spec_from_dict(_input(m, "spec"))
    W = extension_norm_w(spec)
    zs = _vectors(m, W.dim, "z")
    return {"norm": W.to_dict(), "z": zs, "values": [W.gauge_with_refinement(z) for z in zs]}


def cmd_render(m, cfg):
    from .render import render_ball_2d

    doc = _input(m, "file")
    if isinstance(doc, dict) and "kind" in doc:
        norm = S.norm_from_dict(doc)
    else:
        # a pimple spec or a `pimple build` report
        from .pimple import pimple_norm

        norm = pimple_norm(_unwrap_spec(doc), config=cfg)
    r = render_ball_2d(norm, int(m.params.get("resolution", 360)))
    out = {"resolution": len(r.theta), "radius_min": float(r.radius.min()),
           "radius_max": float(r.radius.max()), "marks": {k: v for k, v in r.marks}}
    if m.out_dir:
        with open(os.path.join(m.out_dir, "ball.svg"), "w", encoding="utf-8") as fh:
            fh.write(r.to_svg())
        with open(os.path.join(m.out_dir, "ball.csv"), "w", encoding="utf-8") as fh:
            fh.write(r.to_csv())
        out["files"] = ["ball.svg", "ball.csv"]
    return out


HANDLERS = {
    ("norm", "eval"): cmd_norm_eval,
    ("orbit", "build"): cmd_orbit_build,
    ("pimple", "build"): cmd_pimple_build,
    ("pimple", "eval"): cmd_pimple_eval,
    ("pimple", "check"): cmd_pimple_check,
    ("isometries", "enumerate"): cmd_isometries_enumerate,
    ("isometries", "falsify"): cmd_isometries_falsify,
    ("represent",): cmd_represent,
    ("complex-structures",): cmd_complex_structures,
    ("jarosz", "c2"): cmd_jarosz_c2,
    ("jarosz", "double"): cmd_jarosz_double,
    ("jarosz", "extend"): cmd_jarosz_extend,
    ("render",): cmd_render,
}


def run_command(manifest):
    """Execute a manifest.

    Returns
    -------
    (int, str)
        Exit status and the report text (or the error message).
    """
    try:
        key = tuple(manifest.command)
        if key not in HANDLERS:
            raise SchemaError(f"unknown command {' '.join(key)!r}", "/command")
        cfg = make_config(manifest)
        if manifest.out_dir:
            os.makedirs(manifest.out_dir, exist_ok=True)
        log.info("running %s", " ".join(key))
        report = HANDLERS[key](manifest, cfg)
        text = S.dumps({"command": list(key), "seed": cfg.seed, "report": report})
        if manifest.out_dir:
            with open(os.path.join(manifest.out_dir, "report.json"), "w", encoding="utf-8") as fh:
                fh.write(text)
        return 0, text
    except INPUT_ERRORS as exc:
        loc = getattr(exc, "location", "")
        return 2, S.dumps({"error": type(exc).__name__, "location": loc, "message": str(exc)})
    except SOLVER_ERRORS as exc:
        diag = {k: getattr(exc, k) for k in ("upper", "lower", "index", "witness") if hasattr(exc, k)}
        return 3, S.dumps({"error": type(exc).__name__, "message": str(exc), "diagnostics": diag})
    except RenormError as exc:
        return 3, S.dumps({"error": type(exc).__name__, "message": str(exc)})


# ---------------------------------------------------------------- argparse

def _common(p):
    p.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    p.add_argument("--out-dir", default=None, help="write report.json (and renders) here")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config field, e.g. --set pimple_tol=1e-10")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--save-manifest", default=None, help="also write the manifest JSON here")


def _group_args(p):
    p.add_argument("--group", help="preset name (cyclic4, quaternion8, dihedral3, ...)")
    p.add_argument("--group-file", help="matrix group or multiplication table JSON")
    p.add_argument("--dim", type=int)
    p.add_argument("--base", help="base norm JSON (default: l4)")
    p.add_argument("--x0", help="base point, comma separated")


def build_parser():
    ap = argparse.ArgumentParser(prog="renorm", description="Renorming workbench")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    run = sub.add_parser("run", help="replay a manifest JSON file")
    run.add_argument("manifest")

    norm = sub.add_parser("norm").add_subparsers(dest="sub", required=True)
    p = norm.add_parser("eval", help="evaluate a norm descriptor")
    p.add_argument("--file", required=True)
    p.add_argument("--x", action="append", default=[])
    _common(p)

    orbit = sub.add_parser("orbit").add_subparsers(dest="sub", required=True)
    p = orbit.add_parser("build", help="separated point family for a group")
    _group_args(p)
    _common(p)

    pim = sub.add_parser("pimple").add_subparsers(dest="sub", required=True)
    p = pim.add_parser("build", help="point family, schedule and validated spec")
    _group_args(p)
    _common(p)
    p = pim.add_parser("eval", help="certified gauge values")
    p.add_argument("--spec", required=True)
    p.add_argument("--x", action="append", default=[])
    _common(p)
    p = pim.add_parser("check", help="validate a spec")
    p.add_argument("--spec", required=True)
    _common(p)

    iso = sub.add_parser("isometries").add_subparsers(dest="sub", required=True)
    p = iso.add_parser("enumerate", help="isometries from tip assignments")
    p.add_argument("--spec", required=True)
    p.add_argument("--target", help="preset to compare the group with")
    _common(p)
    p = iso.add_parser("falsify", help="multistart search for extra isometries")
    p.add_argument("--spec", required=True)
    p.add_argument("--starts", type=int, default=200)
    p.add_argument("--steps", type=int, default=300)
    p.add_argument("--exclusion", type=float, default=1e-3)
    _common(p)

    p = sub.add_parser("represent", help="full pipeline for a named group")
    p.add_argument("group")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--starts", type=int, default=200)
    p.add_argument("--steps", type=int, default=300)
    _common(p)

    p = sub.add_parser("complex-structures", help="square roots of -Id up to conjugacy")
    p.add_argument("--spec")
    _group_args(p)
    _common(p)

    jar = sub.add_parser("jarosz").add_subparsers(dest="sub", required=True)
    p = jar.add_parser("c2", help="norm on C^2 with only circle isometries")
    p.add_argument("--spec")
    p.add_argument("--count", type=int, default=64)
    p.add_argument("--starts", type=int, default=200)
    p.add_argument("--steps", type=int, default=300)
    _common(p)
    p = jar.add_parser("double", help="order-sensitive norms on C^Gamma")
    p.add_argument("--gamma", type=int, default=2)
    p.add_argument("--variant", type=int, default=2, choices=(1, 2))
    p.add_argument("--x", action="append", default=[])
    p.add_argument("--pair", action="append", default=[])
    _common(p)
    p = jar.add_parser("extend", help="extension gauge on X + C")
    p.add_argument("--spec", required=True)
    p.add_argument("--z", action="append", default=[])
    _common(p)

    p = sub.add_parser("render", help="SVG and CSV of a planar unit ball")
    p.add_argument("--file", required=True)
    p.add_argument("--resolution", type=int, default=360)
    _common(p)
    return ap


_INPUT_FLAGS = {"file": "file", "spec": "spec", "base": "base", "group_file": "group", "manifest": None}
_SKIP = {"cmd", "sub", "verbose", "seed", "out_dir", "set", "threads", "save_manifest"}


def manifest_from_args(ns):
    command = [ns.cmd] + ([ns.sub] if getattr(ns, "sub", None) else [])
    inputs, params = {}, {}
    for key, value in vars(ns).items():
        if key in _SKIP or value is None:
            continue
        if key in _INPUT_FLAGS:
            inputs[_INPUT_FLAGS[key]] = value
        else:
            params[key] = value
    overrides = {}
    for item in ns.set:
        if "=" not in item:
            raise SchemaError(f"expected KEY=VALUE, got {item!r}", "--set")
        k, v = item.split("=", 1)
        overrides[k.strip()] = v.strip()
    return RunManifest(command, inputs, params, ns.seed, overrides, ns.out_dir, ns.threads)


def main(argv=None):
    ap = build_parser()
    ns = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        if ns.cmd == "run":
            manifest = RunManifest.from_dict(S.load(ns.manifest))
        else:
            manifest = manifest_from_args(ns)
            if ns.save_manifest:
                S.dump(manifest.to_dict(), ns.save_manifest)
    except INPUT_ERRORS as exc:
        print(S.dumps({"error": type(exc).__name__, "location": getattr(exc, "location", ""),
                       "message": str(exc)}), end="", file=sys.stderr)
        return 2
    status, text = run_command(manifest)
    print(text, end="", file=sys.stdout if status == 0 else sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
