"""End-to-end: abstract finite group -> matrix representation -> pimple norm -> isometry group."""
import numpy as np

from .config import DEFAULT
from .errors import ArgumentError
from .group_rep import (central_involutions, classical_rep, coset_split, fini_rep_list,
                        is_homomorphism, named_group, sign_product_table)
from .isometry import isometry_group_report
from .matrix_groups import FiniteMatrixGroup
from .norms import WeightedLp
from .orbit import build_point_family
from .pimple import schedule_parameters, validate_spec


def generic_point(base):
    """Unit vector proportional to (n, n-1, ..., 1).

    Coordinates with distinct absolute values keep x0 off the symmetry
    hyperplanes of signed permutations, where the l4 ball is too flat
    (quartic contact) for a pimple of representable size.
    """
    x = np.arange(base.dim, 0, -1, dtype=float)
    return x / base(x)


def representation(table, dim):
    """Matrices realising the group (or {+-1} x group) on R^dim.

    dim = |G| / 2 uses the signed-permutation representation of G on
    G / {1, j} for the first central involution j; dim >= |G| uses the
    regular representation of {+-1} x G with a scalar block of size
    dim - |G|.

    Returns
    -------
    (list of ndarray, GroupTable, dict)
        Matrices in the index order of the returned table, the target
        table and provenance.
    """
    n = table.order
    if 2 * dim == n:
        inv = central_involutions(table)
        if not inv:
            raise ArgumentError(f"{table.name} has no central involution, so dim {dim} is unavailable")
        split = coset_split(table, inv[0])
        mats = classical_rep(split)
        info = {"construction": "signed-permutation", "central_involution": int(inv[0]),
                "representatives": list(split.reps),
                "T_j_is_minus_id": bool(np.array_equal(mats[inv[0]], -np.eye(dim, dtype=np.int64)))}
        return mats, table, info
    if dim >= n:
        target = sign_product_table(table)
        mats = fini_rep_list(table, dim - n)
        return mats, target, {"construction": "regular-with-sign", "extra_dim": dim - n}
    raise ArgumentError(f"dim must be |G|/2 = {n / 2:g} (with a central involution) or >= |G| = {n}")


def represent(group_name, dim, starts=200, steps=300, config=DEFAULT):
    """Build a norm on R^dim whose isometry group is the named group (or {+-1} x it).

    Steps: representation, l4 base (invariant under signed permutations),
    point family at a generic x0, parameter schedule, validation, tip
    candidates, closure, comparison with the target table and a
    falsifier run.

    Returns
    -------
    dict
        JSON-ready report; ``isomorphic`` states whether the computed
        isometry group matches the target table.
    """
    table = named_group(group_name)
    mats, target, info = representation(table, dim)
    hom = is_homomorphism(target, mats)
    group = FiniteMatrixGroup.from_elements([np.asarray(m, dtype=float) for m in mats])
    base = WeightedLp.lp(4, dim)
    x0 = generic_point(base)
    e1 = np.eye(dim)[0]
    e1_orbit = np.einsum("gij,j->gi", group.elements, e1)
    e1_separates = len({tuple(np.round(v, 9)) for v in e1_orbit}) == group.order
    family = build_point_family(group, base, x0, config)
    spec = schedule_parameters(base, group, family.points, config)
    val = validate_spec(spec, config)
    rep = isometry_group_report(spec, target.table, starts, steps, config)
    return {
        "group": table.name,
        "group_order": table.order,
        "dim": dim,
        "representation": info,
        "homomorphism_exact": bool(hom),
        "target": target.name,
        "target_order": target.order,
        "base": base.to_dict(),
        "x0": x0,
        "e1_orbit_separates": bool(e1_separates),
        "family": {"alpha": family.alpha, "points": family.points,
                   "type2": len(family.type2), "type1": len(family.type1)},
        "spec": {"lambdas": spec.lambdas, "widths": spec.widths, "deltas": spec.deltas,
                 "epsilons": spec.epsilons, "notes": spec.notes},
        "validation": {"passed": val.passed, "checks": val.checks},
        "isometry_group": rep.to_dict(),
        "isometry_order": rep.order,
        "isomorphic": bool(rep.target_isomorphic),
    }
