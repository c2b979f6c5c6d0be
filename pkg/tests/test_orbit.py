import numpy as np
import pytest

from renorm import (ArgumentError, ConstructionError, Euclidean, PointFamily, SeparationError,
                    WeightedLp, build_point_family, group_closure, separation_constant,
                    trisect_select)
from renorm.corpus import cyclic_rotations, factory_c2, factory_c4, factory_q8, minus_id_group, rotation
from renorm.orbit import check_family_separation, distance_to_subspace, family_separation


def test_separation_constant_values():
    E = Euclidean.identity(2)
    e1 = np.array([1.0, 0.0])
    # capped at 0.99 for C2 and C4; 2 sin(pi/8) for C8
    assert separation_constant(minus_id_group(2), E, e1) == pytest.approx(0.99)
    assert separation_constant(cyclic_rotations(4), E, e1) == pytest.approx(0.99)
    assert separation_constant(cyclic_rotations(8), E, e1) == pytest.approx(2 * np.sin(np.pi / 8), abs=1e-12)


def test_separation_witness():
    G = group_closure([np.diag([1.0, -1.0]), -np.eye(2)])
    with pytest.raises(SeparationError) as exc:
        separation_constant(G, Euclidean.identity(2), np.array([1.0, 0.0]))
    assert np.allclose(G.elements[exc.value.witness], np.diag([1.0, -1.0]))
    with pytest.raises(ArgumentError):
        separation_constant(G, Euclidean.identity(2), np.array([2.0, 0.0]))


def test_trisection_keeps_intervals_nested():
    G = cyclic_rotations(8)
    E = Euclidean.identity(2)
    x0 = np.array([1.0, 0.0])
    gs = [g for g in G.elements if not (np.allclose(g, np.eye(2)) or np.allclose(g, -np.eye(2)))]
    alpha = separation_constant(G, E, x0)
    trace = []
    betas = trisect_select(G, E, x0, gs, alpha, trace)
    assert len(betas) == len(gs) == 6
    assert all(alpha / 10 <= b <= alpha / 5 for b in betas)
    assert [t["step"] for t in trace] == list(range(1, 7))
    # every interval still in play is cut to a third at each step
    width0 = alpha / 10
    for t in trace:
        assert [k["m"] for k in t["kept"]] == list(range(t["step"], 7))
        for k in t["kept"]:
            lo, hi = k["interval"]
            assert hi - lo == pytest.approx(width0 / 3 ** t["step"], rel=1e-9)
            assert k["side"] in ("first", "last")


def test_trisection_argument_checks():
    G = cyclic_rotations(4)
    E = Euclidean.identity(2)
    with pytest.raises(ArgumentError):
        trisect_select(G, E, np.array([1.0, 0.0]), [rotation(np.pi / 2)], 1.5)
    with pytest.raises(ArgumentError):
        trisect_select(G, E, np.array([1.0, 0.0]), [-np.eye(2)], 0.5)


def test_distance_to_subspace():
    E = Euclidean.identity(2)
    d, near = distance_to_subspace(E, np.array([1.0, 1.0]), np.array([[1.0], [0.0]]))
    assert d == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(near, [1.0, 0.0], atol=1e-8)
    sup = WeightedLp(np.inf, [1.0, 1.0])
    d, _ = distance_to_subspace(sup, np.array([1.0, 0.0]), np.array([[1.0], [1.0]]) / np.sqrt(2))
    # [DERIVED] min_c max(|1 - c|, |c|) = 1/2
    assert d == pytest.approx(0.5, abs=1e-6)


@pytest.mark.parametrize("case, n2, n1", [(factory_c2, 0, 1), (factory_c4, 2, 0), (factory_q8, 6, 0)])
def test_family_shapes(case, n2, n1):
    spec, fam = case()
    assert len(fam.type2) == n2 and len(fam.type1) == n1
    assert fam.spanning
    assert np.allclose(spec.base.eval_many(fam.points), 1.0, atol=1e-12)
    for e in fam.type1:
        assert e["distance"] == pytest.approx(fam.alpha / 10, rel=1e-8)


@pytest.mark.parametrize("case", [factory_c2, factory_c4, factory_q8])
def test_family_separation_bound(case):
    spec, fam = case()
    check_family_separation(spec.group, spec.base, fam)
    seps = family_separation(spec.group, spec.base, fam.points)
    for k, (d, _) in enumerate(seps):
        assert d >= fam.alpha ** 2 / (40 * 3 ** (k + 1)) - 1e-9


def test_family_round_trip():
    _, fam = factory_c4()
    back = PointFamily.from_dict(fam.to_dict())
    assert np.array_equal(back.points, fam.points)
    assert back.trace == fam.trace
    assert [e["beta"] for e in back.type2] == [e["beta"] for e in fam.type2]


def test_non_rotund_base_is_rejected():
    sup = WeightedLp(np.inf, [1.0, 1.0])
    with pytest.raises(ConstructionError):
        build_point_family(minus_id_group(2), sup, np.array([1.0, 0.5]))
