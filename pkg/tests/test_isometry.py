import numpy as np
import pytest

from renorm import (ArgumentError, Euclidean, RotationCircle, WeightedLp, enumerate_tip_candidates,
                    falsify_search, group_closure, pimple_norm, verify_isometry)
from renorm.complex_structures import standard_complex_structure
from renorm.corpus import (factory_c2, factory_c4, factory_q8, interacting_c4, rotation,
                           single_pair, two_orbits_euclidean)
from renorm.isometry import isometry_discrepancy, tip_classes
from renorm.matrix_groups import groups_isomorphic
from renorm.group_rep import cyclic, klein, quaternion


def test_verify_isometry_on_known_maps():
    E = Euclidean.identity(2)
    assert verify_isometry(rotation(0.3), E)
    sq = WeightedLp(4, [1.0, 1.0])
    chk = verify_isometry(rotation(0.3), sq)
    assert not chk and chk.worst > 1e-3
    assert sq(chk.witness @ rotation(0.3).T) != pytest.approx(sq(chk.witness), rel=1e-6)
    assert verify_isometry(rotation(np.pi / 2), sq)


def test_verify_isometry_argument_checks():
    E = Euclidean.identity(2)
    with pytest.raises(ArgumentError):
        verify_isometry(np.eye(3), E)
    with pytest.raises(ArgumentError):
        verify_isometry(np.array([[1.0, 1.0], [1.0, 1.0]]), E)


@pytest.mark.parametrize("make, order, table", [
    (lambda: single_pair(), 4, klein().table),
    (lambda: interacting_c4(), 8, None),
    (lambda: two_orbits_euclidean(), 4, cyclic(4).table),
    (lambda: factory_c2()[0], 2, cyclic(2).table),
    (lambda: factory_c4()[0], 4, cyclic(4).table),
    (lambda: factory_q8()[0], 8, quaternion().table),
])
def test_tip_candidates(make, order, table):
    spec = make()
    cands = enumerate_tip_candidates(spec)
    assert len(cands) == order
    G = group_closure(cands)
    assert G.order == order
    if table is not None:
        assert groups_isomorphic(G.table, table)
    norm = pimple_norm(spec)
    assert all(verify_isometry(T, norm) for T in cands)


def test_tip_classes_separate_orbits():
    tc = tip_classes(two_orbits_euclidean())
    assert sorted(tc.sizes) == [4, 4]
    tc = tip_classes(factory_c4()[0])
    # each manufactured orbit carries its own lambda, hence its own class
    assert len(tc.sizes) == len(factory_c4()[0].lambdas)


def test_rotation_circle_distance():
    C = RotationCircle(standard_complex_structure(2))
    assert C.distance(rotation(1.1)) == pytest.approx(0.0, abs=1e-12)
    # reflection diag(1, -1): |T - R_t|_F^2 = 4 for every t
    assert C.distance(np.diag([1.0, -1.0])) == pytest.approx(2.0, abs=1e-12)
    J = np.array([[0.0, -2.0], [0.5, 0.0]])
    Cg = RotationCircle(J)
    assert Cg.distance(Cg.element(0.7)) == pytest.approx(0.0, abs=1e-9)


def test_discrepancy_vanishes_on_isometries():
    spec = factory_c4()[0]
    norm = pimple_norm(spec)
    X = np.random.default_rng(0).standard_normal((30, 2))
    nx = norm.eval_many(X)
    from renorm import tips
    P = tips(spec)
    for g in spec.group.elements:
        assert isometry_discrepancy(norm, g, X, nx, P, spec.base) <= 1e-9
    assert isometry_discrepancy(norm, rotation(0.05), X, nx, P, spec.base) > 1e-3


def test_falsifier_finds_nothing_near_single_pair():
    spec = single_pair()
    norm = pimple_norm(spec)
    known = group_closure(enumerate_tip_candidates(spec))
    rep = falsify_search(norm, known, starts=6, steps=150, seed=1)
    assert rep.best_residual > 1e-4
    assert rep.best_distance > rep.exclusion


def test_falsifier_detects_a_missing_isometry():
    # the euclidean disk has every rotation; claiming only {+-Id} is refuted
    E = Euclidean.identity(2)
    known = group_closure([-np.eye(2)])
    rep = falsify_search(E, known, starts=4, steps=200, seed=0)
    assert rep.best_residual <= 1e-6


def test_falsifier_rejects_bad_arguments():
    with pytest.raises(ArgumentError):
        falsify_search(Euclidean.identity(2), group_closure([-np.eye(2)]), starts=0)
