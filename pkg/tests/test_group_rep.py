import numpy as np
import pytest

from renorm import ArgumentError, GroupError, GroupTable, classical_rep, coset_split, fini_rep, group_closure, named_group
from renorm.group_rep import (central_involutions, corpus, cyclic, dihedral, fini_rep_list, is_homomorphism,
                              klein, quaternion, sign_product_table)
from renorm.matrix_groups import element_orders, groups_isomorphic
from renorm.pipeline import representation


@pytest.mark.parametrize("table", corpus(), ids=lambda t: t.name)
def test_fini_rep_is_exact_homomorphism(table):
    for extra in (0, 2):
        mats = fini_rep_list(table, extra)
        assert is_homomorphism(sign_product_table(table), mats)
        assert all(m.dtype.kind == "i" for m in mats)
    rep = fini_rep(table)
    assert np.array_equal(rep[(-1, table.identity)], -np.eye(table.order, dtype=np.int64))


@pytest.mark.parametrize("table", corpus(), ids=lambda t: t.name)
def test_classical_rep_sends_j_to_minus_id(table):
    for j in central_involutions(table):
        split = coset_split(table, j)
        mats = classical_rep(split)
        assert is_homomorphism(table, mats)
        assert len(split.reps) == table.order // 2
        assert np.array_equal(mats[j], -np.eye(table.order // 2, dtype=np.int64))
        # faithful on G exactly when the matrices are distinct
        assert len({m.tobytes() for m in mats}) == table.order


def test_central_involutions():
    assert central_involutions(cyclic(4)) == [2]
    assert central_involutions(quaternion()) == [1]
    assert central_involutions(cyclic(3)) == []
    assert len(central_involutions(klein())) == 3
    assert central_involutions(dihedral(4)) == [2]
    with pytest.raises(ArgumentError):
        coset_split(cyclic(4), 1)


def test_quaternion_matrices_generate_q8():
    split = coset_split(quaternion(), 1)
    G = group_closure([m.astype(float) for m in classical_rep(split)])
    assert G.order == 8
    assert groups_isomorphic(G.table, quaternion().table)
    assert sorted(element_orders(quaternion().table)) == [1, 2, 4, 4, 4, 4, 4, 4]


def test_named_presets():
    assert named_group("q8").order == 8
    assert named_group("Cyclic6").order == 6
    assert named_group("d5").order == 10
    assert named_group("z2xz4").order == 8
    with pytest.raises(ArgumentError):
        named_group("monster")


def test_table_axioms_enforced():
    with pytest.raises(GroupError):
        GroupTable(np.array([[0, 1], [0, 1]]))
    with pytest.raises(GroupError):
        GroupTable(np.array([[0, 1, 2], [1, 0, 2], [2, 2, 0]]))
    with pytest.raises(GroupError):
        # Latin square that is not associative
        GroupTable(np.array([[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3],
                             [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]))
    g = GroupTable.from_dict(quaternion().to_dict())
    assert np.array_equal(g.table, quaternion().table)


def test_representation_dimension_rules():
    mats, target, info = representation(cyclic(4), 2)
    assert target.order == 4 and info["T_j_is_minus_id"]
    mats, target, info = representation(cyclic(3), 4)
    assert target.order == 6 and len(mats) == 6
    with pytest.raises(ArgumentError):
        representation(cyclic(3), 2)
    with pytest.raises(ArgumentError):
        representation(cyclic(6), 4)
