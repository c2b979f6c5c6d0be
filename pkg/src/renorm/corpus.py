"""Named groups, bases and pimple specs used by tests, demos and the acceptance suite."""
from functools import lru_cache

import numpy as np

from .config import DEFAULT
from .group_rep import _QUAT_UNITS, quaternion_product
from .matrix_groups import group_closure
from .norms import Euclidean, WeightedLp
from .orbit import build_point_family
from .pimple import PimpleSpec, schedule_parameters
from .pipeline import generic_point


def rotation(t):
    return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])


def minus_id_group(n):
    """{Id, -Id} on R^n."""
    return group_closure([-np.eye(n)])


def cyclic_rotations(k):
    """Rotations by multiples of 2 pi / k on R^2 (k even, so -Id is included)."""
    return group_closure([rotation(2 * np.pi / k)])


def quaternion_left_regular():
    """Q8 acting on R^4 = H by left multiplication; unit quaternion order of the table."""
    mats = [np.array([quaternion_product(q, e) for e in np.eye(4)]).T for q in _QUAT_UNITS]
    return group_closure(mats)


def single_pair(lam=0.8):
    """One pimple pair at +-e1 on the euclidean disk."""
    return PimpleSpec(Euclidean.identity(2), minus_id_group(2), [[1.0, 0.0]], [lam])


def interacting_c4(lam=0.55):
    """C4 orbit of e1 with large pimples whose cones meet (ball is a square)."""
    return PimpleSpec(Euclidean.identity(2), cyclic_rotations(4), [[1.0, 0.0]], [lam])


def two_orbits_euclidean():
    """Two hand-placed C4 orbits with different lambdas on the disk."""
    return PimpleSpec(Euclidean.identity(2), cyclic_rotations(4),
                      [[1.0, 0.0], [np.cos(0.4), np.sin(0.4)]], [0.9, 0.95])


def three_dim_pair():
    """One pimple pair on the euclidean ball of R^3."""
    x = np.array([1.0, 2.0, 2.0]) / 3.0
    return PimpleSpec(Euclidean.identity(3), minus_id_group(3), [x], [0.85])


def _factory(group, base, x0=None, config=DEFAULT):
    x0 = generic_point(base) if x0 is None else np.asarray(x0, dtype=float)
    fam = build_point_family(group, base, x0, config)
    return schedule_parameters(base, group, fam.points, config), fam


@lru_cache(maxsize=None)
def factory_c2():
    """Orbit-factory spec for {+-Id} on R^2 with the l4 base."""
    return _factory(minus_id_group(2), WeightedLp.lp(4, 2))


@lru_cache(maxsize=None)
def factory_c2_euclidean():
    """Orbit-factory spec for {+-Id} on the euclidean plane (diagnostic)."""
    return _factory(minus_id_group(2), Euclidean.identity(2), [1.0, 0.0])


@lru_cache(maxsize=None)
def factory_c4():
    """Orbit-factory spec for the rotations by quarter turns with the l4 base."""
    return _factory(cyclic_rotations(4), WeightedLp.lp(4, 2))


@lru_cache(maxsize=None)
def factory_q8():
    """Orbit-factory spec for Q8 on R^4 with the l4 base."""
    return _factory(quaternion_left_regular(), WeightedLp.lp(4, 4))


def pimple_corpus():
    """All named pimple specs, hand-made and manufactured."""
    return {
        "single_pair": single_pair(),
        "interacting_c4": interacting_c4(),
        "two_orbits_euclidean": two_orbits_euclidean(),
        "three_dim_pair": three_dim_pair(),
        "factory_c2": factory_c2()[0],
        "factory_c4": factory_c4()[0],
        "factory_q8": factory_q8()[0],
    }
