"""Abstract finite groups and their signed-permutation representations."""
from dataclasses import dataclass, field
import re

import numpy as np

from .errors import ArgumentError, GroupError


@dataclass(frozen=True, eq=False)
class GroupTable:
    """Finite group given by its multiplication table.

    ``table[a, b]`` is the index of the product ab.  The group axioms are
    checked exactly at construction.
    """

    table: np.ndarray
    name: str = ""
    identity: int = field(init=False)
    inverse: np.ndarray = field(init=False)

    def __post_init__(self):
        t = np.array(self.table, dtype=np.int64)
        n = len(t)
        if t.shape != (n, n) or n == 0:
            raise GroupError("table must be a nonempty square array")
        if t.min() < 0 or t.max() >= n:
            raise GroupError("table entries out of range")
        ar = np.arange(n)
        for row in t:
            if len(set(row.tolist())) != n:
                raise GroupError("table rows must be permutations")
        left = t[t, :]                       # (ab)c
        right = t[ar[:, None, None], t[None, :, :]]   # a(bc)
        if not np.array_equal(left, right):
            raise GroupError("table is not associative")
        ids = [e for e in range(n) if np.array_equal(t[e], ar) and np.array_equal(t[:, e], ar)]
        if not ids:
            raise GroupError("table has no two-sided identity")
        e = ids[0]
        inv = np.array([int(np.nonzero(t[a] == e)[0][0]) for a in range(n)])
        if not np.all(t[inv, ar] == e):
            raise GroupError("left and right inverses differ")
        t.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "identity", int(e))
        object.__setattr__(self, "inverse", inv)

    @property
    def order(self):
        return len(self.table)

    def mul(self, a, b):
        return int(self.table[a, b])

    def to_dict(self):
        return {"name": self.name, "order": self.order, "table": self.table.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["table"]), d.get("name", ""))


# ----------------------------------------------------------------- presets

def cyclic(n):
    """Z/n with elements 0..n-1."""
    if n < 1:
        raise ArgumentError("order must be positive")
    a = np.arange(n)
    return GroupTable((a[:, None] + a[None, :]) % n, f"cyclic{n}")


def dihedral(n):
    """Symmetries of the regular n-gon, order 2n; index a + n*b for r^a s^b."""
    if n < 2:
        raise ArgumentError("dihedral groups need n >= 2")
    t = np.empty((2 * n, 2 * n), dtype=np.int64)
    for i in range(2 * n):
        a1, b1 = i % n, i // n
        for j in range(2 * n):
            a2, b2 = j % n, j // n
            a = (a1 + (a2 if b1 == 0 else -a2)) % n
            t[i, j] = a + n * ((b1 + b2) % 2)
    return GroupTable(t, f"dihedral{n}")


_QUAT_UNITS = np.array([
    [1, 0, 0, 0], [-1, 0, 0, 0],
    [0, 1, 0, 0], [0, -1, 0, 0],
    [0, 0, 1, 0], [0, 0, -1, 0],
    [0, 0, 0, 1], [0, 0, 0, -1],
])


def quaternion_product(p, q):
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return np.array([
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ])


def quaternion():
    """Q8 with elements ordered 1, -1, i, -i, j, -j, k, -k."""
    t = np.empty((8, 8), dtype=np.int64)
    for i, p in enumerate(_QUAT_UNITS):
        for j, q in enumerate(_QUAT_UNITS):
            r = quaternion_product(p, q)
            t[i, j] = int(np.nonzero(np.all(_QUAT_UNITS == r, axis=1))[0][0])
    return GroupTable(t, "quaternion8")


def direct_product(g, h, name=None):
    """G x H with index i * |H| + j."""
    m, n = g.order, h.order
    t = np.empty((m * n, m * n), dtype=np.int64)
    for a in range(m * n):
        for b in range(m * n):
            t[a, b] = g.table[a // n, b // n] * n + h.table[a % n, b % n]
    return GroupTable(t, name or f"{g.name}x{h.name}")


def klein():
    return direct_product(cyclic(2), cyclic(2), "klein4")


def named_group(name):
    """Preset lookup: cyclicN, dihedralN, quaternion8 (or q8), klein4, zAxzB."""
    key = name.strip().lower()
    if key in ("quaternion", "quaternion8", "q8"):
        return quaternion()
    if key in ("klein", "klein4", "v4"):
        return klein()
    m = re.fullmatch(r"(?:cyclic|z|c)(\d+)", key)
    if m:
        return cyclic(int(m.group(1)))
    m = re.fullmatch(r"(?:dihedral|d)(\d+)", key)
    if m:
        return dihedral(int(m.group(1)))
    m = re.fullmatch(r"z(\d+)xz(\d+)", key)
    if m:
        return direct_product(cyclic(int(m.group(1))), cyclic(int(m.group(2))), key)
    raise ArgumentError(f"unknown group preset {name!r}")


def corpus():
    """Groups of order at most 16 used by the representation tests."""
    return [cyclic(2), cyclic(3), cyclic(4), cyclic(6), cyclic(8), klein(),
            dihedral(3), dihedral(4), quaternion(), named_group("z2xz4")]


# --------------------------------------------------------------- splitting

def central_involutions(table):
    """Indices g with g^2 = 1, g != 1 and g commuting with every element."""
    t = table.table
    e = table.identity
    out = []
    for g in range(table.order):
        if g == e or t[g, g] != e:
            continue
        if np.array_equal(t[g, :], t[:, g]):
            out.append(g)
    return out


@dataclass(frozen=True, eq=False)
class CosetSplit:
    """G = G' u jG' for a central involution j.

    Attributes
    ----------
    reps : tuple of int
        Elements of G' in scan order (contains the identity).
    eps : ndarray of int
        eps[g] = 1 if g in G', -1 otherwise.
    proj : ndarray of int
        proj[g] = |g|, the element of G' with g = j^((1-eps_g)/2) |g|.
    """

    table: GroupTable
    j: int
    reps: tuple
    eps: np.ndarray
    proj: np.ndarray

    def position(self, g):
        """Coordinate index of the representative |g| in R^{|G'|}."""
        return self.reps.index(int(self.proj[g]))


def coset_split(table, j):
    """Greedy choice of G': scan elements, keep g unless jg is already kept."""
    if j not in central_involutions(table):
        raise ArgumentError(f"element {j} is not a central involution")
    t = table.table
    reps = []
    kept = set()
    for g in range(table.order):
        if int(t[j, g]) in kept:
            continue
        reps.append(g)
        kept.add(g)
    eps = np.array([1 if g in kept else -1 for g in range(table.order)])
    proj = np.array([g if g in kept else int(t[j, g]) for g in range(table.order)])
    return CosetSplit(table, int(j), tuple(reps), eps, proj)


def classical_rep(split):
    """Signed permutations T_g on R^{|G'|} with (T_g y)_h = eps(g^-1 h) y_{|g^-1 h|}.

    Returns
    -------
    list of ndarray
        ``mats[g]`` for every group element g; integer entries.
    """
    tab = split.table
    k = len(split.reps)
    mats = []
    for g in range(tab.order):
        gi = int(tab.inverse[g])
        m = np.zeros((k, k), dtype=np.int64)
        for row, h in enumerate(split.reps):
            x = int(tab.table[gi, h])
            m[row, split.position(x)] = split.eps[x]
        mats.append(m)
    return mats


def sign_product_table(table):
    """Table of {-1,1} x G with index s * |G| + g, s = 0 for +1 and 1 for -1."""
    n = table.order
    t = np.empty((2 * n, 2 * n), dtype=np.int64)
    for a in range(2 * n):
        for b in range(2 * n):
            t[a, b] = ((a // n + b // n) % 2) * n + table.table[a % n, b % n]
    return GroupTable(t, f"pm1x{table.name}")


def fini_rep(table, extra_dim=0):
    """Representation of {-1,1} x G on R^{|G| + m}.

    T_{eps,g} e_h = eps e_{gh} on the group coordinates and eps * Id on the
    extra block of size ``extra_dim``.

    Returns
    -------
    dict
        ``{(eps, g): matrix}`` with integer entries.
    """
    if extra_dim < 0:
        raise ArgumentError("extra dimension must be >= 0")
    n = table.order
    out = {}
    for eps in (1, -1):
        for g in range(n):
            m = np.zeros((n + extra_dim, n + extra_dim), dtype=np.int64)
            for h in range(n):
                m[int(table.table[g, h]), h] = eps
            m[n:, n:] = eps * np.eye(extra_dim, dtype=np.int64)
            out[(eps, g)] = m
    return out


def fini_rep_list(table, extra_dim=0):
    """fini_rep images listed in the index order of :func:`sign_product_table`."""
    rep = fini_rep(table, extra_dim)
    n = table.order
    return [rep[(1 if a // n == 0 else -1, a % n)] for a in range(2 * n)]


def is_homomorphism(table, mats):
    """Exact check that mats[a] @ mats[b] == mats[ab] for all pairs."""
    t = table.table
    for a in range(table.order):
        for b in range(table.order):
            if not np.array_equal(mats[a] @ mats[b], mats[int(t[a, b])]):
                return False
    return True
