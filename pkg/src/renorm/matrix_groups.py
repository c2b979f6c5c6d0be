"""Finite groups of matrices: closure, multiplication tables, isomorphism."""
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT
from .errors import ArgumentError, GroupError


class _MatrixIndex:
    """Approximate dictionary of matrices, matching entries within ``tol``."""

    def __init__(self, tol):
        self.tol = tol
        self.grid = max(tol * 1e3, 1e-7)
        self.buckets = {}
        self.items = []

    def _key(self, m):
        return np.round(m / self.grid).astype(np.int64).tobytes()

    def find(self, m):
        for idx in self.buckets.get(self._key(m), ()):
            if np.max(np.abs(self.items[idx] - m)) <= self.tol:
                return idx
        # rounding may split near-equal matrices across buckets
        for idx, other in enumerate(self.items):
            if np.max(np.abs(other - m)) <= self.tol:
                return idx
        return -1

    def find_fast(self, m):
        for idx in self.buckets.get(self._key(m), ()):
            if np.max(np.abs(self.items[idx] - m)) <= self.tol:
                return idx
        return -1

    def add(self, m):
        self.items.append(m)
        self.buckets.setdefault(self._key(m), []).append(len(self.items) - 1)
        return len(self.items) - 1


@dataclass(frozen=True, eq=False)
class FiniteMatrixGroup:
    """A closed finite set of invertible matrices with its Cayley table.

    ``table[i, j]`` is the index of ``elements[i] @ elements[j]``.
    """

    elements: np.ndarray
    table: np.ndarray
    identity: int
    inverse: np.ndarray
    has_minus_identity: bool
    dim: int = field(init=False)

    def __post_init__(self):
        els = np.array(self.elements, dtype=float)
        els.setflags(write=False)
        tab = np.array(self.table, dtype=np.int64)
        tab.setflags(write=False)
        inv = np.array(self.inverse, dtype=np.int64)
        inv.setflags(write=False)
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "table", tab)
        object.__setattr__(self, "inverse", inv)
        object.__setattr__(self, "dim", els.shape[1])

    @property
    def order(self):
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @classmethod
    def from_elements(cls, elements, tol=DEFAULT.dedup_tol):
        """Build the table of an already closed list of matrices."""
        els = [np.asarray(m, dtype=float) for m in elements]
        if not els:
            raise GroupError("a group needs at least one element")
        n = els[0].shape[0]
        index = _MatrixIndex(tol)
        for m in els:
            if index.find(m) >= 0:
                raise GroupError("duplicate group element")
            index.add(m)
        k = len(els)
        table = np.empty((k, k), dtype=np.int64)
        for i, a in enumerate(els):
            for j, b in enumerate(els):
                idx = index.find(a @ b)
                if idx < 0:
                    raise GroupError(f"product of elements {i} and {j} leaves the set")
                table[i, j] = idx
        ident = index.find(np.eye(n))
        if ident < 0:
            raise GroupError("identity matrix missing")
        inverse = np.array([int(np.nonzero(table[i] == ident)[0][0]) for i in range(k)])
        has_minus = index.find(-np.eye(n)) >= 0
        return cls(np.array(els), table, int(ident), inverse, bool(has_minus))

    def index_of(self, m, tol=DEFAULT.dedup_tol):
        """Index of the element equal to ``m`` within ``tol``, or -1."""
        d = np.max(np.abs(self.elements - np.asarray(m)[None]), axis=(1, 2))
        j = int(np.argmin(d))
        return j if d[j] <= tol else -1

    def distance(self, m):
        """Frobenius distance from ``m`` to the nearest element."""
        return float(np.min(np.linalg.norm(self.elements - np.asarray(m)[None], axis=(1, 2))))

    def to_dict(self):
        return {"order": self.order, "dim": self.dim,
                "elements": [e.tolist() for e in self.elements],
                "table": self.table.tolist(), "identity": self.identity,
                "inverse": self.inverse.tolist(),
                "has_minus_identity": self.has_minus_identity}

    @classmethod
    def from_dict(cls, d):
        return cls.from_elements(d["elements"])


def group_closure(generators, cap=DEFAULT.closure_cap, tol=DEFAULT.dedup_tol):
    """Close a list of invertible matrices under multiplication.

    Breadth-first right multiplication by the generators (the orbit form
    of Dimino's algorithm), de-duplicating at ``tol``.

    Raises
    ------
    GroupError
        If more than ``cap`` distinct elements appear (the group is
        likely infinite).
    """
    gens = [np.asarray(g, dtype=float) for g in generators]
    if not gens:
        raise ArgumentError("need at least one generator")
    n = gens[0].shape[0]
    for g in gens:
        if g.shape != (n, n):
            raise ArgumentError("generators must be square matrices of one size")
        s = np.linalg.svd(g, compute_uv=False)
        if s[-1] <= DEFAULT.rcond_min * s[0]:
            raise ArgumentError("generator is not invertible")
    index = _MatrixIndex(tol)
    index.add(np.eye(n))
    frontier = [np.eye(n)]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                p = a @ g
                if index.find_fast(p) >= 0:
                    continue
                if len(index.items) < 2000 and index.find(p) >= 0:
                    continue
                index.add(p)
                nxt.append(p)
                if len(index.items) > cap:
                    raise GroupError(f"closure exceeded {cap} elements; group is likely infinite")
        frontier = nxt
    return FiniteMatrixGroup.from_elements(index.items, tol)


# ------------------------------------------------------ abstract tables

def element_orders(table, identity=None):
    table = np.asarray(table)
    if identity is None:
        identity = _identity_of(table)
    orders = []
    for g in range(len(table)):
        k, x = 1, g
        while x != identity:
            x = table[x, g]
            k += 1
            if k > len(table):
                raise GroupError("table is not a group (element of infinite order)")
        orders.append(k)
    return orders


def _identity_of(table):
    n = len(table)
    for e in range(n):
        if np.array_equal(table[e], np.arange(n)):
            return e
    raise GroupError("table has no identity")


def _generated(table, gens, identity):
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = int(table[x, s])
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def groups_isomorphic(a, b):
    """Decide whether two multiplication tables define isomorphic groups.

    Backtracking over images of a small generating set, pruned by element
    orders.  Intended for orders up to 64.

    Returns
    -------
    bool
        False for tables of different sizes.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape != b.shape:
        return False
    n = len(a)
    if n > 64:
        raise ArgumentError("isomorphism search is limited to order 64")
    ea, eb = _identity_of(a), _identity_of(b)
    oa, ob = element_orders(a, ea), element_orders(b, eb)
    if sorted(oa) != sorted(ob):
        return False
    # greedy generating set of a, largest orders first
    gens = []
    span = {ea}
    for g in sorted(range(n), key=lambda g: -oa[g]):
        if g not in span:
            gens.append(g)
            span = _generated(a, gens, ea)
        if len(span) == n:
            break

    def extend(images):
        phi = {ea: eb}
        frontier = [ea]
        while frontier:
            nxt = []
            for x in frontier:
                for s, t in zip(gens, images):
                    y, z = int(a[x, s]), int(b[phi[x], t])
                    if y in phi:
                        if phi[y] != z:
                            return None
                    else:
                        phi[y] = z
                        nxt.append(y)
            frontier = nxt
        if len(set(phi.values())) != n:
            return None
        for x in range(n):
            px = phi[x]
            for y in range(n):
                if phi[int(a[x, y])] != b[px, phi[y]]:
                    return None
        return phi

    def search(images):
        if len(images) == len(gens):
            return extend(images) is not None
        g = gens[len(images)]
        for t in range(n):
            if ob[t] == oa[g] and search(images + [t]):
                return True
        return False

    return search([])
