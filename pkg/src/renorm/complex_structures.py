"""Square roots of -Id in isometry groups, canonical forms and commuting pairs."""
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError
from .norms import L2Sum


def find_square_roots_of_minus_id(group, tol=1e-9):
    """Elements J of the group with max |J^2 + Id| <= tol, in group order."""
    n = group.dim
    return [np.asarray(g) for g in group.elements
            if np.max(np.abs(g @ g + np.eye(n))) <= tol]


def conjugacy_classes(group, subset, tol=1e-9):
    """Partition ``subset`` into orbits under J -> g J g^-1, g in the group.

    Returns
    -------
    list of list of int
        Indices into ``subset``; classes ordered by their first member.
    """
    subset = [np.asarray(s) for s in subset]
    inv = [group.elements[i] for i in group.inverse]
    label = [-1] * len(subset)
    classes = []
    for i, J in enumerate(subset):
        if label[i] >= 0:
            continue
        conj = [g @ J @ gi for g, gi in zip(group.elements, inv)]
        cls = []
        for j, K in enumerate(subset):
            if label[j] < 0 and any(np.max(np.abs(K - C)) <= tol for C in conj):
                label[j] = len(classes)
                cls.append(j)
        classes.append(cls)
    return classes


def circle_is_isometric(norm, J, angles=64, samples=100, seed=0, tol=1e-9):
    """Whether every cos t Id + sin t J preserves ``norm`` on samples.

    Returns
    -------
    (bool, float)
        Verdict and the largest relative discrepancy seen.
    """
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((samples, norm.dim))
    nx = norm.eval_many(X)
    worst = 0.0
    I = np.eye(norm.dim)
    for t in np.linspace(0.0, 2 * np.pi, angles, endpoint=False):
        R = np.cos(t) * I + np.sin(t) * J
        worst = max(worst, float(np.max(np.abs(norm.eval_many(X @ R.T) - nx) / nx)))
    return worst <= tol, worst


def l2_canonical_form(A, tol=1e-9):
    """Orthonormal basis U with A u_{2m-1} = u_{2m} and A u_{2m} = -u_{2m-1}.

    A plane [x, Ax] is split off at each step and the procedure recurses
    on its orthogonal complement, which A preserves because A^T = -A.
    The next x is the standard basis vector with the largest residual
    outside the planes found so far.

    Raises
    ------
    ArgumentError
        Odd dimension, A not orthogonal, or A^2 != -Id.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or n % 2:
        raise ArgumentError("A must be a square matrix of even size")
    if np.max(np.abs(A.T @ A - np.eye(n))) > tol:
        raise ArgumentError("A is not orthogonal")
    if np.max(np.abs(A @ A + np.eye(n))) > tol:
        raise ArgumentError("A^2 is not -Id")
    U = np.zeros((n, 0))
    while U.shape[1] < n:
        R = np.eye(n) - U @ (U.T @ np.eye(n))
        k = int(np.argmax(np.linalg.norm(R, axis=0)))
        x = R[:, k]
        if np.linalg.norm(x) <= 1e-8:
            raise ArgumentError("no pivot outside the accumulated subspace")
        x /= np.linalg.norm(x)
        y = A @ x
        # re-orthogonalise against rounding drift
        y -= U @ (U.T @ y) + (x @ y) * x
        y /= np.linalg.norm(y)
        U = np.column_stack([U, x, y])
    return U


def split_basis(U):
    """Reorder (u1, u2, u3, u4, ...) to (u1, u3, ..., u2, u4, ...).

    In the reordered basis A has the block matrix [[0, -Id], [Id, 0]].
    """
    return np.column_stack([U[:, 0::2], U[:, 1::2]])


def standard_complex_structure(n):
    """Block-diagonal J with 2x2 blocks [[0, -1], [1, 0]] on R^n, n even."""
    if n % 2:
        raise ArgumentError("dimension must be even")
    return np.kron(np.eye(n // 2), np.array([[0.0, -1.0], [1.0, 0.0]]))


def canonical_residual(A, U):
    """max |U^T A U - block form| and max |U^T U - Id|."""
    n = len(A)
    J = standard_complex_structure(n)
    return float(np.max(np.abs(U.T @ A @ U - J))), float(np.max(np.abs(U.T @ U - np.eye(n))))


@dataclass(frozen=True)
class KaltonProjections:
    """P = (Id + AB)/2, Q = (Id - AB)/2 and the residuals of their identities."""

    P: np.ndarray
    Q: np.ndarray
    residuals: dict

    @property
    def worst(self):
        return max(self.residuals.values())


def kalton_projections(A, B, tol=1e-9):
    """Projections attached to commuting complex structures A and B.

    On the range of P the two structures are opposite (A = -B) and on the
    range of Q they agree (A = B).

    Raises
    ------
    ArgumentError
        If A^2 or B^2 is not -Id, or A and B do not commute.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    n = len(A)
    I = np.eye(n)
    if np.max(np.abs(A @ A + I)) > tol or np.max(np.abs(B @ B + I)) > tol:
        raise ArgumentError("A and B must square to -Id")
    if np.max(np.abs(A @ B - B @ A)) > tol:
        raise ArgumentError("A and B do not commute")
    AB = A @ B
    P = (I + AB) / 2
    Q = (I - AB) / 2
    m = lambda M: float(np.max(np.abs(M)))
    res = {
        "P_idempotent": m(P @ P - P),
        "Q_idempotent": m(Q @ Q - Q),
        "P_plus_Q": m(P + Q - I),
        "PQ_zero": m(P @ Q),
        "PA_commute": m(P @ A - A @ P),
        "PB_commute": m(P @ B - B @ P),
        "A_minus_B_on_P": m((A + B) @ P),
        "A_equals_B_on_Q": m((A - B) @ Q),
    }
    return KaltonProjections(P, Q, res)


def complexify_norm(base):
    """l2 pair norm on X + X with J(y, z) = (-z, y) and conjugation c(y, z) = (y, -z)."""
    n = base.dim
    I, Z = np.eye(n), np.zeros((n, n))
    J = np.block([[Z, -I], [I, Z]])
    c = np.block([[I, Z], [Z, -I]])
    return L2Sum((base, base)), J, c


@dataclass(frozen=True)
class ComplexStructureReport:
    """Roots of -Id in a group, their conjugacy classes and canonical bases."""

    roots: list
    classes: list
    bases: list
    circle_isometric: list

    def to_dict(self):
        return {"count": len(self.roots), "roots": [r.tolist() for r in self.roots],
                "classes": self.classes,
                "bases": [None if b is None else b.tolist() for b in self.bases],
                "circle_isometric": self.circle_isometric}


def complex_structure_report(group, norm=None):
    """Find roots of -Id in ``group`` and classify them up to conjugacy in it.

    Canonical bases are computed for orthogonal roots; if ``norm`` is given
    the report records whether each rotation circle consists of isometries.
    """
    roots = find_square_roots_of_minus_id(group)
    classes = conjugacy_classes(group, roots)
    bases = []
    for J in roots:
        try:
            bases.append(l2_canonical_form(J))
        except ArgumentError:
            bases.append(None)
    circ = [circle_is_isometric(norm, J)[0] if norm is not None else None for J in roots]
    return ComplexStructureReport(roots, classes, bases, circ)
