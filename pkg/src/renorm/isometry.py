"""Checking, enumerating and hunting linear isometries of a norm."""
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .config import DEFAULT
from .errors import ArgumentError
from .matrix_groups import (FiniteMatrixGroup, group_closure, groups_isomorphic,  # noqa: F401
                            element_orders)
from .norms import Euclidean
from .pimple import pimple_norm, tips


@dataclass(frozen=True)
class IsometryCheck:
    """Result of :func:`verify_isometry`; truthy when T passed."""

    ok: bool
    worst: float
    witness: np.ndarray

    def __bool__(self):
        return self.ok


def _sphere_samples(n, count, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((count, n))
    X /= np.linalg.norm(X, axis=1)[:, None]
    return np.vstack([np.eye(n), -np.eye(n), X])


def verify_isometry(T, norm, samples=DEFAULT.isometry_samples, tol=DEFAULT.isometry_tol, seed=0):
    """Check |N(Tx) - N(x)| <= tol N(x) on sample and structured points.

    The samples are +-basis vectors followed by seeded uniform directions;
    structured points (such as pimple tips) are always included.

    Returns
    -------
    IsometryCheck
        ``witness`` is the point with the largest relative discrepancy.

    Raises
    ------
    ArgumentError
        If T is not square of the norm's dimension or is numerically singular.
    """
    T = np.asarray(T, dtype=float)
    n = norm.dim
    if T.shape != (n, n):
        raise ArgumentError(f"expected a {n}x{n} matrix, got shape {T.shape}")
    s = np.linalg.svd(T, compute_uv=False)
    if s[-1] <= DEFAULT.rcond_min * max(s[0], 1e-300):
        raise ArgumentError("map is not invertible")
    X = np.vstack([_sphere_samples(n, samples, seed), norm.structured_points()])
    nx = norm.eval_many(X)
    rel = np.abs(norm.eval_many(X @ T.T) - nx) / nx
    i = int(np.argmax(rel))
    return IsometryCheck(bool(rel[i] <= tol), float(rel[i]), X[i].copy())


# ---------------------------------------------------------- candidates

@dataclass(frozen=True)
class TipClasses:
    """Tips grouped by an intrinsic invariant: their sorted distance profile."""

    tips: np.ndarray
    labels: np.ndarray
    distances: np.ndarray

    @property
    def sizes(self):
        return np.bincount(self.labels).tolist()


def tip_classes(spec, norm=None, tol=1e-6):
    """Cluster tips whose sorted norm-distance profiles to all tips agree.

    A linear isometry permutes the tips and preserves these distances,
    so it can only send a tip to a tip of the same class.
    """
    norm = norm or pimple_norm(spec)
    P = tips(spec)
    m = len(P)
    diffs = (P[:, None, :] - P[None, :, :]).reshape(-1, spec.dim)
    D = norm.eval_many(diffs).reshape(m, m)
    prof = np.sort(D, axis=1)
    labels = -np.ones(m, dtype=int)
    reps = []
    for i in range(m):
        for c, r in enumerate(reps):
            if np.max(np.abs(prof[i] - prof[r])) <= tol:
                labels[i] = c
                break
        else:
            labels[i] = len(reps)
            reps.append(i)
    return TipClasses(P, labels, D)


def _match_set(Q, P, tol):
    """Index map sending each row of Q to a row of P within tol, or None."""
    idx = []
    for q in Q:
        d = np.max(np.abs(P - q[None, :]), axis=1)
        j = int(np.argmin(d))
        if d[j] > tol:
            return None
        idx.append(j)
    return idx if len(set(idx)) == len(idx) else None


def enumerate_tip_candidates(spec, norm=None, config=DEFAULT, stats=None):
    """Linear isometries of the pimple norm found by matching tips.

    Any isometry maps the set of isolated extreme points (the tips) onto
    itself.  The search assigns images to a spanning set of tips, pruned
    by tip classes and pairwise distances, solves for the linear map,
    keeps it if it permutes all tips within 1e-7 and passes
    :func:`verify_isometry`.

    When the tips span a hyperplane only and the base is euclidean, the
    map is completed by sending the unit normal to plus or minus itself.

    Parameters
    ----------
    stats : dict, optional
        Receives counts of assignments tried and maps kept.

    Returns
    -------
    list of ndarray

    Raises
    ------
    ArgumentError
        If the tips do not span and no completion rule applies.
    """
    norm = norm or pimple_norm(spec)
    n = spec.dim
    cls = tip_classes(spec, norm)
    P, lab, D = cls.tips, cls.labels, cls.distances
    # greedy well-conditioned spanning subset
    basis = []
    for i in range(len(P)):
        trial = basis + [i]
        if np.linalg.matrix_rank(P[trial], tol=config.rank_tol) == len(trial):
            basis = trial
        if len(basis) == n:
            break
    normals = []
    if len(basis) < n:
        if not (isinstance(spec.base, Euclidean) and len(basis) == n - 1):
            raise ArgumentError("tips do not span the space")
        G = spec.base.gram
        # Gram-orthogonal unit normal to the tip span
        _, _, vt = np.linalg.svd(P[basis] @ G)
        v = vt[-1]
        v /= np.sqrt(v @ G @ v)
        normals = [v]
    B = P[basis]
    tried = 0
    found = []

    def assign(images):
        nonlocal tried
        k = len(images)
        if k == len(basis):
            for signs in _sign_choices(len(normals)):
                tried += 1
                src = np.vstack([B] + normals) if normals else B
                dst = np.vstack([P[images]] + [s * v for s, v in zip(signs, normals)]) if normals else P[images]
                try:
                    T = np.linalg.solve(src, dst).T
                except np.linalg.LinAlgError:
                    continue
                if _match_set(P @ T.T, P, config.tip_tol) is None:
                    continue
                if not verify_isometry(T, norm, config.isometry_samples, config.isometry_tol, config.seed):
                    continue
                if not any(np.max(np.abs(T - F)) <= 1e-9 for F in found):
                    found.append(T)
            return
        i = basis[k]
        for j in range(len(P)):
            if lab[j] != lab[i] or j in images:
                continue
            if all(abs(D[j, images[t]] - D[i, basis[t]]) <= 1e-6 for t in range(k)):
                assign(images + [j])

    assign([])
    if stats is not None:
        stats.update({"tips": len(P), "classes": len(cls.sizes), "class_sizes": cls.sizes,
                      "assignments": tried, "kept": len(found)})
    return found


def _sign_choices(k):
    if k == 0:
        return [()]
    return [tuple(s) for s in np.array(np.meshgrid(*[[1, -1]] * k)).reshape(k, -1).T.tolist()]


# ------------------------------------------------------------ falsifier

@dataclass(frozen=True, eq=False)
class RotationCircle:
    """The circle group {cos t Id + sin t J} for a complex structure J."""

    J: np.ndarray

    def element(self, t):
        return np.cos(t) * np.eye(len(self.J)) + np.sin(t) * self.J

    def distance(self, T):
        """Frobenius distance from T to the circle."""
        T = np.asarray(T, dtype=float)
        J = self.J
        n = len(J)
        if np.max(np.abs(J.T @ J - np.eye(n))) <= 1e-12:
            # J antisymmetric: |T - cI - sJ|^2 = |T|^2 + n - 2(c tr T + s tr J^T T)
            a, b = np.trace(T), np.trace(J.T @ T)
            return float(np.sqrt(max(np.sum(T * T) + n - 2 * np.hypot(a, b), 0.0)))
        # f(t) = |T - cos t I - sin t J|^2 is a trigonometric quadratic:
        # grid search, then Newton on f'(t) = 0
        q = np.array([n, np.sum(J * J), np.trace(J)])
        a, b = np.trace(T), np.sum(J * T)

        def f(t):
            c, s = np.cos(t), np.sin(t)
            return np.sum(T * T) + q[0] * c * c + q[1] * s * s + 2 * q[2] * c * s - 2 * a * c - 2 * b * s

        th = np.linspace(0.0, 2 * np.pi, 720, endpoint=False)
        t = th[int(np.argmin(f(th)))]
        for _ in range(50):
            c, s = np.cos(t), np.sin(t)
            d1 = 2 * (q[1] - q[0]) * s * c + 2 * q[2] * (c * c - s * s) + 2 * a * s - 2 * b * c
            d2 = 2 * (q[1] - q[0]) * (c * c - s * s) - 8 * q[2] * s * c + 2 * a * c + 2 * b * s
            if d2 <= 0:
                break
            step = d1 / d2
            t -= step
            if abs(step) < 1e-15:
                break
        return float(np.linalg.norm(T - self.element(t)))

    def sample(self, count):
        th = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
        return [self.element(t) for t in th]


@dataclass(frozen=True)
class FalsifierReport:
    """Best discrepancy found by maps farther than ``exclusion`` from the known set."""

    starts: int
    steps: int
    best_residual: float
    best_map: np.ndarray
    best_distance: float
    exclusion: float

    def to_dict(self):
        return {"starts": self.starts, "steps": self.steps, "best_residual": self.best_residual,
                "best_distance": self.best_distance, "exclusion": self.exclusion,
                "best_map": None if self.best_map is None else self.best_map.tolist()}


def _known_distance(known, T):
    if isinstance(known, RotationCircle):
        return known.distance(T)
    return known.distance(T)


def _known_elements(known):
    if isinstance(known, RotationCircle):
        return known.sample(16)
    return list(known.elements)


def isometry_discrepancy(norm, T, X, nx, extreme=None, extreme_base=None):
    """max(RMS relative discrepancy on samples, extreme-point transport).

    The transport term max_p min_q base(T p - q) / base(p) over the
    isolated extreme points is zero for every isometry, which makes tiny
    pimples visible to the search.
    """
    rel = (norm.eval_many(X @ T.T) - nx) / nx
    r = float(np.sqrt(np.mean(rel ** 2)))
    if extreme is not None and len(extreme):
        TP = extreme @ T.T
        diff = (TP[:, None, :] - extreme[None, :, :]).reshape(-1, norm.dim)
        d = extreme_base.eval_many(diff).reshape(len(extreme), len(extreme))
        scale = extreme_base.eval_many(extreme)
        r = max(r, float(np.max(np.min(d, axis=1) / scale)))
    return r


def falsify_search(norm, known, starts=200, steps=300, samples=64, seed=0, exclusion=1e-3):
    """Multistart search for isometries outside ``known``.

    Each start is a known element perturbed additively or a random
    orthogonal matrix; Nelder-Mead minimises the discrepancy plus a
    penalty that pushes iterates out of the 2 * exclusion neighbourhood
    of the known set.  Only maps farther than ``exclusion`` count.

    Parameters
    ----------
    known : FiniteMatrixGroup or RotationCircle

    Returns
    -------
    FalsifierReport
        A large ``best_residual`` (say > 1e-4) supports the claim that
        ``known`` is the full isometry group.
    """
    if starts < 1:
        raise ArgumentError("starts must be >= 1")
    n = norm.dim
    rng = np.random.default_rng(seed)
    X = _sphere_samples(n, samples, seed + 1)
    nx = norm.eval_many(X)
    ext, ext_base = None, None
    if hasattr(norm, "spec"):
        ext, ext_base = tips(norm.spec), norm.spec.base
    els = _known_elements(known)
    best = (np.inf, None, 0.0)

    def record(T):
        nonlocal best
        dist = _known_distance(known, T)
        if dist <= exclusion:
            return
        r = isometry_discrepancy(norm, T, X, nx, ext, ext_base)
        if r < best[0]:
            best = (r, T.copy(), dist)

    def objective(v):
        T = v.reshape(n, n)
        if np.linalg.svd(T, compute_uv=False)[-1] < 1e-3:
            return 1e3
        r = isometry_discrepancy(norm, T, X, nx, ext, ext_base)
        dist = _known_distance(known, T)
        return r + 10.0 * max(0.0, 2 * exclusion - dist)

    for s in range(starts):
        if s % 2 == 0:
            q, rr = np.linalg.qr(rng.standard_normal((n, n)))
            T0 = q * np.sign(np.diag(rr))
        else:
            g = els[rng.integers(len(els))]
            T0 = g + rng.uniform(0.02, 0.5) * rng.standard_normal((n, n)) / np.sqrt(n)
        res = optimize.minimize(objective, T0.ravel(), method="Nelder-Mead",
                                options={"maxfev": steps, "xatol": 1e-10, "fatol": 1e-12,
                                         "adaptive": n * n > 4})
        record(T0)
        record(res.x.reshape(n, n))
    r, T, d = best
    return FalsifierReport(starts, steps, float(r), T, float(d), exclusion)


# --------------------------------------------------------------- report

@dataclass(frozen=True)
class IsometryGroupReport:
    """Verified isometries, their table, target comparison and falsifier statistics."""

    elements: list
    table: np.ndarray
    target_isomorphic: object
    falsifier: FalsifierReport
    tip_stats: dict = field(default_factory=dict)

    @property
    def order(self):
        return len(self.elements)

    def to_dict(self):
        return {"order": self.order, "elements": [np.asarray(e).tolist() for e in self.elements],
                "table": np.asarray(self.table).tolist(),
                "target_isomorphic": self.target_isomorphic,
                "falsifier": None if self.falsifier is None else self.falsifier.to_dict(),
                "tip_stats": self.tip_stats}


def isometry_group_report(spec, target_table=None, starts=200, steps=300, config=DEFAULT):
    """Candidates from tips, closed into a group, compared with a target table."""
    norm = pimple_norm(spec, config=config)
    stats = {}
    cands = enumerate_tip_candidates(spec, norm, config, stats)
    group = group_closure(cands, cap=config.closure_cap)
    stats["closed"] = group.order == len(cands)
    verdict = None
    if target_table is not None:
        verdict = bool(groups_isomorphic(group.table, target_table))
    fals = falsify_search(norm, group, starts, steps, seed=config.seed) if starts else None
    return IsometryGroupReport([np.asarray(e) for e in group.elements], group.table, verdict, fals, stats)
