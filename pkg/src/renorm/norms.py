"""Evaluable norms on R^n and generic probes for them.

Every norm is an immutable object with a fixed dimension.  Besides the
value it exposes a subgradient (a dual vector attaining the norm) and the
support function of its unit ball, which the pimple solver uses to build
dual certificates.
"""
from dataclasses import dataclass, field
import itertools

import numpy as np
from scipy import optimize

from .config import DEFAULT
from .errors import ArgumentError, OracleError, SpecError


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


def _check_vec(x, dim):
    x = np.asarray(x, dtype=float)
    if x.shape != (dim,):
        raise ArgumentError(f"expected a vector of dimension {dim}, got shape {x.shape}")
    return x


def _check_batch(X, dim):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != dim:
        raise ArgumentError(f"expected rows of dimension {dim}, got shape {X.shape}")
    return X


class Norm:
    """Common interface of all norm kinds.

    Subclasses implement ``eval_many`` and usually ``grad_many`` and
    ``dual``; the defaults below are generic numerical fallbacks.
    """

    kind = "abstract"
    dim: int

    def __call__(self, x):
        x = _check_vec(x, self.dim)
        return float(self.eval_many(x[None, :])[0])

    def eval_many(self, X):
        raise NotImplementedError

    def grad(self, x):
        """Subgradient at ``x``: a vector u with dual(u) = 1 and <u,x> = N(x)."""
        x = _check_vec(x, self.dim)
        return self.grad_many(x[None, :])[0]

    def grad_many(self, X):
        X = _check_batch(X, self.dim)
        out = np.zeros_like(X)
        h = 1e-7
        for i, x in enumerate(X):
            nx = self(x)
            if nx == 0.0:
                continue
            for j in range(self.dim):
                e = np.zeros(self.dim)
                e[j] = h * max(1.0, abs(x[j]))
                out[i, j] = (self(x + e) - self(x - e)) / (2 * e[j])
        return out

    def dual(self, u):
        """Support function of the unit ball, h(u) = sup{<u,x> : N(x) <= 1}."""
        u = _check_vec(u, self.dim)
        if not np.any(u):
            return 0.0

        def neg_ratio(x):
            nx = self(x)
            return -(u @ x) / nx if nx > 0 else 0.0

        best = 0.0
        starts = [u, self.grad(u)] + list(np.eye(self.dim))
        for x0 in starts:
            if not np.any(x0):
                continue
            res = optimize.minimize(neg_ratio, x0, method="Nelder-Mead",
                                    options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
            best = max(best, -res.fun)
        return float(best)

    def dual_many(self, U):
        """Row-wise :meth:`dual`."""
        U = _check_batch(U, self.dim)
        return np.array([self.dual(u) for u in U])

    def structured_points(self):
        """Distinguished points (e.g. pimple tips) used by isometry checks."""
        return np.zeros((0, self.dim))

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Euclidean(Norm):
    """Hilbertian norm sqrt(x^T G x) for a positive definite Gram matrix."""

    gram: np.ndarray
    dim: int = field(init=False)
    kind = "euclidean"

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.gram, dtype=float))
        if g.shape[0] != g.shape[1] or not np.allclose(g, g.T, atol=1e-12):
            raise SpecError("gram matrix must be square and symmetric")
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError as exc:
            raise SpecError("gram matrix must be positive definite") from exc
        object.__setattr__(self, "gram", _frozen(g))
        object.__setattr__(self, "dim", g.shape[0])
        object.__setattr__(self, "_ginv", _frozen(np.linalg.inv(g)))

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n))

    def eval_many(self, X):
        X = _check_batch(X, self.dim)
        q = np.einsum("ij,jk,ik->i", X, self.gram, X)
        return np.sqrt(np.maximum(q, 0.0))

    def grad_many(self, X):
        X = _check_batch(X, self.dim)
        n = self.eval_many(X)
        gx = X @ self.gram
        out = np.zeros_like(X)
        nz = n > 0
        out[nz] = gx[nz] / n[nz, None]
        return out

    def dual(self, u):
        u = _check_vec(u, self.dim)
        return float(np.sqrt(max(u @ self._ginv @ u, 0.0)))

    def dual_many(self, U):
        U = _check_batch(U, self.dim)
        return np.sqrt(np.maximum(np.einsum("ij,jk,ik->i", U, self._ginv, U), 0.0))

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim, "gram": self.gram.tolist()}


@dataclass(frozen=True, eq=False)
class WeightedLp(Norm):
    """(sum_i w_i |x_i|^p)^(1/p); p = inf gives max_i w_i |x_i|."""

    p: float
    weights: np.ndarray
    dim: int = field(init=False)
    kind = "weighted-lp"

    def __post_init__(self):
        p = float(self.p)
        if not p >= 1.0:
            raise SpecError(f"p must be >= 1, got {p}")
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if w.ndim != 1 or np.any(w <= 0):
            raise SpecError("weights must be a positive vector")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "dim", w.size)

    @classmethod
    def lp(cls, p, n):
        return cls(p, np.ones(n))

    def eval_many(self, X):
        X = _check_batch(X, self.dim)
        A = np.abs(X)
        if np.isinf(self.p):
            return np.max(A * self.weights, axis=1)
        if self.p == 1.0:
            return A @ self.weights
        # scale to avoid overflow in the p-th power
        s = np.max(A, axis=1)
        out = np.zeros(X.shape[0])
        nz = s > 0
        R = A[nz] / s[nz, None]
        out[nz] = s[nz] * ((R ** self.p) @ self.weights) ** (1.0 / self.p)
        return out

    def grad_many(self, X):
        X = _check_batch(X, self.dim)
        n = self.eval_many(X)
        out = np.zeros_like(X)
        nz = n > 0
        if np.isinf(self.p):
            idx = np.argmax(np.abs(X) * self.weights, axis=1)
            rows = np.nonzero(nz)[0]
            out[rows, idx[rows]] = self.weights[idx[rows]] * np.sign(X[rows, idx[rows]])
            return out
        if self.p == 1.0:
            out[nz] = self.weights * np.sign(X[nz])
            return out
        R = X[nz] / n[nz, None]
        out[nz] = self.weights * np.sign(R) * np.abs(R) ** (self.p - 1.0)
        return out

    def dual(self, u):
        u = np.abs(_check_vec(u, self.dim))
        w = self.weights
        if np.isinf(self.p):
            return float(np.sum(u / w))
        if self.p == 1.0:
            return float(np.max(u / w))
        q = self.p / (self.p - 1.0)
        s = np.max(u)
        if s == 0:
            return 0.0
        return float(s * np.sum(w ** (1.0 - q) * (u / s) ** q) ** (1.0 / q))

    def dual_many(self, U):
        A = np.abs(_check_batch(U, self.dim))
        w = self.weights
        if np.isinf(self.p):
            return A @ (1.0 / w)
        if self.p == 1.0:
            return np.max(A / w, axis=1)
        q = self.p / (self.p - 1.0)
        s = np.max(A, axis=1)
        out = np.zeros(len(A))
        nz = s > 0
        out[nz] = s[nz] * (((A[nz] / s[nz, None]) ** q) @ w ** (1.0 - q)) ** (1.0 / q)
        return out

    def to_dict(self):
        p = "inf" if np.isinf(self.p) else self.p
        return {"kind": self.kind, "dim": self.dim, "p": p, "weights": self.weights.tolist()}


@dataclass(frozen=True, eq=False)
class Day(Norm):
    """Finite Day norm sup over index tuples of (sum_i x_{n_i}^2 base^i)^(1/2).

    The supremum is attained by listing all coordinates by decreasing
    absolute value, so evaluation is a sort.
    """

    dim: int
    base: float = DEFAULT.day_base
    kind = "day"

    def __post_init__(self):
        if int(self.dim) < 1:
            raise SpecError("dimension must be positive")
        if not 0.0 < self.base < 1.0:
            raise SpecError("weight base must lie in (0, 1)")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "_w", _frozen(self.base ** np.arange(1, self.dim + 1)))

    def eval_many(self, X):
        X = _check_batch(X, self.dim)
        S = -np.sort(-np.abs(X), axis=1)
        return np.sqrt((S ** 2) @ self._w)

    def grad_many(self, X):
        X = _check_batch(X, self.dim)
        n = self.eval_many(X)
        order = np.argsort(-np.abs(X), axis=1, kind="stable")
        W = np.empty_like(X)
        np.put_along_axis(W, order, np.broadcast_to(self._w, X.shape), axis=1)
        out = np.zeros_like(X)
        nz = n > 0
        out[nz] = W[nz] * X[nz] / n[nz, None]
        return out

    def dual(self, u):
        # ball = {x : sorted |x| weighted-euclidean <= 1}; the maximiser is
        # aligned with u and its magnitudes form the weighted isotonic
        # projection of |u|*/w onto decreasing sequences.
        u = _check_vec(u, self.dim)
        a = -np.sort(-np.abs(u))
        if not np.any(a):
            return 0.0
        fit = optimize.isotonic_regression(a / self._w, weights=self._w, increasing=False)
        x = np.maximum(fit.x, 0.0)
        return float(np.sqrt(np.sum(self._w * x ** 2)))

    def brute_force(self, x):
        """Supremum over all tuples of distinct indices, by enumeration."""
        x = _check_vec(x, self.dim)
        best = 0.0
        for k in range(1, self.dim + 1):
            for tup in itertools.permutations(range(self.dim), k):
                s = sum(x[i] ** 2 * self.base ** (r + 1) for r, i in enumerate(tup))
                best = max(best, s)
        return float(np.sqrt(best))

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim, "base": self.base}


@dataclass(frozen=True, eq=False)
class MaxSeminorms(Norm):
    """max_j |M_j x|_2 over a list of rectangular matrices."""

    mats: tuple
    dim: int = field(init=False)
    kind = "max-seminorms"

    def __post_init__(self):
        mats = tuple(_frozen(np.atleast_2d(m)) for m in self.mats)
        if not mats:
            raise SpecError("need at least one seminorm")
        n = mats[0].shape[1]
        if any(m.shape[1] != n for m in mats):
            raise SpecError("all seminorm matrices must have the same column count")
        if np.linalg.matrix_rank(np.vstack(mats)) < n:
            raise SpecError("seminorms do not separate points")
        object.__setattr__(self, "mats", mats)
        object.__setattr__(self, "dim", n)

    def _parts(self, X):
        return np.stack([np.linalg.norm(X @ m.T, axis=1) for m in self.mats], axis=1)

    def eval_many(self, X):
        X = _check_batch(X, self.dim)
        return np.max(self._parts(X), axis=1)

    def grad_many(self, X):
        X = _check_batch(X, self.dim)
        P = self._parts(X)
        j = np.argmax(P, axis=1)
        out = np.zeros_like(X)
        for i, (x, jj) in enumerate(zip(X, j)):
            if P[i, jj] > 0:
                m = self.mats[jj]
                out[i] = m.T @ (m @ x) / P[i, jj]
        return out

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim, "mats": [m.tolist() for m in self.mats]}


@dataclass(frozen=True, eq=False)
class GAverage(Norm):
    """(sum_{g in G} base(g x)^2)^(1/2); invariant under every element of G."""

    base: Norm
    group: object
    dim: int = field(init=False)
    kind = "g-average"

    def __post_init__(self):
        els = np.asarray(self.group.elements)
        if els.shape[1:] != (self.base.dim, self.base.dim):
            raise SpecError("group matrices do not match the base dimension")
        object.__setattr__(self, "dim", self.base.dim)
        object.__setattr__(self, "_els", _frozen(els))

    def eval_many(self, X):
        X = _check_batch(X, self.dim)
        tot = np.zeros(X.shape[0])
        for g in self._els:
            tot += self.base.eval_many(X @ g.T) ** 2
        return np.sqrt(tot)

    def grad_many(self, X):
        X = _check_batch(X, self.dim)
        n = self.eval_many(X)
        acc = np.zeros_like(X)
        for g in self._els:
            Y = X @ g.T
            acc += self.base.eval_many(Y)[:, None] * (self.base.grad_many(Y) @ g)
        out = np.zeros_like(X)
        nz = n > 0
        out[nz] = acc[nz] / n[nz, None]
        return out

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim, "base": self.base.to_dict(),
                "group": [g.tolist() for g in self._els]}


@dataclass(frozen=True, eq=False)
class SumSquares(Norm):
    """(sum_i N_i(x)^2)^(1/2) for norms N_i on the same space."""

    parts: tuple
    dim: int = field(init=False)
    kind = "sum-squares"

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts or len({p.dim for p in parts}) != 1:
            raise SpecError("sum-squares needs norms of one common dimension")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "dim", parts[0].dim)

    def eval_many(self, X):
        X = _check_batch(X, self.dim)
        return np.sqrt(sum(p.eval_many(X) ** 2 for p in self.parts))

    def grad_many(self, X):
        X = _check_batch(X, self.dim)
        n = self.eval_many(X)
        acc = sum(p.eval_many(X)[:, None] * p.grad_many(X) for p in self.parts)
        out = np.zeros_like(X)
        nz = n > 0
        out[nz] = acc[nz] / n[nz, None]
        return out

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim, "parts": [p.to_dict() for p in self.parts]}


@dataclass(frozen=True, eq=False)
class L2Sum(Norm):
    """Direct sum (x_1, ..., x_r) -> (sum_i N_i(x_i)^2)^(1/2) over coordinate blocks."""

    parts: tuple
    dim: int = field(init=False)
    kind = "l2-sum"

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise SpecError("l2-sum needs at least one block")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "dim", sum(p.dim for p in parts))
        object.__setattr__(self, "_cuts", tuple(np.cumsum([0] + [p.dim for p in parts])))

    def _blocks(self, X):
        c = self._cuts
        return [X[:, c[i]:c[i + 1]] for i in range(len(self.parts))]

    def eval_many(self, X):
        X = _check_batch(X, self.dim)
        return np.sqrt(sum(p.eval_many(B) ** 2 for p, B in zip(self.parts, self._blocks(X))))

    def grad_many(self, X):
        X = _check_batch(X, self.dim)
        n = self.eval_many(X)
        pieces = [p.eval_many(B)[:, None] * p.grad_many(B) for p, B in zip(self.parts, self._blocks(X))]
        acc = np.hstack(pieces)
        out = np.zeros_like(X)
        nz = n > 0
        out[nz] = acc[nz] / n[nz, None]
        return out

    def dual(self, u):
        u = _check_vec(u, self.dim)
        blocks = self._blocks(u[None, :])
        return float(np.sqrt(sum(p.dual(b[0]) ** 2 for p, b in zip(self.parts, blocks))))

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim, "parts": [p.to_dict() for p in self.parts]}


@dataclass(frozen=True, eq=False)
class ScaledSum(Norm):
    """sum_i c_i N_i(x) with positive coefficients."""

    parts: tuple
    coefs: tuple
    dim: int = field(init=False)
    kind = "scaled-sum"

    def __post_init__(self):
        parts = tuple(self.parts)
        coefs = tuple(float(c) for c in self.coefs)
        if not parts or len(parts) != len(coefs) or min(coefs) <= 0:
            raise SpecError("scaled-sum needs matching parts and positive coefficients")
        if len({p.dim for p in parts}) != 1:
            raise SpecError("scaled-sum parts must share a dimension")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "coefs", coefs)
        object.__setattr__(self, "dim", parts[0].dim)

    def eval_many(self, X):
        X = _check_batch(X, self.dim)
        return sum(c * p.eval_many(X) for c, p in zip(self.coefs, self.parts))

    def grad_many(self, X):
        X = _check_batch(X, self.dim)
        return sum(c * p.grad_many(X) for c, p in zip(self.coefs, self.parts))

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim, "coefs": list(self.coefs),
                "parts": [p.to_dict() for p in self.parts]}


def eval_norm(norm, x):
    """Evaluate ``norm`` at ``x``; dimension mismatch raises ArgumentError."""
    return norm(x)


# ---------------------------------------------------------------- probes

@dataclass(frozen=True)
class AxiomReport:
    """Largest relative violations of the norm axioms over a sample."""

    samples: int
    homogeneity: float
    triangle: float
    symmetry: float
    definiteness: float

    @property
    def worst(self):
        return max(self.homogeneity, self.triangle, self.symmetry, self.definiteness)

    def passed(self, tol=DEFAULT.axiom_tol):
        return self.worst <= tol


def check_norm_axioms(norm, samples, seed=0):
    """Probe homogeneity, triangle inequality, symmetry and definiteness.

    Parameters
    ----------
    norm : callable with attribute ``dim``
        Anything evaluable on R^dim; need not actually be a norm.
    samples : int
        Number of random vectors (and triples) drawn.
    seed : int
        Seed for the generator, so reports are reproducible.

    Returns
    -------
    AxiomReport
        Violations are relative to the size of the values involved.
    """
    if samples < 1:
        raise ArgumentError("samples must be >= 1")
    n = norm.dim
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((samples, n))
    Y = rng.standard_normal((samples, n))
    t = rng.standard_normal(samples) * 3.0
    ev = _batch_eval(norm, X)
    scale = np.maximum(np.abs(ev), 1e-300)

    hom = np.abs(_batch_eval(norm, X * t[:, None]) - np.abs(t) * ev) / (np.abs(t) * scale)
    sym = np.abs(_batch_eval(norm, -X) - ev) / scale
    ey = _batch_eval(norm, Y)
    exy = _batch_eval(norm, X + Y)
    tri = np.maximum(exy - ev - ey, 0.0) / np.maximum(np.abs(ev) + np.abs(ey), 1e-300)

    basis = np.vstack([np.eye(n), -np.eye(n)])
    eb = _batch_eval(norm, basis)
    zero = _batch_eval(norm, np.zeros((1, n)))[0]
    # a norm is positive on nonzero vectors and vanishes at 0
    definite = float(np.any(eb <= 0.0)) + abs(zero) + float(np.max(np.maximum(-ev, 0.0)))
    return AxiomReport(samples, float(np.max(hom)), float(np.max(tri)), float(np.max(sym)), definite)


def _batch_eval(norm, X):
    if hasattr(norm, "eval_many"):
        return np.asarray(norm.eval_many(X), dtype=float)
    return np.array([norm(x) for x in X], dtype=float)


def lur_modulus(norm, x, eps, grid, seed=0):
    """Estimate lambda(x, eps) = sup{N((x+y)/2) : N(y) = 1, N(x-y) >= eps}.

    The search evaluates ``grid`` directions (evenly spaced angles in the
    plane, seeded random directions otherwise) and refines the best
    feasible candidates by hill-climbing with shrinking steps.

    Returns
    -------
    float in [0, 1]
        Values near 1 mean the norm is not locally uniformly rotund at x.
    """
    if int(grid) < 1:
        raise ArgumentError("grid must be a positive count")
    if not 0.0 < eps <= 2.0:
        raise ArgumentError("eps must lie in (0, 2]")
    x = _check_vec(x, norm.dim)
    if abs(norm(x) - 1.0) > 1e-8:
        raise ArgumentError("x must be a unit vector of the norm")
    n = norm.dim
    rng = np.random.default_rng(seed)
    if n == 2:
        th = np.linspace(0.0, 2 * np.pi, int(grid), endpoint=False)
        U = np.column_stack([np.cos(th), np.sin(th)])
    else:
        U = rng.standard_normal((int(grid), n))
        U = np.vstack([U, np.eye(n), -np.eye(n)])
    U = np.vstack([U, -x[None, :]])
    Y = U / norm.eval_many(U)[:, None]

    def score(Y):
        far = norm.eval_many(x[None, :] - Y) >= eps
        mid = norm.eval_many((x[None, :] + Y) / 2.0)
        return np.where(far, mid, -np.inf)

    s = score(Y)
    best_val = float(np.max(s))
    # refine the few best feasible starts
    order = np.argsort(-s)[: min(8, len(s))]
    for i in order:
        if not np.isfinite(s[i]):
            continue
        y = Y[i].copy()
        v = s[i]
        step = 0.5 if n > 2 else 2 * np.pi / grid
        while step > 1e-9:
            improved = False
            P = y[None, :] + step * np.vstack([np.eye(n), -np.eye(n), rng.standard_normal((2 * n, n))])
            P = P / norm.eval_many(P)[:, None]
            sp = score(P)
            j = int(np.argmax(sp))
            if sp[j] > v:
                y, v = P[j], sp[j]
                improved = True
            if not improved:
                step *= 0.5
        best_val = max(best_val, float(v))
    return float(min(max(best_val, 0.0), 1.0))


def gauge_from_membership(member, x, tol=1e-10, max_scale=1e12):
    """Minkowski gauge of a balanced convex body given by a membership oracle.

    Parameters
    ----------
    member : callable
        ``member(z) -> bool``, true iff z lies in the body.
    x : array_like
        Nonzero query point.
    tol : float
        Bisection stops when the bracket is narrower than this.

    Returns
    -------
    float
        s* = inf{s > 0 : x / s in body}.

    Raises
    ------
    OracleError
        When the oracle contradicts monotonicity along the ray.
    """
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        raise ArgumentError("x must be nonzero")
    seen = []

    def ask(s):
        ans = bool(member(x / s))
        for s0, a0 in seen:
            if (s0 <= s and a0 and not ans) or (s <= s0 and ans and not a0):
                inside, outside = (s, s0) if ans else (s0, s)
                raise OracleError(f"non-monotone oracle: x/s inside at s={inside:.6g} "
                                  f"but outside at s={outside:.6g}")
        seen.append((s, ans))
        return ans

    hi = 1.0
    while not ask(hi):
        hi *= 2.0
        if hi > max_scale:
            raise OracleError("body appears unbounded along x")
    lo = hi / 2.0
    while ask(lo):
        lo /= 2.0
        if lo < 1.0 / max_scale:
            raise OracleError("body appears to contain the whole ray")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ask(mid):
            hi = mid
        else:
            lo = mid
    # spot checks away from the bracket guard against non-convex oracles
    for f in (1.5, 2.0, 4.0, 8.0):
        ask(hi * f)
    for f in (0.75, 0.5, 0.25):
        ask(lo * f)
    return 0.5 * (lo + hi)
