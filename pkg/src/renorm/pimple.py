"""Pimple norms: convex hulls of a G-invariant ball and segments through orbit points.

The unit ball of the pimple norm is

    W = conv(B  u  {+- g x_k / lambda_k : g in G, k})

and its gauge is the value of

    min_t  base(y - sum_d t_d d) + sum_d lambda_{k(d)} |t_d|,

one coefficient per orbit line d = g x_k.  The dual problem maximises
<u, y> over h_W(u) <= 1 with h_W(u) = max(h_B(u), max_d |<u, d>| / lambda_d).
Every evaluation returns a primal value together with a dual lower bound
and refuses to answer when the two disagree.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .config import DEFAULT
from .errors import ArgumentError, ScheduleError, SolverError, SpecError
from .norms import Euclidean, Norm, lur_modulus


# ------------------------------------------------------------------ spec

@dataclass(frozen=True, eq=False)
class PimpleSpec:
    """Base norm, group, pimple points and their parameters.

    Parameters
    ----------
    base : Norm
        G-invariant norm.
    group : FiniteMatrixGroup
        Must contain -Id.
    points : array_like, shape (K, n)
        Unit vectors of ``base``.
    lambdas : array_like, shape (K,)
        Values in (1/2, 1); the tip of point k sits at x_k / lambda_k.
    widths, deltas, epsilons : array_like or None
        Schedule parameters b_k, delta_k, eps_k when known.
    notes : dict
        Diagnostics attached by :func:`schedule_parameters`.
    """

    base: Norm
    group: object
    points: np.ndarray
    lambdas: np.ndarray
    widths: np.ndarray = None
    deltas: np.ndarray = None
    epsilons: np.ndarray = None
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.atleast_2d(np.array(self.points, dtype=float))
        lam = np.atleast_1d(np.array(self.lambdas, dtype=float))
        n = self.base.dim
        if pts.shape[1] != n or self.group.dim != n:
            raise SpecError("points, group and base must share one dimension")
        if len(pts) == 0 or len(lam) != len(pts):
            raise SpecError("need one lambda per point and at least one point")
        norms = self.base.eval_many(pts)
        bad = np.nonzero(np.abs(norms - 1.0) > 1e-10)[0]
        if len(bad):
            raise SpecError(f"point {int(bad[0])} does not have base norm 1", witness=int(bad[0]))
        bad = np.nonzero((lam <= 0.5) | (lam >= 1.0))[0]
        if len(bad):
            raise SpecError(f"lambda_{int(bad[0])} = {lam[bad[0]]} is outside (1/2, 1)", witness=int(bad[0]))
        for name in ("widths", "deltas", "epsilons"):
            v = getattr(self, name)
            if v is not None:
                v = np.atleast_1d(np.array(v, dtype=float))
                if len(v) != len(pts) or np.any(v <= 0):
                    raise SpecError(f"{name} must be positive, one per point")
                v.setflags(write=False)
                object.__setattr__(self, name, v)
        pts.setflags(write=False)
        lam.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "lambdas", lam)

        # one direction per orbit line (modulo sign) and point
        dirs, owner = [], []
        for k, x in enumerate(pts):
            mine = []
            for g in self.group.elements:
                d = g @ x
                if any(min(np.max(np.abs(d - e)), np.max(np.abs(d + e))) <= 1e-10 for e in mine):
                    continue
                mine.append(d)
                owner.append(k)
            dirs.extend(mine)
        D = np.array(dirs)
        D.setflags(write=False)
        ow = np.array(owner)
        ow.setflags(write=False)
        lam_d = lam[ow]
        lam_d.setflags(write=False)
        object.__setattr__(self, "directions", D)
        object.__setattr__(self, "owner", ow)
        object.__setattr__(self, "lambda_d", lam_d)

    @property
    def dim(self):
        return self.base.dim

    def support(self, u):
        """h_W(u), the support function of the pimple ball."""
        u = np.asarray(u, dtype=float)
        return max(self.base.dual(u), float(np.max(np.abs(self.directions @ u) / self.lambda_d)))


def tips(spec):
    """Tips g x_k / lambda_k over the group and all points, de-duplicated at 1e-10."""
    out = []
    for k, x in enumerate(spec.points):
        for g in spec.group.elements:
            p = g @ x / spec.lambdas[k]
            if not any(np.max(np.abs(p - q)) <= 1e-10 for q in out):
                out.append(p)
    return np.array(out)


# ----------------------------------------------------------- evaluation

def _single_direction(base, Y, Dd, lam, iters=100):
    """min_t>=0 base(y - t d) + lam t for rows where <grad base(y), d> > lam.

    Euclidean bases use the closed form.  Otherwise phi'(t) = lam -
    <grad base(y - t d), d> is nondecreasing on [0, base(y) / lam], which
    brackets the minimiser, and its sign change is located by the
    Illinois variant of regula falsi.
    """
    if isinstance(base, Euclidean):
        G = base.gram
        a = np.einsum("ij,jk,ik->i", Dd, G, Dd)
        b = np.einsum("ij,jk,ik->i", Y, G, Dd)
        c = np.einsum("ij,jk,ik->i", Y, G, Y)
        q = np.maximum(c - b * b / a, 0.0)
        s = lam * np.sqrt(q / np.maximum(1.0 - lam * lam / a, 1e-300))
        t = np.maximum((b - s) / a, 0.0)
        return t, base.eval_many(Y - t[:, None] * Dd) + lam * t

    def dphi(rows, t):
        return lam[rows] - np.sum(base.grad_many(Y[rows] - t[:, None] * Dd[rows]) * Dd[rows], axis=1)

    m = len(Y)
    allr = np.arange(m)
    a = np.zeros(m)
    b = base.eval_many(Y) / lam * (1 + 1e-12) + 1e-300
    fa, fb = dphi(allr, a), dphi(allr, b)
    last = np.zeros(m, dtype=int)
    active = (fa < 0) & (fb > 0)
    for _ in range(iters):
        r = np.nonzero(active)[0]
        if not len(r):
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            c = b[r] - fb[r] * (b[r] - a[r]) / (fb[r] - fa[r])
        bad = ~np.isfinite(c) | (c <= a[r]) | (c >= b[r])
        c[bad] = 0.5 * (a[r][bad] + b[r][bad])
        fc = dphi(r, c)
        left = fc < 0
        rl, rr = r[left], r[~left]
        a[rl], fa[rl] = c[left], fc[left]
        fb[rl[last[rl] == -1]] *= 0.5
        b[rr], fb[rr] = c[~left], fc[~left]
        fa[rr[last[rr] == 1]] *= 0.5
        last[rl], last[rr] = -1, 1
        done = (b[r] - a[r] <= 1e-15 * b[r]) | (fc == 0)
        active[r[done]] = False
    vals = [base.eval_many(Y - t[:, None] * Dd) + lam * t for t in (a, b)]
    pick = vals[0] <= vals[1]
    return np.where(pick, a, b), np.where(pick, vals[0], vals[1])


@dataclass(frozen=True)
class PimpleEvaluation:
    """Primal value, certified lower bound and normalised dual vector."""

    value: float
    lower: float
    dual_vector: np.ndarray
    coefficients: np.ndarray

    @property
    def gap(self):
        return self.value - self.lower


def _certify(spec, y, U):
    """Lower bounds <u, y> / h_W(u) for candidate dual vectors (rows of U)."""
    hb = spec.base.dual_many(U)
    hd = np.max(np.abs(U @ spec.directions.T) / spec.lambda_d, axis=1)
    h = np.maximum(hb, hd)
    with np.errstate(divide="ignore", invalid="ignore"):
        lb = np.where(h > 0, U @ y / h, 0.0)
    return lb, h


def evaluate_arrays(spec, Y, tol=DEFAULT.pimple_tol, config=DEFAULT, strict=True):
    """Array form of :func:`evaluate_batch`.

    Returns
    -------
    value, lower : ndarray, shape (N,)
        Primal values and certified dual lower bounds.
    dual : ndarray, shape (N, n)
        Dual vectors normalised to h_W(u) = 1 (subgradients of the gauge).
    coef : ndarray, shape (N, len(spec.directions))
        Signed coefficients t_d of the primal decomposition.
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if Y.ndim != 2 or Y.shape[1] != spec.dim:
        raise ArgumentError(f"expected dimension {spec.dim}, got shape {Y.shape}")
    base, D, lam = spec.base, spec.directions, spec.lambda_d
    N = len(Y)
    b = base.eval_many(Y)
    G = base.grad_many(Y)
    S = G @ D.T
    viol = np.abs(S) > lam * (1 + 1e-13)
    value = b.copy()
    coef = np.zeros((N, len(D)))
    dual_u = G.copy()

    rows, cols = np.nonzero(viol)
    if len(rows):
        sgn = np.sign(S[rows, cols])
        Dd = D[cols] * sgn[:, None]
        t, v = _single_direction(base, Y[rows], Dd, lam[cols])
        R = Y[rows] - t[:, None] * Dd
        Ur = base.grad_many(R)
        # at a kink (residual zero) the direction itself supplies the dual vector
        tiny = base.eval_many(R) <= 1e-13 * np.maximum(b[rows], 1e-300)
        if np.any(tiny):
            Ur[tiny] = base.grad_many(Dd[tiny])
        order = np.lexsort((v, rows))
        _, first = np.unique(rows[order], return_index=True)
        best = order[first]
        better = v[best] < value[rows[best]]
        best = best[better]
        r = rows[best]
        value[r] = v[best]
        coef[r, cols[best]] = t[best] * sgn[best]
        dual_u[r] = Ur[best]

    h = np.maximum(base.dual_many(dual_u), np.max(np.abs(dual_u @ D.T) / lam, axis=1))
    safe = np.where(h > 0, h, 1.0)
    lower = np.where(h > 0, np.sum(dual_u * Y, axis=1) / safe, 0.0)
    dual_u = dual_u / safe[:, None]
    zero = b == 0.0
    value[zero] = lower[zero] = 0.0
    dual_u[zero] = 0.0
    for i in np.nonzero(np.abs(value - lower) > 10 * tol)[0]:
        ev = _general_solve(spec, Y[i], tol, config,
                            start=PimpleEvaluation(value[i], lower[i], dual_u[i], coef[i]))
        if strict and abs(ev.gap) > 10 * tol:
            raise SolverError(f"pimple gap {ev.gap:.3e} exceeds {10 * tol:.1e}",
                              upper=ev.value, lower=ev.lower)
        value[i], lower[i], dual_u[i], coef[i] = ev.value, ev.lower, ev.dual_vector, ev.coefficients
    return value, lower, dual_u, coef


def evaluate_batch(spec, Y, tol=DEFAULT.pimple_tol, config=DEFAULT, strict=True):
    """Evaluate the pimple gauge on the rows of ``Y`` with dual certificates.

    A fast path handles rows where at most one orbit line is active by an
    exact one-dimensional solve; other rows go to an active-set solver.

    Returns
    -------
    list of PimpleEvaluation

    Raises
    ------
    SolverError
        When some primal/dual gap exceeds ``10 * tol`` after the general
        solver has run (only if ``strict``).
    """
    value, lower, U, coef = evaluate_arrays(spec, Y, tol, config, strict)
    return [PimpleEvaluation(float(a), float(b), u, c) for a, b, u, c in zip(value, lower, U, coef)]


def eval_pimple(spec, y, tol=DEFAULT.pimple_tol, config=DEFAULT):
    """Pimple gauge of ``y`` certified to a primal/dual gap of ``10 * tol``."""
    y = np.asarray(y, dtype=float)
    if y.shape != (spec.dim,):
        raise ArgumentError(f"expected a vector of dimension {spec.dim}, got shape {y.shape}")
    return evaluate_batch(spec, y[None, :], tol, config)[0].value


def _restricted(spec, P, y, mu0):
    """min_{mu >= 0} base(y - P^T mu) + sum(mu) over a few tips P (rows)."""
    base = spec.base

    def f(mu):
        return base(y - P.T @ mu) + np.sum(mu)

    def grad(mu):
        return -P @ base.grad(y - P.T @ mu) + 1.0

    # the optimum may sit at a zero residual, where f is not smooth; the LP
    # over exact decompositions settles it when its dual also bounds base*
    lp_best = None
    sol = optimize.nnls(P.T, y)
    if sol[1] <= 1e-12 * max(1.0, np.linalg.norm(y)):
        lp = optimize.linprog(np.ones(len(P)), A_eq=P.T, b_eq=y, bounds=[(0, None)] * len(P),
                              method="highs")
        if lp.status == 0:
            lp_best = np.maximum(lp.x, 0.0)
            u = np.asarray(lp.eqlin.marginals, dtype=float)
            h = max(base.dual(u), float(np.max(P @ u)))
            if h > 0 and f(lp_best) - (u @ y) / h <= 1e-13 * max(1.0, f(lp_best)):
                return lp_best
    mu = np.maximum(mu0, 0.0)
    res = optimize.minimize(f, mu, jac=grad, method="L-BFGS-B", bounds=[(0, None)] * len(mu),
                            options={"ftol": 1e-16, "gtol": 1e-13, "maxiter": 2000})
    best = res.x if res.fun <= f(mu) else mu
    if not res.success:
        best = _fista(f, grad, base, P, y, best)
    if lp_best is not None and f(lp_best) < f(best):
        best = lp_best
    return np.maximum(best, 0.0)


def _fista(f, grad, base, P, y, mu):
    """Accelerated proximal gradient; the prox of sum(mu) + indicator(mu >= 0) is a shift and clip."""
    z, tk, step = mu.copy(), 1.0, 1.0
    for _ in range(300):
        g = grad(z)
        fz = f(z)
        while True:
            cand = np.maximum(z - step * g, 0.0)
            d = cand - z
            if base(y - P.T @ cand) <= fz - np.sum(z) + g @ d - np.sum(d) + d @ d / (2 * step) + 1e-15:
                break
            step *= 0.5
            if step < 1e-16:
                break
        tn = 0.5 * (1 + np.sqrt(1 + 4 * tk * tk))
        z = cand + (tk - 1) / tn * (cand - mu)
        mu, tk = cand, tn
        step *= 1.5
    return mu


def _general_solve(spec, y, tol, config, start=None):
    """Active-set method over the tips with certified dual bound."""
    base = spec.base
    D, lam = spec.directions, spec.lambda_d
    P_all = np.vstack([D / lam[:, None], -D / lam[:, None]])
    active = []
    mu = np.zeros(0)
    r = y.copy()
    val = base(y)
    if start is not None and start.value < val:
        # seed with the best single-direction decomposition found earlier
        j = int(np.argmax(np.abs(start.coefficients)))
        c = start.coefficients[j]
        idx = j if c > 0 else j + len(D)
        active = [idx]
        mu = np.array([abs(c) * lam[j]])
        r = y - P_all[idx] * mu[0]
        val = base(r) + mu[0]
    scale = max(base(y), 1e-300)
    for _ in range(config.max_iter):
        if base(r) <= 1e-14 * scale:
            break
        s = P_all @ base.grad(r)
        j = int(np.argmax(s))
        if s[j] <= 1 + 1e-12 or j in active:
            break
        active.append(j)
        mu = _restricted(spec, P_all[active], y, np.append(mu, 0.0))
        keep = mu > 1e-15
        active = [a for a, kk in zip(active, keep) if kk]
        mu = mu[keep]
        r = y - (P_all[active].T @ mu if active else 0.0)
        val = base(r) + np.sum(mu)

    cands = []
    if base(r) > 1e-14 * scale:
        cands.append(base.grad(r))
    if active:
        cands.append(_face_dual(spec, P_all[active]))
    cands.append(base.grad(y))
    U = np.array(cands)
    lb, h = _certify(spec, y, U)
    i = int(np.argmax(lb))
    lower, u = float(lb[i]), U[i] / h[i]
    if val - lower > 10 * tol:
        lower2, u2 = _ratio_search(spec, y, config, np.vstack([U, P_all[active]]) if active else U)
        if lower2 > lower:
            lower, u = lower2, u2
    coef = np.zeros(len(D))
    for a, m in zip(active, mu):
        j = a % len(D)
        coef[j] += (m if a < len(D) else -m) / lam[j]
    return PimpleEvaluation(float(val), float(lower), u, coef)


def _face_dual(spec, PA):
    """Dual vector for a decomposition with zero residual: <u, p> = 1 on active tips."""
    u0 = np.linalg.lstsq(PA, np.ones(len(PA)), rcond=None)[0]
    _, s, vt = np.linalg.svd(PA)
    rank = int(np.sum(s > 1e-12 * s[0]))
    Nb = vt[rank:].T
    if Nb.shape[1] == 0:
        return u0
    res = optimize.minimize(lambda z: spec.support(u0 + Nb @ z), np.zeros(Nb.shape[1]),
                            method="Nelder-Mead",
                            options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 20000})
    return u0 + Nb @ res.x


def _ratio_search(spec, y, config, seeds):
    """Maximise <u, y> / h_W(u) from seeded plus random starts."""
    rng = np.random.default_rng(config.seed)
    starts = list(seeds) + list(rng.standard_normal((config.dual_starts, spec.dim)))
    best, best_u = -np.inf, None

    def neg(u):
        h = spec.support(u)
        return -(u @ y) / h if h > 0 else 0.0

    for u0 in starts:
        res = optimize.minimize(neg, u0, method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
        if -res.fun > best:
            best, best_u = -res.fun, res.x / spec.support(res.x)
    return float(best), best_u


class PimpleNorm(Norm):
    """NormObject wrapper evaluating a :class:`PimpleSpec`."""

    kind = "pimple-hull"

    def __init__(self, spec, tol=DEFAULT.pimple_tol, config=DEFAULT):
        self.spec = spec
        self.dim = spec.dim
        self.tol = tol
        self.config = config
        self._tips = tips(spec)

    def __setattr__(self, name, value):
        if getattr(self, "_frozen", False):
            raise AttributeError("PimpleNorm is immutable")
        object.__setattr__(self, name, value)

    def eval_many(self, X):
        return evaluate_arrays(self.spec, X, self.tol, self.config)[0]

    def grad_many(self, X):
        return evaluate_arrays(self.spec, X, self.tol, self.config)[2]

    def dual(self, u):
        return self.spec.support(u)

    def structured_points(self):
        return np.vstack([self._tips, self.spec.points, -self.spec.points])

    def to_dict(self):
        from .serialize import pimple_spec_to_dict
        return {"kind": self.kind, "dim": self.dim, "spec": pimple_spec_to_dict(self.spec)}


def _freeze_pimple_norm(norm):
    object.__setattr__(norm, "_frozen", True)
    return norm


def pimple_norm(spec, tol=DEFAULT.pimple_tol, config=DEFAULT):
    """Immutable norm object for ``spec``."""
    return _freeze_pimple_norm(PimpleNorm(spec, tol, config))


# ------------------------------------------------------------ validation

@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate_spec`.

    Attributes
    ----------
    separation : ndarray
        c_k = min over (j, g) != (k, Id) of base(x_j - g x_k).
    witnesses : list
        For each k, the pair (j, group index) attaining c_k.
    lambda_floor : ndarray
        Smallest lambda_k with 1/lambda_k - 1 <= c_k / 6.
    checks : dict
        Named pass/fail flags.
    """

    separation: np.ndarray
    witnesses: list
    lambda_floor: np.ndarray
    lur: np.ndarray
    checks: dict

    @property
    def passed(self):
        return all(self.checks.values())


def separation_constants(base, group, points):
    """c_k and witnesses (j, g-index) by enumeration of the finite orbit."""
    pts = np.atleast_2d(points)
    ident = group.identity
    c, wit = [], []
    for k, x in enumerate(pts):
        best, arg = np.inf, None
        orbit = np.einsum("gij,j->gi", group.elements, x)
        for j, xj in enumerate(pts):
            d = base.eval_many(xj[None, :] - orbit)
            if j == k:
                d[ident] = np.inf
            gi = int(np.argmin(d))
            if d[gi] < best:
                best, arg = float(d[gi]), (j, gi)
        c.append(best)
        wit.append(arg)
    return np.array(c), wit


def check_invariance(base, group, samples=100, seed=0, tol=1e-9):
    """Return None if base(g x) = base(x) on samples, else a witness (g-index, x)."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((samples, base.dim))
    nx = base.eval_many(X)
    for gi, g in enumerate(group.elements):
        dev = np.abs(base.eval_many(X @ g.T) - nx) / nx
        i = int(np.argmax(dev))
        if dev[i] > tol:
            return gi, X[i]
    return None


def validate_spec(spec, config=DEFAULT, lur_grid=None):
    """Check the hypotheses the pimple construction relies on.

    Raises
    ------
    SpecError
        If -Id is missing from the group or the base is not G-invariant.
    """
    if not spec.group.has_minus_identity:
        raise SpecError("group does not contain -Id")
    bad = check_invariance(spec.base, spec.group, seed=config.seed)
    if bad is not None:
        raise SpecError(f"base norm is not invariant under group element {bad[0]}", witness=bad)
    c, wit = separation_constants(spec.base, spec.group, spec.points)
    grid = lur_grid or config.lur_grid
    lur = np.array([lur_modulus(spec.base, x, float(min(max(ck, 1e-6), 2.0)), grid, seed=config.seed)
                    if ck > config.eval_tol else 1.0 for x, ck in zip(spec.points, c)])
    checks = {
        "separation": bool(np.all(c > config.eval_tol)),
        "lambda_range": bool(np.all((spec.lambdas > 0.5) & (spec.lambdas < 1.0))),
        "lur_at_points": bool(np.all(lur < 1.0 - 1e-9)),
        "strict_convexity": _probe_strict_convexity(spec.base, config.seed),
    }
    floor = 1.0 / (1.0 + c / 6.0)
    return ValidationReport(c, wit, floor, lur, checks)


def _probe_strict_convexity(base, seed, pairs=400):
    rng = np.random.default_rng(seed + 1)
    X = rng.standard_normal((pairs, base.dim))
    Y = rng.standard_normal((pairs, base.dim))
    X /= base.eval_many(X)[:, None]
    Y /= base.eval_many(Y)[:, None]
    far = base.eval_many(X - Y) >= 0.1
    mid = base.eval_many((X + Y) / 2)
    return bool(np.all(mid[far] < 1 - 1e-12))


# -------------------------------------------------------------- geometry

def _tangent_basis(x, n, rng, extra=8):
    q, _ = np.linalg.qr(np.column_stack([x, np.eye(n)]))
    V = q[:, 1:n].T
    V = np.vstack([V, -V])
    if n > 2:
        R = rng.standard_normal((extra, n))
        R -= np.outer(R @ x, x) / (x @ x)
        V = np.vstack([V, R / np.linalg.norm(R, axis=1)[:, None]])
    return V


def cap_profile(base, x, lam, directions, iters=60):
    """Tangency points of the cone from x/lam to the base ball, per plane direction.

    In the plane span(x, v) the cap {base(y) = 1, single pimple(y) < 1}
    ends where <grad base(y), x> = lam; that point is located by bisection
    on the angle.

    Returns
    -------
    ndarray, shape (len(directions), n)
        Unit vectors of ``base`` on the cap boundary.
    """
    lo = np.zeros(len(directions))
    hi = np.full(len(directions), np.pi / 2)
    xe = x / np.linalg.norm(x)

    def point(phi):
        Y = np.cos(phi)[:, None] * xe + np.sin(phi)[:, None] * directions
        return Y / base.eval_many(Y)[:, None]

    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        inside = base.grad_many(point(mid)) @ x > lam
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return point(lo)


def cap_radius(base, x, lam, directions):
    """Largest base distance from x to the boundary of its cap."""
    T = cap_profile(base, x, lam, directions)
    return float(np.max(base.eval_many(T - x[None, :])))


def facet_widths(base, x, lam, directions):
    """base(w) for the flat segments [x/lam, x/lam + w] of a single pimple."""
    T = cap_profile(base, x, lam, directions)
    return base.eval_many(T - x[None, :] / lam)


def facet_width(spec, k, direction, tol=DEFAULT.pimple_tol, flat_tol=1e-9):
    """Measure the flat segment of the pimple sphere starting at tip k.

    Marches along the segment in the plane span(tip, direction) and
    bisects on its length until the gauge leaves 1 by more than
    ``flat_tol``.  Returns base(w).  Past the end of the segment a curved
    sphere departs from the line quadratically, so the result can
    overshoot by about sqrt(2 flat_tol) times the curvature radius.
    """
    p = spec.points[k] / spec.lambdas[k]
    norm = pimple_norm(spec, tol)
    pe = p / np.linalg.norm(p)
    v = np.asarray(direction, dtype=float)
    v = v - (v @ pe) * pe
    v /= np.linalg.norm(v)

    def ray(phi):
        return np.cos(phi) * pe + np.sin(phi) * v

    # angular extent of the cone shadow (pimple strictly below base)
    lo, hi = 0.0, np.pi / 2
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        z = ray(mid)
        if norm(z) < spec.base(z) * (1 - 1e-12):
            lo = mid
        else:
            hi = mid
    z = ray(0.5 * lo)
    q = z / norm(z)
    tau = (q - p) / np.linalg.norm(q - p)
    lo, hi = 0.0, 4.0 * np.linalg.norm(p)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if abs(norm(p + mid * tau) - 1.0) <= flat_tol:
            lo = mid
        else:
            hi = mid
    return float(spec.base(lo * tau))


# -------------------------------------------------------------- schedule

def schedule_parameters(base, group, points, config=DEFAULT):
    """Choose lambda_k, b_k, delta_k, eps_k for the given points.

    delta_k <= min(delta_{k-1}, safety c_k / 4, safety (1 - lur(x_k, c_k)))
    and eps_k = c_k / 2.  The excess e_k = 1/lambda_k - 1 is the largest
    value (capped by c_k / 6, by the lower bound m and by
    ``lambda_ratio * e_{k-1}``) whose cap radius stays below delta_k, so
    caps of different orbit points never meet.  b_0 bounds the measured
    facet widths of point 0 and b_{k+1} = safety * e_k / 2, which makes
    b strictly decreasing with 1/lambda_k - 1 > 2 b_{k+1}.

    Raises
    ------
    ScheduleError
        Empty point list, vanishing separation, a non-rotund point, or a
        cap that cannot be made small enough.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float)) if len(points) else np.zeros((0, base.dim))
    if len(pts) == 0:
        raise ScheduleError("no pimple points given")
    n = base.dim
    rng = np.random.default_rng(config.seed)
    c, _ = separation_constants(base, group, pts)
    s = config.safety
    e_max = 1.0 / max(0.5, config.m) - 1.0
    lams, deltas, eps, excess, radii, widths_measured = [], [], [], [], [], []
    delta_prev = config.delta0
    e_prev = np.inf
    for k, x in enumerate(pts):
        if c[k] <= config.eval_tol:
            raise ScheduleError(f"point {k} is not separated (c_k = {c[k]:.3g})", index=k)
        lur = lur_modulus(base, x, float(min(c[k], 2.0)), config.lur_grid, seed=config.seed)
        if lur >= 1.0 - 1e-12:
            raise ScheduleError(f"base is not rotund at point {k} (lur estimate {lur:.6f})", index=k)
        delta = min(delta_prev, s * c[k] / 4.0, s * (1.0 - lur))
        V = _tangent_basis(x, n, rng)
        upper = min(c[k] / 6.0, 0.999 * e_max, config.lambda_ratio * e_prev)

        def radius(e):
            return cap_radius(base, x, 1.0 / (1.0 + e), V)

        if upper < config.min_excess or radius(config.min_excess) >= delta:
            raise ScheduleError(f"no admissible lambda for point {k}", index=k)
        if radius(upper) < delta:
            e = upper
        else:
            lo, hi = np.log(config.min_excess), np.log(upper)
            for _ in range(50):
                mid = 0.5 * (lo + hi)
                if radius(np.exp(mid)) < delta:
                    lo = mid
                else:
                    hi = mid
            e = float(np.exp(lo))
        lam = 1.0 / (1.0 + e)
        w = facet_widths(base, x, lam, V)
        lams.append(lam)
        deltas.append(delta)
        eps.append(c[k] / 2.0)
        excess.append(e)
        radii.append(radius(e))
        widths_measured.append(w)
        delta_prev, e_prev = delta, e

    K = len(pts)
    b = np.empty(K)
    b[0] = max(float(np.max(widths_measured[0])) * (1 + 1e-6), 2.0 * s * excess[0])
    for k in range(1, K):
        b[k] = s * excess[k - 1] / 2.0
    wmax = np.array([float(np.max(w)) for w in widths_measured])
    wmin = np.array([float(np.min(w)) for w in widths_measured])
    upper_ok = [bool(b[k] >= wmax[k]) for k in range(K)]
    lower_ok = [bool(wmin[k] >= excess[k] - 1e-6) for k in range(K)]
    if config.strict_facet and not all(upper_ok):
        k = upper_ok.index(False)
        raise ScheduleError(f"facet width {wmax[k]:.3e} of point {k} exceeds b_k = {b[k]:.3e}", index=k)
    notes = {
        "separation": c.tolist(),
        "excess": excess,
        "cap_radius": radii,
        "facet_width_max": wmax.tolist(),
        "facet_width_min": wmin.tolist(),
        "facet_upper_ok": upper_ok,
        "facet_lower_ok": lower_ok,
        "chain_ok": all(1.0 / lams[k] - 1.0 > 2 * b[k + 1] for k in range(K - 1)),
    }
    return PimpleSpec(base, group, pts, np.array(lams), b, np.array(deltas), np.array(eps), notes)


def deviation_locality(spec, Y, tol=DEFAULT.pimple_tol):
    """For unit vectors y with pimple(y) < 1 - 10 tol, the smallest ratio
    min_{g,k} base(g x_k - y) / delta_k.  Values below 1 confirm locality.

    Returns
    -------
    ndarray
        One ratio per qualifying row (empty if none qualifies).
    """
    if spec.deltas is None:
        raise ArgumentError("spec carries no deltas")
    Y = np.atleast_2d(Y)
    Y = Y / spec.base.eval_many(Y)[:, None]
    vals = evaluate_arrays(spec, Y, tol)[0]
    out = []
    for y in Y[vals < 1 - 10 * tol]:
        best = np.inf
        for k, x in enumerate(spec.points):
            orbit = np.einsum("gij,j->gi", spec.group.elements, x)
            best = min(best, float(np.min(spec.base.eval_many(orbit - y))) / spec.deltas[k])
        out.append(best)
    return np.array(out)
