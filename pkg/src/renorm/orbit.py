"""Point families whose pimple norm has a prescribed isometry group.

Starting from a unit vector x0 separating a finite group G, the factory
adds one point x = a x0 + z per element g x0 (g != +-Id, type 2) and one
per vector y_k needed to span the space (type 1).  Type-2 coefficients
are chosen by nested trisection so that all points stay quantitatively
separated.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .config import DEFAULT
from .errors import ArgumentError, ConstructionError, SeparationError
from .norms import lur_modulus


def separation_constant(group, base, x0, config=DEFAULT):
    """alpha = min(alpha_cap, min_{g != Id} base(x0 - g x0)).

    Raises
    ------
    SeparationError
        If some g != Id fixes x0; the witness is the group index of g.
    """
    x0 = np.asarray(x0, dtype=float)
    if abs(base(x0) - 1.0) > 1e-10:
        raise ArgumentError("x0 must be a unit vector of the base norm")
    orbit = np.einsum("gij,j->gi", group.elements, x0)
    d = base.eval_many(x0[None, :] - orbit)
    d[group.identity] = np.inf
    gi = int(np.argmin(d))
    if d[gi] <= config.eval_tol:
        raise SeparationError(f"group element {gi} fixes x0", witness=gi)
    return float(min(config.alpha_cap, d[gi]))


def _scale_to_sphere(base, x0, z):
    """a > 0 with base(a x0 + z) = 1, assuming base(z) < 1."""
    f = lambda a: base(a * x0 + z) - 1.0
    hi = 2.0
    while f(hi) < 0:
        hi *= 2.0
    return float(optimize.brentq(f, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))


def _type2_point(base, x0, gx0, beta):
    a = _scale_to_sphere(base, x0, beta * gx0)
    return a * x0 + beta * gx0, a


def _min_distance_on(base, x0, gx0, target, lo, hi, grid=33):
    """min over beta in [lo, hi] of base(x'(beta) - target): grid plus bounded refinement."""
    betas = np.linspace(lo, hi, grid)
    vals = np.array([base(_type2_point(base, x0, gx0, b)[0] - target) for b in betas])
    i = int(np.argmin(vals))
    a, b = betas[max(i - 1, 0)], betas[min(i + 1, grid - 1)]
    best = float(vals[i])
    if b > a:
        res = optimize.minimize_scalar(lambda t: base(_type2_point(base, x0, gx0, t)[0] - target),
                                       bounds=(a, b), method="bounded", options={"xatol": 1e-12})
        best = min(best, float(res.fun))
    return best


def trisect_select(group, base, x0, g_sequence, alpha, trace=None):
    """Choose beta_n for the type-2 points by nested trisection.

    Every interval starts as [alpha/10, alpha/5].  At step n each interval
    still in play is cut into thirds and the first or the last third is
    kept, whichever keeps base(x'_m(beta) - x'_{n-1}) >= alpha^2 / (40 3^n)
    for all beta in it; beta_n is the midpoint of the n-th interval.

    Parameters
    ----------
    g_sequence : list of ndarray
        Group elements other than +-Id, one per type-2 point.
    trace : list, optional
        Receives one record per step with the kept intervals.

    Returns
    -------
    list of float

    Raises
    ------
    ConstructionError
        If both outer thirds fail the distance test.
    """
    if not 0.0 < alpha < 1.0:
        raise ArgumentError("alpha must lie in (0, 1)")
    n_dim = group.dim
    ident = np.eye(n_dim)
    for g in g_sequence:
        if np.max(np.abs(g - ident)) <= 1e-9 or np.max(np.abs(g + ident)) <= 1e-9:
            raise ArgumentError("g_sequence must avoid +-Id")
    x0 = np.asarray(x0, dtype=float)
    M = len(g_sequence)
    gx = [g @ x0 for g in g_sequence]
    intervals = [(alpha / 10.0, alpha / 5.0) for _ in range(M)]
    betas = []
    prev = x0
    for n in range(1, M + 1):
        bound = alpha ** 2 / (40.0 * 3 ** n)
        kept = []
        for m in range(n - 1, M):
            lo, hi = intervals[m]
            third = (hi - lo) / 3.0
            first, last = (lo, lo + third), (hi - third, hi)
            if _min_distance_on(base, x0, gx[m], prev, *first) >= bound:
                choice, side = first, "first"
            elif _min_distance_on(base, x0, gx[m], prev, *last) >= bound:
                choice, side = last, "last"
            else:
                raise ConstructionError(
                    f"step {n}: neither outer third of interval {m + 1} keeps distance {bound:.3e}",
                    witness=(n, m + 1))
            intervals[m] = choice
            kept.append({"m": m + 1, "interval": list(choice), "side": side})
        beta = 0.5 * (intervals[n - 1][0] + intervals[n - 1][1])
        betas.append(float(beta))
        prev = _type2_point(base, x0, gx[n - 1], beta)[0]
        if trace is not None:
            trace.append({"step": n, "bound": bound, "beta": float(beta), "kept": kept})
    return betas


def _orth(V, tol):
    if len(V) == 0:
        return np.zeros((0, 0))
    u, s, _ = np.linalg.svd(np.asarray(V, dtype=float).T, full_matrices=False)
    r = int(np.sum(s > tol * max(s[0], 1.0)))
    return u[:, :r]


def distance_to_subspace(base, y, Q):
    """d(y, span Q) = min_c base(y - Q c) by convex minimisation.

    Returns
    -------
    (float, ndarray)
        Distance and the nearest point of the subspace.
    """
    if Q.shape[1] == 0:
        return float(base(y)), np.zeros_like(y)
    c0 = Q.T @ y
    res = optimize.minimize(lambda c: base(y - Q @ c), c0,
                            jac=lambda c: -Q.T @ base.grad(y - Q @ c),
                            method="BFGS", options={"gtol": 1e-14, "maxiter": 1000})
    c = res.x if res.fun <= base(y - Q @ c0) else c0
    return float(base(y - Q @ c)), Q @ c


@dataclass(frozen=True)
class PointFamily:
    """Points x0, type-2 and type-1 points with provenance.

    Attributes
    ----------
    alpha : float
    x0 : ndarray
    type2 : list of dict
        Entries with keys ``x``, ``g_index``, ``g``, ``beta``, ``a``.
    type1 : list of dict
        Entries with keys ``x``, ``y``, ``a``, ``distance``.
    spanning : bool
    trace : list
        Kept trisection intervals per step.
    """

    alpha: float
    x0: np.ndarray
    type2: list
    type1: list
    spanning: bool
    trace: list = field(default_factory=list)

    @property
    def points(self):
        """x0, then type-2 points, then type-1 points, as rows."""
        rows = [self.x0] + [e["x"] for e in self.type2] + [e["x"] for e in self.type1]
        return np.array(rows, dtype=float)

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "x0": np.asarray(self.x0).tolist(),
            "type2": [{"x": np.asarray(e["x"]).tolist(), "g_index": e["g_index"],
                       "g": np.asarray(e["g"]).tolist(), "beta": e["beta"], "a": e["a"]}
                      for e in self.type2],
            "type1": [{"x": np.asarray(e["x"]).tolist(), "y": np.asarray(e["y"]).tolist(),
                       "a": e["a"], "distance": e["distance"]} for e in self.type1],
            "spanning": self.spanning,
            "trace": self.trace,
        }

    @classmethod
    def from_dict(cls, d):
        t2 = [{"x": np.array(e["x"]), "g_index": e["g_index"], "g": np.array(e["g"]),
               "beta": e["beta"], "a": e["a"]} for e in d["type2"]]
        t1 = [{"x": np.array(e["x"]), "y": np.array(e["y"]), "a": e["a"],
               "distance": e["distance"]} for e in d["type1"]]
        return cls(d["alpha"], np.array(d["x0"]), t2, t1, d["spanning"], d.get("trace", []))


def build_point_family(group, base, x0, config=DEFAULT):
    """Manufacture the separated point family for (base, G, x0).

    Type-2 points come from every g x0 with g != +-Id (in group order)
    and type-1 points from the standard basis vectors that extend the
    G-invariant span until it is the whole space.

    Raises
    ------
    ConstructionError
        Base not rotund at x0, span not reached, a failed trisection, or
        a violated separation bound (witness (n, g-index, k)).
    """
    x0 = np.asarray(x0, dtype=float)
    alpha = separation_constant(group, base, x0, config)
    if lur_modulus(base, x0, min(alpha, 2.0), config.lur_grid, seed=config.seed) >= 1.0 - 1e-12:
        raise ConstructionError("base norm is not rotund at x0")
    n = base.dim
    ident, minus = np.eye(n), -np.eye(n)

    g_idx = [i for i, g in enumerate(group.elements)
             if np.max(np.abs(g - ident)) > 1e-9 and np.max(np.abs(g - minus)) > 1e-9]
    trace = []
    betas = trisect_select(group, base, x0, [group.elements[i] for i in g_idx], alpha, trace)
    type2 = []
    for i, beta in zip(g_idx, betas):
        g = group.elements[i]
        x, a = _type2_point(base, x0, g @ x0, beta)
        type2.append({"x": x, "g_index": int(i), "g": np.array(g), "beta": beta, "a": a})

    orbit = lambda v: np.einsum("gij,j->gi", group.elements, v)
    spanned = list(orbit(x0))
    Q = _orth(spanned, config.rank_tol)
    type1 = []
    for i in range(n):
        if Q.shape[1] >= n:
            break
        y = np.eye(n)[i]
        if np.linalg.norm(y - Q @ (Q.T @ y)) <= config.rank_tol:
            continue
        dist, near = distance_to_subspace(base, y, Q)
        w = y - near
        z = (alpha / 10.0) * w / base(w)
        d_check, _ = distance_to_subspace(base, z, Q)
        if abs(d_check - alpha / 10.0) > 1e-8 * alpha:
            raise ConstructionError(f"distance of z to the span is {d_check}, not alpha/10")
        a = _scale_to_sphere(base, x0, z)
        type1.append({"x": a * x0 + z, "y": y, "a": a, "distance": d_check})
        spanned.extend(orbit(y))
        Q = _orth(spanned, config.rank_tol)
    spanning = Q.shape[1] >= n
    if not spanning:
        raise ConstructionError("orbit of x0 and basis vectors do not span the space")

    fam = PointFamily(alpha, x0, type2, type1, spanning, trace)
    check_family_separation(group, base, fam)
    return fam


def family_separation(group, base, points):
    """For each k, min over (n, g) != (k, Id) of base(x_n - g x_k) and its witness."""
    pts = np.asarray(points)
    out = []
    for k, xk in enumerate(pts):
        orbit = np.einsum("gij,j->gi", group.elements, xk)
        best, wit = np.inf, None
        for m, xm in enumerate(pts):
            d = base.eval_many(xm[None, :] - orbit)
            if m == k:
                d[group.identity] = np.inf
            gi = int(np.argmin(d))
            if d[gi] < best:
                best, wit = float(d[gi]), (m, gi, k)
        out.append((best, wit))
    return out


def check_family_separation(group, base, family):
    """Assert min_{(n,g) != (k,Id)} base(x_n - g x_k) >= alpha^2 / (40 3^(k+1)) - 1e-9."""
    alpha = family.alpha
    for k, (d, wit) in enumerate(family_separation(group, base, family.points)):
        bound = alpha ** 2 / (40.0 * 3 ** (k + 1))
        if d < bound - 1e-9:
            raise ConstructionError(f"separation {d:.3e} of point {k} is below {bound:.3e}", witness=wit)
