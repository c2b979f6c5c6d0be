"""Complex norms with few real isometries, on C^n identified with R^(2n).

Coordinates are interleaved: (Re z_0, Im z_0, Re z_1, Im z_1, ...).
Multiplication by i is the block-diagonal rotation J.
"""
from dataclasses import dataclass, field
import itertools

import numpy as np

from .config import DEFAULT
from .errors import ArgumentError, SolverError, SpecError
from .norms import Euclidean, MaxSeminorms, Norm, ScaledSum, WeightedLp, _check_batch, gauge_from_membership
from .complex_structures import standard_complex_structure


def complex_mult(z):
    """2x2 real matrix of multiplication by the complex number z."""
    z = complex(z)
    return np.array([[z.real, -z.imag], [z.imag, z.real]])


def to_real(v):
    """Complex vector -> interleaved real vector."""
    v = np.asarray(v, dtype=complex)
    return np.column_stack([v.real, v.imag]).ravel()


def to_complex(x):
    x = np.asarray(x, dtype=float)
    return x[0::2] + 1j * x[1::2]


def _pick(n, k):
    """2 x 2n matrix extracting complex coordinate k."""
    m = np.zeros((2, 2 * n))
    m[:, 2 * k:2 * k + 2] = np.eye(2)
    return m


# ----------------------------------------------------------- C^2 norm

DEFAULT_C2_ANGLES = (0.2, 0.5, 0.9, 1.4)


@dataclass(frozen=True)
class C2NormSpec:
    """Four unimodular lambdas with positive real parts and distinct pair products.

    Parameters
    ----------
    lambdas : sequence of complex
    """

    lambdas: tuple = tuple(np.exp(1j * t) for t in DEFAULT_C2_ANGLES)

    def __post_init__(self):
        lam = tuple(complex(z) for z in self.lambdas)
        object.__setattr__(self, "lambdas", lam)
        if len(lam) != 4:
            raise SpecError("exactly four lambdas are required")
        for k, z in enumerate(lam):
            if abs(abs(z) - 1.0) > 1e-12:
                raise SpecError(f"lambda_{k + 1} is not unimodular", witness=k + 1)
            if z.real <= 0:
                raise SpecError(f"lambda_{k + 1} has nonpositive real part", witness=k + 1)
        pairs = list(itertools.combinations_with_replacement(range(4), 2))
        for (a, b), (c, d) in itertools.combinations(pairs, 2):
            if abs(lam[a] * lam[b] - lam[c] * lam[d]) < 1e-8:
                raise SpecError(f"lambda products collide: {{{a + 1},{b + 1}}} vs {{{c + 1},{d + 1}}}",
                                witness=((a + 1, b + 1), (c + 1, d + 1)))

    @classmethod
    def from_angles(cls, angles):
        return cls(tuple(np.exp(1j * t) for t in angles))

    def to_dict(self):
        return {"lambdas": [[z.real, z.imag] for z in self.lambdas]}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(complex(a, b) for a, b in d["lambdas"]))


def c2_norm_build(spec=None):
    """max_{0<=k<=4} |x - lambda_k y| on C^2 = R^4, with lambda_0 = 0."""
    spec = spec or C2NormSpec()
    mats = [np.hstack([np.eye(2), -complex_mult(z)]) for z in (0.0,) + spec.lambdas]
    return MaxSeminorms(tuple(mats))


def conjugation_forms(spec=None, count=64):
    """Real-linear maps of the forms (x, d conj y), (conj x, c y), (conj x, d conj y).

    These are the candidates left by the structural argument besides the
    trivial maps; each is parametrised by a unimodular constant on a grid.

    Returns
    -------
    list of (str, float, ndarray)
        Form name, angle of the constant and the 4x4 matrix.
    """
    conj = np.diag([1.0, -1.0])
    out = []
    for t in np.linspace(0.0, 2 * np.pi, count, endpoint=False):
        u = complex_mult(np.exp(1j * t))
        blocks = {
            "x,d*conj(y)": (np.eye(2), u @ conj),
            "conj(x),c*y": (conj, u),
            "conj(x),d*conj(y)": (conj, u @ conj),
        }
        for name, (a, b) in blocks.items():
            T = np.zeros((4, 4))
            T[:2, :2] = a
            T[2:, 2:] = b
            out.append((name, float(t), T))
    return out


def c2_identity_residuals(spec=None, count=64):
    """Worst deviations of |(e^it, 0)| from 1 and |(e^it, -conj(lambda_j) e^it)| from 2.

    Returns
    -------
    dict
        ``unit`` and ``two`` residuals over ``count`` equally spaced t.
    """
    spec = spec or C2NormSpec()
    norm = c2_norm_build(spec)
    th = 2 * np.pi * np.arange(count) / count
    w = np.exp(1j * th)
    unit = norm.eval_many(np.array([to_real([z, 0]) for z in w]))
    two = np.concatenate([norm.eval_many(np.array([to_real([z, -np.conj(lam) * z]) for z in w]))
                          for lam in spec.lambdas])
    return {"unit": float(np.max(np.abs(unit - 1.0))), "two": float(np.max(np.abs(two - 2.0)))}


def c2_report(spec=None, count=64, starts=200, steps=300, seed=0):
    """Identities, rejected conjugation-type maps and a falsifier run for the C^2 norm.

    Each conjugation-type candidate is rejected with the sample vector x
    of largest relative discrepancy |N(Tx) - N(x)| / N(x).
    """
    from .isometry import RotationCircle, falsify_search, verify_isometry

    spec = spec or C2NormSpec()
    norm = c2_norm_build(spec)
    rejected = []
    for name, t, T in conjugation_forms(spec, count):
        chk = verify_isometry(T, norm, seed=seed)
        rejected.append({"form": name, "angle": t, "rejected": not chk.ok,
                         "discrepancy": chk.worst, "witness": chk.witness})
    fals = None
    if starts:
        fals = falsify_search(norm, RotationCircle(standard_complex_structure(4)), starts, steps,
                              seed=seed).to_dict()
    return {"spec": spec.to_dict(), "identities": c2_identity_residuals(spec, count),
            "conjugation_forms": rejected,
            "all_forms_rejected": all(r["rejected"] for r in rejected),
            "falsifier": fals}


# ---------------------------------------------------- double norms

def complex_sup_norm(n):
    """max_k |z_k| on C^n."""
    return MaxSeminorms(tuple(_pick(n, k) for k in range(n)))


def double_norm_build(gamma_count, variant):
    """Order-sensitive norms on C^Gamma, Gamma = {0, ..., n-1} in index order.

    Variant 2 is max(sup_k |z_k|, max_{a<b} |2 z_a + z_b|); variant 1 adds
    |(3/2) z_0 + i z_1|, which also breaks coordinatewise conjugation.
    """
    n = int(gamma_count)
    if n < 2:
        raise ArgumentError("need at least two coordinates")
    if variant not in (1, 2):
        raise ArgumentError("variant must be 1 or 2")
    mats = [_pick(n, k) for k in range(n)]
    for a, b in itertools.combinations(range(n), 2):
        mats.append(2 * _pick(n, a) + _pick(n, b))
    if variant == 1:
        mats.append(1.5 * _pick(n, 0) + complex_mult(1j) @ _pick(n, 1))
    return MaxSeminorms(tuple(mats))


def find_support_witness(norm, x, y, samples=2000, seed=0, tol=1e-12):
    """z and eps = +-1 with |z|, |x+z|, |eps y+z| <= 1 < |x + eps y + z|.

    Candidates are z = lam x_k e_k with lam from the ray conditions at each
    coordinate where x and y overlap, then seeded random z in the ball.

    Returns
    -------
    (ndarray, int) or None
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = norm.dim // 2
    xc, yc = to_complex(x), to_complex(y)

    def ok(z, eps):
        return (norm(z) <= 1 + tol and norm(x + z) <= 1 + tol and norm(eps * y + z) <= 1 + tol
                and norm(x + eps * y + z) > 1 + tol)

    for k in range(n):
        a, b = xc[k], yc[k]
        if a == 0 or b == 0:
            continue
        eps = 1 if (a * np.conj(b)).real >= 0 else -1
        b = eps * b
        lam1 = max(1.0 / abs(a) - 1.0, 0.0)
        # |b + t a| = 1 with t >= 0
        A, B, C = abs(a) ** 2, 2 * (a * np.conj(b)).real, abs(b) ** 2 - 1
        disc = B * B - 4 * A * C
        lam2 = max((-B + np.sqrt(max(disc, 0.0))) / (2 * A), 0.0)
        lam = min(lam1, lam2)
        zc = np.zeros(n, dtype=complex)
        zc[k] = lam * a
        z = to_real(zc)
        if ok(z, eps):
            return z, eps
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        z = rng.uniform(-1, 1, norm.dim)
        for eps in (1, -1):
            if ok(z, eps):
                return z, eps
    return None


def disjoint_support_test(norm, x, y, samples=2000, seed=0):
    """True iff a witness shows x and y do NOT have disjoint supports."""
    return find_support_witness(norm, x, y, samples, seed) is not None


# ----------------------------------------------------- extension W

def _cvx_norm(norm, v):
    """cvxpy expression for a supported norm kind applied to ``v``."""
    import cvxpy as cp

    if isinstance(norm, Euclidean):
        L = np.linalg.cholesky(norm.gram)
        return cp.norm(L.T @ v, 2)
    if isinstance(norm, WeightedLp):
        if np.isinf(norm.p):
            return cp.max(cp.multiply(norm.weights, cp.abs(v)))
        return cp.norm(cp.multiply(norm.weights ** (1.0 / norm.p), v), norm.p)
    if isinstance(norm, MaxSeminorms):
        return cp.max(cp.hstack([cp.norm(m @ v, 2) for m in norm.mats]))
    if isinstance(norm, ScaledSum):
        return sum(c * _cvx_norm(p, v) for c, p in zip(norm.coefs, norm.parts))
    raise ArgumentError(f"norm kind {norm.kind!r} has no conic form")


@dataclass(frozen=True, eq=False)
class ExtensionWSpec:
    """Data of the extension gauge on X + C, X = C^(n/2) = R^n.

    ``p`` and ``x0`` are normalised at construction: p becomes
    scale * (p + inner) with 1000 * inner <= p, and x0 is shrunk so that
    inner(x0) <= 0.1.  The raw inputs are kept in ``normalization``.
    """

    inner: Norm
    p: Norm
    x0: np.ndarray
    rotations: int = 720
    normalization: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.inner.dim
        if n % 2 or self.p.dim != n:
            raise SpecError("inner and p must live on the same even-dimensional space")
        x0 = np.asarray(self.x0, dtype=float)
        if x0.shape != (n,) or not np.any(x0):
            raise SpecError("x0 must be a nonzero vector of the space")
        if self.normalization.get("done"):
            return
        scale = 1000.0
        p_new = ScaledSum((self.p, self.inner), (scale, scale))
        s0 = min(1.0, 0.1 / self.inner(x0))
        object.__setattr__(self, "p", p_new)
        object.__setattr__(self, "x0", x0 * s0)
        object.__setattr__(self, "normalization", {"done": True, "p_scale": scale, "x0_scale": s0})

    def check(self, samples=100, seed=0):
        """Normalisation invariants: p >= 1000 inner on samples, inner(x0) <= 0.1."""
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((samples, self.inner.dim))
        return bool(np.all(self.p.eval_many(X) >= 1000 * self.inner.eval_many(X) * (1 - 1e-12))
                    and self.inner(self.x0) <= 0.1 + 1e-15)


class ExtensionW(Norm):
    """Gauge of the balanced convex hull of A = {max(|x|, |a|) <= 1} and C = {(x0 + x, 2) : p(x) <= 1}.

    The circle of rotations is discretised into ``spec.rotations`` angles
    and the gauge is the optimal value of a second-order cone program
    min mu + sum nu_t over decompositions
    (x, a) = u + sum_t R_t (nu_t x0 + w_t, 2 nu_t), |u_x|, |u_a| <= mu,
    p(w_t) <= nu_t.
    """

    kind = "extension-w"

    def __init__(self, spec, tol=1e-10):
        n = spec.inner.dim
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "dim", n + 2)
        object.__setattr__(self, "tol", tol)
        object.__setattr__(self, "_J", standard_complex_structure(n))

    def __setattr__(self, name, value):
        raise AttributeError("ExtensionW is immutable")

    def gauge(self, z, rotations=None):
        import cvxpy as cp

        z = np.asarray(z, dtype=float)
        spec = self.spec
        n = spec.inner.dim
        N = rotations or spec.rotations
        th = 2 * np.pi * np.arange(N) / N
        mu = cp.Variable(nonneg=True)
        nu = cp.Variable(N, nonneg=True)
        u = cp.Variable(n)
        ua = cp.Variable(2)
        W = cp.Variable((N, n))
        cons = [_cvx_norm(spec.inner, u) <= mu, cp.norm(ua, 2) <= mu]
        cons += [_cvx_norm(spec.p, W[t]) <= nu[t] for t in range(N)]
        # sum_t R_t (nu_t x0 + w_t) with R_t = cos t I + sin t J
        c, s = np.cos(th), np.sin(th)
        Jx0 = self._J @ spec.x0
        xpart = (spec.x0[:, None] * c[None, :] + Jx0[:, None] * s[None, :]) @ nu
        xpart = xpart + (W.T @ c) + self._J @ (W.T @ s)
        cons += [u + xpart == z[:n],
                 ua[0] + 2 * (c @ nu) == z[n],
                 ua[1] + 2 * (s @ nu) == z[n + 1]]
        prob = cp.Problem(cp.Minimize(mu + cp.sum(nu)), cons)
        try:
            prob.solve(solver=cp.CLARABEL, tol_gap_abs=self.tol, tol_gap_rel=self.tol,
                       tol_feas=self.tol)
        except cp.error.SolverError as exc:
            raise SolverError(f"cone solver failed: {exc}") from exc
        if prob.status not in ("optimal", "optimal_inaccurate"):
            raise SolverError(f"cone solver status {prob.status}")
        return float(prob.value)

    def eval_many(self, X):
        X = _check_batch(X, self.dim)
        return np.array([0.0 if not np.any(x) else self.gauge(x) for x in X])

    def gauge_with_refinement(self, z):
        """Value at the declared resolution, at half of it, and their difference."""
        full = self.gauge(z)
        half = self.gauge(z, self.spec.rotations // 2)
        return {"value": full, "half_resolution": half, "refinement_delta": half - full}

    def member(self, z, slack=1e-9):
        """Convex feasibility test z in W (decomposition with total weight <= 1)."""
        return self.gauge(z) <= 1.0 + slack

    def gauge_by_bisection(self, z, tol=1e-8):
        return gauge_from_membership(self.member, z, tol=tol)

    def to_dict(self):
        from .serialize import norm_to_dict
        return {"kind": self.kind, "dim": self.dim, "inner": norm_to_dict(self.spec.inner),
                "p": norm_to_dict(self.spec.p), "x0": self.spec.x0.tolist(),
                "rotations": self.spec.rotations, "normalization": self.spec.normalization}


def extension_norm_w(spec, tol=1e-10):
    return ExtensionW(spec, tol)
