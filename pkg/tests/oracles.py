"""Independent reference implementations used only by the tests."""
import itertools

import numpy as np
from scipy.spatial import ConvexHull

from renorm.pimple import tips


def polygon_gauge(spec, X, vertices=16384):
    """Gauge of conv(base ball, tips) in R^2 via an inscribed polygon hull.

    The base ball is replaced by ``vertices`` boundary points, so the
    result overestimates the true gauge by at most the polygon sag
    (about 2e-8 for the unit disk at the default resolution).
    """
    th = 2 * np.pi * np.arange(vertices) / vertices
    U = np.column_stack([np.cos(th), np.sin(th)])
    B = U / spec.base.eval_many(U)[:, None]
    hull = ConvexHull(np.vstack([B, tips(spec)]))
    A, c = hull.equations[:, :2], -hull.equations[:, 2]
    return np.max((np.atleast_2d(X) @ A.T) / c, axis=1)


def day_brute_force(X, base=0.25):
    """Day norm by enumerating every tuple of distinct indices, for all rows of X."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = X.shape[1]
    best = np.zeros(len(X))
    for k in range(1, n + 1):
        T = np.array(list(itertools.permutations(range(n), k)))
        S = sum(X[:, T[:, r]] ** 2 * base ** (r + 1) for r in range(k))
        best = np.maximum(best, S.max(axis=1))
    return np.sqrt(best)
