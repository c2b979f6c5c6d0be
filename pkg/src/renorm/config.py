"""Central tolerance and parameter record."""
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Config:
    """Numerical defaults used across the package.

    Every routine that needs a tolerance takes an optional ``config``
    argument and falls back to :data:`DEFAULT`.
    """

    eval_tol: float = 1e-10
    axiom_tol: float = 1e-10
    rcond_min: float = 1e-10
    day_base: float = 0.25

    # pimple gauge solver
    pimple_tol: float = 1e-9
    max_iter: int = 400
    dual_starts: int = 64

    # parameter schedule
    safety: float = 0.9
    m: float = 0.5
    delta0: float = 1.0
    lambda_ratio: float = 0.7
    min_excess: float = 1e-15
    lur_grid: int = 256
    strict_facet: bool = False

    # orbit factory
    alpha_cap: float = 0.99
    rank_tol: float = 1e-8

    # groups and isometries
    dedup_tol: float = 1e-9
    closure_cap: int = 10000
    tip_tol: float = 1e-7
    isometry_tol: float = 1e-7
    isometry_samples: int = 256

    seed: int = 0

    def with_(self, **changes):
        """Return a copy with some fields replaced."""
        return replace(self, **changes)


DEFAULT = Config()
