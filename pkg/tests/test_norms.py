import numpy as np
import pytest

from renorm import (ArgumentError, Day, Euclidean, GAverage, L2Sum, MaxSeminorms, OracleError,
                    ScaledSum, SpecError, SumSquares, WeightedLp, check_norm_axioms,
                    gauge_from_membership, group_closure, lur_modulus)
from renorm.norms import Norm

from oracles import day_brute_force

ALL_NORMS = [
    Euclidean(np.array([[4.0, 1.0], [1.0, 2.0]])),
    WeightedLp(3, [1.0, 2.0]),
    WeightedLp.lp(4, 3),
    WeightedLp(np.inf, [1.0, 2.0]),
    WeightedLp(1, [1.0, 3.0]),
    Day(4),
    MaxSeminorms((np.eye(2), np.array([[1.0, 1.0]]))),
    SumSquares((Euclidean.identity(2), WeightedLp.lp(4, 2))),
    L2Sum((Euclidean.identity(2), Day(2))),
    ScaledSum((Day(3), Euclidean.identity(3)), (1.0, 2.0)),
]


@pytest.mark.parametrize("norm", ALL_NORMS, ids=lambda n: f"{n.kind}-{n.dim}")
def test_axioms(norm):
    assert check_norm_axioms(norm, 300, seed=3).passed()


@pytest.mark.parametrize("norm", ALL_NORMS, ids=lambda n: f"{n.kind}-{n.dim}")
def test_gradient_is_norming_functional(norm):
    rng = np.random.default_rng(7)
    X = rng.standard_normal((20, norm.dim))
    G = norm.grad_many(X)
    assert np.allclose(np.sum(G * X, axis=1), norm.eval_many(X), rtol=1e-6)
    assert np.allclose(norm.dual_many(G), 1.0, atol=1e-5)


@pytest.mark.parametrize("norm", ALL_NORMS, ids=lambda n: f"{n.kind}-{n.dim}")
def test_dual_matches_generic_search(norm):
    u = np.random.default_rng(11).standard_normal(norm.dim)
    # the generic Nelder-Mead search is a lower bound for the sup
    assert norm.dual(u) >= Norm.dual(norm, u) - 1e-9
    assert norm.dual(u) == pytest.approx(Norm.dual(norm, u), rel=1e-5)


def test_known_values():
    assert Euclidean(np.diag([4.0, 1.0]))(np.array([1.0, 1.0])) == pytest.approx(np.sqrt(5), abs=1e-15)
    assert WeightedLp(3, [1.0, 2.0])(np.array([1.0, 1.0])) == pytest.approx(3 ** (1 / 3), abs=1e-15)
    assert WeightedLp(np.inf, [1.0, 2.0])(np.array([1.0, 1.0])) == 2.0
    assert WeightedLp(np.inf, [1.0, 2.0]).dual(np.array([1.0, 1.0])) == pytest.approx(1.5)
    # sqrt(1/4 + 1/16)
    assert Day(4)(np.array([1.0, 1.0, 0.0, 0.0])) == pytest.approx(0.5590169943749475, abs=1e-15)
    assert MaxSeminorms((np.eye(2), np.array([[1.0, 1.0]])))(np.array([1.0, 1.0])) == 2.0


@pytest.mark.parametrize("n", range(1, 7))
def test_day_against_enumeration(n):
    X = np.random.default_rng(n).standard_normal((200, n))
    assert np.max(np.abs(Day(n).eval_many(X) - day_brute_force(X))) <= 1e-12
    assert Day(n).brute_force(X[0]) == pytest.approx(day_brute_force(X[:1])[0], abs=1e-14)


def test_day_is_symmetric_under_signed_permutations():
    d = Day(5)
    x = np.random.default_rng(0).standard_normal(5)
    assert d(x[::-1] * np.array([1, -1, 1, -1, -1])) == pytest.approx(d(x), abs=1e-15)


def test_g_average_is_invariant():
    R = np.array([[0.0, -1.0], [1.0, 0.0]])
    G = group_closure([R])
    n = GAverage(WeightedLp(3, [1.0, 3.0]), G)
    X = np.random.default_rng(1).standard_normal((50, 2))
    assert np.allclose(n.eval_many(X @ R.T), n.eval_many(X), rtol=1e-13)


def test_lur_modulus_of_hilbert_space():
    # lambda(x, eps) = sqrt(1 - eps^2 / 4) in a Hilbert space
    e = Euclidean.identity(2)
    for eps in (0.5, 1.0, 1.5):
        assert lur_modulus(e, np.array([1.0, 0.0]), eps, 256) == pytest.approx(np.sqrt(1 - eps ** 2 / 4), abs=1e-8)


def test_lur_modulus_detects_flat_sphere():
    sup = WeightedLp(np.inf, [1.0, 1.0])
    assert lur_modulus(sup, np.array([1.0, 0.5]), 0.5, 256) == pytest.approx(1.0)


def test_gauge_from_membership():
    disk = lambda z: np.linalg.norm(z) <= 1.0
    assert gauge_from_membership(disk, np.array([3.0, 4.0])) == pytest.approx(5.0, abs=1e-9)


def test_gauge_from_membership_rejects_inconsistent_oracle():
    # an annulus is not convex; the ray test meets "outside, then inside"
    ring = lambda z: 0.5 <= np.linalg.norm(z) <= 1.0
    with pytest.raises(OracleError):
        gauge_from_membership(ring, np.array([0.2, 0.0]))


def test_axiom_probe_flags_non_norm():
    class Square:
        dim = 2

        def __call__(self, x):
            return float(x @ x)

    rep = check_norm_axioms(Square(), 50)
    assert not rep.passed()
    assert rep.homogeneity > 1.0


def test_construction_errors():
    with pytest.raises(SpecError):
        Euclidean(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(SpecError):
        WeightedLp(0.5, [1.0, 1.0])
    with pytest.raises(SpecError):
        WeightedLp(2, [1.0, -1.0])
    with pytest.raises(ArgumentError):
        Day(3)(np.ones(4))
    with pytest.raises(ArgumentError):
        lur_modulus(Euclidean.identity(2), np.array([2.0, 0.0]), 0.5, 16)


def test_norms_are_immutable():
    e = Euclidean.identity(2)
    with pytest.raises(Exception):
        e.gram[0, 0] = 5.0
    with pytest.raises(Exception):
        e.gram = np.eye(2)
