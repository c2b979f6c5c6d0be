import numpy as np
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from renorm import Day, WeightedLp, kalton_projections, l2_canonical_form, pimple_norm
from renorm import serialize as S
from renorm.complex_structures import canonical_residual, standard_complex_structure
from renorm.corpus import single_pair, two_orbits_euclidean
from renorm.group_rep import cyclic, direct_product, fini_rep_list, is_homomorphism, sign_product_table

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
vec2 = arrays(np.float64, 2, elements=finite)


@given(st.floats(1.0, 8.0), vec2, vec2, st.floats(-10, 10))
def test_weighted_lp_axioms(p, x, y, a):
    n = WeightedLp(p, [1.0, 2.5])
    assert n(x + y) <= n(x) + n(y) + 1e-9 * (1 + n(x) + n(y))
    assert abs(n(a * x) - abs(a) * n(x)) <= 1e-9 * (1 + abs(a) * n(x))


@given(arrays(np.float64, 5, elements=finite), st.permutations(range(5)))
def test_day_signed_permutation_invariance(x, perm):
    d = Day(5)
    signs = np.where(np.arange(5) % 2, -1.0, 1.0)
    assert abs(d(x[list(perm)] * signs) - d(x)) <= 1e-12 * (1 + d(x))


@settings(max_examples=40, deadline=None)
@given(vec2)
def test_pimple_sandwich(x):
    for spec in (single_pair(), two_orbits_euclidean()):
        v = pimple_norm(spec)(x)
        b = spec.base(x)
        assert min(spec.lambdas) * b - 1e-9 <= v <= b + 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_canonical_form_random(k, seed):
    n = 2 * k
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    Q = q * np.sign(np.diag(r))
    A = Q @ standard_complex_structure(n) @ Q.T
    block, orth = canonical_residual(A, l2_canonical_form(A))
    assert block <= 1e-10 and orth <= 1e-10
    B = Q @ (standard_complex_structure(n) * rng.choice([-1.0, 1.0], k).repeat(2)[:, None]) @ Q.T
    assert kalton_projections(A, B).worst <= 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4))
def test_fini_rep_products_of_cyclic_groups(a, b):
    t = direct_product(cyclic(a), cyclic(b))
    assert is_homomorphism(sign_product_table(t), fini_rep_list(t, 1))


json_leaf = st.one_of(st.integers(-10**6, 10**6), st.floats(allow_nan=False, allow_infinity=False),
                      st.text(max_size=8), st.booleans(), st.none())
json_doc = st.recursive(json_leaf, lambda c: st.one_of(st.lists(c, max_size=4),
                                                       st.dictionaries(st.text(max_size=5), c, max_size=4)),
                        max_leaves=20)


@given(json_doc)
def test_dumps_is_a_fixed_point(doc):
    text = S.dumps(doc)
    assert S.dumps(S.loads(text)) == text
