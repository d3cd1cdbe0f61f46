import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from triobose import gaussian as ga
from triobose.gaussian import GaussianSum


def random_term(rng, dim, lo=0.2, hi=2.0, mu_scale=1.0, coeff=None):
    Q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    A = Q @ np.diag(rng.uniform(lo, hi, dim)) @ Q.T
    mu = rng.uniform(-mu_scale, mu_scale, dim)
    c = rng.uniform(0.5, 2.0) if coeff is None else coeff
    return GaussianSum.single(A, mu, c)


def random_sum(rng, dim, terms=2):
    s = random_term(rng, dim)
    for _ in range(terms - 1):
        s = s + random_term(rng, dim)
    return s


def tensor_rule(dim, n=100, half=12.0):
    t, w = np.polynomial.legendre.leggauss(n)
    t, w = half * t, half * w
    pts = np.stack([g.reshape(-1) for g in np.meshgrid(*([t] * dim), indexing="ij")], axis=-1)
    wts = np.prod(np.stack([g.reshape(-1) for g in np.meshgrid(*([w] * dim), indexing="ij")]), axis=0)
    return pts, wts


def brute_marginal(s, keep, x_keep, n=100):
    """Tensor Gauss-Legendre over the dropped variables; independent of the Schur route."""
    drop = [i for i in range(s.dim) if i not in keep]
    pts, wts = tensor_rule(len(drop), n)
    full = np.zeros((pts.shape[0], s.dim))
    full[:, drop] = pts
    full[:, keep] = x_keep
    return wts @ s(full)


# -- evaluate ---------------------------------------------------------------------


def test_evaluate_trivial():
    s = GaussianSum.single(np.eye(3))
    assert s([0.0, 0.0, 0.0]) == 1.0
    one = GaussianSum.single([[1.0]])
    assert one([1.0]) == pytest.approx(np.exp(-1.0), rel=1e-15)
    assert (one + one)([0.4]) == pytest.approx(2 * one([0.4]), rel=1e-15)


def test_evaluate_dimension_mismatch():
    with pytest.raises(ga.DimensionError):
        GaussianSum.single(np.eye(2))([1.0, 2.0, 3.0])


def test_empty_sum_is_zero():
    z = GaussianSum.zero(2)
    assert z([0.1, 0.2]) == 0.0
    assert ga.integral(z) == 0.0


# -- product ----------------------------------------------------------------------


def test_product_completing_the_square():
    a = GaussianSum.single([[1.0]])
    b = GaussianSum.single([[1.0]], [1.0])
    p = ga.product(a, b)
    assert len(p) == 1
    assert p.prec[0, 0, 0] == pytest.approx(2.0)
    assert p.mu[0, 0] == pytest.approx(0.5)
    assert p.coeff[0] == pytest.approx(np.exp(-0.5), rel=1e-15)


def test_product_with_constant_is_identity():
    rng = np.random.default_rng(0)
    s = random_sum(rng, 3)
    p = ga.product(s, GaussianSum.constant(1.0, 3))
    x = rng.normal(size=(50, 3))
    np.testing.assert_allclose(p(x), s(x), rtol=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_product_pointwise(seed, dim):
    rng = np.random.default_rng(seed)
    a, b = random_sum(rng, dim, 2), random_sum(rng, dim, 3)
    p = ga.product(a, b)
    assert len(p) == 6
    x = rng.normal(scale=0.7, size=(100, dim))
    np.testing.assert_allclose(p(x), a(x) * b(x), rtol=1e-12)


def test_product_of_embedded_terms_with_singular_forms():
    rng = np.random.default_rng(1)
    a = ga.embed(random_term(rng, 2), 3, [0, 2])
    b = ga.embed(random_term(rng, 2), 3, [1, 2])
    p = ga.product(a, b)
    x = rng.normal(size=(40, 3))
    np.testing.assert_allclose(p(x), a(x) * b(x), rtol=1e-12)


# -- marginalize / integral ---------------------------------------------------------


def test_integral_trivial():
    assert ga.integral(GaussianSum.single([[1.0]])) == pytest.approx(np.sqrt(np.pi), rel=1e-15)
    assert ga.integral(GaussianSum.single(0.5 * np.eye(2))) == pytest.approx(2 * np.pi, rel=1e-15)


def test_integral_of_rounded_rho1_diagonal():
    s = GaussianSum.single([[1.6389]], coeff=0.2407)
    assert ga.integral(s) == pytest.approx(1 / 3, abs=2e-4)


def test_marginalize_separable():
    s = GaussianSum.single(np.eye(2))
    m = ga.marginalize(s, [0])
    x = np.linspace(-2, 2, 9)[:, None]
    np.testing.assert_allclose(m(x), np.sqrt(np.pi) * np.exp(-x[:, 0] ** 2), rtol=1e-14)


def test_marginalize_vs_adaptive_quadrature():
    rng = np.random.default_rng(11)
    s = random_term(rng, 3)
    m = ga.marginalize(s, [1])
    for x in (-0.8, 0.0, 0.45, 1.3):
        f = lambda z2, z0: s([z0, x, z2])  # noqa: E731
        ref, err = integrate.dblquad(f, -15, 15, -15, 15, epsabs=1e-14, epsrel=1e-12)
        assert m([x]) == pytest.approx(ref, rel=1e-8)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.data())
def test_marginalize_vs_tensor_quadrature(seed, dim, data):
    rng = np.random.default_rng(seed)
    s = random_sum(rng, dim, 2)
    keep = data.draw(st.lists(st.integers(0, dim - 1), min_size=1, max_size=dim - 1, unique=True))
    n_drop = dim - len(keep)
    if n_drop == 3:
        n = 70
    else:
        n = 100
    m = ga.marginalize(s, keep)
    for _ in range(3):
        xk = rng.uniform(-1, 1, len(keep))
        assert m(xk) == pytest.approx(brute_marginal(s, keep, xk, n), rel=1e-8)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_integral_vs_tensor_quadrature(seed, dim):
    rng = np.random.default_rng(seed)
    s = random_sum(rng, dim, 2)
    pts, wts = tensor_rule(dim, 100 if dim < 3 else 70)
    assert ga.integral(s) == pytest.approx(wts @ s(pts), rel=1e-8)


def test_marginalize_rejects_non_integrable():
    s = GaussianSum.single(np.diag([1.0, 0.0]))
    with pytest.raises(ga.NonIntegrableError):
        ga.marginalize(s, [0])
    # a degenerate kept direction is fine
    m = ga.marginalize(s, [1])
    assert m([5.0]) == pytest.approx(np.sqrt(np.pi))


def test_marginalize_orders_by_keep():
    rng = np.random.default_rng(2)
    s = random_term(rng, 3)
    a = ga.marginalize(s, [2, 0])
    b = ga.marginalize(s, [0, 2])
    x = rng.normal(size=(10, 2))
    np.testing.assert_allclose(a(x), b(x[:, ::-1]), rtol=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_marginalize_commutes_with_shift(seed):
    rng = np.random.default_rng(seed)
    s = random_sum(rng, 3, 2)
    t = rng.normal(size=3)
    lhs = ga.marginalize(ga.shift(s, t), [0, 2])
    rhs = ga.shift(ga.marginalize(s, [0, 2]), t[[0, 2]])
    x = rng.normal(size=(20, 2))
    np.testing.assert_allclose(lhs(x), rhs(x), rtol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_square_integral_nonnegative(seed, dim):
    rng = np.random.default_rng(seed)
    s = random_sum(rng, dim, 3)
    # signed coefficients exercise cancellation
    s = GaussianSum(s.coeff * rng.choice([-1.0, 1.0], len(s)), s.mu, s.prec)
    assert ga.integral(ga.product(s, s)) >= 0.0


# -- shift / permute / embed --------------------------------------------------------


def test_shift_examples():
    rng = np.random.default_rng(3)
    s = random_sum(rng, 2)
    x = rng.normal(size=(30, 2))
    np.testing.assert_array_equal(ga.shift(s, [0, 0])(x), s(x))
    one = GaussianSum.single([[1.0]])
    xc = 2.3
    np.testing.assert_allclose(ga.shift(one, [xc])(x[:, :1]), np.exp(-((x[:, 0] - xc) ** 2)), rtol=1e-14)
    t = rng.normal(size=2)
    np.testing.assert_allclose(ga.shift(ga.shift(s, t), -t)(x), s(x), rtol=1e-14)
    with pytest.raises(ga.DimensionError):
        ga.shift(s, [1.0])


def test_permute_and_embed():
    rng = np.random.default_rng(4)
    s = random_term(rng, 3)
    x = rng.normal(size=(20, 3))
    perm = [2, 0, 1]
    np.testing.assert_allclose(ga.permute(s, perm)(x), s(x[:, perm]), rtol=1e-14)
    e = ga.embed(s, 5, [4, 0, 2])
    y = rng.normal(size=(20, 5))
    np.testing.assert_allclose(e(y), s(y[:, [4, 0, 2]]), rtol=1e-14)


def test_prune_is_opt_in():
    s = GaussianSum.single([[1.0]], coeff=1.0) + GaussianSum.single([[1.0]], coeff=1e-20)
    assert len(ga.product(s, s)) == 4
    assert len(ga.prune(s)) == 1


def test_laplacian_ratio_vs_finite_differences():
    rng = np.random.default_rng(5)
    s = random_sum(rng, 3, 2)
    x = rng.normal(scale=0.5, size=3)
    h = 1e-4
    lap = 0.0
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        lap += (s(x + e) - 2 * s(x) + s(x - e)) / h**2
    assert ga.laplacian_ratio(s, x) == pytest.approx(lap / s(x), rel=1e-5)
