import numpy as np
import pytest

from cs4d import lie
from cs4d.errors import ShapeError, SingularJetError
from cs4d.jets import Jet, jet_arith


def random_matrix_jet(rng, m, n, batch=4, order=2, scale=0.6):
    v = scale * (rng.standard_normal((batch, n, n)) + 1j * rng.standard_normal((batch, n, n)))
    g = scale * (rng.standard_normal((m, batch, n, n)) + 1j * rng.standard_normal((m, batch, n, n)))
    h = rng.standard_normal((m, m, batch, n, n)) + 1j * rng.standard_normal((m, m, batch, n, n))
    h = 0.5 * scale * (h + h.swapaxes(0, 1))
    return Jet(m, order, v, g, h, "m")


def jets_close(a, b, tol=1e-12):
    assert np.abs(a.value - b.value).max() < tol
    if min(a.order, b.order) >= 1:
        assert np.abs(a.grad - b.grad).max() < tol
    if min(a.order, b.order) >= 2:
        assert np.abs(a.hess - b.hess).max() < tol


def test_exp_of_zero_jet_is_identity():
    z = Jet.const(3, np.zeros((2, 2), dtype=complex), order=2, batch=5)
    e = z.expm()
    assert np.abs(e.value - np.eye(2)).max() < 1e-15
    assert np.abs(e.grad).max() < 1e-15
    assert np.abs(e.hess).max() < 1e-15


def test_exp_scalar_taylor():
    # jet of t at 0 embedded as a 1x1 matrix: exp has value, grad, hess all 1
    t = Jet(1, 2, np.zeros((1, 1, 1), dtype=complex),
            np.ones((1, 1, 1, 1), dtype=complex), np.ones((1, 1, 1, 1, 1), dtype=complex) * 0.0, "m")
    e = t.expm()
    assert abs(e.value[0, 0, 0] - 1.0) < 1e-15
    assert abs(e.grad[0, 0, 0, 0] - 1.0) < 1e-14
    assert abs(e.hess[0, 0, 0, 0, 0] - 1.0) < 1e-14


def test_mul_inverse_round_trip():
    rng = np.random.default_rng(0)
    g = random_matrix_jet(rng, 4, 3)
    g = Jet(4, 2, g.value + 3 * np.eye(3), g.grad, g.hess, "m")
    ident = jet_arith("multiply", [g, jet_arith("inverse", [g])])
    assert np.abs(ident.value - np.eye(3)).max() < 1e-12
    assert np.abs(ident.grad).max() < 1e-12
    assert np.abs(ident.hess).max() < 1e-11


def test_inverse_singular_raises():
    z = Jet.const(2, np.zeros((2, 2), dtype=complex), order=1, batch=1)
    with pytest.raises(SingularJetError):
        z.inverse()


def test_exp_matches_group_exp_and_derivative():
    # exp(t X) along a coordinate: gradient must be X exp(X) at t=1... use
    # the jet of f(u) = u1 * X at u1 = 1 and compare against finite differences.
    rng = np.random.default_rng(1)
    x = lie.random_algebra(rng, 3, scale=0.8)
    m = 2
    u = np.array([[1.0], [0.3]])
    coords = Jet.coords(u, order=2)
    fx = Jet(m, 2, coords[0].value[..., None, None] * x,
             coords[0].grad[..., None, None] * x,
             coords[0].hess[..., None, None] * x, "m")
    e = fx.expm()
    assert np.abs(e.value[0] - lie.group_exp(x)).max() < 1e-13
    eps = 1e-6
    fd = (lie.group_exp((1 + eps) * x) - lie.group_exp((1 - eps) * x)) / (2 * eps)
    assert np.abs(e.grad[0, 0] - fd).max() < 1e-9
    eps2 = 1e-4
    fdd = (lie.group_exp((1 + eps2) * x) - 2 * lie.group_exp(x)
           + lie.group_exp((1 - eps2) * x)) / eps2**2
    assert np.abs(e.hess[0, 0, 0] - fdd).max() < 1e-6


def test_product_rule_consistency():
    rng = np.random.default_rng(2)
    a = random_matrix_jet(rng, 3, 2)
    b = random_matrix_jet(rng, 3, 2)
    ab = a.mul(b)
    assert np.abs(ab.value - a.value @ b.value).max() < 1e-14
    i, j = 1, 2
    want = (a.hess[i, j] @ b.value + a.grad[i] @ b.grad[j]
            + a.grad[j] @ b.grad[i] + a.value @ b.hess[i, j])
    assert np.abs(ab.hess[i, j] - want).max() < 1e-13


def test_order_mismatch_addition_guard():
    a = Jet.const(2, np.eye(2, dtype=complex), order=2, batch=1)
    with pytest.raises(ShapeError):
        a + 1.0  # type: ignore[operator]
