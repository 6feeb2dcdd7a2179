import math

import numpy as np
import pytest

from cs4d import lie
from cs4d.charts import DOMAINS, integrate
from cs4d.errors import NotFlatError
from cs4d.fields import (
    AdjAction,
    ConstOneForm,
    CovD,
    Generator,
    MC,
    eval_form,
    random_algebra_field,
    random_connection,
    random_gauge_field,
    random_tangent,
)
from cs4d.forms import curvature, covariant_d
from cs4d.functionals import (
    AFunctional,
    functional_derivative,
    moment,
    moment_functional,
    omega,
    omega_dtilde,
    omega_flat,
    omega_functional,
    realness,
    stencil,
    theta,
    theta_functional,
    tilde_d1,
    tilde_d2,
)

N = 3
Q = 10


@pytest.fixture(scope="module")
def fields():
    rng = np.random.default_rng(11)
    return {
        "A": random_connection(rng, "D4", N, amp=0.9),
        "a": random_tangent(rng, "D4", N, amp=0.9),
        "b": random_tangent(rng, "D4", N, amp=0.9),
        "c": random_tangent(rng, "D4", N, amp=0.9),
        "xi": random_algebra_field(rng, "D4", N, boundary=("boundary_trivial", 2), amp=0.9),
        "eta": random_algebra_field(rng, "D4", N, boundary=("boundary_trivial", 2), amp=0.9),
        "g": random_gauge_field(rng, "D4", N, amp=0.9),
    }


def test_stencil_exactness():
    ts, ws = stencil(5, 0.4)
    for k in range(6):
        d = sum(w * t**k for t, w in zip(ts, ws))
        want = 1.0 if k == 1 else 0.0
        assert abs(d - want) < 1e-11


def test_omega_zero_connection(fields):
    zero = Generator("D4", "one_form", [], n=N)
    val = omega(zero, fields["a"], fields["b"], "total", "D4", 8)
    assert abs(val) < 1e-14


def test_omega_antisymmetry(fields):
    val = omega(fields["A"], fields["a"], fields["a"], "total", "D4", 8)
    assert abs(val) < 1e-15


def test_omega_refinement(fields):
    v1 = omega(fields["A"], fields["a"], fields["b"], "total", "D4", 12)
    v2 = omega(fields["A"], fields["a"], fields["b"], "total", "D4", 18)
    assert abs(v1 - v2) < 1e-8 * max(abs(v2), 1e-9)


def test_omega_flat_gauge_direction_degenerate(fields):
    a_flat = MC(fields["g"], "left")
    t1 = AdjAction(fields["g"], ConstOneForm({0: lie.su_basis(N)[0], 3: lie.su_basis(N)[4]}, 4))
    v = omega_flat(a_flat, t1, CovD(a_flat, fields["xi"]), "D4", 10)
    assert abs(v) < 1e-8
    # value is i times a real number for su(n) data
    v2 = omega_flat(a_flat, t1, AdjAction(fields["g"], ConstOneForm({1: lie.su_basis(N)[1]}, 4)), "D4", 10)
    assert abs(v2.real) < 1e-9 * max(abs(v2), 1e-12)


def test_omega_flat_rejects_nonflat(fields):
    with pytest.raises(NotFlatError):
        omega_flat(fields["A"], fields["a"], fields["b"], "D4", 8)


def test_moment_trivial_cases(fields):
    zero_xi = Generator("D4", "algebra", [], n=N)
    assert abs(moment(fields["A"], zero_xi, "D4", 8)) < 1e-15
    a_flat = MC(fields["g"], "left")
    assert abs(moment(a_flat, fields["xi"], "D4", 8)) < 1e-12


def test_moment_linearity(fields):
    from cs4d.fields import Lin

    v1 = moment(fields["A"], fields["xi"], "D4", 10)
    v2 = moment(fields["A"], fields["eta"], "D4", 10)
    v12 = moment(fields["A"], Lin([(1.0, fields["xi"]), (1.0, fields["eta"])]), "D4", 10)
    assert abs(v12 - v1 - v2) < 1e-10 * max(1.0, abs(v12))


def test_functional_derivative_constant():
    const = AFunctional(lambda A: 2.5 + 0.0j, 0)
    rng = np.random.default_rng(0)
    A = random_connection(rng, "D4", 2)
    c = random_tangent(rng, "D4", 2)
    assert functional_derivative(const, A, c) == 0.0


def test_moment_derivative_matches_analytic(fields):
    # d/dt Phi^xi(A + t a) = 1/(8 pi^3) Int Tr[(d_A a ^ F + F ^ d_A a) xi]
    A, a, xi = fields["A"], fields["a"], fields["xi"]
    q = 14
    lhs, scale = functional_derivative(moment_functional(xi, "D4", q), A, a,
                                       h=0.3, with_scale=True)

    def integrand(ctx):
        from cs4d.fields import eval_jet
        from cs4d.forms import Form

        af = eval_form(A, ctx, order=1)
        t = eval_form(a, ctx, order=1)
        f = curvature(af)
        da = t.d() + af.truncate(0).wedge(t.truncate(0)) + t.truncate(0).wedge(af.truncate(0))
        xif = Form.from_jet(eval_jet(xi, ctx, order=0))
        return ctx.top((da.wedge(f) + f.wedge(da)).wedge(xif).trace())

    rhs = integrate(DOMAINS["D4"], integrand, q, order=2) / (8 * math.pi**3)
    assert abs(lhs - rhs) < 1e-9 * max(scale, abs(lhs), 1e-12)


def test_quintic_derivative_matches_analytic():
    # Psi(A) = Int_{D5} Tr(A^3 ^ dA); hand-derived derivative
    rng = np.random.default_rng(3)
    A = random_connection(rng, "D5", 2, amp=0.8)
    a = random_tangent(rng, "D5", 2, amp=0.8)
    q = 8

    def psi(field):
        def integrand(ctx):
            from cs4d.forms import wedge_power

            af = eval_form(field, ctx, order=1)
            return ctx.top(wedge_power(af.truncate(0), 3).wedge(af.d()).trace())

        return integrate(DOMAINS["D5"], integrand, q, order=2)

    lhs = functional_derivative(AFunctional(psi, 4), A, a, h=0.3)

    def danalytic(ctx):
        af = eval_form(A, ctx, order=1)
        t = eval_form(a, ctx, order=1)
        a0, t0 = af.truncate(0), t.truncate(0)
        cubic_var = (t0.wedge(a0).wedge(a0) + a0.wedge(t0).wedge(a0)
                     + a0.wedge(a0).wedge(t0))
        expr = cubic_var.wedge(af.d()) + a0.wedge(a0).wedge(a0).wedge(t.d())
        return ctx.top(expr.trace())

    rhs = integrate(DOMAINS["D5"], danalytic, q, order=2)
    assert abs(lhs - rhs) < 1e-9 * max(abs(lhs), abs(rhs), 1e-12)


def test_tilde_d_squared_vanishes(fields):
    phi = moment_functional(fields["xi"], "D4", 8)
    grad = AFunctional(lambda A, t: functional_derivative(phi, A, t, h=0.35), 3, "dphi")
    val, scale = tilde_d1(grad, fields["A"], fields["a"], fields["b"], h=0.25)
    assert abs(val) < 1e-8 * max(scale, 1e-12)


def test_tilde_d1_linear_two_ways(fields):
    # theta linear in A: analytic d-theta via direct antisymmetrization
    lin = AFunctional(lambda A, t: omega(A, t, fields["c"], "boundary", "D4", 8), 1, "lin")
    v, s = tilde_d1(lin, fields["A"], fields["a"], fields["b"], h=0.4)
    d1 = omega(fields["a"], fields["b"], fields["c"], "boundary", "D4", 8)
    d2 = omega(fields["b"], fields["a"], fields["c"], "boundary", "D4", 8)
    assert abs(v - (d1 - d2)) < 1e-10 * max(abs(v), s, 1e-12)


def test_closedness_fused_and_generic_agree(fields):
    val, scale = omega_dtilde(fields["A"], fields["a"], fields["b"], fields["c"], "D4", Q)
    assert abs(val) < 1e-7 * scale
    om = omega_functional("D4", "total", Q)
    val2, scale2 = tilde_d2(om, fields["A"], fields["a"], fields["b"], fields["c"], h=0.3)
    assert abs(val2) < 1e-6 * scale2


def test_theta_trivial_and_flat_modes(fields):
    zero = Generator("D4", "one_form", [], n=N)
    assert abs(theta(zero, fields["a"], "full", "D4", 8)) < 1e-15
    a_flat = MC(fields["g"], "left")
    full = theta(a_flat, fields["a"], "full", "D4", 12)
    flat = theta(a_flat, fields["a"], "flat", "D4", 12)
    assert abs(full - flat) < 1e-9 * max(1.0, abs(full))
    with pytest.raises(NotFlatError):
        theta(fields["A"], fields["a"], "flat", "D4", 8)


def test_theta_curvature_identity(fields):
    th = theta_functional("D4", 12)
    val, scale = tilde_d1(th, fields["A"], fields["a"], fields["b"], h=0.3)
    om = omega(fields["A"], fields["a"], fields["b"], "total", "D4", 12)
    assert abs(val + 1j * om) < 1e-7 * max(abs(om), scale * 1e-3)


def test_gauge_invariance_of_omega(fields):
    g0 = random_gauge_field(np.random.default_rng(7), "D4", N,
                            boundary=("boundary_trivial", 2), amp=0.9)
    from cs4d.fields import GaugeApply

    v1 = omega(fields["A"], fields["a"], fields["b"], "total", "D4", Q)
    v2 = omega(GaugeApply(g0, fields["A"]), AdjAction(g0, fields["a"]),
               AdjAction(g0, fields["b"]), "total", "D4", Q)
    assert abs(v1 - v2) < 1e-7 * max(abs(v1), 1e-12)


def test_realness_diagnostic():
    assert realness(1.0 + 1e-12j) < 1e-11
    assert realness(1e-12 + 1.0j) > 1e11
