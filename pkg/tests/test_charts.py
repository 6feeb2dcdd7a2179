import numpy as np
import pytest

from cs4d.charts import DOMAINS, domain, integrate, volume
from cs4d.errors import DomainMismatchError
from cs4d.fields import Generator, eval_form, eval_jet, random_connection
from cs4d.forms import Form, wedge_chain


@pytest.mark.parametrize("name", list(DOMAINS))
def test_volumes(name):
    dom = DOMAINS[name]
    assert abs(volume(dom, 16) - dom.volume) < 1e-10


def test_unknown_domain():
    with pytest.raises(DomainMismatchError):
        domain("T2")


def test_odd_integrand_vanishes_by_parity():
    # odd in x1 over D4
    gen = Generator("D4", "algebra", [(None, (1, 0, 0, 0), np.eye(1, dtype=complex))])

    def integrand(ctx):
        from cs4d.charts import volume_integrand

        vol = volume_integrand(DOMAINS["D4"])(ctx)
        return vol * eval_jet(gen, ctx, 0).value[:, 0, 0]

    assert abs(integrate(DOMAINS["D4"], integrand, 12, order=2)) < 1e-12


def test_orientation_reversal_negates():
    dom = DOMAINS["D4"]
    val = integrate(dom, lambda ctx: ctx.ambient[0].value**2, 6, order=0)
    rev = integrate(dom.reversed(), lambda ctx: ctx.ambient[0].value**2, 6, order=0)
    assert val == -rev


def _trace_chain(gens, ctx, order=0):
    fs = [eval_form(g, ctx, order=order) for g in gens]
    return wedge_chain(*fs).trace()


@pytest.mark.parametrize("ball,sphere,deg,q,tol", [
    ("D2", "S1", 1, 16, 1e-7),
    ("D4", "S3", 3, 16, 1e-7),
    ("D5", "S4", 4, 12, 1e-7),
])
def test_stokes(ball, sphere, deg, q, tol):
    rng = np.random.default_rng(5)
    n = 2
    max_degree = 1 if ball == "D5" else 2
    gens = [random_connection(rng, ball, n, max_degree=max_degree) for _ in range(deg)]
    if deg == 1:
        # give the one-form a nonzero trace: multiply by a scalar polynomial matrix
        xi = Generator(ball, "algebra", [(None, (1, 1), np.eye(n, dtype=complex))])

        def w(ctx, order=0):
            a = eval_form(gens[0], ctx, order=order)
            x = Form.from_jet(eval_jet(xi, ctx, order=order))
            return x.wedge(a).trace()
    else:
        def w(ctx, order=0):
            return _trace_chain(gens, ctx, order)

    val_ball = integrate(DOMAINS[ball], lambda c: c.top(w(c, 1).d()), q, order=2)
    val_sph = integrate(DOMAINS[sphere], lambda c: c.top(w(c)), q, order=2)
    assert abs(val_ball - val_sph) < tol * max(abs(val_sph), 1e-3)


def test_quadrature_refinement():
    # suite-style integrand: Tr[(a^b - b^a)^F_A] at the default bulk order
    from cs4d.forms import curvature

    rng = np.random.default_rng(3)
    a_gen = random_connection(rng, "D4", 3)
    t1 = random_connection(rng, "D4", 3)
    t2 = random_connection(rng, "D4", 3)

    def w(ctx):
        af = eval_form(a_gen, ctx, order=1)
        x = eval_form(t1, ctx, order=0)
        y = eval_form(t2, ctx, order=0)
        return ctx.top((x.wedge(y) - y.wedge(x)).wedge(curvature(af)).trace())

    v1 = integrate(DOMAINS["D4"], w, 12, order=2)
    v2 = integrate(DOMAINS["D4"], w, 18, order=2)
    assert abs(v1 - v2) / max(abs(v2), 1e-12) < 1e-8


def test_hemisphere_pieces_match_disc():
    # integrals of x5-independent 4-forms agree on the flat disc and the upper
    # cap, and flip sign on the lower cap
    rng = np.random.default_rng(11)
    gens = [random_connection(rng, "D4", 2) for _ in range(4)]
    disc = integrate(DOMAINS["D4"], lambda c: c.top(_trace_chain(gens, c)), 14, order=1)
    up = integrate(DOMAINS["S4"].restricted(0), lambda c: c.top(_trace_chain(gens, c)), 14, order=1)
    lo = integrate(DOMAINS["S4"].restricted(1), lambda c: c.top(_trace_chain(gens, c)), 14, order=1)
    assert abs(up - disc) < 1e-9 * abs(disc)
    assert abs(lo + disc) < 1e-9 * abs(disc)


def test_determinism():
    rng = np.random.default_rng(13)
    gens = [random_connection(rng, "D4", 2) for _ in range(4)]
    xi = Generator("D4", "algebra", [(None, (0, 1, 0, 1), np.eye(2, dtype=complex))])

    def w(ctx):
        chain = wedge_chain(*[eval_form(g, ctx, order=0) for g in gens])
        return ctx.top(Form.from_jet(eval_jet(xi, ctx, 0)).wedge(chain).trace())

    v1 = integrate(DOMAINS["D4"], w, 10, order=1)
    v2 = integrate(DOMAINS["D4"], w, 10, order=1)
    assert v1 == v2
