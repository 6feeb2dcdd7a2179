"""Pre-symplectic forms, the moment map, connection one-forms, and exact
differentiation in connection space.

All functionals are polynomial in the connection with a known degree bound, so
derivatives along affine lines A + t c are evaluated with polynomial-exact
central stencils; the only numerical error left is quadrature and roundoff.
"""

from __future__ import annotations

import math

import numpy as np

from .charts import DOMAINS, integrate
from .errors import DomainMismatchError, NotFlatError
from .fields import Lin, eval_form, eval_jet
from .forms import Form, curvature, wedge_power
from .holonomy import closedness_residual, flatness_residual

C_BULK = 1.0 / (8.0 * math.pi**3)
C_BDRY = 1.0 / (24.0 * math.pi**3)

_BOUNDARY = {"D2": "S1", "D4": "S3", "D5": "S4"}


class AFunctional:
    """Functional of the connection with a declared polynomial degree bound."""

    def __init__(self, evaluator, degree: int, name: str = ""):
        self.evaluator = evaluator
        self.degree = degree
        self.name = name

    def __call__(self, a_field, *tangents):
        return self.evaluator(a_field, *tangents)


def _antisym_pair(x: Form, y: Form) -> Form:
    return x.wedge(y) - y.wedge(x)


def omega(a_field, t1, t2, part: str = "total", domain_id: str = "D4",
          q: int = 12) -> complex:
    """Pre-symplectic pairing of two tangents at a connection.

    bulk: 1/(8 pi^3) Int_M Tr[(a b - b a) F_A];
    boundary: -1/(24 pi^3) Int_{dM} Tr[(a b - b a) A]; total is their sum.
    """
    dom = DOMAINS[domain_id]
    val = 0.0 + 0.0j
    if part in ("bulk", "total"):
        def bulk(ctx):
            af = eval_form(a_field, ctx, order=1)
            x = eval_form(t1, ctx, order=0)
            y = eval_form(t2, ctx, order=0)
            return ctx.top(_antisym_pair(x, y).wedge(curvature(af)).trace())

        val += C_BULK * integrate(dom, bulk, q, order=2)
    if part in ("boundary", "total"):
        if dom.boundary is None:
            if part == "boundary":
                raise DomainMismatchError(f"{domain_id} has no boundary")
        else:
            bdom = DOMAINS[dom.boundary]

            def bdry(ctx):
                af = eval_form(a_field, ctx, order=0)
                x = eval_form(t1, ctx, order=0)
                y = eval_form(t2, ctx, order=0)
                return ctx.top(_antisym_pair(x, y).wedge(af).trace())

            val += -C_BDRY * integrate(bdom, bdry, q, order=1)
    return val


def omega_functional(domain_id: str = "D4", part: str = "total", q: int = 12) -> AFunctional:
    return AFunctional(lambda A, a, b: omega(A, a, b, part, domain_id, q), 2, "omega")


def omega_flat(a_field, t1, t2, domain_id: str = "D4", q: int = 12,
               tol: float = 1e-8) -> complex:
    """Boundary pairing on the flat stratum; preconditions are enforced."""
    res = flatness_residual(a_field, domain_id)
    if res > tol:
        raise NotFlatError(f"connection flatness residual {res:.3e}")
    for t in (t1, t2):
        res = closedness_residual(a_field, t, domain_id)
        if res > tol:
            raise NotFlatError(f"tangent closedness residual {res:.3e}")
    return omega(a_field, t1, t2, "boundary", domain_id, q)


def moment(a_field, xi_field, domain_id: str = "D4", q: int = 12) -> complex:
    """1/(8 pi^3) Int_M Tr(F_A^2 xi)."""
    dom = DOMAINS[domain_id]

    def integrand(ctx):
        f = curvature(eval_form(a_field, ctx, order=1))
        xi = Form.from_jet(eval_jet(xi_field, ctx, order=0))
        return ctx.top(f.wedge(f).wedge(xi).trace())

    return C_BULK * integrate(dom, integrand, q, order=2)


def moment_functional(xi_field, domain_id: str = "D4", q: int = 12) -> AFunctional:
    return AFunctional(lambda A: moment(A, xi_field, domain_id, q), 4, "moment")


def theta(a_field, tangent, mode: str = "full", domain_id: str = "D4",
          q: int = 12, flat_tol: float = 1e-8) -> complex:
    """Connection one-form on the moduli space.

    full: -i/(24 pi^3) Int Tr[(A F + F A - A^3/2) a];
    flat: +i/(48 pi^3) Int Tr[A^3 a] (requires a flat connection).
    """
    dom = DOMAINS[domain_id]
    if mode == "flat":
        res = flatness_residual(a_field, domain_id)
        if res > flat_tol:
            raise NotFlatError(f"flat-mode theta on a non-flat connection ({res:.3e})")

        def integrand(ctx):
            af = eval_form(a_field, ctx, order=0)
            t = eval_form(tangent, ctx, order=0)
            return ctx.top(wedge_power(af, 3).wedge(t).trace())

        return 1.0j / (48.0 * math.pi**3) * integrate(dom, integrand, q, order=1)

    def integrand(ctx):
        af = eval_form(a_field, ctx, order=1)
        f = curvature(af)
        t = eval_form(tangent, ctx, order=0)
        combo = af.wedge(f) + f.wedge(af) - wedge_power(af, 3).scale(0.5)
        return ctx.top(combo.wedge(t).trace())

    return -1.0j * C_BDRY * integrate(dom, integrand, q, order=2)


def theta_functional(domain_id: str = "D4", q: int = 12, mode: str = "full") -> AFunctional:
    return AFunctional(lambda A, a: theta(A, a, mode, domain_id, q), 3, "theta")


# ---------------------------------------------------------------------------
# exact differentiation in connection space
# ---------------------------------------------------------------------------


def stencil(degree: int, h: float = 0.5):
    """Offsets and weights for d/dt at 0, exact on polynomials of the degree."""
    k = max(1, (degree + 1) // 2)
    ts = h * np.arange(-k, k + 1, dtype=float)
    vand = np.vander(ts, increasing=True).T
    rhs = np.zeros(2 * k + 1)
    rhs[1] = 1.0
    w = np.linalg.solve(vand, rhs)
    return ts, w


def functional_derivative(psi, a_field, direction, degree: int | None = None,
                          h: float = 0.5, with_scale: bool = False):
    """Exact d/dt psi(A + t c) at t = 0 for a polynomial functional.

    ``psi`` is an AFunctional or a plain callable; the degree bound must be
    supplied for plain callables.
    """
    if isinstance(psi, AFunctional):
        fn, deg = psi.evaluator, psi.degree
    else:
        fn, deg = psi, degree
    if deg is None:
        raise DomainMismatchError("degree bound required for plain callables")
    ts, ws = stencil(deg, h)
    out = 0.0 + 0.0j
    scale = 0.0
    for t, w in zip(ts, ws):
        if w == 0.0:
            continue
        shifted = a_field if t == 0.0 else Lin([(1.0, a_field), (complex(t), direction)])
        v = complex(fn(shifted))
        out += w * v
        scale = max(scale, abs(v))
    if with_scale:
        return out, scale
    return out


def tilde_d1(theta_like: AFunctional, a_field, t1, t2, h: float = 0.5):
    """(d theta)(a, b) = d/dt theta_{A+ta}(b) - d/dt theta_{A+tb}(a).

    Returns the value and the largest intermediate magnitude for relative
    residuals.
    """
    v1, s1 = functional_derivative(
        AFunctional(lambda A: theta_like(A, t2), theta_like.degree), a_field, t1,
        h=h, with_scale=True)
    v2, s2 = functional_derivative(
        AFunctional(lambda A: theta_like(A, t1), theta_like.degree), a_field, t2,
        h=h, with_scale=True)
    return v1 - v2, max(s1, s2)


def tilde_d2(omega_like: AFunctional, a_field, t1, t2, t3, h: float = 0.5):
    """(d omega)(a, b, c) as the cyclic sum of directional derivatives."""
    total = 0.0 + 0.0j
    scale = 0.0
    for (x, y, z) in ((t1, t2, t3), (t2, t3, t1), (t3, t1, t2)):
        v, s = functional_derivative(
            AFunctional(lambda A, yy=y, zz=z: omega_like(A, yy, zz), omega_like.degree),
            a_field, x, h=h, with_scale=True)
        total += v
        scale = max(scale, s)
    return total, scale


def omega_dtilde(a_field, t1, t2, t3, domain_id: str = "D4", q: int = 12,
                 h: float = 0.3):
    """Fused evaluation of (d omega)(a, b, c) at a connection.

    All stencil shifts and cyclic terms share one quadrature pass; the
    boundary contribution of the derivative is its exact analytic form.
    Returns (value, scale) with scale the largest single pairing magnitude.
    """
    dom = DOMAINS[domain_id]
    ts, ws = stencil(2, h)
    nodes = [(t, w) for t, w in zip(ts, ws) if w != 0.0]
    cyc = ((t1, t2, t3), (t2, t3, t1), (t3, t1, t2))

    def bulk(ctx):
        af = eval_form(a_field, ctx, order=1)
        tfs = {id(f): eval_form(f, ctx, order=1) for f in (t1, t2, t3)}
        f_a = curvature(af)
        a0 = af.truncate(0)
        rows = []
        for (x, y, z) in cyc:
            x0 = tfs[id(x)].truncate(0)
            y0 = tfs[id(y)].truncate(0)
            zf = tfs[id(z)]
            z0 = zf.truncate(0)
            pair = x0.wedge(y0) - y0.wedge(x0)
            gz = zf.d() + a0.wedge(z0) + z0.wedge(a0)
            zz = z0.wedge(z0)
            for t, _ in nodes:
                ft = f_a + gz.scale(t) + zz.scale(t * t)
                rows.append(pair.wedge(ft).trace().top_values(ctx.batch))
        return np.stack(rows)

    vals = C_BULK * integrate(dom, bulk, q, order=2)
    total = 0.0 + 0.0j
    scale = 0.0
    k = 0
    for _ in cyc:
        for _, w in nodes:
            total += w * vals[k]
            scale = max(scale, abs(vals[k]))
            k += 1
    if dom.boundary is not None:
        bdom = DOMAINS[dom.boundary]

        def bdry(ctx):
            tfs = {id(f): eval_form(f, ctx, order=0) for f in (t1, t2, t3)}
            rows = []
            for (x, y, z) in cyc:
                x0, y0, z0 = tfs[id(x)], tfs[id(y)], tfs[id(z)]
                pair = x0.wedge(y0) - y0.wedge(x0)
                rows.append(pair.wedge(z0).trace().top_values(ctx.batch))
            return np.stack(rows)

        brows = -C_BDRY * integrate(bdom, bdry, q, order=1)
        for v in brows:
            total += v
            scale = max(scale, abs(v))
    return total, scale


def realness(z: complex) -> float:
    """|Im z| / max(|Re z|, tiny) diagnostic for functionals expected real."""
    return abs(z.imag) / max(abs(z.real), 1e-300)
