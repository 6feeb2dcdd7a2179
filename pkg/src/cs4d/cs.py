"""Chern-Simons and WZW functionals with their gauge cocycles.

Extensions to the five-ball are always constructed (never inferred): every
gauge field that needs one either comes from a five-ball generator restricted
to the boundary sphere, or is a sewn hemisphere pair of boundary-trivial disc
fields with the structural half-ball extension.  Products of extended fields
extend factorwise, which keeps the Polyakov-Wiegmann bookkeeping exact with
no mod-Z slack.
"""

from __future__ import annotations

import math

import numpy as np

from .charts import DOMAINS, integrate
from .cochains import eval_cochain
from .errors import DomainMismatchError, NotFlatError, SewError
from .fields import (
    ConstGroup,
    GaugeApply,
    Inverse,
    Lin,
    MC,
    Product,
    Sewn,
    eval_form,
    eval_jet,
    sew,
    sewn_extension,
)
from .forms import curvature, maurer_cartan, wedge_chain, wedge_power
from .functionals import AFunctional, functional_derivative, stencil, theta
from .holonomy import flatness_residual

C24 = 1.0 / (24.0 * math.pi**3)
C48 = 1.0 / (48.0 * math.pi**3)
C240 = 1.0 / (240.0 * math.pi**3)
W3_NORM = 1.0 / (24.0 * math.pi**2)


class ExtendedGauge:
    """A gauge field on the boundary four-sphere together with its five-ball
    extension."""

    def __init__(self, boundary, ball):
        self.boundary = boundary
        self.ball = ball

    @staticmethod
    def from_ball_generator(g_ball):
        """Restriction of a five-ball field; the extension is the field itself."""
        return ExtendedGauge(g_ball, g_ball)

    @staticmethod
    def from_boundary_trivial(g_disc, hemisphere: str = "upper"):
        """g | 1' sewn over the equator with the structural half-ball extension."""
        ident = ConstGroup(np.eye(_field_n(g_disc), dtype=complex), ambient_dim=4)
        boundary = sew(g_disc, ident) if hemisphere == "upper" else sew(ident, g_disc)
        return ExtendedGauge(boundary, sewn_extension(g_disc, hemisphere))

    def mul(self, other: "ExtendedGauge") -> "ExtendedGauge":
        return ExtendedGauge(Product(self.boundary, other.boundary),
                             Product(self.ball, other.ball))


def _field_n(field):
    from .fields import Generator

    node = field
    while True:
        if isinstance(node, Generator):
            return node.n
        if isinstance(node, ConstGroup):
            return node.value.shape[0]
        if isinstance(node, Product):
            node = node.factors[0]
        elif isinstance(node, Inverse):
            node = node.base
        else:
            raise DomainMismatchError("cannot infer matrix size of the field")


# ---------------------------------------------------------------------------
# integration helpers
# ---------------------------------------------------------------------------


def integrate_cochain(domain, family: str, p: int, q_idx: int,
                      g_fields, a_field, q: int) -> complex:
    """Integral of a descent cochain evaluated from field data."""
    dom = DOMAINS[domain] if isinstance(domain, str) else domain

    def integrand(ctx):
        gs = [eval_jet(g, ctx, order=1) for g in g_fields]
        a = None if a_field is None else eval_form(a_field, ctx, order=1)
        return ctx.top(eval_cochain(family, p, q_idx, gs, a))

    return integrate(dom, integrand, q, order=2)


# ---------------------------------------------------------------------------
# Chern-Simons and WZW functionals
# ---------------------------------------------------------------------------


def cs5(a_field, q: int = 10, flat: bool = False) -> complex:
    """Five-ball Chern-Simons functional i/(24 pi^3) Int c^{0,2}(A).

    With ``flat`` the reduced form i/(240 pi^3) Int Tr(A^5) is used instead;
    the two agree on flat connections.
    """
    dom = DOMAINS["D5"]
    if flat:
        def integrand(ctx):
            a = eval_form(a_field, ctx, order=0)
            return ctx.top(wedge_power(a, 5).trace())

        return 1.0j * C240 * integrate(dom, integrand, q, order=1)

    def integrand(ctx):
        a = eval_form(a_field, ctx, order=1)
        return ctx.top(eval_cochain("dim4", 0, 2, [], a))

    return 1.0j * C24 * integrate(dom, integrand, q, order=2)


def cs5_functional(q: int = 10) -> AFunctional:
    return AFunctional(lambda A: cs5(A, q), 5, "cs5")


def c5_wzw(ext, q: int = 10) -> complex:
    """i/(240 pi^3) Int_N Tr(dg g^{-1})^5 of the five-ball extension."""
    ball = ext.ball if isinstance(ext, ExtendedGauge) else ext
    dom = DOMAINS["D5"]

    def integrand(ctx):
        g = eval_jet(ball, ctx, order=1)
        v = maurer_cartan(g, "right")
        return ctx.top(wedge_power(v, 5).trace())

    return 1.0j * C240 * integrate(dom, integrand, q, order=1)


def pw_gamma(f_field, g_field, domain_id: str = "S4", q: int = 10) -> complex:
    """Polyakov-Wiegmann cocycle gamma(f, g) by its explicit four-form."""
    dom = DOMAINS[domain_id]

    def integrand(ctx):
        fj = eval_jet(f_field, ctx, order=1)
        gj = eval_jet(g_field, ctx, order=1)
        v = maurer_cartan(gj, "right")
        w = maurer_cartan(fj, "left")
        vw = v.wedge(w)
        expr = (v.wedge(wedge_power(w, 3)) + vw.wedge(vw).scale(0.5)
                + wedge_power(v, 3).wedge(w))
        return ctx.top(expr.trace())

    return 1.0j * C48 * integrate(dom, integrand, q, order=1)


def gamma_big(g_ext: ExtendedGauge, a_field, mode: str = "closed", q: int = 10,
              q5: int | None = None):
    """Gamma(g; A) = i/(24 pi^3) Int_M c^{1,1}(g; A) + C5(extension).

    closed mode integrates over the whole four-sphere; boundary_trivial mode
    over the disc with the sewn extension C5(g | 1').  Returns (Gamma, Theta)
    with Theta = exp(2 pi i Gamma).
    """
    q5 = q if q5 is None else q5
    if mode == "closed":
        bulk = integrate_cochain("S4", "dim4", 1, 1, [g_ext.boundary], a_field, q)
    elif mode == "boundary_trivial":
        bulk = integrate_cochain("D4", "dim4", 1, 1, [g_ext.disc], a_field, q)
    else:
        raise DomainMismatchError(f"unknown gamma mode {mode!r}")
    gamma = 1.0j * C24 * bulk + c5_wzw(g_ext, q5)
    return gamma, np.exp(2.0j * np.pi * gamma)


class DiscGauge(ExtendedGauge):
    """Boundary-trivial disc gauge field with its sewn five-ball extension."""

    def __init__(self, g_disc, hemisphere: str = "upper"):
        base = ExtendedGauge.from_boundary_trivial(g_disc, hemisphere)
        super().__init__(base.boundary, base.ball)
        self.disc = g_disc
        self.hemisphere = hemisphere

    def mul(self, other):
        out = DiscGauge.__new__(DiscGauge)
        merged = ExtendedGauge.mul(self, other)
        out.boundary = merged.boundary
        out.ball = merged.ball
        out.disc = Product(self.disc, other.disc)
        out.hemisphere = self.hemisphere
        return out


def beta_gamma_D(f_field, g_field, a_field, q: int = 10):
    """(beta_D(f, A), gamma_D(f, g; A)) on the disc.

    beta_D = i/(24 pi^3) Int_D c^{1,1}(f; A);
    gamma_D = i/(24 pi^3) [Int_{S3} c^{2,0}(f, g; A) + Int_D c^{2,1}(f, g)].
    """
    beta = 1.0j * C24 * integrate_cochain("D4", "dim4", 1, 1, [f_field], a_field, q)
    s3 = integrate_cochain("S3", "dim4", 2, 0, [f_field, g_field], a_field, q)
    disc = integrate_cochain("D4", "dim4", 2, 1, [f_field, g_field], None, q)
    gamma = 1.0j * C24 * (s3 + disc)
    return beta, gamma


def beta_d(f_field, a_field, q: int = 10) -> complex:
    return 1.0j * C24 * integrate_cochain("D4", "dim4", 1, 1, [f_field], a_field, q)


def gamma_d(f_field, g_field, a_field, q: int = 10) -> complex:
    return beta_gamma_D(f_field, g_field, a_field, q)[1]


def theta_d(g_disc: DiscGauge, a_field, q: int = 10, q5: int | None = None) -> complex:
    """Theta_D(g, A) = exp 2 pi i Gamma_D for a boundary-trivial disc field."""
    return gamma_big(g_disc, a_field, "boundary_trivial", q, q5)[1]


# ---------------------------------------------------------------------------
# flat sector: sections, duality, gradients
# ---------------------------------------------------------------------------


class LinePoint:
    """Point (A, c) of the line bundle total space over connections."""

    def __init__(self, a_field, c: complex):
        self.a = a_field
        self.c = complex(c)


def line_equivalent(p1: LinePoint, p2: LinePoint, g_disc: DiscGauge, a_probe_q: int = 8,
                    q: int = 10, tol: float = 1e-6) -> bool:
    """Equivalence (A, c) ~ (g.A, Theta_D(g, A) c) checked at the representative."""
    theta_val = theta_d(g_disc, p1.a, q)
    return abs(p2.c - theta_val * p1.c) <= tol * max(1.0, abs(p1.c))


def cs_section(ball_flat, lower_restriction, q: int = 10, flat_tol: float = 1e-8) -> LinePoint:
    """Section value [A', exp 2 pi i CS(A v A')] over the flat stratum.

    ``ball_flat`` is the flat five-ball extension of the sewn connection and
    ``lower_restriction`` its complement-hemisphere representative; flatness is
    asserted, not assumed.
    """
    res = flatness_residual(ball_flat, "D5", q=4)
    if res > flat_tol:
        raise NotFlatError(f"extension flatness residual {res:.3e}")
    val = np.exp(2.0j * np.pi * cs5(ball_flat, q, flat=True))
    return LinePoint(lower_restriction, val)


def duality_check(g_up, g_lo, a_up, a_lo, q: int = 10, q5: int | None = None) -> float:
    """|Theta_M(g, A) Theta_{M^c}(g', A') - Theta_{S4}(g v g', A v A')|.

    g_up, g_lo are boundary-trivial disc fields on the two hemispheres; the
    connections must sew across the equator.
    """
    q5 = q if q5 is None else q5
    a_sewn = sew(a_up, a_lo)
    up = DiscGauge(g_up, "upper")
    lo = DiscGauge(g_lo, "lower")
    # hemisphere integrals carry the orientation induced from the four-sphere
    bulk_up = integrate_cochain(DOMAINS["S4"].restricted(0), "dim4", 1, 1, [g_up], a_up, q)
    bulk_lo = integrate_cochain(DOMAINS["S4"].restricted(1), "dim4", 1, 1, [g_lo], a_lo, q)
    th_up = np.exp(2.0j * np.pi * (1.0j * C24 * bulk_up + c5_wzw(up, q5)))
    th_lo = np.exp(2.0j * np.pi * (1.0j * C24 * bulk_lo + c5_wzw(lo, q5)))
    sewn = up.mul(lo)
    _, th_hat = gamma_big(sewn, a_sewn, "closed", q, q5)
    return abs(th_up * th_lo - th_hat)


def cs_gradient_residual(a_ball, tangent_ball, q: int = 10, h: float = 0.25):
    """|d CS(a) - theta_{S4}(r a) - i/(24 pi^3) Int 3 Tr(F^2 a)| and its scale."""
    dcs, scale = functional_derivative(cs5_functional(q), a_ball, tangent_ball,
                                       h=h, with_scale=True)
    th = theta(a_ball, tangent_ball, "full", "S4", q)
    dom = DOMAINS["D5"]

    def integrand(ctx):
        a = eval_form(a_ball, ctx, order=1)
        f = curvature(a)
        t = eval_form(tangent_ball, ctx, order=0)
        return ctx.top(f.wedge(f).wedge(t).trace())

    bulk = 3.0j * C24 * integrate(dom, integrand, q, order=2)
    resid = abs(dcs - th - bulk)
    return resid, max(scale, abs(th), abs(bulk), 1e-300)


def winding3(g_field, q: int = 16) -> complex:
    """Degree of a three-sphere gauge field: Tr(dg g^{-1})^3 / (24 pi^2).

    Normalized so the block-embedded identity map of SU(2) gives a value of
    magnitude one; the sign is recorded by the suite rather than asserted.
    """
    dom = DOMAINS["S3"]

    def integrand(ctx):
        gj = eval_jet(g_field, ctx, order=1)
        v = maurer_cartan(gj, "right")
        return ctx.top(wedge_power(v, 3).trace())

    return W3_NORM * integrate(dom, integrand, q, order=1)
