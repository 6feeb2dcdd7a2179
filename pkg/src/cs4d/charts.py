"""Charts, orientations and tensor Gauss-Legendre quadrature for the model domains.

Every domain (S1, D2, S2, S3, D4, S4, D5) is covered by a single
hyperspherical parameter box; sphere domains with a hemisphere split carry
two boxes so that piecewise (sewn) fields stay analytic per box.  Integration
pulls ambient-coordinate forms back through exact order-2 chart jets, so no
separate Jacobian factor is needed: the top chart component already carries
the shuffle determinant.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainMismatchError, ShapeError
from .jets import Jet

CHUNK = 1 << 15


def gauss_rule(q: int, lo: float, hi: float):
    """Gauss-Legendre nodes and weights on [lo, hi]."""
    x, w = np.polynomial.legendre.leggauss(q)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def _angle_jet(u: np.ndarray, axis: int, m: int, fn: str, order: int) -> Jet:
    """Jet of cos/sin of the chart variable `axis` in m variables."""
    c, s = np.cos(u), np.sin(u)
    val = c if fn == "cos" else s
    der = -s if fn == "cos" else c
    dd = -c if fn == "cos" else -s
    g = h = None
    if order >= 1:
        g = np.zeros((m,) + u.shape)
        g[axis] = der
    if order >= 2:
        h = np.zeros((m, m) + u.shape)
        h[axis, axis] = dd
    return Jet(m, order, val, g, h, "s")


def _coord_jet(u_axis: np.ndarray, axis: int, m: int, order: int) -> Jet:
    g = h = None
    if order >= 1:
        g = np.zeros((m,) + u_axis.shape)
        g[axis] = 1.0
    if order >= 2:
        h = np.zeros((m, m) + u_axis.shape)
    return Jet(m, order, u_axis.copy(), g, h, "s")


def _sphere_jets(u: np.ndarray, m: int, offset: int, order: int) -> list[Jet]:
    """Hyperspherical coordinates of S^{d-1}: x1 = cos t1, x2 = sin t1 cos t2, ...

    ``u`` has shape (m, B); the sphere angles are u[offset:], i.e. d-1 = m - offset
    angles giving d ambient coordinates.
    """
    nang = m - offset
    d = nang + 1
    coords = []
    sin_prod = None
    for k in range(nang):
        ck = _angle_jet(u[offset + k], offset + k, m, "cos", order)
        sk = _angle_jet(u[offset + k], offset + k, m, "sin", order)
        coords.append(ck if sin_prod is None else sin_prod.mul(ck))
        sin_prod = sk if sin_prod is None else sin_prod.mul(sk)
    coords.append(sin_prod)
    assert len(coords) == d
    return coords


class Chart:
    """One parameter box of a domain with exact order-2 ambient jets."""

    def __init__(self, m, ambient_dim, box, kind, piece=0, axis_kinds=None):
        self.m = m
        self.ambient_dim = ambient_dim
        self.box = box  # list of (lo, hi)
        self.kind = kind  # "identity" | "sphere" | "ball"
        self.piece = piece
        if axis_kinds is None:
            if kind == "sphere":
                axis_kinds = ["polar"] * (m - 1) + ["periodic"]
            elif kind == "ball":
                axis_kinds = ["radial"] + ["polar"] * (m - 2) + ["periodic"]
            else:
                axis_kinds = ["radial"] * m
        self.axis_kinds = axis_kinds

    def ambient_jets(self, u: np.ndarray, order: int = 2) -> list[Jet]:
        if u.shape[0] != self.m:
            raise ShapeError("chart point dimension mismatch")
        if self.kind == "identity":
            return Jet.coords(u, order)
        if self.kind == "sphere":
            xs = _sphere_jets(u, self.m, 0, order)
        else:  # ball: u[0] = radius, angles follow
            r = _coord_jet(u[0], 0, self.m, order)
            xs = [r.mul(c) for c in _sphere_jets(u, self.m, 1, order)]
        # polar axis last: rotate x1 -> x_d so hemispheres split on the last coordinate
        if self.ambient_dim >= 2:
            xs = xs[1:] + xs[:1]
        return xs


class Domain:
    """Oriented model domain with chart pieces and boundary bookkeeping."""

    def __init__(self, id, dim, ambient_dim, pieces, orient, boundary=None, volume=None):
        self.id = id
        self.dim = dim
        self.ambient_dim = ambient_dim
        self.pieces = pieces  # list of Chart
        self.orient = orient
        self.boundary = boundary  # domain id or None
        self.volume = volume

    def reversed(self) -> "Domain":
        return Domain(self.id, self.dim, self.ambient_dim, self.pieces, -self.orient,
                      self.boundary, self.volume)

    def restricted(self, piece: int) -> "Domain":
        return Domain(self.id, self.dim, self.ambient_dim, [self.pieces[piece]],
                      self.orient, self.boundary, None)


_PI = math.pi


def _make_domains():
    # Orientation signs make ball volumes positive and Stokes hold with + sign;
    # they are pinned by tests in test_charts.py.
    doms = {}
    doms["S1"] = Domain("S1", 1, 2, [Chart(1, 2, [(0.0, 2 * _PI)], "sphere")], -1.0,
                        None, 2 * _PI)
    doms["D2"] = Domain("D2", 2, 2, [Chart(2, 2, [(0.0, 1.0), (0.0, 2 * _PI)], "ball")], -1.0,
                        "S1", _PI)
    doms["S2"] = Domain("S2", 2, 3, [Chart(2, 3, [(0.0, _PI), (0.0, 2 * _PI)], "sphere")], 1.0,
                        None, 4 * _PI)
    doms["S3"] = Domain("S3", 3, 4,
                        [Chart(3, 4, [(0.0, _PI), (0.0, _PI), (0.0, 2 * _PI)], "sphere")], -1.0,
                        None, 2 * _PI**2)
    doms["D4"] = Domain("D4", 4, 4,
                        [Chart(4, 4, [(0.0, 1.0), (0.0, _PI), (0.0, _PI), (0.0, 2 * _PI)],
                               "ball")], -1.0, "S3", _PI**2 / 2)
    # S4 and D5 split the polar angle at the equator so hemisphere-pair fields
    # stay analytic on each piece; the polar axis is the last ambient coordinate.
    s4_upper = Chart(4, 5, [(0.0, _PI / 2), (0.0, _PI), (0.0, _PI), (0.0, 2 * _PI)],
                     "sphere", piece=0)
    s4_lower = Chart(4, 5, [(_PI / 2, _PI), (0.0, _PI), (0.0, _PI), (0.0, 2 * _PI)],
                     "sphere", piece=1)
    doms["S4"] = Domain("S4", 4, 5, [s4_upper, s4_lower], 1.0, None, 8 * _PI**2 / 3)
    d5_upper = Chart(5, 5, [(0.0, 1.0), (0.0, _PI / 2), (0.0, _PI), (0.0, _PI),
                            (0.0, 2 * _PI)], "ball", piece=0)
    d5_lower = Chart(5, 5, [(0.0, 1.0), (_PI / 2, _PI), (0.0, _PI), (0.0, _PI),
                            (0.0, 2 * _PI)], "ball", piece=1)
    doms["D5"] = Domain("D5", 5, 5, [d5_upper, d5_lower], 1.0, "S4", 8 * _PI**2 / 15)
    return doms


DOMAINS = _make_domains()


def domain(id: str) -> Domain:
    try:
        return DOMAINS[id]
    except KeyError:
        raise DomainMismatchError(f"unknown domain {id!r}") from None


class EvalCtx:
    """Per-chunk evaluation context handed to integrands.

    Carries the chart piece, ambient coordinate jets and a memo so shared
    sub-expressions of composite fields are evaluated once per chunk.
    """

    def __init__(self, chart: Chart, u: np.ndarray, order: int = 2):
        self.chart = chart
        self.u = u
        self.batch = u.shape[1]
        self.piece = chart.piece
        self.ambient = chart.ambient_jets(u, order)
        self.memo: dict = {}

    def top(self, form) -> np.ndarray:
        return form.top_values(self.batch)


def midpoint_rule(n: int, lo: float, hi: float):
    """Equispaced midpoint rule; exact for trig polynomials of frequency < n
    over a full period."""
    h = (hi - lo) / n
    return lo + h * (np.arange(n) + 0.5), np.full(n, h)


def axis_rule(kind: str, q: int, lo: float, hi: float):
    """Per-axis rule derived from the order parameter q.

    Integrands are trigonometric polynomials of the chart angles: the periodic
    azimuth uses the (exact for frequency < 2q) equispaced rule, polar
    half-period axes carry four extra Gauss-Legendre points against their
    slower trig convergence, and radial axes are polynomial so q points are
    already exact.
    """
    if kind == "periodic":
        return midpoint_rule(max(q + 6, (3 * q) // 2), lo, hi)
    if kind == "polar":
        return gauss_rule(q + 4, lo, hi)
    return gauss_rule(q, lo, hi)


def chart_nodes(chart: Chart, q: int):
    """Tensor quadrature grid over the chart box: (m, N) nodes, (N,) weights."""
    axes = [axis_rule(kind, q, lo, hi)
            for kind, (lo, hi) in zip(chart.axis_kinds, chart.box)]
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    u = np.stack([g.reshape(-1) for g in grids])
    w = axes[0][1]
    for _, wi in axes[1:]:
        w = np.multiply.outer(w, wi)
    return u, w.reshape(-1)


def integrate(dom: Domain, integrand, q: int, order: int = 1, chunk: int = CHUNK) -> complex:
    """Oriented integral of a top-degree integrand over the domain.

    ``integrand(ctx)`` must return the (B,) complex values of the pulled-back
    top chart component, or a (K, B) stack of such values, in which case a
    length-K array of integrals is returned.  Reduction order is fixed:
    chunks in grid order, numpy pairwise summation inside each chunk.
    """
    partials = []
    for chart in dom.pieces:
        u, w = chart_nodes(chart, q)
        n = u.shape[1]
        for start in range(0, n, chunk):
            sl = slice(start, min(start + chunk, n))
            ctx = EvalCtx(chart, u[:, sl], order)
            vals = np.asarray(integrand(ctx), dtype=complex)
            partials.append(np.sum(w[sl] * vals, axis=-1))
    total = partials[0]
    for p in partials[1:]:
        total = total + p
    if np.ndim(total) == 0:
        return dom.orient * complex(total)
    return dom.orient * total


def pullback_dx(ctx: EvalCtx, a: int):
    """Chart pullback of the ambient coordinate one-form dx_a."""
    from .forms import Form

    m = ctx.ambient[0].m
    return Form(m, 1, {(i,): ctx.ambient[a].partial(i) for i in range(m)})


def volume_integrand(dom: Domain):
    """Integrand of the canonical volume form (positive total by orientation).

    Balls use dx_1 ^ ... ^ dx_m; spheres the outward-normal contraction of the
    ambient volume form.
    """
    from .forms import wedge_chain

    is_ball = dom.boundary is not None

    def f(ctx):
        d = len(ctx.ambient)
        if is_ball:
            return ctx.top(wedge_chain(*[pullback_dx(ctx, a) for a in range(d)]))
        total = None
        for a in range(d):
            rest = [pullback_dx(ctx, b) for b in range(d) if b != a]
            vals = ctx.top(wedge_chain(*rest)) * ctx.ambient[a].value * (-1.0) ** a
            total = vals if total is None else total + vals
        return total

    return f


def volume(dom: Domain, q: int = 16) -> float:
    return integrate(dom, volume_integrand(dom), q, order=2).real


def integrate_form_field(dom: Domain, field, q: int, order: int = 1) -> complex:
    """Integral of a field that evaluates to a top-degree chart form."""
    from .fields import eval_form  # local import to avoid a cycle

    def integrand(ctx):
        return ctx.top(eval_form(field, ctx, order=0))

    return integrate(dom, integrand, q, order=order)
