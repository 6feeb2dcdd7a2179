"""Analytic field generators on the model domains and composite field expressions.

Generators are polynomials in the ambient Cartesian coordinates with su(n)
coefficients (group fields are exponentials of such polynomials), so boundary
restriction, hemisphere sewing and ball extension are exact by construction.
Composite nodes (products, gauge action, Maurer-Cartan forms, covariant
derivatives) evaluate lazily through chart jets and are never re-expanded in
the generator basis.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import forms
from .charts import Chart, EvalCtx
from .errors import (
    DomainMismatchError,
    SewError,
    ShapeError,
    UnsupportedFieldError,
)
from .jets import Jet

BASEPOINTS = {
    "S1": (1.0, 0.0),
    "D2": (1.0, 0.0),
    "S2": (1.0, 0.0, 0.0),
    "S3": (1.0, 0.0, 0.0, 0.0),
    "D4": (1.0, 0.0, 0.0, 0.0),
    "S4": (1.0, 0.0, 0.0, 0.0, 0.0),
    "D5": (1.0, 0.0, 0.0, 0.0, 0.0),
}

_AMBIENT_DIM = {"S1": 2, "D2": 2, "S2": 3, "S3": 4, "D4": 4, "S4": 5, "D5": 5}


def ambient_dim_of(domain_id) -> int:
    """Ambient coordinate count of a domain id; R<k> denotes a bare chart R^k."""
    if isinstance(domain_id, int):
        return domain_id
    if domain_id in _AMBIENT_DIM:
        return _AMBIENT_DIM[domain_id]
    if isinstance(domain_id, str) and domain_id.startswith("R") and domain_id[1:].isdigit():
        return int(domain_id[1:])
    raise DomainMismatchError(f"unknown domain {domain_id!r}")


# ---------------------------------------------------------------------------
# field expression nodes
# ---------------------------------------------------------------------------


class Field:
    target = None  # "algebra" | "group" | "one_form"
    ambient_dim = None


class Generator(Field):
    """Serializable polynomial generator.

    ``terms`` is a list of (axis, exps, coeff): axis is None for scalar targets
    and the ambient dx index for one-forms; exps is the ambient exponent tuple;
    coeff an n x n complex matrix.  Group targets exponentiate the accumulated
    algebra-valued polynomial.
    """

    def __init__(self, domain_id, target, terms, boundary_class=("free",), n=None):
        if isinstance(domain_id, int):
            domain_id = f"R{domain_id}"
        self.domain_id = domain_id
        self.target = target
        self.ambient_dim = ambient_dim_of(domain_id)
        self.terms = [(axis, tuple(exps), np.asarray(coeff, dtype=complex)) for axis, exps, coeff in terms]
        self.boundary_class = boundary_class
        self.n = n if n is not None else (self.terms[0][2].shape[0] if self.terms else 2)

    def expanded_terms(self):
        """Terms with the boundary-trivial factor (1 - |x|^2)^k multiplied in."""
        if self.boundary_class[0] != "boundary_trivial":
            return self.terms
        k = self.boundary_class[1]
        factor = _ball_factor_poly(k, self.ambient_dim)
        out = []
        for axis, exps, coeff in self.terms:
            for fexps, c in factor.items():
                merged = tuple(e + f for e, f in zip(exps, fexps))
                out.append((axis, merged, c * coeff))
        return out


def _ball_factor_poly(k: int, dim: int) -> dict:
    """(1 - sum x_a^2)^k as {exponent tuple: real coefficient}."""
    poly = {tuple([0] * dim): 1.0}
    base = {tuple([0] * dim): 1.0}
    for a in range(dim):
        e = [0] * dim
        e[a] = 2
        base[tuple(e)] = -1.0
    for _ in range(k):
        nxt: dict = {}
        for e1, c1 in poly.items():
            for e2, c2 in base.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                nxt[e] = nxt.get(e, 0.0) + c1 * c2
        poly = nxt
    return poly


class ConstGroup(Field):
    target = "group"

    def __init__(self, value, ambient_dim=4):
        self.value = np.asarray(value, dtype=complex)
        self.ambient_dim = ambient_dim


class SU2Embed(Field):
    """Identity map S3 -> SU(2) block-embedded in SU(n); linear in the ambient
    quaternion coordinates, so its jets are exact."""

    target = "group"
    ambient_dim = 4

    def __init__(self, n=2):
        self.n = n


class Product(Field):
    target = "group"

    def __init__(self, *factors):
        self.factors = factors
        self.ambient_dim = max(f.ambient_dim for f in factors)


class Inverse(Field):
    target = "group"

    def __init__(self, base):
        self.base = base
        self.ambient_dim = base.ambient_dim


class Based(Field):
    """Left-normalized group field g(p0)^{-1} g, so g^{-1} dg is unchanged."""

    target = "group"

    def __init__(self, base, p0):
        self.base = base
        self.p0 = tuple(p0)
        self.ambient_dim = base.ambient_dim
        self._norm = None

    def normalizer(self):
        if self._norm is None:
            val = eval_at_points(self.base, np.asarray(self.p0, dtype=float)[:, None], order=0).value[0]
            self._norm = np.linalg.inv(val)
        return self._norm


class MC(Field):
    """Maurer-Cartan form of a group field: dg g^{-1} (right) or g^{-1} dg (left)."""

    target = "one_form"

    def __init__(self, g, side="right"):
        self.g = g
        self.side = side
        self.ambient_dim = g.ambient_dim


class GaugeApply(Field):
    """g . A = g^{-1} dg + g^{-1} A g."""

    target = "one_form"

    def __init__(self, g, a):
        self.g = g
        self.a = a
        self.ambient_dim = max(g.ambient_dim, a.ambient_dim)


class AdjAction(Field):
    """g^{-1} X g for an algebra field or one-form."""

    def __init__(self, g, x):
        self.g = g
        self.x = x
        self.target = x.target
        self.ambient_dim = max(g.ambient_dim, x.ambient_dim)


class CovD(Field):
    """d_A xi as a composite one-form."""

    target = "one_form"

    def __init__(self, a, xi):
        self.a = a
        self.xi = xi
        self.ambient_dim = max(a.ambient_dim, xi.ambient_dim)


class AlgBracket(Field):
    """Pointwise bracket [x, y] of two algebra-valued fields."""

    target = "algebra"

    def __init__(self, x, y):
        self.x = x
        self.y = y
        self.ambient_dim = max(x.ambient_dim, y.ambient_dim)


class ConstOneForm(Field):
    """Constant-coefficient ambient one-form: sum_a coeff_a dx_a."""

    target = "one_form"

    def __init__(self, coeffs, ambient_dim):
        self.coeffs = {int(a): np.asarray(c, dtype=complex) for a, c in coeffs.items()}
        self.ambient_dim = ambient_dim


class Lin(Field):
    """Linear combination of same-target fields."""

    def __init__(self, parts):
        self.parts = [(complex(c), f) for c, f in parts]
        self.target = self.parts[0][1].target
        self.ambient_dim = max(f.ambient_dim for _, f in self.parts)
        if any(f.target != self.target for _, f in self.parts):
            raise ShapeError("linear combination across field targets")


class Sewn(Field):
    """Hemisphere pair: evaluated field depends on the chart piece."""

    def __init__(self, upper, lower):
        self.upper = upper
        self.lower = lower
        self.target = upper.target
        self.ambient_dim = max(upper.ambient_dim, lower.ambient_dim)

    def part(self, piece):
        return self.upper if piece == 0 else self.lower


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _scalar_poly_jet(ctx: EvalCtx, exps, order: int) -> Jet:
    """Jet of the monomial prod_a x_a^{e_a} via cached coordinate powers."""
    key = ("pow", exps, order)
    if key in ctx.memo:
        return ctx.memo[key]
    out = None
    for a, e in enumerate(exps):
        if e == 0:
            continue
        base = ctx.ambient[a]
        if base.order > order:
            base = Jet(base.m, order, base.value,
                       base.grad if order >= 1 else None,
                       base.hess if order >= 2 else None, "s")
        pk = ("pow1", a, e, order)
        if pk in ctx.memo:
            p = ctx.memo[pk]
        else:
            p = base
            for _ in range(e - 1):
                p = p.mul(base)
            ctx.memo[pk] = p
        out = p if out is None else out.mul(p)
    if out is None:
        m = ctx.ambient[0].m
        b = ctx.batch
        g = np.zeros((m, b)) if order >= 1 else None
        h = np.zeros((m, m, b)) if order >= 2 else None
        out = Jet(m, order, np.ones(b), g, h, "s")
    ctx.memo[key] = out
    return out


def _times_const(s: Jet, c: np.ndarray) -> Jet:
    v = s.value[..., None, None] * c
    g = None if s.order < 1 else s.grad[..., None, None] * c
    h = None if s.order < 2 else s.hess[..., None, None] * c
    return Jet(s.m, s.order, v, g, h, "m")


def _const_mul(c: np.ndarray, j: Jet, side="left") -> Jet:
    if side == "left":
        v, g, h = c @ j.value, None, None
        if j.order >= 1:
            g = c @ j.grad
        if j.order >= 2:
            h = c @ j.hess
    else:
        v, g, h = j.value @ c, None, None
        if j.order >= 1:
            g = j.grad @ c
        if j.order >= 2:
            h = j.hess @ c
    return Jet(j.m, j.order, v, g, h, "m")


def _algebra_poly(ctx, gen: Generator, order: int) -> Jet:
    m = ctx.ambient[0].m
    n = gen.n
    out = Jet.const(m, np.zeros((n, n), dtype=complex), order, batch=ctx.batch)
    for _, exps, coeff in gen.expanded_terms():
        out = out + _times_const(_scalar_poly_jet(ctx, exps, order), coeff)
    if gen.boundary_class[0] == "based" and gen.target == "algebra":
        p0 = np.asarray(gen.boundary_class[1], dtype=float)[:, None]
        val0 = eval_at_points(
            Generator(gen.domain_id, "algebra", gen.terms, ("free",), gen.n), p0, order=0
        ).value[0]
        out = out + Jet.const(m, -val0, order, batch=ctx.batch)
    return out


def eval_jet(field: Field, ctx: EvalCtx, order: int = 0) -> Jet:
    """Evaluate an algebra- or group-valued field to a batched jet."""
    if order > 2:
        raise ShapeError("jets are truncated at order 2")
    key = (id(field), order, "jet", ctx.piece)
    if key in ctx.memo:
        return ctx.memo[key]
    if field.ambient_dim > len(ctx.ambient):
        raise DomainMismatchError("field needs more ambient coordinates than the chart has")
    out = _eval_jet(field, ctx, order)
    ctx.memo[key] = out
    return out


def _eval_jet(field, ctx, order):
    if isinstance(field, Generator):
        if field.target == "algebra":
            return _algebra_poly(ctx, field, order)
        if field.target == "group":
            return _algebra_poly(ctx, field, order).expm()
        raise ShapeError("eval_jet on a one-form generator")
    if isinstance(field, ConstGroup):
        m = ctx.ambient[0].m
        return Jet.const(m, field.value, order, batch=ctx.batch)
    if isinstance(field, SU2Embed):
        return _su2_jet(ctx, field, order)
    if isinstance(field, Product):
        out = eval_jet(field.factors[0], ctx, order)
        for f in field.factors[1:]:
            out = out.mul(eval_jet(f, ctx, order))
        return out
    if isinstance(field, Inverse):
        return eval_jet(field.base, ctx, order).inverse()
    if isinstance(field, Based):
        return _const_mul(field.normalizer(), eval_jet(field.base, ctx, order), "left")
    if isinstance(field, AdjAction) and field.x.target == "algebra":
        g = eval_jet(field.g, ctx, order)
        return g.inverse().mul(eval_jet(field.x, ctx, order)).mul(g)
    if isinstance(field, AlgBracket):
        x = eval_jet(field.x, ctx, order)
        y = eval_jet(field.y, ctx, order)
        return x.mul(y) - y.mul(x)
    if isinstance(field, Lin) and field.target in ("algebra", "group"):
        if field.target == "group":
            raise ShapeError("linear combinations of group fields are not defined")
        out = eval_jet(field.parts[0][1], ctx, order).scale(field.parts[0][0])
        for c, f in field.parts[1:]:
            out = out + eval_jet(f, ctx, order).scale(c)
        return out
    if isinstance(field, Sewn):
        return eval_jet(field.part(ctx.piece), ctx, order)
    raise UnsupportedFieldError(f"cannot evaluate {type(field).__name__} to a jet")


def _su2_jet(ctx, field: SU2Embed, order: int) -> Jet:
    n = field.n
    sig = [
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, -1j], [1j, 0]], dtype=complex),
        np.array([[1, 0], [0, -1]], dtype=complex),
    ]
    gammas = [np.eye(2, dtype=complex)] + [1j * s for s in sig]
    m = ctx.ambient[0].m
    rest = np.zeros((n, n), dtype=complex)
    rest[2:, 2:] = np.eye(n - 2)
    out = Jet.const(m, rest, order, batch=ctx.batch)
    for a in range(4):
        emb = np.zeros((n, n), dtype=complex)
        emb[:2, :2] = gammas[a]
        base = ctx.ambient[a]
        if base.order > order:
            base = Jet(base.m, order, base.value,
                       base.grad if order >= 1 else None,
                       base.hess if order >= 2 else None, "s")
        out = out + _times_const(base, emb)
    return out


def eval_form(field: Field, ctx: EvalCtx, order: int = 0) -> forms.Form:
    """Evaluate a one-form field to a chart-coordinate Form with jet coefficients."""
    key = (id(field), order, "form", ctx.piece)
    if key in ctx.memo:
        return ctx.memo[key]
    if field.ambient_dim > len(ctx.ambient):
        raise DomainMismatchError("field needs more ambient coordinates than the chart has")
    out = _eval_form(field, ctx, order)
    ctx.memo[key] = out
    return out


def _eval_form(field, ctx, order):
    m = ctx.ambient[0].m
    identity = ctx.chart.kind == "identity"
    if isinstance(field, Generator):
        if field.target != "one_form":
            raise ShapeError("eval_form on a scalar generator")
        comps: dict = {}
        if identity:
            by_axis: dict = {}
            for axis, exps, coeff in field.expanded_terms():
                by_axis.setdefault(axis, []).append((exps, coeff))
            for axis, terms in by_axis.items():
                jet = None
                for exps, coeff in terms:
                    t = _times_const(_scalar_poly_jet(ctx, exps, order), coeff)
                    jet = t if jet is None else jet + t
                comps[(axis,)] = jet
        else:
            if order > 1:
                raise ShapeError("curved charts support one-form jets to order 1 only")
            for i in range(m):
                jet = None
                for axis, exps, coeff in field.expanded_terms():
                    dxa = ctx.ambient[axis].partial(i)
                    if dxa.order > order:
                        dxa = Jet(m, order, dxa.value, dxa.grad if order >= 1 else None,
                                  None, "s")
                    t = _times_const(_scalar_poly_jet(ctx, exps, order).mul(dxa), coeff)
                    jet = t if jet is None else jet + t
                if jet is not None:
                    comps[(i,)] = jet
        return forms.Form(m, 1, comps)
    if isinstance(field, ConstOneForm):
        comps = {}
        if identity:
            for a, c in field.coeffs.items():
                comps[(a,)] = Jet.const(m, c, order, batch=ctx.batch)
        else:
            for i in range(m):
                jet = None
                for a, c in field.coeffs.items():
                    dxa = ctx.ambient[a].partial(i)
                    if dxa.order > order:
                        dxa = Jet(m, order, dxa.value, dxa.grad if order >= 1 else None,
                                  None, "s")
                    t = _times_const(dxa, c)
                    jet = t if jet is None else jet + t
                comps[(i,)] = jet
        return forms.Form(m, 1, comps)
    if isinstance(field, MC):
        g = eval_jet(field.g, ctx, order + 1)
        return forms.maurer_cartan(g, field.side)
    if isinstance(field, GaugeApply):
        g = eval_jet(field.g, ctx, order + 1)
        a = eval_form(field.a, ctx, order)
        return forms.gauge_transform(g, a)
    if isinstance(field, AdjAction):
        g = eval_jet(field.g, ctx, order)
        return eval_form(field.x, ctx, order).conj_by(g)
    if isinstance(field, CovD):
        a = eval_form(field.a, ctx, order)
        xi = eval_jet(field.xi, ctx, order + 1)
        return forms.covariant_d(a, xi)
    if isinstance(field, Lin):
        out = eval_form(field.parts[0][1], ctx, order).scale(field.parts[0][0])
        for c, f in field.parts[1:]:
            out = out + eval_form(f, ctx, order).scale(c)
        return out
    if isinstance(field, Sewn):
        return eval_form(field.part(ctx.piece), ctx, order)
    raise UnsupportedFieldError(f"cannot evaluate {type(field).__name__} to a form")


def point_ctx(points: np.ndarray, order: int = 2) -> EvalCtx:
    """Identity-chart context at ambient points of shape (m, B)."""
    m = points.shape[0]
    chart = Chart(m, m, [(-1.0, 1.0)] * m, "identity")
    return EvalCtx(chart, np.asarray(points, dtype=float), order)


def eval_at_points(field: Field, points: np.ndarray, order: int = 0):
    """Evaluate a scalar/group field at ambient points (identity chart)."""
    return eval_jet(field, point_ctx(points, order), order)


def eval_form_at_points(field: Field, points: np.ndarray, order: int = 0):
    return eval_form(field, point_ctx(points, 2), order)


# ---------------------------------------------------------------------------
# sewing and extension
# ---------------------------------------------------------------------------


def _equator_samples(count: int = 24, seed: int = 7) -> np.ndarray:
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((4, count))
    return x / np.linalg.norm(x, axis=0, keepdims=True)


def sew(upper: Field, lower: Field, tol: float = 1e-8, samples: int = 24) -> Sewn:
    """Sew two disc fields into a hemisphere-pair field on the 4-sphere.

    Values and first derivatives must match at sample points of the equator
    three-sphere; the lower hemisphere carries the reversed orientation in
    integration, which the split chart of S4/D5 accounts for.
    """
    if upper.target != lower.target:
        raise ShapeError("sewing fields of different targets")
    pts = _equator_samples(samples)
    disc = 0.0
    if upper.target == "one_form":
        fu = eval_form_at_points(upper, pts, order=1)
        fl = eval_form_at_points(lower, pts, order=1)
        for i in range(4):
            ju, jl = fu.component((i,)), fl.component((i,))
            vu = 0.0 if ju is None else ju.value
            vl = 0.0 if jl is None else jl.value
            disc = max(disc, float(np.abs(vu - vl).max()))
            gu = 0.0 if ju is None else ju.grad
            gl = 0.0 if jl is None else jl.grad
            disc = max(disc, float(np.abs(gu - gl).max()))
    else:
        ju = eval_at_points(upper, pts, order=1)
        jl = eval_at_points(lower, pts, order=1)
        disc = max(float(np.abs(ju.value - jl.value).max()),
                   float(np.abs(ju.grad - jl.grad).max()))
    if disc > tol:
        raise SewError("hemisphere fields disagree on the equator", disc)
    return Sewn(upper, lower)


def extend_to_ball(gen: Generator, profile: dict | None = None) -> Generator:
    """Extend a sphere generator to the ball by scaling the polynomial part with
    a radial profile chi(r^2) (chi(0)=0, chi(1)=1, flat at r=0).

    ``profile`` maps powers of s = |x|^2 to coefficients; default chi(s) = s.
    """
    if not isinstance(gen, Generator):
        raise UnsupportedFieldError("extend_to_ball needs a generator field")
    profile = {1: 1.0} if profile is None else profile
    if abs(sum(profile.values()) - 1.0) > 1e-12:
        raise ShapeError("profile must satisfy chi(1) = 1")
    dim = gen.ambient_dim
    spoly = {tuple([0] * dim): 0.0}
    base = {}
    for a in range(dim):
        e = [0] * dim
        e[a] = 2
        base[tuple(e)] = 1.0
    chi: dict = {}
    for power, c in profile.items():
        cur = {tuple([0] * dim): 1.0}
        for _ in range(power):
            nxt: dict = {}
            for e1, c1 in cur.items():
                for e2, c2 in base.items():
                    e = tuple(x + y for x, y in zip(e1, e2))
                    nxt[e] = nxt.get(e, 0.0) + c1 * c2
            cur = nxt
        for e, c2 in cur.items():
            chi[e] = chi.get(e, 0.0) + c * c2
    terms = []
    for axis, exps, coeff in gen.terms:
        for fexps, c in chi.items():
            terms.append((axis, tuple(x + y for x, y in zip(exps, fexps)), c * coeff))
    ball_id = {"S1": "D2", "S3": "D4", "S4": "D5"}.get(gen.domain_id, gen.domain_id)
    return Generator(ball_id, gen.target, terms, gen.boundary_class, gen.n)


def sewn_extension(g: Field, hemisphere: str = "upper") -> Sewn:
    """Extension to the five-ball of a boundary-trivial disc gauge field sewn
    with the constant identity on the other hemisphere.

    For a generator exp((1 - |u|^2)^k Y(u)) the extension is
    exp(x5^{2k} Y(x1..x4)) on the matching half-ball and 1 on the other; on the
    boundary sphere x5^{2k} = (1 - |u|^2)^k, so the restriction is exact.
    Products and inverses extend factorwise, keeping the Polyakov-Wiegmann
    bookkeeping coherent.
    """
    ident = ConstGroup(np.eye(_leaf_n(g), dtype=complex), ambient_dim=5)
    ext = _sewn_extension_rec(g)
    return Sewn(ext, ident) if hemisphere == "upper" else Sewn(ident, ext)


def _leaf_n(g: Field):
    if isinstance(g, Generator):
        return g.n
    if isinstance(g, ConstGroup):
        return g.value.shape[0]
    if isinstance(g, Product):
        return _leaf_n(g.factors[0])
    if isinstance(g, Inverse):
        return _leaf_n(g.base)
    raise UnsupportedFieldError("cannot infer matrix size")


def _sewn_extension_rec(g: Field) -> Field:
    if isinstance(g, ConstGroup):
        return ConstGroup(g.value, ambient_dim=5)
    if isinstance(g, Product):
        return Product(*[_sewn_extension_rec(f) for f in g.factors])
    if isinstance(g, Inverse):
        return Inverse(_sewn_extension_rec(g.base))
    if isinstance(g, Generator) and g.target == "group" and g.boundary_class[0] == "boundary_trivial":
        k = g.boundary_class[1]
        terms = []
        for axis, exps, coeff in g.terms:
            terms.append((axis, tuple(exps) + (2 * k,), coeff))
        return Generator("D5", "group", terms, ("free",), g.n)
    raise UnsupportedFieldError(
        "sewn extension defined for boundary-trivial generators, products and inverses"
    )


# ---------------------------------------------------------------------------
# random generators and serialization
# ---------------------------------------------------------------------------


def _random_su(rng, n, scale):
    from .lie import su_basis

    basis = su_basis(n)
    c = rng.standard_normal(len(basis))
    c *= scale / max(np.linalg.norm(c), 1e-30)
    return sum(ci * ti for ci, ti in zip(c, basis))


def _monomial_pool(dim, max_degree):
    import itertools

    pool = []
    for deg in range(1, max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(dim), deg):
            e = [0] * dim
            for a in combo:
                e[a] += 1
            pool.append(tuple(e))
    return pool


def _random_exps(rng, dim, max_degree, count):
    """Distinct non-constant exponent tuples, so field derivatives stay generic."""
    pool = _monomial_pool(dim, max_degree)
    idx = rng.choice(len(pool), size=min(count, len(pool)), replace=False)
    exps = [pool[i] for i in idx]
    while len(exps) < count:
        exps.append(pool[int(rng.integers(0, len(pool)))])
    return exps


def random_algebra_field(rng, domain_id, n, terms=4, max_degree=2, amp=0.5,
                         boundary=("free",)):
    dim = ambient_dim_of(domain_id)
    exps = _random_exps(rng, dim, max_degree, terms)
    tl = [(None, e, _random_su(rng, n, amp / terms)) for e in exps]
    return Generator(domain_id, "algebra", tl, boundary, n)


def random_gauge_field(rng, domain_id, n, terms=4, max_degree=2, amp=0.8,
                       boundary=("free",)):
    g = random_algebra_field(rng, domain_id, n, terms, max_degree, amp, boundary)
    return Generator(domain_id, "group", g.terms, boundary, n)


def random_connection(rng, domain_id, n, terms=4, max_degree=2, amp=0.7):
    dim = ambient_dim_of(domain_id)
    exps = _random_exps(rng, dim, max_degree, terms)
    axes = []
    while len(axes) < terms:
        axes.extend(int(i) for i in rng.permutation(dim))
    tl = [(axes[k], e, _random_su(rng, n, amp / terms)) for k, e in enumerate(exps)]
    return Generator(domain_id, "one_form", tl, ("free",), n)


random_tangent = random_connection


def to_json(gen: Generator) -> str:
    if not isinstance(gen, Generator):
        raise UnsupportedFieldError("only generator fields serialize to JSON")
    bc = {"kind": gen.boundary_class[0]}
    if gen.boundary_class[0] == "boundary_trivial":
        bc["order"] = int(gen.boundary_class[1])
    elif gen.boundary_class[0] == "based":
        bc["point"] = [float(x) for x in gen.boundary_class[1]]
    obj = {
        "domain": gen.domain_id,
        "target": gen.target,
        "boundary_class": bc,
        "terms": [
            {
                "basis": [int(e) for e in exps],
                "axis": None if axis is None else int(axis),
                "coeff": [[[z.real, z.imag] for z in row] for row in coeff],
            }
            for axis, exps, coeff in gen.terms
        ],
    }
    return json.dumps(obj, sort_keys=True)


def from_json(text: str) -> Generator:
    obj = json.loads(text)
    bc = obj["boundary_class"]
    if bc["kind"] == "boundary_trivial":
        boundary = ("boundary_trivial", int(bc["order"]))
    elif bc["kind"] == "based":
        boundary = ("based", tuple(bc["point"]))
    else:
        boundary = ("free",)
    terms = []
    for t in obj["terms"]:
        coeff = np.array([[complex(re, im) for re, im in row] for row in t["coeff"]])
        terms.append((t["axis"], tuple(t["basis"]), coeff))
    return Generator(obj["domain"], obj["target"], terms, boundary)
