"""Descent cochain families, the gauge-group coboundary, and residual checks.

Cochains are evaluated pointwise on jets: group arguments are order-2 matrix
jets, the connection argument a degree-1 form with jet coefficients.  The
group action on a cochain substitutes the gauge-transformed connection,
(g . c)(...; A) = c(...; g . A); A-independent cochains are fixed by the
action.  With this convention the relations below hold exactly (to roundoff)
at every point; the sign placement of each row is pinned by the residual
suite and frozen here.
"""

from __future__ import annotations

from .errors import UnknownCochainError
from .forms import Form, curvature, gauge_transform, maurer_cartan, wedge_chain, wedge_power
from .jets import Jet


def _tr(*fs) -> Form:
    return wedge_chain(*fs).trace()


# ---------------------------------------------------------------------------
# cochain tables
# ---------------------------------------------------------------------------


def _c03(a: Form) -> Form:
    f = curvature(a)
    return _tr(f, f, f)


def _c02(a: Form) -> Form:
    f = curvature(a)
    a3 = wedge_power(a, 3)
    a5 = wedge_power(a, 5)
    return _tr(a, f, f) - _tr(a3, f).scale(0.5) + a5.trace().scale(0.1)


def _c12(g: Jet) -> Form:
    v = maurer_cartan(g, "right")
    return wedge_power(v, 5).trace().scale(0.1)


def _c11(g: Jet, a: Form) -> Form:
    v = maurer_cartan(g, "right")
    f = curvature(a)
    a3 = wedge_power(a, 3)
    t1 = _tr(v, a.wedge(f) + f.wedge(a) - a3).scale(-0.5)
    va = v.wedge(a)
    t2 = va.wedge(va).trace().scale(0.25)
    t3 = _tr(wedge_power(v, 3), a).scale(0.5)
    return t1 + t2 + t3


def _c21(g1: Jet, g2: Jet) -> Form:
    # c^{1,1}(g2; g1^{-1} dg1) with the curvature of the Maurer-Cartan argument
    # eliminated analytically (it vanishes identically), which keeps the
    # coefficients one jet order higher than the generic c^{1,1} path.
    v = maurer_cartan(g2, "right")
    w = maurer_cartan(g1, "left")
    t1 = _tr(v, wedge_power(w, 3)).scale(0.5)
    vw = v.wedge(w)
    t2 = vw.wedge(vw).trace().scale(0.25)
    t3 = _tr(wedge_power(v, 3), w).scale(0.5)
    return t1 + t2 + t3


def _c20(g1: Jet, g2: Jet, a: Form) -> Form:
    v2 = maurer_cartan(g2, "right")
    w1 = maurer_cartan(g1, "left")
    at = a.conj_by(g1)
    return (_tr(v2, w1, at) - _tr(v2, at, w1)).scale(-0.5)


def _c01_2d(a: Form) -> Form:
    f = curvature(a)
    return _tr(a, f) - wedge_power(a, 3).trace().scale(1.0 / 3.0)


def _c02_2d(a: Form) -> Form:
    f = curvature(a)
    return _tr(f, f)


def _c11_2d(g: Jet) -> Form:
    v = maurer_cartan(g, "right")
    return wedge_power(v, 3).trace().scale(1.0 / 3.0)


def _c10_2d(g: Jet, a: Form) -> Form:
    return _tr(maurer_cartan(g, "right"), a)


def _c20_2d(g1: Jet, g2: Jet) -> Form:
    return _tr(maurer_cartan(g2, "right"), maurer_cartan(g1, "left"))


# table entries: (number of group slots, uses connection, evaluator)
_TABLE = {
    ("dim4", 0, 3): (0, True, lambda gs, a: _c03(a)),
    ("dim4", 0, 2): (0, True, lambda gs, a: _c02(a)),
    ("dim4", 1, 2): (1, False, lambda gs, a: _c12(gs[0])),
    ("dim4", 1, 1): (1, True, lambda gs, a: _c11(gs[0], a)),
    ("dim4", 2, 1): (2, False, lambda gs, a: _c21(gs[0], gs[1])),
    ("dim4", 2, 0): (2, True, lambda gs, a: _c20(gs[0], gs[1], a)),
    ("dim2", 0, 2): (0, True, lambda gs, a: _c02_2d(a)),
    ("dim2", 0, 1): (0, True, lambda gs, a: _c01_2d(a)),
    ("dim2", 1, 1): (1, False, lambda gs, a: _c11_2d(gs[0])),
    ("dim2", 1, 0): (1, True, lambda gs, a: _c10_2d(gs[0], a)),
    ("dim2", 2, 0): (2, False, lambda gs, a: _c20_2d(gs[0], gs[1])),
}

# form degree of c^{p,q} per family (q + 3 resp. q + 2)
_DEG_SHIFT = {"dim4": 3, "dim2": 2}


def cochain_entry(family: str, p: int, q: int):
    try:
        return _TABLE[(family, p, q)]
    except KeyError:
        raise UnknownCochainError(f"no cochain ({family}, p={p}, q={q})") from None


def eval_cochain(family: str, p: int, q: int, gs: list[Jet], a: Form | None) -> Form:
    """Evaluate c^{p,q} at a point from group jets and the connection form."""
    arity, uses_a, fn = cochain_entry(family, p, q)
    if len(gs) != arity:
        raise UnknownCochainError(f"c^{{{p},{q}}} takes {arity} group arguments, got {len(gs)}")
    if uses_a and a is None:
        raise UnknownCochainError(f"c^{{{p},{q}}} needs the connection argument")
    return fn(gs, a)


def delta_of(fn, arity: int, uses_a: bool):
    """Coboundary of an arbitrary cochain callable; composable for delta^2."""

    def out(gs: list[Jet], a: Form | None) -> Form:
        if len(gs) != arity + 1:
            raise UnknownCochainError(
                f"coboundary of a {arity}-cochain takes {arity + 1} group arguments")
        head_a = gauge_transform(gs[0], a) if (uses_a and a is not None) else a
        val = fn(gs[1:], head_a)
        val = val + fn(gs[:arity], a).scale((-1.0) ** (arity + 1))
        for k in range(1, arity + 1):
            merged = gs[: k - 1] + [gs[k - 1].mul(gs[k])] + gs[k + 1:]
            val = val + fn(merged, a).scale((-1.0) ** k)
        return val

    return out


def coboundary(family: str, p: int, q: int, gs: list[Jet], a: Form | None) -> Form:
    """(delta c^p)(g_1, ..., g_{p+1}) with the substitution action on A."""
    arity, uses_a, fn = cochain_entry(family, p, q)
    return delta_of(fn, arity, uses_a)(gs, a)


# ---------------------------------------------------------------------------
# descent rows
# ---------------------------------------------------------------------------

# Residual definitions: each row is a list of (weight, kind, args) summed to a
# form whose max norm is the residual.  Signs are locked by the numerical
# suite (see test_cochains.py); the d/delta placement follows the double
# complex built on dc^{0,2} = Tr F^3 resp. dc^{0,1} = Tr F^2.
_ROWS = {
    # d TrF^3 = 0 (second Bianchi, 7-form identity)
    ("dim4", 1, 0): [(1.0, "d", (0, 3))],
    # d c^{1,2} + delta c^{0,3} = 0 (both terms vanish separately)
    ("dim4", 1, 1): [(1.0, "d", (1, 2)), (1.0, "delta", (0, 3))],
    # d c^{2,1} + delta c^{1,2} = 0 (differential Polyakov-Wiegmann)
    ("dim4", 1, 2): [(1.0, "d", (2, 1)), (1.0, "delta", (1, 2))],
    # delta c^{2,1} + d delta c^{2,0} = 0: the two cocycle defects cancel, which
    # is what makes the disc 2-cocycle associative after integration
    ("dim4", 1, 3): [(1.0, "delta", (2, 1)), (1.0, "ddelta", (2, 0))],
    # d c^{0,2} - c^{0,3} = 0 (transgression)
    ("dim4", 2, 0): [(1.0, "d", (0, 2)), (-1.0, "c", (0, 3))],
    # d c^{1,1} - delta c^{0,2} + c^{1,2} = 0 (variation of the 5-form)
    ("dim4", 2, 1): [(1.0, "d", (1, 1)), (-1.0, "delta", (0, 2)), (1.0, "c", (1, 2))],
    # d c^{2,0} - delta c^{1,1} + c^{2,1} = 0 (cocycle decomposition)
    ("dim4", 2, 2): [(1.0, "d", (2, 0)), (-1.0, "delta", (1, 1)), (1.0, "c", (2, 1))],
    # delta^2 c^{1,1} = 0 (coboundary squares to zero)
    ("dim4", 2, 3): [(1.0, "delta2", (1, 1))],
    ("dim2", 2, 0): [(1.0, "d", (0, 1)), (-1.0, "c", (0, 2))],
    ("dim2", 2, 1): [(1.0, "d", (1, 0)), (1.0, "delta", (0, 1)), (1.0, "c", (1, 1))],
    ("dim2", 2, 2): [(1.0, "d", (2, 0)), (1.0, "delta", (1, 1))],
    ("dim2", 2, 3): [(1.0, "delta", (2, 0))],
    # definitional: delta c^{1,0} = c^{2,0} in the 2d family
    ("dim2", 1, 2): [(1.0, "delta", (1, 0)), (-1.0, "c", (2, 0))],
}

ROW_IDS = sorted(_ROWS)


def descent_residual(family: str, row: int, p: int, gs: list[Jet], a: Form | None) -> float:
    """Max component norm of the descent relation (family, row, p).

    Group jets beyond the arity of the largest term are ignored, so a fixed
    (g1, g2, g3, A) configuration serves every row.
    """
    key = (family, row, p)
    if key not in _ROWS:
        raise UnknownCochainError(f"no descent relation {key}")
    total = None
    for weight, kind, (cp, cq) in _ROWS[key]:
        if kind == "d":
            arity, _, _ = cochain_entry(family, cp, cq)
            val = eval_cochain(family, cp, cq, gs[:arity], a).d()
        elif kind == "delta":
            arity, _, _ = cochain_entry(family, cp, cq)
            val = coboundary(family, cp, cq, gs[: arity + 1], a)
        elif kind == "ddelta":
            arity, _, _ = cochain_entry(family, cp, cq)
            val = coboundary(family, cp, cq, gs[: arity + 1], a).d()
        elif kind == "delta2":
            arity, uses_a, fn = cochain_entry(family, cp, cq)
            val = delta_of(delta_of(fn, arity, uses_a), arity + 1, uses_a)(gs[: arity + 2], a)
        else:  # plain cochain term
            arity, _, _ = cochain_entry(family, cp, cq)
            val = eval_cochain(family, cp, cq, gs[:arity], a)
        val = val.scale(weight)
        total = val if total is None else total + val
    return total.max_abs()


def row_min_variables(family: str, row: int, p: int) -> int:
    """Smallest number of chart variables at which the relation has content."""
    key = (family, row, p)
    shift = _DEG_SHIFT[family]
    degs = []
    for _, kind, (cp, cq) in _ROWS[key]:
        deg = cq + shift
        if kind in ("d", "ddelta"):
            deg += 1
        degs.append(deg)
    # descent content lives one variable above the top form degree where a d
    # appears; plain delta rows are contentful at their own degree
    return max(degs)
