"""Pointwise exterior algebra of matrix-valued differential forms.

A form of degree k in m chart variables stores one jet per strictly
increasing k-tuple of axis indices; an absent tuple is the zero matrix.
Wedge products multiply coefficients as matrices with shuffle signs, the
exterior derivative antisymmetrizes jet gradients and consumes one jet order.
"""

from __future__ import annotations

import numpy as np

from .errors import DegreeOverflowError, ShapeError
from .jets import Jet


def _merge_sign(i: tuple, j: tuple):
    """Sorted union and shuffle sign of two disjoint increasing tuples."""
    inv = 0
    for a in i:
        for b in j:
            if b < a:
                inv += 1
    merged = tuple(sorted(i + j))
    return merged, (-1) ** inv


class Form:
    __slots__ = ("m", "degree", "comps")

    def __init__(self, m: int, degree: int, comps: dict | None = None):
        if degree < 0 or degree > m:
            raise DegreeOverflowError(f"degree {degree} outside 0..{m}")
        self.m = m
        self.degree = degree
        self.comps = {} if comps is None else comps

    # -- basics --------------------------------------------------------------

    @staticmethod
    def zero(m: int, degree: int) -> "Form":
        return Form(m, min(degree, m) if degree <= m else degree, {})

    @staticmethod
    def from_jet(jet: Jet) -> "Form":
        """Wrap a 0-form coefficient."""
        return Form(jet.m, 0, {(): jet})

    def order(self) -> int:
        return min((c.order for c in self.comps.values()), default=2)

    def _accum(self, comps: dict, idx: tuple, jet: Jet):
        if idx in comps:
            comps[idx] = comps[idx] + jet
        else:
            comps[idx] = jet

    def __add__(self, other: "Form") -> "Form":
        if self.m != other.m or self.degree != other.degree:
            raise ShapeError("form addition across degrees or variable counts")
        comps = dict(self.comps)
        for idx, jet in other.comps.items():
            self._accum(comps, idx, jet)
        return Form(self.m, self.degree, comps)

    def __sub__(self, other: "Form") -> "Form":
        return self + other.scale(-1.0)

    def scale(self, c) -> "Form":
        return Form(self.m, self.degree, {i: j.scale(c) for i, j in self.comps.items()})

    def __neg__(self) -> "Form":
        return self.scale(-1.0)

    # -- exterior algebra ------------------------------------------------------

    def wedge(self, other: "Form") -> "Form":
        if self.m != other.m:
            raise ShapeError("wedge across different variable counts")
        k = self.degree + other.degree
        if k > self.m:
            raise DegreeOverflowError(f"wedge degree {k} exceeds {self.m} variables")
        out: dict = {}
        for i, a in self.comps.items():
            for j, b in other.comps.items():
                if set(i) & set(j):
                    continue
                merged, sign = _merge_sign(i, j)
                term = a.mul(b) if sign == 1 else a.mul(b).scale(sign)
                self._accum(out, merged, term)
        return Form(self.m, k, out)

    def d(self) -> "Form":
        if self.degree >= self.m:
            raise DegreeOverflowError(
                f"exterior derivative of a degree-{self.degree} form in {self.m} variables"
            )
        out: dict = {}
        for idx, jet in self.comps.items():
            if jet.order < 1:
                raise ShapeError("form_d requires jet coefficients of order >= 1")
            for i in range(self.m):
                if i in idx:
                    continue
                pos = sum(1 for k in idx if k < i)
                sign = (-1) ** pos
                merged = tuple(sorted(idx + (i,)))
                term = jet.partial(i)
                if sign != 1:
                    term = term.scale(sign)
                self._accum(out, merged, term)
        return Form(self.m, self.degree + 1, out)

    def trace(self) -> "Form":
        return Form(self.m, self.degree, {i: j.trace() for i, j in self.comps.items()})

    def conj_by(self, g: Jet, ginv: Jet | None = None) -> "Form":
        """Componentwise g^{-1} c g."""
        gi = g.inverse() if ginv is None else ginv
        return Form(self.m, self.degree, {i: gi.mul(j).mul(g) for i, j in self.comps.items()})

    # -- diagnostics -----------------------------------------------------------

    def truncate(self, order: int) -> "Form":
        return Form(self.m, self.degree, {i: j.truncate(order) for i, j in self.comps.items()})

    def max_abs(self) -> float:
        return max((j.max_abs() for j in self.comps.values()), default=0.0)

    def component(self, idx: tuple) -> Jet | None:
        return self.comps.get(tuple(idx))

    def top_values(self, batch: int):
        """Values of the top-degree component as a (B,) complex array."""
        if self.degree != self.m:
            raise ShapeError("top component of a non-top-degree form")
        jet = self.comps.get(tuple(range(self.m)))
        if jet is None:
            return np.zeros(batch, dtype=complex)
        v = jet.value
        if v.ndim >= 2 and v.shape[-1] == 1:
            v = v[..., 0, 0]
        return np.asarray(v, dtype=complex)


# -- derived constructions -----------------------------------------------------


def wedge_chain(*forms: Form) -> Form:
    out = forms[0]
    for f in forms[1:]:
        out = out.wedge(f)
    return out


def wedge_power(form: Form, k: int) -> Form:
    out = form
    for _ in range(k - 1):
        out = out.wedge(form)
    return out


def curvature(a: Form) -> Form:
    """F = dA + A wedge A for a degree-1 connection form with jet coefficients.

    The quadratic part is evaluated at the order of dA, so no derivative data
    is computed beyond what the result can carry.
    """
    da = a.d()
    at = a.truncate(a.order() - 1)
    return da + at.wedge(at)


def maurer_cartan(g: Jet, side: str = "right") -> Form:
    """dg g^{-1} (right) or g^{-1} dg (left) as a degree-1 form."""
    gi = g.inverse()
    comps = {}
    for i in range(g.m):
        dgi = g.partial(i)
        comps[(i,)] = dgi.mul(gi) if side == "right" else gi.mul(dgi)
    return Form(g.m, 1, comps)


def gauge_transform(g: Jet, a: Form) -> Form:
    """g . A = g^{-1} dg + g^{-1} A g."""
    if a.degree != 1:
        raise ShapeError("gauge action defined on degree-1 forms")
    gi = g.inverse()
    out = a.conj_by(g, gi)
    for i in range(g.m):
        term = gi.mul(g.partial(i))
        if (i,) in out.comps:
            out.comps[(i,)] = out.comps[(i,)] + term
        else:
            out.comps[(i,)] = term
    return out


def covariant_d(a: Form, xi: Jet) -> Form:
    """d_A xi = d xi + [A, xi] for a 0-form xi."""
    xf = Form.from_jet(xi)
    return xf.d() + a.wedge(xf) - xf.wedge(a)
