"""Path-ordered parallel transport and flatness diagnostics.

The default transport convention solves dT/dt = -A(x'(t)) T, under which the
trivializing map f_A = T^{-1} satisfies A = f_A^{-1} df_A, f_A(p0) = 1, and
gauge covariance reads f_{g.A} = f_A g.  The reversed convention (dT/dt =
+A T) is available behind the ``convention`` flag.
"""

from __future__ import annotations

import numpy as np

from .charts import DOMAINS, chart_nodes
from .errors import NotFlatError, NumericError
from .fields import BASEPOINTS, eval_form_at_points
from .forms import curvature
from .lie import group_exp

_GAUSS2 = (0.5 - np.sqrt(3) / 6, 0.5 + np.sqrt(3) / 6)


class Path:
    """Polyline path inside a domain, given by ambient way-points (d, K)."""

    def __init__(self, points: np.ndarray, steps: int = 1024):
        self.points = np.asarray(points, dtype=float)
        self.steps = steps

    @staticmethod
    def segment(p0, p1, steps=1024):
        return Path(np.stack([np.asarray(p0, float), np.asarray(p1, float)], axis=1), steps)

    @staticmethod
    def two_segment(p0, mid, p1, steps=1024):
        return Path(np.stack([np.asarray(p0, float), np.asarray(mid, float),
                              np.asarray(p1, float)], axis=1), steps)

    def sample(self):
        """Per-step (midpoint Gauss pair, velocity) along the polyline."""
        pts = self.points
        nseg = pts.shape[1] - 1
        steps_per = max(1, self.steps // max(nseg, 1))
        xs, vs = [], []
        for s in range(nseg):
            a, b = pts[:, s], pts[:, s + 1]
            dt = 1.0 / steps_per
            for k in range(steps_per):
                t0 = k * dt
                xs.append([a + (t0 + g * dt) * (b - a) for g in _GAUSS2])
                vs.append((b - a) * dt)
        return xs, vs


def _contract(a_form, velocity):
    """A(x'(t)) for a degree-1 chart form evaluated at ambient points."""
    total = None
    for i, vi in enumerate(velocity):
        c = a_form.component((i,))
        if c is None or vi == 0.0:
            continue
        term = vi * c.value
        total = term if total is None else total + term
    return total


def transport(a_field, path: Path, convention: str = "left"):
    """Path-ordered transport along the path by a 4th-order Magnus scheme.

    Each step exponentiates h/2 (A1 + A2) + sqrt(3) h^2 / 12 [A2, A1] built
    from the two Gauss nodes, keeping the result exactly unitary.
    """
    xs, vs = path.sample()
    n = None
    out = None
    sign = -1.0 if convention == "left" else 1.0
    for (x_pair, v) in zip(xs, vs):
        pts = np.stack(x_pair, axis=1)
        a_form = eval_form_at_points(a_field, pts, order=0)
        vals = _contract(a_form, v)
        if vals is None:
            continue
        a1, a2 = vals[0], vals[1]
        if n is None:
            n = a1.shape[0]
            out = np.eye(n, dtype=complex)
        omega = 0.5 * (a1 + a2) + (np.sqrt(3) / 12.0) * (a2 @ a1 - a1 @ a2)
        if not np.all(np.isfinite(omega)):
            raise NumericError("transport step produced non-finite data")
        out = group_exp(sign * omega) @ out
    if out is None:
        raise NumericError("transport along an empty or zero-field path")
    return out


def flatness_residual(a_field, domain_id: str = "D4", q: int = 8) -> float:
    """Max curvature norm over the quadrature nodes of the domain."""
    dom = DOMAINS[domain_id]
    worst = 0.0
    for chart in dom.pieces:
        u, _ = chart_nodes(chart, q)
        from .charts import EvalCtx
        from .fields import eval_form

        ctx = EvalCtx(chart, u, 2)
        f = curvature(eval_form(a_field, ctx, order=1))
        worst = max(worst, f.max_abs())
    return worst


def closedness_residual(a_field, tangent_field, domain_id: str = "D4", q: int = 8) -> float:
    """Max norm of d_A a = da + A ^ a + a ^ A over quadrature nodes."""
    dom = DOMAINS[domain_id]
    worst = 0.0
    for chart in dom.pieces:
        u, _ = chart_nodes(chart, q)
        from .charts import EvalCtx
        from .fields import eval_form

        ctx = EvalCtx(chart, u, 2)
        a = eval_form(a_field, ctx, order=1)
        t = eval_form(tangent_field, ctx, order=1)
        da = t.d() + a.wedge(t) + t.wedge(a)
        worst = max(worst, da.max_abs())
    return worst


def trivializing_map(a_field, sample_points: np.ndarray, domain_id: str = "D4",
                     steps: int = 1024, flat_tol: float = 1e-8,
                     convention: str = "left", two_segment: bool = False):
    """f_A at the sample points via transport along chords from the basepoint.

    Requires a flat connection; with the default convention A = f^{-1} df and
    f(p0) = 1.
    """
    res = flatness_residual(a_field, domain_id)
    if res > flat_tol:
        raise NotFlatError(f"flatness residual {res:.3e} exceeds {flat_tol:.1e}")
    p0 = np.asarray(BASEPOINTS[domain_id], dtype=float)
    out = []
    for k in range(sample_points.shape[1]):
        x = sample_points[:, k]
        if two_segment:
            mid = 0.35 * (p0 + x) + np.array([0.0] * (len(p0) - 1) + [0.11])
            path = Path.two_segment(p0, mid, x, steps)
        else:
            path = Path.segment(p0, x, steps)
        t = transport(a_field, path, convention)
        out.append(np.linalg.inv(t) if convention == "left" else t)
    return np.stack(out)
