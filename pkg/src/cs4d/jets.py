"""Order <= 2 truncated Taylor jets of matrix-valued fields, batched over points.

A jet stores the value and, depending on ``order``, first and second
derivatives with respect to ``m`` chart variables.  Scalar jets carry value
arrays of shape (B,), matrix jets of shape (B, n, n); gradients and hessians
prepend (m,) and (m, m) axes.  All arithmetic is exact in the truncation.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericError, ShapeError, SingularJetError

_EXP_TOL = 1e-15
_EXP_MAX_TERMS = 60


def _pmul(kind_a: str, a: np.ndarray, kind_b: str, b: np.ndarray) -> np.ndarray:
    if kind_a == "s" and kind_b == "s":
        return a * b
    if kind_a == "s":
        return a[..., None, None] * b
    if kind_b == "s":
        return a * b[..., None, None]
    return a @ b


class Jet:
    """Batched jet of a scalar- or matrix-valued function of m variables."""

    __slots__ = ("m", "order", "kind", "value", "grad", "hess")

    def __init__(self, m, order, value, grad=None, hess=None, kind=None):
        self.m = m
        self.order = order
        self.value = np.asarray(value)
        if kind is None:
            kind = "m" if self.value.ndim >= 3 else ("s" if self.value.ndim <= 1 else "m")
        self.kind = kind
        self.grad = None if grad is None else np.asarray(grad)
        self.hess = None if hess is None else np.asarray(hess)
        if order >= 1 and self.grad is None:
            raise ShapeError("order >= 1 jet requires a gradient")
        if order >= 2 and self.hess is None:
            raise ShapeError("order 2 jet requires a hessian")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def const(m: int, value, order: int = 2, batch: int | None = None) -> "Jet":
        value = np.asarray(value)
        kind = "m" if value.ndim >= 2 else "s"
        if batch is not None:
            if kind == "m":
                value = np.broadcast_to(value, (batch,) + value.shape[-2:]).copy()
            else:
                value = np.broadcast_to(value, (batch,)).copy()
        g = np.zeros((m,) + value.shape, dtype=value.dtype) if order >= 1 else None
        h = np.zeros((m, m) + value.shape, dtype=value.dtype) if order >= 2 else None
        return Jet(m, order, value, g, h, kind)

    @staticmethod
    def coords(u: np.ndarray, order: int = 2) -> list["Jet"]:
        """Identity-chart coordinate jets from points u of shape (m, B)."""
        m, b = u.shape
        out = []
        for i in range(m):
            g = np.zeros((m, b))
            g[i] = 1.0
            h = np.zeros((m, m, b)) if order >= 2 else None
            out.append(Jet(m, order, u[i].astype(float), g if order >= 1 else None, h, "s"))
        return out

    # -- helpers -----------------------------------------------------------

    def _like(self, value, grad, hess, order, kind=None):
        return Jet(self.m, order, value, grad, hess, kind or self.kind)

    def astype_matrix(self):
        return self

    def copy(self):
        return Jet(
            self.m,
            self.order,
            self.value.copy(),
            None if self.grad is None else self.grad.copy(),
            None if self.hess is None else self.hess.copy(),
            self.kind,
        )

    # -- linear structure ---------------------------------------------------

    def __add__(self, other: "Jet") -> "Jet":
        if not isinstance(other, Jet):
            raise ShapeError("jet addition needs a jet operand")
        if self.m != other.m or self.kind != other.kind:
            raise ShapeError("incompatible jets in addition")
        order = min(self.order, other.order)
        g = self.grad + other.grad if order >= 1 else None
        h = self.hess + other.hess if order >= 2 else None
        return self._like(self.value + other.value, g, h, order)

    def __sub__(self, other: "Jet") -> "Jet":
        return self + other.scale(-1.0)

    def scale(self, c) -> "Jet":
        g = None if self.grad is None else c * self.grad
        h = None if self.hess is None else c * self.hess
        return self._like(c * self.value, g, h, self.order)

    def __neg__(self) -> "Jet":
        return self.scale(-1.0)

    # -- multiplicative structure -------------------------------------------

    def mul(self, other: "Jet") -> "Jet":
        if self.m != other.m:
            raise ShapeError("jet product across different variable counts")
        order = min(self.order, other.order)
        ka, kb = self.kind, other.kind
        kout = "m" if "m" in (ka, kb) else "s"
        v = _pmul(ka, self.value, kb, other.value)
        g = h = None
        if order >= 1:
            g = _pmul(ka, self.grad, kb, other.value) + _pmul(ka, self.value, kb, other.grad)
        if order >= 2:
            cross = _pmul(ka, self.grad[:, None], kb, other.grad[None, :])
            h = (
                _pmul(ka, self.hess, kb, other.value)
                + _pmul(ka, self.value, kb, other.hess)
                + cross
                + cross.swapaxes(0, 1)
            )
        return Jet(self.m, order, v, g, h, kout)

    def inverse(self) -> "Jet":
        if self.kind != "m":
            raise ShapeError("jet inverse implemented for matrix jets")
        det = np.abs(np.linalg.det(self.value))
        if det.size and det.min() < 1e-12:
            raise SingularJetError(f"value matrix near singular, min |det| = {det.min():.2e}")
        u = np.linalg.inv(self.value)
        g = h = None
        if self.order >= 1:
            g = -u @ self.grad @ u
        if self.order >= 2:
            ugu = u @ self.grad @ u  # (m, B, n, n)
            t = ugu[:, None] @ self.grad[None, :] @ u
            h = -u @ self.hess @ u + t + t.swapaxes(0, 1)
        return Jet(self.m, self.order, u, g, h, "m")

    def expm(self) -> "Jet":
        """Jet of exp(f) by scaling-and-squaring on the truncated series."""
        if self.kind != "m":
            raise ShapeError("jet exponential implemented for matrix jets")
        if not np.all(np.isfinite(self.value)):
            raise NumericError("jet exponential requires finite entries")
        norm = np.abs(self.value).sum(axis=-1).max() if self.value.size else 0.0
        s = max(0, int(np.ceil(np.log2(max(norm, 1e-30) / 0.5))))
        x = self.scale(0.5**s)
        n = self.value.shape[-1]
        b = self.value.shape[:-2]
        acc = Jet.const(self.m, np.broadcast_to(np.eye(n, dtype=complex), b + (n, n)).copy(), self.order)
        term = acc
        for k in range(1, _EXP_MAX_TERMS + 1):
            term = term.mul(x).scale(1.0 / k)
            acc = acc + term
            tail = np.abs(term.value).max()
            if self.order >= 1:
                tail = max(tail, np.abs(term.grad).max())
            if self.order >= 2:
                tail = max(tail, np.abs(term.hess).max())
            if tail < _EXP_TOL * max(1.0, np.abs(acc.value).max()):
                break
        else:
            raise NumericError("jet exponential series did not converge")
        for _ in range(s):
            acc = acc.mul(acc)
        return acc

    # -- structure maps -----------------------------------------------------

    def trace(self) -> "Jet":
        if self.kind != "m":
            raise ShapeError("trace of a scalar jet")
        v = np.einsum("...ii->...", self.value)
        g = None if self.grad is None else np.einsum("...ii->...", self.grad)
        h = None if self.hess is None else np.einsum("...ii->...", self.hess)
        return Jet(self.m, self.order, v, g, h, "s")

    def partial(self, i: int) -> "Jet":
        """Derivative along variable i; consumes one jet order."""
        if self.order < 1:
            raise ShapeError("partial derivative of an order-0 jet")
        g = self.hess[i] if self.order >= 2 else None
        return Jet(self.m, self.order - 1, self.grad[i], g, None, self.kind)

    def truncate(self, order: int) -> "Jet":
        """View of the jet at a lower order (no copies)."""
        if order >= self.order:
            return self
        return Jet(self.m, order, self.value,
                   self.grad if order >= 1 else None,
                   self.hess if order >= 2 else None, self.kind)

    def max_abs(self) -> float:
        return float(np.abs(self.value).max()) if self.value.size else 0.0


def jet_arith(op: str, args: list[Jet]) -> Jet:
    """Single-entry jet arithmetic: multiply, exponential or inverse."""
    if op == "multiply":
        out = args[0]
        for a in args[1:]:
            out = out.mul(a)
        return out
    if op == "exponential":
        (a,) = args
        return a.expm()
    if op == "inverse":
        (a,) = args
        return a.inverse()
    raise ShapeError(f"unknown jet operation {op!r}")
