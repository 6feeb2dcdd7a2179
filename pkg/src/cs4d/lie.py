"""Exact arithmetic for the structure group SU(n) and its Lie algebra su(n).

Elements are plain complex ndarrays; validators enforce the algebra/group
invariants.  The pairing is <x, y> = -Re Tr(x y), which is positive definite
on su(n) and makes ``su_basis`` orthonormal.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, NumericError, ShapeError

ALGEBRA_TOL = 1e-12
GROUP_TOL = 1e-10


def su_basis(n: int) -> list[np.ndarray]:
    """Orthonormal basis of su(n) under <x,y> = -Tr(xy).

    Returns the n^2 - 1 generalized (anti-hermitian) Gell-Mann generators:
    real and imaginary off-diagonal pairs plus the diagonal tower.
    """
    if n < 2:
        raise DimensionError(f"su(n) basis needs n >= 2, got n={n}")
    basis = []
    for j in range(n):
        for k in range(j + 1, n):
            x = np.zeros((n, n), dtype=complex)
            x[j, k] = 1.0
            x[k, j] = -1.0
            basis.append(x / np.sqrt(2.0))
            y = np.zeros((n, n), dtype=complex)
            y[j, k] = 1.0j
            y[k, j] = 1.0j
            basis.append(y / np.sqrt(2.0))
    for l in range(1, n):
        d = np.zeros((n, n), dtype=complex)
        d[:l, :l] = 1.0j * np.eye(l)
        d[l, l] = -1.0j * l
        basis.append(d / np.sqrt(l * (l + 1)))
    return basis


def inner(x: np.ndarray, y: np.ndarray) -> float:
    """Pairing -Re Tr(xy); symmetric and positive definite on su(n)."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape or x.shape[-1] != x.shape[-2]:
        raise ShapeError(f"pairing needs equal square shapes, got {x.shape} vs {y.shape}")
    return float(-np.einsum("...ij,...ji->...", x, y).real)


def bracket(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def group_exp(x: np.ndarray) -> np.ndarray:
    """Matrix exponential of an anti-hermitian matrix via eigendecomposition.

    x = i h with h hermitian, so exp(x) = U exp(i diag) U^* is exactly unitary
    up to roundoff.
    """
    x = np.asarray(x, dtype=complex)
    if not np.all(np.isfinite(x)):
        raise NumericError("group_exp requires finite entries")
    h = -1.0j * x
    w, u = np.linalg.eigh(h)
    phase = np.exp(1.0j * w)
    return np.einsum("...ij,...j,...kj->...ik", u, phase, u.conj())


def check_algebra(x: np.ndarray, tol: float = ALGEBRA_TOL) -> None:
    """Raise unless x is anti-hermitian and traceless within tol."""
    x = np.asarray(x)
    anti = np.abs(x + x.conj().swapaxes(-1, -2)).max()
    tr = np.abs(np.einsum("...ii->...", x)).max()
    if anti > tol or tr > tol:
        raise NumericError(
            f"not an su(n) element: anti-hermiticity residual {anti:.2e}, |trace| {tr:.2e}"
        )


def check_group(u: np.ndarray, tol: float = GROUP_TOL) -> None:
    """Raise unless u is unitary with unit determinant within tol."""
    u = np.asarray(u)
    n = u.shape[-1]
    uni = np.abs(u @ u.conj().swapaxes(-1, -2) - np.eye(n)).max()
    det = np.abs(np.linalg.det(u) - 1.0).max()
    if uni > tol or det > tol:
        raise NumericError(f"not an SU(n) element: unitarity {uni:.2e}, |det-1| {det:.2e}")


def random_algebra(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """Random su(n) element with coefficient vector of norm <= scale."""
    basis = su_basis(n)
    c = rng.standard_normal(len(basis))
    c *= scale / max(np.linalg.norm(c), 1e-30)
    return sum(ci * ti for ci, ti in zip(c, basis))


def batch_group_exp(x: np.ndarray) -> np.ndarray:
    """group_exp applied along leading batch axes."""
    return group_exp(x)
