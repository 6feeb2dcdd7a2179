"""Discrete covariant exterior calculus on lattice grids.

Operators act on real coefficient vectors in an orthonormal su(n) basis, so
the codifferential is the exact matrix transpose of the covariant difference
and adjointness holds to roundoff.  The lattice derivative uses forward
differences with the edge connection entering through a midpoint-averaged
commutator, which keeps consistency errors at O(h^2) for centered data.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DimensionError, ShapeError, SolverError
from .lie import su_basis

_CG_TOL = 1e-12
_RESID_TOL = 1e-10


class LatticeGrid:
    """Cube grid [0,1]^d with optional ball mask (centered, radius 0.5)."""

    def __init__(self, d: int, extent: int, geometry: str = "cube"):
        if d not in (2, 3, 4):
            raise DimensionError("lattice dimension must be 2, 3 or 4")
        self.d = d
        self.extent = extent
        self.h = 1.0 / (extent - 1)
        self.geometry = geometry
        self.shape = (extent,) * d
        idx = np.indices(self.shape).reshape(d, -1)
        self.coords = idx * self.h
        if geometry == "ball":
            self.vertex_mask = ((self.coords - 0.5) ** 2).sum(axis=0) <= 0.25 + 1e-12
        else:
            self.vertex_mask = np.ones(self.coords.shape[1], dtype=bool)
        self.nv = self.coords.shape[1]
        self._build_edges()
        if d == 2:
            self._build_plaquettes()

    def _vid(self, multi):
        return np.ravel_multi_index(multi, self.shape)

    def _build_edges(self):
        starts, ends, axes = [], [], []
        for mu in range(self.d):
            sl = [np.arange(n) for n in self.shape]
            sl[mu] = np.arange(self.shape[mu] - 1)
            grid = np.meshgrid(*sl, indexing="ij")
            base = np.stack([g.reshape(-1) for g in grid])
            tip = base.copy()
            tip[mu] += 1
            s, e = self._vid(base), self._vid(tip)
            keep = self.vertex_mask[s] & self.vertex_mask[e]
            starts.append(s[keep])
            ends.append(e[keep])
            axes.append(np.full(keep.sum(), mu))
        self.edge_start = np.concatenate(starts)
        self.edge_end = np.concatenate(ends)
        self.edge_axis = np.concatenate(axes)
        self.ne = self.edge_start.size
        # interior vertices: all 2d neighbours present
        deg = np.zeros(self.nv, dtype=int)
        np.add.at(deg, self.edge_start, 1)
        np.add.at(deg, self.edge_end, 1)
        self.interior = self.vertex_mask & (deg == 2 * self.d)
        self.boundary = self.vertex_mask & ~self.interior
        # boundary-normal edges: those touching a boundary vertex
        self.edge_boundary = self.boundary[self.edge_start] | self.boundary[self.edge_end]

    def _build_plaquettes(self):
        n0, n1 = self.shape
        grid = np.meshgrid(np.arange(n0 - 1), np.arange(n1 - 1), indexing="ij")
        base = np.stack([g.reshape(-1) for g in grid])
        v00 = self._vid(base)
        v10 = self._vid(base + np.array([[1], [0]]))
        v01 = self._vid(base + np.array([[0], [1]]))
        v11 = self._vid(base + np.array([[1], [1]]))
        keep = (self.vertex_mask[v00] & self.vertex_mask[v10]
                & self.vertex_mask[v01] & self.vertex_mask[v11])
        self.p_v00, self.p_v10 = v00[keep], v10[keep]
        self.p_v01, self.p_v11 = v01[keep], v11[keep]
        self.np_ = keep.sum()
        # plaquette edge ids
        self._edge_lookup = {}
        for i in range(self.ne):
            self._edge_lookup[(self.edge_start[i], self.edge_end[i])] = i
        self.p_ex0 = np.array([self._edge_lookup[(a, b)] for a, b in zip(self.p_v00, self.p_v10)])
        self.p_ex1 = np.array([self._edge_lookup[(a, b)] for a, b in zip(self.p_v01, self.p_v11)])
        self.p_ey0 = np.array([self._edge_lookup[(a, b)] for a, b in zip(self.p_v00, self.p_v01)])
        self.p_ey1 = np.array([self._edge_lookup[(a, b)] for a, b in zip(self.p_v10, self.p_v11)])


class DiscreteForm:
    """Lattice form of degree 0, 1 or 2 with su(n)-valued cells."""

    def __init__(self, grid: LatticeGrid, degree: int, values: np.ndarray):
        counts = {0: grid.nv, 1: grid.ne}
        if grid.d == 2:
            counts[2] = grid.np_
        if degree not in counts or values.shape[0] != counts[degree]:
            raise ShapeError(f"degree-{degree} form needs {counts.get(degree)} cells")
        self.grid = grid
        self.degree = degree
        self.values = np.asarray(values, dtype=complex)

    @staticmethod
    def zero(grid, degree, n):
        counts = {0: grid.nv, 1: grid.ne, 2: getattr(grid, "np_", 0)}
        return DiscreteForm(grid, degree, np.zeros((counts[degree], n, n), dtype=complex))


class HodgeOps:
    """Covariant lattice operators for a fixed connection and matrix size."""

    def __init__(self, grid: LatticeGrid, a_edges: DiscreteForm, n: int):
        self.grid = grid
        self.n = n
        self.basis = np.stack(su_basis(n))
        self.k = self.basis.shape[0]
        self.a = a_edges
        self._d0 = self._assemble_d0()
        self._solvers = {}

    # -- coefficient encoding -------------------------------------------------

    def to_coeffs(self, values: np.ndarray) -> np.ndarray:
        """su(n) cells -> stacked real coefficients."""
        c = -np.einsum("cij,kji->ck", values, self.basis)
        return np.ascontiguousarray(c.real).reshape(-1)

    def from_coeffs(self, coeffs: np.ndarray, cells: int) -> np.ndarray:
        c = coeffs.reshape(cells, self.k)
        return np.einsum("ck,kij->cij", c, self.basis)

    def _ad(self, values: np.ndarray) -> np.ndarray:
        """Real matrices of ad_X in the orthonormal basis, batched."""
        xt = np.einsum("eij,kjl->ekil", values, self.basis)
        tx = np.einsum("kij,ejl->ekil", self.basis, values)
        comm = xt - tx
        return (-np.einsum("ekij,lji->elk", comm, self.basis)).real

    # -- operator assembly -----------------------------------------------------

    def _assemble_d0(self) -> sp.csr_matrix:
        g, k = self.grid, self.k
        h = g.h
        ad_half = 0.5 * self._ad(self.a.values)
        eye = np.eye(k)
        rows, cols, vals = [], [], []
        base_r = np.repeat(np.arange(g.ne) * k, k * k)
        rr = (np.arange(g.ne)[:, None, None] * k + np.arange(k)[None, :, None])
        cc_plus = (g.edge_end[:, None, None] * k + np.arange(k)[None, None, :])
        cc_minus = (g.edge_start[:, None, None] * k + np.arange(k)[None, None, :])
        blk_plus = eye[None] / h + ad_half
        blk_minus = -eye[None] / h + ad_half
        rows = np.concatenate([np.broadcast_to(rr, blk_plus.shape).reshape(-1)] * 2)
        cols = np.concatenate([np.broadcast_to(cc_plus, blk_plus.shape).reshape(-1),
                               np.broadcast_to(cc_minus, blk_minus.shape).reshape(-1)])
        vals = np.concatenate([blk_plus.reshape(-1), blk_minus.reshape(-1)])
        mat = sp.coo_matrix((vals, (rows, cols)), shape=(g.ne * k, g.nv * k))
        return mat.tocsr()

    def _avg_edge_matrix(self, axis: int) -> sp.csr_matrix:
        """Averages the two parallel edges of each plaquette (2d only)."""
        g, k = self.grid, self.k
        if axis == 0:
            e0, e1 = g.p_ex0, g.p_ex1
        else:
            e0, e1 = g.p_ey0, g.p_ey1
        rows = np.repeat(np.arange(g.np_) * k, k) + np.tile(np.arange(k), g.np_)
        c0 = np.repeat(e0 * k, k) + np.tile(np.arange(k), g.np_)
        c1 = np.repeat(e1 * k, k) + np.tile(np.arange(k), g.np_)
        data = np.full(g.np_ * k, 0.5)
        return sp.coo_matrix(
            (np.concatenate([data, data]),
             (np.concatenate([rows, rows]), np.concatenate([c0, c1]))),
            shape=(g.np_ * k, g.ne * k)).tocsr()

    def _assemble_d1(self) -> sp.csr_matrix:
        """Covariant curl edges -> plaquettes (2d)."""
        g, k = self.grid, self.k
        h = g.h
        eye = sp.identity(k, format="csr")

        def pick(edges):
            rows = np.repeat(np.arange(g.np_) * k, k) + np.tile(np.arange(k), g.np_)
            cols = np.repeat(edges * k, k) + np.tile(np.arange(k), g.np_)
            return sp.coo_matrix((np.ones(g.np_ * k), (rows, cols)),
                                 shape=(g.np_ * k, g.ne * k)).tocsr()

        curl = (pick(g.p_ex0) + pick(g.p_ey1) - pick(g.p_ex1) - pick(g.p_ey0)) / h
        # commutator part [Abar_x, abar_y] - [Abar_y, abar_x] with averaged edges
        avg_x, avg_y = self._avg_edge_matrix(0), self._avg_edge_matrix(1)
        abar_x = 0.5 * (self.a.values[g.p_ex0] + self.a.values[g.p_ex1])
        abar_y = 0.5 * (self.a.values[g.p_ey0] + self.a.values[g.p_ey1])
        ad_x = self._ad(abar_x)
        ad_y = self._ad(abar_y)
        blk_x = sp.block_diag([m for m in ad_x], format="csr")
        blk_y = sp.block_diag([m for m in ad_y], format="csr")
        return curl + blk_x @ avg_y - blk_y @ avg_x

    @property
    def d1(self) -> sp.csr_matrix:
        if not hasattr(self, "_d1"):
            self._d1 = self._assemble_d1()
        return self._d1

    # -- public operators -------------------------------------------------------

    def d0_apply(self, xi: DiscreteForm) -> DiscreteForm:
        c = self._d0 @ self.to_coeffs(xi.values)
        return DiscreteForm(self.grid, 1, self.from_coeffs(c, self.grid.ne))

    def d0_adjoint(self, a: DiscreteForm) -> DiscreteForm:
        c = self._d0.T @ self.to_coeffs(a.values)
        return DiscreteForm(self.grid, 0, self.from_coeffs(c, self.grid.nv))

    def d1_apply(self, a: DiscreteForm) -> DiscreteForm:
        c = self.d1 @ self.to_coeffs(a.values)
        return DiscreteForm(self.grid, 2, self.from_coeffs(c, self.grid.np_))

    def inner(self, x: DiscreteForm, y: DiscreteForm) -> float:
        scale = self.grid.h ** self.grid.d
        return scale * float(
            -np.einsum("cij,cji->", x.values, y.values).real)

    # -- solvers ------------------------------------------------------------------

    def _matrix(self, kind: str):
        if kind in self._solvers:
            return self._solvers[kind]
        k = self.k
        if kind == "dirichlet":
            cols = np.repeat(self.grid.interior, k)
            d_int = self._d0[:, cols]
            mat = (d_int.T @ d_int).tocsr()
        elif kind == "neumann":
            mat = (self._d0.T @ self._d0).tocsr()
        elif kind == "two_form":
            mat = (self.d1 @ self.d1.T).tocsr()
        else:
            raise ShapeError(f"unknown operator kind {kind!r}")
        self._solvers[kind] = mat
        return mat

    def _cg(self, mat, rhs):
        if np.linalg.norm(rhs) == 0.0:
            return np.zeros_like(rhs)
        sol, info = spla.cg(mat, rhs, rtol=_CG_TOL, atol=0.0, maxiter=20 * mat.shape[0])
        if info != 0:
            raise SolverError(f"conjugate gradient did not converge (info={info})")
        resid = np.linalg.norm(mat @ sol - rhs) / np.linalg.norm(rhs)
        if resid > _RESID_TOL:
            raise SolverError(f"solver residual {resid:.2e} above {_RESID_TOL:.0e}")
        return sol

    def min_eigenvalue(self, kind: str = "neumann") -> float:
        mat = self._matrix(kind)
        vals = spla.eigsh(mat, k=1, sigma=-1e-4, which="LM",
                          return_eigenvectors=False)
        return float(vals[0])

    def green(self, kind: str, data: DiscreteForm) -> DiscreteForm:
        """Green operators: dirichlet and neumann take a 0-form source, the
        boundary-data problem takes a 1-form whose normal flux drives the
        solution."""
        k = self.k
        if kind == "dirichlet":
            rhs_full = self.to_coeffs(data.values).reshape(self.grid.nv, k)
            rhs = rhs_full[self.grid.interior].reshape(-1) * self.grid.h ** self.grid.d
            sol = self._cg(self._matrix("dirichlet"), rhs / self.grid.h ** self.grid.d)
            out = np.zeros((self.grid.nv, k))
            out[self.grid.interior] = sol.reshape(-1, k)
            return DiscreteForm(self.grid, 0, self.from_coeffs(out.reshape(-1), self.grid.nv))
        if kind == "neumann":
            rhs = self.to_coeffs(data.values)
            sol = self._cg(self._matrix("neumann"), rhs)
            return DiscreteForm(self.grid, 0, self.from_coeffs(sol, self.grid.nv))
        if kind == "boundary_data":
            rhs = self._d0.T @ self.to_coeffs(data.values)
            sol = self._cg(self._matrix("neumann"), rhs)
            return DiscreteForm(self.grid, 0, self.from_coeffs(sol, self.grid.nv))
        raise ShapeError(f"unknown green kind {kind!r}")

    # -- decompositions --------------------------------------------------------------

    def gamma0(self, a: DiscreteForm) -> DiscreteForm:
        """Dirichlet connection form: G_A d*_A a."""
        return self.green("dirichlet", self.d0_adjoint(a))

    def decompose(self, a: DiscreteForm, mode: str = "G0"):
        """Orthogonal splitting a = d_A xi + h per the requested orbit type."""
        if mode == "G0":
            xi = self.gamma0(a)
        elif mode in ("G", "flat"):
            xi0 = self.gamma0(a)
            b = DiscreteForm(self.grid, 1, a.values - self.d0_apply(xi0).values)
            eta = self.green("boundary_data", b)
            xi = DiscreteForm(self.grid, 0, xi0.values + eta.values)
        else:
            raise ShapeError(f"unknown decomposition mode {mode!r}")
        vert = self.d0_apply(xi)
        hor = DiscreteForm(self.grid, 1, a.values - vert.values)
        return xi, vert, hor

    def star_bracket(self, a: DiscreteForm, b: DiscreteForm) -> DiscreteForm:
        """*[a, *b] as a vertex 0-form: sum_mu [abar_mu, bbar_mu] with incident
        edge averages."""
        g = self.grid
        acc = np.zeros((g.nv, self.n, self.n), dtype=complex)
        cnt = np.zeros(g.nv)
        comm = a.values @ b.values - b.values @ a.values
        np.add.at(acc, g.edge_start, 0.5 * comm)
        np.add.at(acc, g.edge_end, 0.5 * comm)
        np.add.at(cnt, g.edge_start, 0.5)
        np.add.at(cnt, g.edge_end, 0.5)
        cnt[cnt == 0] = 1.0
        # per-axis averaging: each vertex sees d axes with up to 2 edges each
        return DiscreteForm(g, 0, acc / (cnt / self.grid.d)[:, None, None])

    def curvature_green(self, a: DiscreteForm, b: DiscreteForm, mode: str = "dirichlet",
                        project: bool = True) -> DiscreteForm:
        """Green operator applied to *[a, *b] after horizontal projection."""
        if project:
            dec_mode = "G0" if mode == "dirichlet" else "G"
            _, _, a = self.decompose(a, dec_mode)
            _, _, b = self.decompose(b, dec_mode)
        return self.green(mode, self.star_bracket(a, b))

    # -- quadratic slice map ------------------------------------------------------------

    def wedge11(self, a: DiscreteForm, b: DiscreteForm) -> DiscreteForm:
        """Plaquette values of a ^ b for edge one-forms (2d)."""
        g = self.grid
        ax = 0.5 * (a.values[g.p_ex0] + a.values[g.p_ex1])
        ay = 0.5 * (a.values[g.p_ey0] + a.values[g.p_ey1])
        bx = 0.5 * (b.values[g.p_ex0] + b.values[g.p_ex1])
        by = 0.5 * (b.values[g.p_ey0] + b.values[g.p_ey1])
        return DiscreteForm(g, 2, ax @ by - ay @ bx)

    def kuranishi(self, alpha: DiscreteForm, radius: float = 0.1) -> DiscreteForm:
        """alpha + d*_A G^{(2)}_A (alpha ^ alpha) with the plaquette Green
        operator of d_A d*_A."""
        norm = np.sqrt(self.inner(alpha, alpha))
        if norm > radius:
            raise SolverError(f"kuranishi argument norm {norm:.3e} above radius {radius}")
        quad = self.wedge11(alpha, alpha)
        sol = self._cg(self._matrix("two_form"), self.to_coeffs(quad.values))
        pot = self.from_coeffs(self.d1.T @ sol, self.grid.ne)
        return DiscreteForm(self.grid, 1, alpha.values + pot)

    def kuranishi_inverse(self, beta: DiscreteForm, tol: float = 1e-9,
                          maxiter: int = 50) -> DiscreteForm:
        """Fixed-point inversion of the slice map near zero."""
        alpha = DiscreteForm(self.grid, 1, beta.values.copy())
        for _ in range(maxiter):
            quad = self.wedge11(alpha, alpha)
            sol = self._cg(self._matrix("two_form"), self.to_coeffs(quad.values))
            pot = self.from_coeffs(self.d1.T @ sol, self.grid.ne)
            nxt = beta.values - pot
            delta = np.abs(nxt - alpha.values).max()
            alpha = DiscreteForm(self.grid, 1, nxt)
            if delta < tol:
                return alpha
        raise SolverError("kuranishi inversion did not converge inside the neighborhood")


# -- random data and sampling -----------------------------------------------------


def random_form(rng, grid: LatticeGrid, degree: int, n: int, scale: float = 0.3):
    counts = {0: grid.nv, 1: grid.ne, 2: getattr(grid, "np_", 0)}
    basis = np.stack(su_basis(n))
    c = rng.standard_normal((counts[degree], basis.shape[0])) * scale
    return DiscreteForm(grid, degree, np.einsum("ck,kij->cij", c, basis))


def sample_vertex_field(grid: LatticeGrid, fn) -> DiscreteForm:
    return DiscreteForm(grid, 0, fn(grid.coords))


def sample_edge_field(grid: LatticeGrid, fn) -> DiscreteForm:
    """Samples a continuum one-form at edge midpoints: fn(axis, points)."""
    mids = 0.5 * (grid.coords[:, grid.edge_start] + grid.coords[:, grid.edge_end])
    vals = np.empty((grid.ne,) + fn(0, mids[:, :1]).shape[1:], dtype=complex)
    for mu in range(grid.d):
        mask = grid.edge_axis == mu
        vals[mask] = fn(mu, mids[:, mask])
    return DiscreteForm(grid, 1, vals)


def conjugate_form(form: DiscreteForm, u: np.ndarray) -> DiscreteForm:
    ui = np.linalg.inv(u)
    return DiscreteForm(form.grid, form.degree, ui @ form.values @ u)
