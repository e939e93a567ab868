"""Piecewise-linear surface finite elements for the point-constrained membrane.

The height field u is paired with an auxiliary field w through
M w = (S + M) u, so w approximates u - Laplace(u). Writing q = w - u the
discrete energy is

    J(u) = 1/2 [kappa q'Mq + (sigma - 2 kappa/R^2) u'Su - (2 sigma/R^2) u'Mu].

Point constraints E u = Z are enforced with a quadratic penalty and the mean
of u is pinned to zero with an exact Lagrange multiplier.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .geometry import ModelParams
from .mesh import SurfaceMesh, locate_on_mesh

log = logging.getLogger(__name__)

# exact P1 x P1 integral on a triangle of unit area
LOCAL_MASS = (np.ones((3, 3)) + np.eye(3)) / 12.0
KKT_RTOL = 1e-8


def default_beta(params: ModelParams) -> float:
    return 1e8 * params.kappa / params.radius**2


def assemble(mesh: SurfaceMesh):
    """Consistent mass and stiffness matrices (CSR)."""
    cache = mesh.__dict__.setdefault("_fem_cache", {})
    if "MS" in cache:
        return cache["MS"]
    A, G = mesh.areas, mesh.hat_gradients
    F = mesh.triangles
    Kloc = np.einsum("tid,tjd->tij", G, G) * A[:, None, None]
    Mloc = LOCAL_MASS[None] * A[:, None, None]
    rows = np.repeat(F, 3, axis=1).ravel()
    cols = np.tile(F, (1, 3)).ravel()
    n = mesh.n_vertices
    M = sp.csr_matrix((Mloc.ravel(), (rows, cols)), shape=(n, n))
    S = sp.csr_matrix((Kloc.ravel(), (rows, cols)), shape=(n, n))
    M.sum_duplicates()
    S.sum_duplicates()
    cache["MS"] = (M, S)
    return M, S


def point_operator(mesh: SurfaceMesh, sites) -> sp.csr_matrix:
    """Rows evaluating a P1 field at the radial projections of the sites."""
    sites = np.atleast_2d(np.asarray(sites, float))
    K = len(sites)
    if K > 1:
        d = np.linalg.norm(sites[:, None] - sites[None], axis=-1) + np.diag(np.full(K, np.inf))
        if d.min() <= 1e-12 * mesh.radius:
            raise ValueError("duplicate constraint sites make the point operator rank deficient")
    rows, cols, vals = [], [], []
    for i, x in enumerate(sites):
        loc = locate_on_mesh(mesh, x)
        for v, b in zip(mesh.triangles[loc.triangle_index], loc.barycentric):
            if b != 0.0:
                rows.append(i)
                cols.append(v)
                vals.append(b)
    return sp.csr_matrix((vals, (rows, cols)), shape=(K, mesh.n_vertices))


def element_gradients(mesh: SurfaceMesh, u) -> np.ndarray:
    """Face-constant tangential gradients of a nodal field; (T, 3) or (T, k, 3)."""
    u = np.asarray(u, float)
    uF = u[mesh.triangles]
    if u.ndim == 1:
        return np.einsum("tid,ti->td", mesh.hat_gradients, uF)
    # vector field: J[t, c, d] = d V_c / d x_d
    return np.einsum("tid,tic->tcd", mesh.hat_gradients, uF)


def element_gradient(mesh: SurfaceMesh, u, triangle_index: int) -> np.ndarray:
    t = int(triangle_index)
    u = np.asarray(u, float)
    return mesh.hat_gradients[t].T @ u[mesh.triangles[t]]


def curvature_part(mesh: SurfaceMesh, u) -> np.ndarray:
    """q = w - u, i.e. the solution of M q = S u."""
    M, S = assemble(mesh)
    cache = mesh.__dict__.setdefault("_fem_cache", {})
    if "Mlu" not in cache:
        cache["Mlu"] = spla.splu(M.tocsc())
    return cache["Mlu"].solve(S @ np.asarray(u, float))


def bilinear_form(mesh: SurfaceMesh, params: ModelParams, u, v) -> float:
    """First-variation form a_h(u, v), so that J(u) = a_h(u, u) / 2."""
    M, S = assemble(mesh)
    qu, qv = curvature_part(mesh, u), curvature_part(mesh, v)
    return float(params.kappa * qu @ (M @ qv) + params.gradient_coeff * u @ (S @ v)
                 - params.mass_coeff * u @ (M @ v))


def discrete_energy(mesh: SurfaceMesh, params: ModelParams, u) -> float:
    M, S = assemble(mesh)
    u = np.asarray(u, float)
    return _energy(M, S, params, u, curvature_part(mesh, u))


def _energy(M, S, params, u, q) -> float:
    return 0.5 * float(params.kappa * q @ (M @ q) + params.gradient_coeff * u @ (S @ u)
                       - params.mass_coeff * u @ (M @ u))


@dataclass
class MembraneSolution:
    u: np.ndarray
    w: np.ndarray
    mean_multiplier: float
    point_residuals: np.ndarray
    energy: float
    beta: float
    kkt_residual: float
    coupling_multiplier: np.ndarray | None = None  # multiplier of M q = S u
    solver: str = "direct"
    info: dict = field(default_factory=dict)

    @property
    def q(self) -> np.ndarray:
        """w - u."""
        return self.w - self.u

    @property
    def max_residual(self) -> float:
        return float(np.abs(self.point_residuals).max()) if len(self.point_residuals) else 0.0


def sites_coplanar(sites, tol: float = 1e-10) -> bool:
    sites = np.atleast_2d(np.asarray(sites, float))
    if len(sites) < 4:
        return True
    c = sites - sites.mean(axis=0)
    s = np.linalg.svd(c, compute_uv=False)
    return bool(s[-1] <= tol * max(s[0], 1.0))


def kkt_matrix(mesh: SurfaceMesh, params: ModelParams, E, beta: float) -> sp.csc_matrix:
    """Symmetric indefinite system in (u, q, mean multiplier).

    Rows: stationarity in u, the definition kappa (S u - M q) = 0, and the
    mean-zero condition. The coupling multiplier has been eliminated using
    its stationarity equation, which gives it as -kappa q.
    """
    M, S = assemble(mesh)
    k = params.kappa
    m1 = sp.csr_matrix((M @ np.ones(mesh.n_vertices))[:, None])
    A11 = params.gradient_coeff * S - params.mass_coeff * M + beta * (E.T @ E)
    return sp.bmat([[A11, k * S, m1], [k * S, -k * M, None], [m1.T, None, None]], format="csc")


def _minres_solve(K, rhs):
    d = np.abs(K.diagonal())
    d[d == 0] = 1.0
    Dm = sp.diags(1 / np.sqrt(d))
    x, info = spla.minres(Dm @ K @ Dm, Dm @ rhs, rtol=1e-10, maxiter=20 * K.shape[0])
    return Dm @ x, info


def solve_membrane(mesh: SurfaceMesh, params: ModelParams, sites, heights,
                   beta: float | None = None, method: str = "direct") -> MembraneSolution:
    """Minimise J(u) + beta/2 |E u - Z|^2 over mean-zero P1 fields.

    method is "direct" (sparse LU) or "minres"; a failed direct solve falls
    back to MINRES with symmetric diagonal scaling.
    """
    if beta is None:
        beta = default_beta(params)
    if not beta > 0:
        raise ValueError("penalty beta must be positive")
    sites = np.atleast_2d(np.asarray(sites, float))
    Z = np.asarray(heights, float).reshape(-1)
    if len(Z) != len(sites):
        raise ValueError("one height per site required")
    if sites_coplanar(sites):
        warnings.warn("constraint sites are coplanar; the minimiser may not be unique",
                      RuntimeWarning, stacklevel=2)
    n = mesh.n_vertices
    E = point_operator(mesh, sites)
    K = kkt_matrix(mesh, params, E, beta)
    rhs = np.concatenate([beta * (E.T @ Z), np.zeros(n + 1)])
    rnorm = np.linalg.norm(rhs)

    def rel_res(x):
        return float(np.linalg.norm(K @ x - rhs) / rnorm) if rnorm > 0 else float(np.linalg.norm(K @ x))

    solver, x, res = method, None, np.inf
    if method == "direct":
        try:
            x = spla.splu(K, permc_spec="COLAMD").solve(rhs)
            res = rel_res(x)
        except RuntimeError as exc:  # singular factor
            log.warning("direct KKT solve failed (%s); trying MINRES", exc)
    if x is None or not res <= KKT_RTOL:
        x, _ = _minres_solve(K, rhs)
        solver, res = "minres", rel_res(x)
    if not res <= KKT_RTOL:
        raise RuntimeError(f"KKT solve did not converge: relative residual {res:.3e} ({solver})")
    u, q, mu = x[:n], x[n:2 * n], float(x[2 * n])
    M, S = assemble(mesh)
    return MembraneSolution(u=u, w=u + q, mean_multiplier=mu, point_residuals=E @ u - Z,
                            energy=_energy(M, S, params, u, q), beta=beta,
                            kkt_residual=res, coupling_multiplier=-params.kappa * q,
                            solver=solver)
