"""Checks of the pullback identities for surface derivatives under a diffeomorphism
between two spheres, using automatic differentiation of ambient formulas.

For X: S0 -> S1 with tangential Jacobian J = grad_{S0} X the matrix
B = J + nu1(X) (x) nu0 satisfies B^T B = J^T J + nu0 (x) nu0 =: G, and

    (grad_{S1} u) o X = B^{-T} grad_{S0}(u o X)
    (Lap_{S1} u) o X  = (1/b) div_{S0}(b G^{-1} grad_{S0}(u o X)),   b = det B.

The Hessian identity and the commutator relation of tangential derivatives
are also checked.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

import jax
import jax.numpy as jnp

jax.config.update("jax_enable_x64", True)


def _nu(x):
    return x / jnp.linalg.norm(x)


def _proj(x, R):
    return R * _nu(x)


def _P(x):
    n = _nu(x)
    return jnp.eye(3) - jnp.outer(n, n)


def surface_jacobian(F: Callable, R: float):
    """x -> D(F o pi)(x); on the sphere this equals DF P (rows are components)."""
    jac = jax.jacfwd(lambda y: F(_proj(y, R)))
    return jac


def surface_gradient(f: Callable, R: float):
    g = jax.grad(lambda y: f(_proj(y, R)))
    return lambda x: _P(x) @ g(x)


def surface_divergence(F: Callable, R: float):
    jac = surface_jacobian(F, R)
    return lambda x: jnp.trace(_P(x) @ jac(x))


@dataclass(frozen=True)
class Diffeo:
    """Map from the sphere of radius r0 onto the sphere of radius r1."""

    name: str
    fn: Callable
    r0: float = 1.0
    r1: float = 1.0


def rotation_diffeo(Q, r: float = 1.0) -> Diffeo:
    Q = jnp.asarray(Q, dtype=jnp.float64)
    return Diffeo("rotation", lambda x: Q @ x, r, r)


def twist_diffeo(rate: float = 0.7, r: float = 1.0) -> Diffeo:
    """Rotation about the z axis by an angle proportional to the height x3."""
    def fn(x):
        a = rate * x[2]
        c, s = jnp.cos(a), jnp.sin(a)
        return jnp.array([c * x[0] - s * x[1], s * x[0] + c * x[1], x[2]])
    return Diffeo("twist", fn, r, r)


def stretch_diffeo(a: float = 0.4, r: float = 1.0) -> Diffeo:
    """Polar stretch x -> r normalize(diag(1, 1, 1 + a) x); not an isometry."""
    d = jnp.array([1.0, 1.0, 1.0 + a])
    return Diffeo("stretch", lambda x: r * _nu(d * x), r, r)


def scaling_diffeo(s: float = 1.5, r: float = 1.0) -> Diffeo:
    return Diffeo("scaling", lambda x: s * x, r, s * r)


def builtin_diffeos() -> list[Diffeo]:
    th = 0.9
    axis = np.array([1.0, 2.0, -0.5]) / np.linalg.norm([1.0, 2.0, -0.5])
    K = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    Q = np.eye(3) + np.sin(th) * K + (1 - np.cos(th)) * K @ K
    return [rotation_diffeo(Q), twist_diffeo(), stretch_diffeo(), scaling_diffeo()]


@dataclass(frozen=True)
class PullbackMatrices:
    B: np.ndarray
    G: np.ndarray
    b: float


def _B_fn(X: Diffeo):
    jac = surface_jacobian(X.fn, X.r0)

    def B(y):
        x = _proj(y, X.r0)
        return jac(x) + jnp.outer(_nu(X.fn(x)), _nu(x))
    return B


def pullback_matrices(X: Diffeo, x) -> PullbackMatrices:
    x = jnp.asarray(x, dtype=jnp.float64)
    B = np.asarray(_B_fn(X)(x))
    return PullbackMatrices(B, B.T @ B, float(np.linalg.det(B)))


def pullback_verify(X: Diffeo, u: Callable, points) -> dict:
    """Maximum residuals of the pullback identities over the sample points.

    `u` is an ambient jax-traceable function; it is evaluated on S1 only
    through the closest-point projection.
    """
    R0, R1 = X.r0, X.r1
    Bf = _B_fn(X)
    jac0 = surface_jacobian(X.fn, R0)
    uX = lambda y: u(X.fn(y))
    grad1 = surface_gradient(u, R1)
    grad0_uX = surface_gradient(uX, R0)
    hess1 = surface_jacobian(grad1, R1)  # [j, i] = D_i D_j u

    def b_fn(y):
        return jnp.linalg.det(Bf(y))

    def G_fn(y):
        x = _proj(y, R0)
        J = jac0(x)
        return J.T @ J + jnp.outer(_nu(x), _nu(x))

    def flux(y):
        return b_fn(y) * jnp.linalg.solve(G_fn(y), grad0_uX(y))

    def g_fn(y):
        return jnp.linalg.solve(Bf(y).T, grad0_uX(y))

    def W(y):
        # W[k, i, j] = b g_j (B^{-1})_{k i}
        return b_fn(y) * jnp.einsum("ki,j->kij", jnp.linalg.inv(Bf(y)), g_fn(y))

    jacW = jax.jacfwd(lambda y: W(_proj(y, R0)))
    lap1 = surface_divergence(grad1, R1)
    div_flux = surface_divergence(flux, R0)
    H0, H1 = 2.0 / R0, 2.0 / R1

    res = {"G_identity": 0.0, "det_identity": 0.0, "gradient": 0.0, "laplacian": 0.0,
           "hessian": 0.0, "commutator": 0.0, "min_abs_det": np.inf}
    for x in np.atleast_2d(np.asarray(points, float)):
        x = jnp.asarray(R0 * x / np.linalg.norm(x))
        B = np.asarray(Bf(x))
        b = float(np.linalg.det(B))
        res["min_abs_det"] = min(res["min_abs_det"], abs(b))
        if abs(b) < 1e-12:
            raise np.linalg.LinAlgError(f"pullback matrix B is singular at {np.asarray(x)}")
        G = np.asarray(G_fn(x))
        res["G_identity"] = max(res["G_identity"], float(np.abs(B.T @ B - G).max()))
        res["det_identity"] = max(res["det_identity"], abs(b - np.sqrt(np.linalg.det(G))))
        Xx = X.fn(x)
        g = np.linalg.solve(B.T, np.asarray(grad0_uX(x)))
        res["gradient"] = max(res["gradient"], float(np.abs(np.asarray(grad1(Xx)) - g).max()))
        lhs = float(lap1(Xx))
        rhs = float(div_flux(x)) / b
        res["laplacian"] = max(res["laplacian"], abs(lhs - rhs))
        Hs = np.asarray(hess1(Xx)).T  # [i, j] = D_i D_j u
        P0 = np.asarray(_P(x))
        divW = np.einsum("kijl,lk->ij", np.asarray(jacW(x)), P0) / b
        nu1 = np.asarray(_nu(Xx))
        hess_rhs = divW + (H1 - H0) * np.outer(nu1, g)
        res["hessian"] = max(res["hessian"], float(np.abs(Hs - hess_rhs).max()))
        # commutator of tangential derivatives on S1
        Hg = np.asarray(grad1(Xx)) / R1
        comm = np.outer(nu1, Hg) - np.outer(Hg, nu1)
        res["commutator"] = max(res["commutator"], float(np.abs(Hs - Hs.T - comm).max()))
    return res
