"""Divergence-free tangential velocity fields for rigid particle motions.

Two constructions are provided. `rotation_field` is a cap field: inside a
spherical cap around a particle centre it coincides with the rigid motion
and it is cut off smoothly outside. `curl_field` is localised around every
constraint site as the surface curl of a small stream function, so it
reproduces the motion velocity exactly at each site.
"""
from __future__ import annotations

import numpy as np

from .geometry import ModelParams, unit_normal
from .mesh import SurfaceMesh
from .particles import MotionParam, angular_velocity, move_all


def _bump(t):
    out = np.zeros_like(t)
    m = t > 0
    out[m] = np.exp(-1.0 / t[m])
    return out


def _bump_prime(t):
    out = np.zeros_like(t)
    m = t > 0
    out[m] = np.exp(-1.0 / t[m]) / t[m] ** 2
    return out


def cutoff_with_derivative(s, inner: float, outer: float):
    """Smooth step equal to 1 for |s| <= inner and 0 for |s| >= outer.

    Built from f(t) = exp(-1/t) as f(1-t) / (f(t) + f(1-t)), which is C-infinity
    at both ends of the transition. Returns (value, d value / d|s|).
    """
    if not 0 < inner < outer:
        raise ValueError(f"need 0 < inner < outer, got {inner}, {outer}")
    s = np.abs(np.asarray(s, float))
    w = outer - inner
    t = np.clip((s - inner) / w, 0.0, 1.0)
    fa, fb = _bump(1 - t), _bump(t)
    den = fa + fb
    val = fa / den
    dval = (-_bump_prime(1 - t) * fb - fa * _bump_prime(t)) / den**2 / w
    return val, dval


def smooth_cutoff(s, inner: float, outer: float):
    return cutoff_with_derivative(s, inner, outer)[0]


def rotation_field(centre, x, e: MotionParam = MotionParam(alpha=1.0), r: float = 0.75,
                   eps: float = 0.15, params: ModelParams = ModelParams(),
                   measure: str = "chord") -> np.ndarray:
    """Cap field equal to the rigid-motion velocity near `centre`.

    The cap profile depends on `measure`: "chord" uses |x - centre| and
    "height" uses R - x . centre/R. The rotation part eta * (alpha nu_c x x)
    is tangent to the level sets of eta; the translation part is the surface
    curl of eta * psi with psi = -R omega . x, which equals omega x x where
    eta = 1. Both parts are therefore divergence free.
    """
    R = params.radius
    c = np.asarray(centre, float)
    chat = c / np.linalg.norm(c)
    x = np.atleast_2d(np.asarray(x, float))
    if measure == "chord":
        diff = x - c
        s = np.linalg.norm(diff, axis=1)
        eta, deta = cutoff_with_derivative(s, r, r + eps)
        ds = diff / np.maximum(s, 1e-300)[:, None]
    elif measure == "height":
        s = R - x @ chat
        eta, deta = cutoff_with_derivative(s, r, r + eps)
        ds = np.broadcast_to(-chat, x.shape)
    else:
        raise ValueError(f"unknown cap measure {measure!r}")
    grad_eta = deta[:, None] * ds
    out = e.alpha * eta[:, None] * np.cross(chat, x)
    if np.any(e.tau):
        om = np.cross(chat, e.tau)
        psi = -R * (x @ om)
        grad = grad_eta * psi[:, None] - R * eta[:, None] * om
        out = out + np.cross(x / np.linalg.norm(x, axis=1)[:, None], grad)
    return out


def min_separation(sites) -> float:
    sites = np.atleast_2d(np.asarray(sites, float))
    if len(sites) < 2:
        return np.inf
    d = np.linalg.norm(sites[:, None] - sites[None], axis=-1)
    return float(d[np.triu_indices(len(sites), 1)].min())


def default_delta(h: float, sites) -> float:
    """3 h, clamped just below half of the smallest site separation."""
    return min(3.0 * h, 0.499 * min_separation(sites))


def curl_field_sites(sites, omegas, delta: float, x) -> np.ndarray:
    """Sum of localised curl fields, one per site with angular velocity omegas[i].

    Around a site s with normal n the stream function is
    eta(|x - s|) * g(x), g(y) = |y|^2 (omega . n) - (y . omega)(y . n),
    whose surface curl equals omega x s at s.
    """
    sites = np.atleast_2d(np.asarray(sites, float))
    omegas = np.atleast_2d(np.asarray(omegas, float))
    x = np.atleast_2d(np.asarray(x, float))
    if not delta > 0:
        raise ValueError("delta must be positive")
    if min_separation(sites) <= 2 * delta:
        raise ValueError("support balls of the curl field overlap; reduce delta")
    out = np.zeros_like(x)
    nu_x = unit_normal(x)
    for s, w in zip(sites, omegas):
        if not np.any(w):
            continue
        n = s / np.linalg.norm(s)
        diff = x - s
        r = np.linalg.norm(diff, axis=1)
        m = r < delta / 2
        if not np.any(m):
            continue
        y, rr = x[m], r[m]
        eta, deta = cutoff_with_derivative(rr, delta / 4, delta / 2)
        wn = w @ n
        yn, yw = y @ n, y @ w
        g = (y * y).sum(1) * wn - yw * yn
        grad_g = 2 * y * wn - np.outer(yn, w) - np.outer(yw, n)
        dr = np.zeros_like(y)
        nz = rr > 0
        dr[nz] = diff[m][nz] / rr[nz][:, None]
        grad = (deta * g)[:, None] * dr + eta[:, None] * grad_g
        out[m] += np.cross(nu_x[m], grad)
    return out


def curl_field(particles, config, directions, delta: float, x) -> np.ndarray:
    """Curl field for moving particle i along directions[i] from configuration config."""
    moved = move_all(particles, config)
    if len(directions) != len(moved):
        raise ValueError("one direction per particle required")
    sites, omegas = [], []
    for P, e in zip(moved, directions):
        om = angular_velocity(P.centre, e)
        sites.append(P.sites)
        omegas.append(np.tile(om, (len(P), 1)))
    return curl_field_sites(np.concatenate(sites), np.concatenate(omegas), delta, x)


def strain_tensors(mesh: SurfaceMesh, V_nodal):
    """Per-face (div V) I - grad V - grad V^T and div V of a nodal vector field."""
    V_nodal = np.asarray(V_nodal, float)
    J = np.einsum("tid,tic->tcd", mesh.hat_gradients, V_nodal[mesh.triangles])
    div = np.einsum("tcc->t", J)
    A = div[:, None, None] * np.eye(3) - J - J.transpose(0, 2, 1)
    return A, div


def strain_tensor(mesh: SurfaceMesh, V_nodal, triangle_index: int):
    t = int(triangle_index)
    J = np.asarray(V_nodal, float)[mesh.triangles[t]].T @ mesh.hat_gradients[t]
    div = float(np.trace(J))
    return div * np.eye(3) - J - J.T, div
