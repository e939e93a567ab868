"""Exact geometry of the reference sphere of radius R centred at the origin."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ON_SPHERE_TOL = 1e-9


@dataclass(frozen=True)
class ModelParams:
    """Material and geometric constants of the membrane model.

    kappa is the bending rigidity, sigma the surface tension and radius the
    radius of the reference sphere.
    """

    kappa: float = 1.0
    sigma: float = 1.0
    radius: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.kappa) and self.kappa > 0):
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if not (np.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"radius must be positive, got {self.radius}")

    @property
    def gradient_coeff(self) -> float:
        """Coefficient of |grad u|^2 in the quadratic energy."""
        return self.sigma - 2.0 * self.kappa / self.radius**2

    @property
    def mass_coeff(self) -> float:
        """Coefficient of u^2 in the quadratic energy (enters with a minus sign)."""
        return 2.0 * self.sigma / self.radius**2


def _as_points(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if not np.all(np.isfinite(X)):
        raise ValueError("points must have finite coordinates")
    if X.shape[-1] != 3:
        raise ValueError(f"expected trailing dimension 3, got shape {X.shape}")
    return X


def closest_point(X, params: ModelParams = ModelParams()):
    """Project X radially onto the sphere.

    Returns (projection, signed distance); works on a single point or an
    (n, 3) array. X = projection + distance * projection / R.
    """
    X = _as_points(X)
    r = np.linalg.norm(X, axis=-1)
    if np.any(r == 0):
        raise ValueError("closest point undefined at the origin")
    proj = params.radius * X / r[..., None]
    return proj, r - params.radius


def unit_normal(x) -> np.ndarray:
    x = _as_points(x)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def shape_operators(x, params: ModelParams = ModelParams()):
    """Normal, tangential projector, Weingarten map and mean curvature at x.

    The mean curvature is the sum of principal curvatures, so 2/R.
    """
    x = _as_points(x)
    if x.shape != (3,):
        raise ValueError("shape_operators expects a single point")
    R = params.radius
    if abs(np.linalg.norm(x) - R) > ON_SPHERE_TOL * R:
        raise ValueError(f"point {x} is not on the sphere of radius {R}")
    nu = x / np.linalg.norm(x)
    P = np.eye(3) - np.outer(nu, nu)
    return nu, P, P / R, 2.0 / R


def tangent_basis(centre) -> tuple[np.ndarray, np.ndarray]:
    """Two orthonormal tangent vectors at centre.

    Coordinate axes are projected to the tangent plane and the largest
    projection is taken first, then Gram-Schmidt on the next largest.
    """
    nu = unit_normal(centre)
    proj = np.eye(3) - np.outer(nu, nu)  # rows: projected e1, e2, e3
    order = np.argsort(-np.linalg.norm(proj, axis=1), kind="stable")
    t1 = proj[order[0]] / np.linalg.norm(proj[order[0]])
    t2 = proj[order[1]] - (proj[order[1]] @ t1) * t1
    t2 /= np.linalg.norm(t2)
    return t1, t2
