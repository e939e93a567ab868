"""Configurational energy, its explicit derivative functional and difference quotients."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .fem import MembraneSolution, assemble, element_gradients, solve_membrane, LOCAL_MASS
from .fields import curl_field, default_delta, strain_tensors
from .geometry import ModelParams, tangent_basis
from .mesh import SurfaceMesh, mesh_size
from .particles import MotionParam, check_feasible, move_all, stack_sites


def solve_configuration(mesh: SurfaceMesh, params: ModelParams, particles, config=None,
                        beta: float | None = None) -> MembraneSolution:
    if not check_feasible(particles, config):
        raise ValueError("particle configuration is not feasible (sites collide)")
    sites, heights = stack_sites(move_all(particles, config))
    return solve_membrane(mesh, params, sites, heights, beta)


def config_energy(mesh: SurfaceMesh, params: ModelParams, particles, config=None,
                  beta: float | None = None) -> float:
    return solve_configuration(mesh, params, particles, config, beta).energy


def _face_quadratic(mesh, a, b):
    """Per-face integral of the product of two P1 fields."""
    F = mesh.triangles
    return np.einsum("ti,ij,tj->t", a[F], LOCAL_MASS, b[F]) * mesh.areas


def derivative_functional(mesh: SurfaceMesh, params: ModelParams, solution: MembraneSolution,
                          V_nodal, strain=None) -> float:
    """Discrete derivative of the configurational energy along the velocity field V.

    Evaluated face by face with face-constant gradients of u, w and V:

        -kappa sum[ 1/2 div V |u - w|^2 + grad(u - w) . A grad u ]
        + 1/2 (sigma - 2 kappa/R^2) sum grad u . A grad u
        - sigma/R^2 sum div V u^2

    where A = (div V) I - grad V - grad V^T.
    """
    if strain is None:
        strain = strain_tensors(mesh, V_nodal)
    A, div = strain
    u, d = solution.u, solution.u - solution.w
    gu = element_gradients(mesh, u)
    gd = element_gradients(mesh, d)
    area = mesh.areas
    bend = 0.5 * div * _face_quadratic(mesh, d, d) + np.einsum("td,tde,te->t", gd, A, gu) * area
    grad_term = np.einsum("td,tde,te->t", gu, A, gu) * area
    mass_term = div * _face_quadratic(mesh, u, u)
    R2 = params.radius**2
    return float(-params.kappa * bend.sum() + 0.5 * params.gradient_coeff * grad_term.sum()
                 - params.sigma / R2 * mass_term.sum())


def central_difference(f, step: float, t0: float = 0.0) -> float:
    return (f(t0 + step) - f(t0 - step)) / (2 * step)


def shifted(config, directions, s: float):
    return [p + e.scaled(s) for p, e in zip(config, directions)]


def difference_quotient(mesh: SurfaceMesh, params: ModelParams, particles, config, directions,
                        step: float, beta: float | None = None) -> float:
    """Central difference of the configurational energy along `directions`."""
    plus, minus = shifted(config, directions, step), shifted(config, directions, -step)
    for c in (plus, minus):
        if not check_feasible(particles, c):
            raise ValueError("perturbed configuration is not feasible")
    return central_difference(
        lambda s: config_energy(mesh, params, particles, plus if s > 0 else minus, beta), step)


def curl_velocity(mesh: SurfaceMesh, particles, config, directions, delta: float | None = None):
    if delta is None:
        sites, _ = stack_sites(move_all(particles, config))
        delta = default_delta(mesh_size(mesh), sites)
    return curl_field(particles, config, directions, delta, mesh.vertices)


def canonical_directions(centre) -> list[MotionParam]:
    """Unit rotation followed by two orthonormal tangent translations."""
    t1, t2 = tangent_basis(centre)
    return [MotionParam(1.0), MotionParam(0.0, t1), MotionParam(0.0, t2)]


def config_gradient(mesh: SurfaceMesh, params: ModelParams, particles, config=None,
                    delta: float | None = None, beta: float | None = None,
                    solution: MembraneSolution | None = None) -> np.ndarray:
    """(N, 3) array of derivatives along rotation and the two tangent translations.

    Uses one membrane solve and 3N evaluations of the derivative functional.
    """
    N = len(particles)
    config = config if config is not None else [MotionParam() for _ in range(N)]
    if solution is None:
        solution = solve_configuration(mesh, params, particles, config, beta)
    moved = move_all(particles, config)
    out = np.zeros((N, 3))
    zero = MotionParam()
    for i, P in enumerate(moved):
        for j, e in enumerate(canonical_directions(P.centre)):
            dirs = [zero] * N
            dirs[i] = e
            V = curl_velocity(mesh, particles, config, dirs, delta)
            out[i, j] = derivative_functional(mesh, params, solution, V)
    return out


@dataclass
class DerivativeReport:
    direction: str
    formula_value: float
    dq_value: float | None = None
    energies: dict = field(default_factory=dict)
    h: float = float("nan")
    level: int | None = None

    @property
    def abs_gap(self) -> float | None:
        if self.dq_value is None:
            return None
        return abs(self.formula_value - self.dq_value)

    @property
    def rel_gap(self) -> float | None:
        if self.dq_value is None or self.dq_value == 0:
            return None
        return self.abs_gap / abs(self.dq_value)

    def row(self) -> dict:
        return {"h": self.h, "level": self.level, "direction": self.direction,
                "formula": self.formula_value, "dq": self.dq_value,
                "abs_gap": self.abs_gap, "rel_gap": self.rel_gap}


REPORT_COLUMNS = ["h", "level", "direction", "formula", "dq", "abs_gap", "rel_gap"]


def write_report_csv(reports, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS)
        w.writeheader()
        for r in reports:
            w.writerow({k: _cell(v) for k, v in r.row().items()})
    return path


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v
