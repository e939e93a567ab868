"""Rigid particles attached to the membrane and their parametrised motions.

A motion p = (alpha, tau) first rotates by alpha about the normal at the
particle centre and then rolls the sphere along the tangent vector tau.
The roll is a rotation by angle |tau| about nu(centre) x tau / |tau|.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .geometry import ModelParams, closest_point, unit_normal

FEASIBLE_TOL = 1e-8


def axis_rotation(axis, angle: float) -> np.ndarray:
    """Rotation matrix about a unit axis (Rodrigues)."""
    k = np.asarray(axis, float)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * (K @ K)


@dataclass(frozen=True)
class MotionParam:
    alpha: float = 0.0
    tau: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "tau", np.asarray(self.tau, float).reshape(3))

    def scaled(self, s: float) -> "MotionParam":
        return MotionParam(s * self.alpha, s * self.tau)

    def __add__(self, other: "MotionParam") -> "MotionParam":
        return MotionParam(self.alpha + other.alpha, self.tau + other.tau)

    def check_tangent(self, centre, tol: float = 1e-12):
        nu = unit_normal(centre)
        if abs(self.tau @ nu) > tol * max(1.0, np.linalg.norm(self.tau)):
            raise ValueError("tau is not tangent at the particle centre")


def rotation_matrix(centre, p: MotionParam) -> np.ndarray:
    """Matrix of x -> R_T(tau) R_n(alpha) x."""
    nu = unit_normal(centre)
    Rn = axis_rotation(nu, p.alpha)
    t = np.linalg.norm(p.tau)
    if t == 0:
        return Rn
    return axis_rotation(np.cross(nu, p.tau) / t, t) @ Rn


def rotate_about_normal(centre, alpha: float, x) -> np.ndarray:
    return np.asarray(x, float) @ axis_rotation(unit_normal(centre), alpha).T


def translate_tangential(centre, tau, x) -> np.ndarray:
    tau = np.asarray(tau, float)
    t = np.linalg.norm(tau)
    x = np.asarray(x, float)
    if t == 0:
        return x.copy()
    axis = np.cross(unit_normal(centre), tau) / t
    return x @ axis_rotation(axis, t).T


def angular_velocity(centre, e: MotionParam) -> np.ndarray:
    """omega such that the initial velocity of the motion along e is omega x x."""
    nu = unit_normal(centre)
    return np.cross(nu, e.tau) + e.alpha * nu


def motion_velocity(centre, e: MotionParam, x) -> np.ndarray:
    return np.cross(angular_velocity(centre, e), np.asarray(x, float))


@dataclass(frozen=True)
class Particle:
    """Attachment sites on the sphere, heights above it, and a centre.

    Build from ambient attachment points with `from_points`; the sites are
    their radial projections and the heights their signed distances.
    """

    sites: np.ndarray
    heights: np.ndarray
    centre: np.ndarray
    radius: float = 1.0

    def __post_init__(self):
        s = np.atleast_2d(np.asarray(self.sites, float))
        z = np.asarray(self.heights, float).reshape(-1)
        c = np.asarray(self.centre, float).reshape(3)
        if s.shape[1] != 3 or len(s) != len(z):
            raise ValueError("sites must be (n, 3) with one height per site")
        if np.any(np.abs(np.linalg.norm(s, axis=1) - self.radius) > 1e-9 * self.radius):
            raise ValueError("sites must lie on the sphere")
        if abs(np.linalg.norm(c) - self.radius) > 1e-9 * self.radius:
            raise ValueError("particle centre must lie on the sphere")
        d = np.linalg.norm(s[:, None] - s[None], axis=-1)
        np.fill_diagonal(d, np.inf)
        if len(s) > 1 and d.min() <= FEASIBLE_TOL * self.radius:
            raise ValueError("attachment points of a particle must be distinct")
        object.__setattr__(self, "sites", s)
        object.__setattr__(self, "heights", z)
        object.__setattr__(self, "centre", c)

    @classmethod
    def from_points(cls, points, centre=None, heights=None, params: ModelParams = ModelParams()):
        points = np.atleast_2d(np.asarray(points, float))
        sites, dist = closest_point(points, params)
        if heights is None:
            heights = dist
        if centre is None:
            centre = closest_point(points.mean(axis=0), params)[0]
        return cls(sites, np.asarray(heights, float), np.asarray(centre, float), params.radius)

    @property
    def points(self) -> np.ndarray:
        """Ambient attachment points site + height * normal."""
        return self.sites * (1 + self.heights / self.radius)[:, None]

    def __len__(self):
        return len(self.sites)


def apply_motion(particle: Particle, p: MotionParam) -> Particle:
    Q = rotation_matrix(particle.centre, p)
    return Particle(particle.sites @ Q.T, particle.heights.copy(),
                    Q @ particle.centre, particle.radius)


def move_all(particles, config) -> list[Particle]:
    if config is None:
        return list(particles)
    if len(config) != len(particles):
        raise ValueError("configuration length must equal the number of particles")
    return [apply_motion(P, p) for P, p in zip(particles, config)]


def zero_config(n: int) -> list[MotionParam]:
    return [MotionParam() for _ in range(n)]


def check_feasible(particles, config=None, tol: float = FEASIBLE_TOL) -> bool:
    """True iff the moved site sets of distinct particles are pairwise disjoint."""
    moved = move_all(particles, config)
    for i in range(len(moved)):
        for j in range(i + 1, len(moved)):
            d = np.linalg.norm(moved[i].sites[:, None] - moved[j].sites[None], axis=-1)
            if d.min() <= tol * moved[i].radius:
                return False
    return True


def stack_sites(particles) -> tuple[np.ndarray, np.ndarray]:
    sites = np.concatenate([P.sites for P in particles])
    heights = np.concatenate([P.heights for P in particles])
    return sites, heights


def load_particles(path, params: ModelParams = ModelParams()) -> list[Particle]:
    """Read particles from a JSON or YAML file.

    Expected layout::

        particles:
          - centre: [0, 0, 1]          # optional
            points: [[x, y, z], ...]   # ambient attachment points
            heights: [z1, z2, ...]     # optional, default radial distance
    """
    path = Path(path)
    text = path.read_text()
    data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    if not isinstance(data, dict) or "particles" not in data:
        raise ValueError(f"{path}: expected a mapping with a 'particles' list")
    out = []
    for k, entry in enumerate(data["particles"]):
        if "points" not in entry:
            raise ValueError(f"{path}: particle {k} has no points")
        out.append(Particle.from_points(entry["points"], entry.get("centre"),
                                        entry.get("heights"), params))
    return out
