"""Icosphere triangulations of the sphere, point location and interpolation."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .geometry import ModelParams

MAX_LEVEL = 9
BARY_TOL = 1e-12

_PHI = (1 + 5**0.5) / 2
_ICO_V = np.array([
    [-1, _PHI, 0], [1, _PHI, 0], [-1, -_PHI, 0], [1, -_PHI, 0],
    [0, -1, _PHI], [0, 1, _PHI], [0, -1, -_PHI], [0, 1, -_PHI],
    [_PHI, 0, -1], [_PHI, 0, 1], [-_PHI, 0, -1], [-_PHI, 0, 1],
], dtype=float)
_ICO_F = np.array([
    [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
    [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
    [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
    [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
])


@dataclass(frozen=True)
class PointLocation:
    triangle_index: int
    barycentric: np.ndarray


class SurfaceMesh:
    """Flat-triangle approximation of the sphere with vertices on the sphere."""

    def __init__(self, vertices, triangles, refinement_level: int = 0, radius: float = 1.0):
        self.vertices = np.ascontiguousarray(vertices, dtype=float)
        self.triangles = np.ascontiguousarray(triangles, dtype=np.int64)
        self.refinement_level = refinement_level
        self.radius = float(radius)
        self.vertices.flags.writeable = False
        self.triangles.flags.writeable = False

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @cached_property
    def edges(self) -> np.ndarray:
        F = self.triangles
        e = np.sort(np.concatenate([F[:, [0, 1]], F[:, [1, 2]], F[:, [2, 0]]]), axis=1)
        return np.unique(e, axis=0)

    @cached_property
    def _geometry(self):
        V, F = self.vertices, self.triangles
        x0, x1, x2 = V[F[:, 0]], V[F[:, 1]], V[F[:, 2]]
        n = np.cross(x1 - x0, x2 - x0)
        dA = np.linalg.norm(n, axis=1)
        if np.any(dA <= 1e-14 * self.radius**2):
            raise ValueError("mesh contains a degenerate triangle")
        nh = n / dA[:, None]
        # gradient of the hat function of local vertex i, constant per face
        G = np.stack([np.cross(nh, x2 - x1), np.cross(nh, x0 - x2),
                      np.cross(nh, x1 - x0)], axis=1) / dA[:, None, None]
        return dA / 2, G, nh

    @property
    def areas(self) -> np.ndarray:
        return self._geometry[0]

    @property
    def hat_gradients(self) -> np.ndarray:
        """(T, 3, 3): gradient of local hat function i on face t."""
        return self._geometry[1]

    @property
    def face_normals(self) -> np.ndarray:
        return self._geometry[2]

    @cached_property
    def _tree(self):
        return cKDTree(self.vertices)

    def total_area(self) -> float:
        return float(self.areas.sum())


def build_icosphere(params: ModelParams = ModelParams(), level: int = 0) -> SurfaceMesh:
    """Subdivide the icosahedron `level` times, projecting onto the sphere each time."""
    if level < 0:
        raise ValueError("level must be non-negative")
    if level > MAX_LEVEL:
        raise ValueError(f"level {level} exceeds the memory guard ({MAX_LEVEL})")
    V = _ICO_V / np.linalg.norm(_ICO_V, axis=1)[:, None]
    F = _ICO_F.copy()
    for _ in range(level):
        e = np.sort(np.concatenate([F[:, [0, 1]], F[:, [1, 2]], F[:, [2, 0]]]), axis=1)
        ue, inv = np.unique(e, axis=0, return_inverse=True)
        inv = inv.ravel()
        mid = V[ue[:, 0]] + V[ue[:, 1]]
        mid /= np.linalg.norm(mid, axis=1)[:, None]
        n, nf = len(V), len(F)
        V = np.vstack([V, mid])
        a, b, c = inv[:nf] + n, inv[nf:2 * nf] + n, inv[2 * nf:] + n
        F = np.vstack([np.c_[F[:, 0], a, c], np.c_[F[:, 1], b, a],
                       np.c_[F[:, 2], c, b], np.c_[a, b, c]])
    # outward orientation
    x0, x1, x2 = V[F[:, 0]], V[F[:, 1]], V[F[:, 2]]
    flip = np.einsum("ij,ij->i", np.cross(x1 - x0, x2 - x0), x0 + x1 + x2) < 0
    F[flip] = F[flip][:, ::-1]
    return SurfaceMesh(params.radius * V, F, level, params.radius)


def mesh_size(mesh: SurfaceMesh) -> float:
    """Maximum edge length."""
    V, e = mesh.vertices, mesh.edges
    return float(np.linalg.norm(V[e[:, 0]] - V[e[:, 1]], axis=1).max())


def nearest_vertex(mesh: SurfaceMesh, x) -> int:
    """Index of the mesh vertex closest to x (lowest index on ties)."""
    x = np.asarray(x, float)
    d = np.linalg.norm(mesh.vertices - x, axis=1)
    return int(np.flatnonzero(d == d.min())[0])


def locate_on_mesh(mesh: SurfaceMesh, X) -> PointLocation:
    """Triangle hit by the ray from the origin through X, with barycentrics.

    Ties on shared edges go to the lowest triangle index.
    """
    X = np.asarray(X, float)
    V, F = mesh.vertices, mesh.triangles
    dist, k = mesh._tree.query(X)
    if dist <= 1e-12 * mesh.radius:
        t = int(np.flatnonzero((F == k).any(axis=1))[0])
        bary = (F[t] == k).astype(float)
        return PointLocation(t, bary)
    d = X / np.linalg.norm(X)
    a = V[F[:, 0]]
    e1 = V[F[:, 1]] - a
    e2 = V[F[:, 2]] - a
    # Moller-Trumbore with ray origin at 0
    p = np.cross(d, e2)
    det = np.einsum("ij,ij->i", e1, p)
    front = np.abs(det) > 1e-300
    inv = np.zeros_like(det)
    inv[front] = 1.0 / det[front]
    s = -a
    b1 = np.einsum("ij,ij->i", s, p) * inv
    q = np.cross(s, e1)
    b2 = (q @ d) * inv
    t_hit = np.einsum("ij,ij->i", e2, q) * inv
    ok = front & (b1 >= -BARY_TOL) & (b2 >= -BARY_TOL) & (b1 + b2 <= 1 + BARY_TOL) & (t_hit > 0)
    hits = np.flatnonzero(ok)
    if len(hits) == 0:
        raise RuntimeError(f"no triangle contains the radial projection of {X}")
    t = int(hits[0])
    bary = np.array([1 - b1[t] - b2[t], b1[t], b2[t]])
    return PointLocation(t, bary)


def interpolate(mesh: SurfaceMesh, f) -> np.ndarray:
    """Nodal interpolant: f evaluated at every vertex (vectorised call).

    f receives the (n, 3) vertex array and returns (n,) or (n, k).
    """
    vals = np.asarray(f(mesh.vertices), float)
    if vals.ndim == 0:
        vals = np.full(mesh.n_vertices, float(vals))
    if vals.shape[0] != mesh.n_vertices:
        raise ValueError("interpolated function returned the wrong number of values")
    return vals


def _fmt(row) -> str:
    return " ".join(f"{float(x):.17g}" for x in row)


def write_obj(mesh: SurfaceMesh, path) -> Path:
    path = Path(path)
    with path.open("w") as fh:
        for v in mesh.vertices:
            fh.write(f"v {_fmt(v)}\n")
        for t in mesh.triangles + 1:
            fh.write(f"f {t[0]} {t[1]} {t[2]}\n")
    return path


def write_vtk(mesh: SurfaceMesh, path, scalars=None, vectors=None, title="membrane") -> Path:
    """Legacy ASCII VTK polydata with optional POINT_DATA fields."""
    path = Path(path)
    scalars = scalars or {}
    vectors = vectors or {}
    nv, nt = mesh.n_vertices, mesh.n_triangles
    lines = ["# vtk DataFile Version 3.0", title, "ASCII", "DATASET POLYDATA",
             f"POINTS {nv} double"]
    lines += [_fmt(v) for v in mesh.vertices]
    lines.append(f"POLYGONS {nt} {4 * nt}")
    lines += [f"3 {t[0]} {t[1]} {t[2]}" for t in mesh.triangles]
    if scalars or vectors:
        lines.append(f"POINT_DATA {nv}")
    for name, vals in scalars.items():
        vals = np.asarray(vals, float).reshape(nv)
        lines += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
        lines += [f"{x:.17g}" for x in vals]
    for name, vals in vectors.items():
        vals = np.asarray(vals, float).reshape(nv, 3)
        lines.append(f"VECTORS {name} double")
        lines += [_fmt(x) for x in vals]
    path.write_text("\n".join(lines) + "\n")
    return path
