import numpy as np
import pytest

from pointmembrane import (ModelParams, build_icosphere, interpolate, locate_on_mesh, mesh_size,
                           nearest_vertex, write_obj, write_vtk)


@pytest.mark.parametrize("level", [0, 1, 2, 3])
def test_counts_and_topology(meshes, level):
    m = meshes(level)
    assert m.n_triangles == 20 * 4**level
    assert m.n_vertices == 10 * 4**level + 2
    assert np.abs(np.linalg.norm(m.vertices, axis=1) - 1).max() <= 1e-12
    E = len(m.edges)
    assert m.n_vertices - E + m.n_triangles == 2
    F = m.triangles
    e = np.sort(np.concatenate([F[:, [0, 1]], F[:, [1, 2]], F[:, [2, 0]]]), axis=1)
    _, counts = np.unique(e, axis=0, return_counts=True)
    assert np.all(counts == 2)
    V = m.vertices
    cen = V[F].mean(axis=1)
    assert np.all(np.einsum("ij,ij->i", m.face_normals, cen) > 0)


def test_radius_scaling():
    m = build_icosphere(ModelParams(radius=2.5), 2)
    assert np.abs(np.linalg.norm(m.vertices, axis=1) - 2.5).max() <= 1e-12 * 2.5


def test_level_guard():
    with pytest.raises(ValueError):
        build_icosphere(ModelParams(), 10)
    with pytest.raises(ValueError):
        build_icosphere(ModelParams(), -1)


def test_mesh_size(meshes):
    # edge of the icosahedron inscribed in the unit sphere, from its vertex coordinates
    phi = (1 + 5**0.5) / 2
    a = np.array([0, 1, phi]) / np.sqrt(1 + phi**2)
    b = np.array([0, -1, phi]) / np.sqrt(1 + phi**2)
    edge = np.linalg.norm(a - b)
    assert mesh_size(meshes(0)) == pytest.approx(edge, rel=1e-14)
    assert edge == pytest.approx(4 / np.sqrt(10 + 2 * np.sqrt(5)), rel=1e-14)
    hs = [mesh_size(meshes(k)) for k in range(6)]
    assert all(b <= a for a, b in zip(hs, hs[1:]))
    ratios = np.array(hs[3:]) / np.array(hs[2:-1])
    assert np.all((ratios > 0.49) & (ratios < 0.52))


def test_area_convergence(meshes):
    levels = [2, 3, 4, 5, 6]
    err = [abs(meshes(k).total_area() - 4 * np.pi) for k in levels]
    h = [mesh_size(meshes(k)) for k in levels]
    rates = np.log(np.array(err[:-1]) / err[1:]) / np.log(np.array(h[:-1]) / h[1:])
    assert np.all((rates > 1.9) & (rates < 2.1)), rates


def test_locate_vertex(meshes):
    m = meshes(3)
    for k in [0, 17, 500]:
        loc = locate_on_mesh(m, m.vertices[k])
        tri = m.triangles[loc.triangle_index]
        assert tri[np.argmax(loc.barycentric)] == k
        assert sorted(loc.barycentric) == [0.0, 0.0, 1.0]


def test_locate_centroid_brute_force(meshes, rng):
    m = meshes(3)
    V, F = m.vertices, m.triangles
    for t in rng.choice(m.n_triangles, 10, replace=False):
        c = V[F[t]].mean(axis=0)
        X = c / np.linalg.norm(c)
        loc = locate_on_mesh(m, X)
        assert loc.triangle_index == t
        assert np.allclose(loc.barycentric, 1 / 3, atol=1e-12)
        # brute force: only triangle t contains the ray with all barycentrics > 0
        hits = 0
        for s in range(m.n_triangles):
            A = V[F[s]].T
            try:
                sol = np.linalg.solve(A, X)
            except np.linalg.LinAlgError:
                continue
            if np.all(sol > 1e-9):
                hits += 1
        assert hits == 1


def test_locate_edge_point(meshes):
    m = meshes(2)
    a, b = m.edges[7]
    mid = m.vertices[a] + m.vertices[b]
    loc = locate_on_mesh(m, mid / np.linalg.norm(mid))
    assert np.min(np.abs(loc.barycentric)) <= 1e-12
    assert abs(loc.barycentric.sum() - 1) <= 1e-12
    # tie broken towards the lowest triangle index
    owners = np.flatnonzero(np.isin(m.triangles, [a, b]).sum(axis=1) == 2)
    assert loc.triangle_index == owners.min()


def test_nearest_vertex(meshes):
    m = meshes(3)
    x = m.vertices[42] + 1e-4
    assert nearest_vertex(m, x / np.linalg.norm(x)) == 42


def test_interpolate(meshes):
    m = meshes(2)
    assert np.all(interpolate(m, lambda x: 3.0) == 3.0)
    assert np.array_equal(interpolate(m, lambda x: x[:, 2]), m.vertices[:, 2])
    vec = interpolate(m, lambda x: np.cross([0, 0, 1.0], x))
    assert vec.shape == (m.n_vertices, 3)


def test_interpolation_error_rate(meshes):
    errs, hs = [], []
    for k in [2, 3, 4, 5]:
        m = meshes(k)
        u = interpolate(m, lambda x: x[:, 0] ** 2)
        e = m.edges
        mid = 0.5 * (m.vertices[e[:, 0]] + m.vertices[e[:, 1]])
        p = mid / np.linalg.norm(mid, axis=1)[:, None]
        errs.append(np.abs(0.5 * (u[e[:, 0]] + u[e[:, 1]]) - p[:, 0] ** 2).max())
        hs.append(mesh_size(m))
    rates = np.log(np.array(errs[:-1]) / errs[1:]) / np.log(np.array(hs[:-1]) / hs[1:])
    assert np.all(rates > 1.8), rates


def test_exports(tmp_path, meshes):
    m = meshes(1)
    write_obj(m, tmp_path / "m.obj")
    lines = (tmp_path / "m.obj").read_text().splitlines()
    assert sum(l.startswith("v ") for l in lines) == m.n_vertices
    assert sum(l.startswith("f ") for l in lines) == m.n_triangles
    u = m.vertices[:, 2]
    write_vtk(m, tmp_path / "m.vtk", {"u": u}, {"V": m.vertices})
    text = (tmp_path / "m.vtk").read_text()
    assert f"POINT_DATA {m.n_vertices}" in text and "SCALARS u double 1" in text
    assert "VECTORS V double" in text
    body = text.split("LOOKUP_TABLE default\n")[1].split("\n")[: m.n_vertices]
    assert np.array_equal(np.array(body, float), u)
