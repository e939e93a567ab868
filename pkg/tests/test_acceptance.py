"""Acceptance criteria. Each test prints and records one PASS/FAIL line."""
import time

import jax.numpy as jnp
import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from pointmembrane import (MotionParam, Particle, assemble, bilinear_form, discrete_energy,
                           motion_velocity, rotate_about_normal, solve_membrane, translate_tangential)
from pointmembrane.derivative import curl_velocity, derivative_functional, solve_configuration
from pointmembrane.experiments import (ExperimentConfig, convergence_particles, run_convergence,
                                       run_orientation, run_single_null, run_sweep_pair)
from pointmembrane.fields import curl_field, strain_tensors
from pointmembrane.pullback import builtin_diffeos, pullback_verify, rotation_diffeo

pytestmark = pytest.mark.acceptance


def _report(number, title, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} | {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


@pytest.fixture(scope="module")
def convergence():
    t0 = time.perf_counter()
    res = run_convergence(ExperimentConfig(levels=[2, 3, 4, 5, 6]))
    return res, time.perf_counter() - t0


def test_c1_convergence_limit(convergence):
    res, secs = convergence
    checks = {c.name: c for c in res.checks}
    ok = checks["formula limit"].passed and checks["difference quotient limit"].passed and secs <= 600
    detail = f"{checks['formula limit'].detail}; {checks['difference quotient limit'].detail}; {secs:.0f} s"
    assert _report(1, "convergence limit", ok, detail), detail


def test_c2_eoc(convergence):
    res, _ = convergence
    c = {c.name: c for c in res.checks}["formula error EOC"]
    assert _report(2, "formula error EOC", c.passed, c.detail), c.detail


def test_c3_formula_vs_difference_quotient():
    t0 = time.perf_counter()
    res = run_sweep_pair(ExperimentConfig(), level=5)
    secs = time.perf_counter() - t0
    c = {c.name: c for c in res.checks}
    ok = c["aligned interior relative gap"].passed and c["off-grid gap exceeds aligned gap"].passed
    ok = ok and secs <= 900
    detail = (f"{c['aligned interior relative gap'].detail}; "
              f"{c['off-grid gap exceeds aligned gap'].detail}; {secs:.0f} s")
    assert _report(3, "formula vs difference quotient", ok, detail), detail


def test_c4_null_derivative():
    t0 = time.perf_counter()
    res = run_single_null(ExperimentConfig(levels=[4, 5, 6]))
    secs = time.perf_counter() - t0
    ok = res.passed and secs <= 600
    detail = "; ".join(c.detail for c in res.checks) + f"; {secs:.0f} s"
    assert _report(4, "null derivative", ok, detail), detail


def test_c5_orientation():
    t0 = time.perf_counter()
    res = run_orientation(ExperimentConfig(), level=5)
    secs = time.perf_counter() - t0
    c = {c.name: c for c in res.checks}
    ok = c["orientation signs"].passed and c["orientation magnitudes"].passed and secs <= 300
    detail = f"{c['orientation signs'].detail}; {c['orientation magnitudes'].detail}; {secs:.0f} s"
    assert _report(5, "orientation", ok, detail), detail


def test_c6_property_suite(meshes, params):
    t0 = time.perf_counter()
    m = meshes(3)
    fails = []
    M, S = assemble(m)
    parts = convergence_particles(params)
    sol = solve_configuration(m, params, parts)
    # quadratic-form identity
    if abs(discrete_energy(m, params, sol.u) - 0.5 * bilinear_form(m, params, sol.u, sol.u)) \
            > 1e-10 * abs(sol.energy):
        fails.append("J = a/2")
    # mass and stiffness invariants
    one = np.ones(m.n_vertices)
    if abs(one @ M @ one - m.total_area()) > 1e-12 * m.total_area() or np.abs(S @ one).max() > 1e-12:
        fails.append("M/S invariants")
    # trace of the strain tensor
    dirs = [MotionParam(0.4, [1.0, 0.3, 0.0])] + [MotionParam()] * 5
    V = curl_velocity(m, parts, None, dirs)
    A, div = strain_tensors(m, V)
    if np.abs(np.trace(A, axis1=1, axis2=2) - div).max() > 1e-12:
        fails.append("trace A = div V")
    # curl-field point condition
    site = parts[0].sites
    Vs = curl_field(parts, None, dirs, 0.3, np.concatenate([p.sites for p in parts]))
    want = motion_velocity(parts[0].centre, dirs[0], site[0])
    if np.abs(Vs[0] - want).max() > 1e-12 or np.abs(Vs[1:]).max() > 1e-12:
        fails.append("curl point condition")
    # motion velocity finite differences at O(t)
    x, c, e = np.array([0.6, 0.0, 0.8]), np.array([0.0, 0.0, 1.0]), dirs[0]
    errs = []
    for t in (1e-2, 5e-3):
        moved = translate_tangential(c, t * e.tau, rotate_about_normal(c, t * e.alpha, x))
        errs.append(np.linalg.norm((moved - x) / t - motion_velocity(c, e, x)))
    if not 1.7 < errs[0] / errs[1] < 2.3:
        fails.append(f"velocity FD ratio {errs[0] / errs[1]:.2f}")
    # icosahedral (cyclic coordinate) symmetry
    rot = [Particle(p.sites[:, [2, 0, 1]], p.heights, p.centre[[2, 0, 1]]) for p in parts]
    if abs(solve_configuration(m, params, rot).energy - sol.energy) > 1e-10 * sol.energy:
        fails.append("symmetry")
    # zero heights
    z = solve_membrane(m, params, np.concatenate([p.sites for p in parts]), np.zeros(6))
    if np.abs(z.u).max() > 1e-9:
        fails.append("zero heights")
    # penalty residual proportional to 1/beta
    sites = np.concatenate([p.sites for p in parts])
    Z = np.concatenate([p.heights for p in parts])
    scaled = [solve_membrane(m, params, sites, Z, beta=b).max_residual * b for b in (1e6, 1e8, 1e10)]
    if np.ptp(scaled) > 0.01 * max(scaled):
        fails.append("residual * beta not constant")
    secs = time.perf_counter() - t0
    if secs >= 60:
        fails.append(f"runtime {secs:.0f} s")
    detail = f"{8 - len([f for f in fails if not f.startswith('runtime')])}/8 properties; " \
             f"{secs:.1f} s" + (f"; failed: {', '.join(fails)}" if fails else "")
    assert _report(6, "property suite", not fails, detail), detail


def test_c7_pullback():
    pts = np.random.default_rng(7).normal(size=(16, 3))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    rigid = [d for d in builtin_diffeos() if d.name == "rotation"]
    rigid.append(rotation_diffeo(np.array([[0.0, -1, 0], [1, 0, 0], [0, 0, 1]])))
    funcs = [lambda x: x[0] * x[2], lambda x: jnp.exp(x[1]) * x[0] + x[2] ** 3]
    worst = {"gradient": 0.0, "laplacian": 0.0, "G_identity": 0.0, "det_identity": 0.0}
    for X in rigid:
        for u in funcs:
            r = pullback_verify(X, u, pts)
            for k in worst:
                worst[k] = max(worst[k], r[k])
    ok = (worst["gradient"] <= 1e-10 and worst["laplacian"] <= 1e-10
          and worst["G_identity"] <= 1e-12 and worst["det_identity"] <= 1e-12)
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    assert _report(7, "pullback verification", ok, detail), detail
