"""Acceptance suite.

Each test corresponds to one acceptance criterion and runs within its
stated time budget.  Expensive shared artifacts (meshes, solver
histories) are cached in module-scoped fixtures.
"""

import json

import numpy as np
import pytest

from eshelby.geometry import Material, make_cuboid, tessellate_sphere
from eshelby.kernels_transient import (
    C_nf,
    SeriesParams,
    _fd4,
    grad_C_nf,
    grad_spatial_L,
    spatial_L,
)
from eshelby.kernels_harmonic import A_n, HarmonicParams, grad_A_n
from eshelby.kernels_sphere_ellipsoid import sphere_C, sphere_L
from eshelby.oracle import (
    GridSpec,
    fft_cuboid_maps,
    jump_measure,
    quad_time,
)
from eshelby import eim
from eshelby.cli import main

MAT = Material(K=0.05, Cp=1.0)
A = 0.1
TAU = 2.0

pytestmark = pytest.mark.filterwarnings("ignore::RuntimeWarning")


@pytest.fixture(scope="module")
def sphere_r5():
    return tessellate_sphere(A, 5)


@pytest.fixture(scope="module")
def cube():
    return make_cuboid(0.2, 0.2, 0.2)


# ---------------------------------------------------------------------
# 1. Polyhedral series on a fine sphere mesh vs the closed form.
# ---------------------------------------------------------------------

def test_acceptance_1_sphere_series_vs_closed_form(sphere_r5):
    assert len(sphere_r5.faces) >= 3000
    sp = SeriesParams(n_max=10)
    x3s = np.linspace(-2.5 * A, 2.5 * A, 101)
    ref = np.array([sphere_L(A, abs(x3), TAU, MAT) for x3 in x3s])
    got = np.array([
        spatial_L(sphere_r5, np.array([0.0, 0.0, x3]), TAU, MAT, sp)
        for x3 in x3s])
    scale = np.abs(ref).max()
    assert np.abs(got - ref).max() / scale <= 0.02


# ---------------------------------------------------------------------
# 2. Analytic gradient vs central finite differences.
# ---------------------------------------------------------------------

def test_acceptance_2_gradient_matches_finite_difference(cube):
    sp = SeriesParams(n_max=10)
    rng = np.random.default_rng(42)
    h = 1e-4
    n_checked = 0
    while n_checked < 20:
        x = rng.uniform(-0.4, 0.4, size=3)
        if np.all(np.abs(x) <= 0.15):
            continue  # keep the FD stencil well away from the faces
        g = grad_spatial_L(cube, x, TAU, MAT, sp)
        fd = np.empty(3)
        for ax in range(3):
            e = np.zeros(3)
            e[ax] = h
            fd[ax] = (spatial_L(cube, x + e, TAU, MAT, sp)
                      - spatial_L(cube, x - e, TAU, MAT, sp)) / (2 * h)
        scale = max(np.abs(g).max(), np.abs(fd).max(), 1e-30)
        assert np.abs(g - fd).max() / scale <= 1e-5
        n_checked += 1


# ---------------------------------------------------------------------
# 3. Windowed time-convolved tensor vs composite time quadrature.
# ---------------------------------------------------------------------

def test_acceptance_3_time_convolved_vs_quadrature(cube):
    sp = SeriesParams(n_max=30)
    rng = np.random.default_rng(7)
    pts = [rng.uniform(-0.3, 0.3, size=3) for _ in range(10)]
    cases = [
        (2.0, 0.0, 1.0),   # regular window
        (2.0, 0.0, 2.0),   # singular branch, t_f == t
        (2.0, 0.5, 2.0),   # singular branch, shifted start
        (3.0, 1.0, 2.5),   # regular interior window
    ]
    for n in (0, 1, 2):
        for i, x in enumerate(pts):
            t, t0, t1 = cases[i % len(cases)]
            got = C_nf(cube, x, t, t0, t1, n, MAT, sp)
            ref = quad_time(cube, x, t, (t0, t1), n, MAT, tol=1e-10)
            scale = max(abs(ref), abs(got), 1e-30)
            assert abs(got - ref) / scale <= 5e-3


# ---------------------------------------------------------------------
# 4. Interface jump suite on a cuboid face.
# ---------------------------------------------------------------------

def test_acceptance_4_jump_suite(cube):
    sp = SeriesParams(n_max=30)
    face = np.array([0.0, 0.0, 0.1])
    normal = np.array([0.0, 0.0, 1.0])
    one_over_k = 1.0 / MAT.K

    def spatial_l33(x):
        return _fd4(lambda y: grad_spatial_L(cube, y, TAU, MAT, sp)[2],
                    x, 5e-3 * 0.3)[2]

    j_sp = jump_measure(spatial_l33, face, normal, 0.015)
    assert abs(j_sp) <= 1e-3 * one_over_k

    def time_l33(x):
        return _fd4(lambda y: grad_C_nf(cube, y, TAU, 0.0, TAU, 0,
                                        MAT, sp)[2], x, 5e-3 * 0.3)[2]

    j_tm = jump_measure(time_l33, face, normal, 0.015)
    assert abs(j_tm - one_over_k) / one_over_k <= 0.02

    hp = HarmonicParams(beta=10.0 + 10.0j)
    sph = SeriesParams(n_max=28)

    def harm_33(x):
        g = _fd4(lambda y: grad_A_n(cube, y, hp, 0, sph)[2].real, x,
                 5e-3 * 0.3)[2]
        return g / (4.0 * np.pi * MAT.K)

    j_h = jump_measure(harm_33, face, normal, 0.015)
    assert abs(j_h - one_over_k) / one_over_k <= 0.02


# ---------------------------------------------------------------------
# 5. Harmonic potential on a tessellated sphere vs quadrature and the
#    Newtonian limit.
# ---------------------------------------------------------------------

def _helmholtz_sphere_oracle(a, beta, x3):
    from scipy.integrate import quad

    R = abs(x3)

    def split(f):
        def re(p):
            return f(p).real

        def im(p):
            return f(p).imag

        pts = [R] if R < a else None
        kw = dict(points=pts, limit=200, epsabs=1e-12, epsrel=1e-12)
        return (quad(re, 0.0, a, **kw)[0]
                + 1j * quad(im, 0.0, a, **kw)[0])

    def f_phi(p):
        return (2.0 * np.pi * p / (1j * beta * R)) * (
            np.exp(1j * beta * (p + R)) - np.exp(1j * beta * abs(p - R)))

    def f_dr(p):
        up = np.exp(1j * beta * (p + R)) * (1j * beta / R - 1.0 / R ** 2)
        sgn = 1.0 if R > p else -1.0
        dn = np.exp(1j * beta * abs(p - R)) * (sgn * 1j * beta / R
                                               - 1.0 / R ** 2)
        return (2.0 * np.pi * p / (1j * beta)) * (up - dn)

    phi = split(f_phi)
    dphi = split(f_dr) * np.copysign(1.0, x3)
    return phi, dphi


def test_acceptance_5_harmonic_vs_quadrature_and_newtonian_limit():
    beta = 10.0 + 10.0j
    hp = HarmonicParams(beta=beta)
    sp = SeriesParams(n_max=28)
    mesh = tessellate_sphere(A, 5)
    x3s = np.linspace(-2.5 * A, 2.5 * A, 41)
    x3s = x3s[np.abs(x3s) > 1e-12]
    ref = np.array([_helmholtz_sphere_oracle(A, beta, x3) for x3 in x3s])
    got = np.array([
        [A_n(mesh, np.array([0.0, 0.0, x3]), hp, 0, sp),
         grad_A_n(mesh, np.array([0.0, 0.0, x3]), hp, 0, sp)[2]]
        for x3 in x3s])
    s_phi = np.abs(ref[:, 0]).max()
    s_dphi = np.abs(ref[:, 1]).max()
    assert np.abs(got[:, 0] - ref[:, 0]).max() / s_phi <= 0.01
    assert np.abs(got[:, 1] - ref[:, 1]).max() / s_dphi <= 0.01

    # Small-beta limit reduces to the Newtonian interior potential.
    mesh6 = tessellate_sphere(A, 6)
    hp0 = HarmonicParams(beta=1e-5 + 1e-5j)
    interior = np.linspace(-0.8 * A, 0.8 * A, 9)
    for x3 in interior:
        x = np.array([0.0, 0.0, x3])
        newt = 2.0 * np.pi * (A ** 2 - x3 ** 2 / 3.0)
        val = A_n(mesh6, x, hp0, 0, sp).real
        assert abs(val - newt) / newt <= 1e-3


# ---------------------------------------------------------------------
# 6. Fourier-grid cross-check of the cuboid maps.
# ---------------------------------------------------------------------

def test_acceptance_6_fft_vs_series_cuboid_maps(cube):
    l = 0.2
    grid = GridSpec(n=64, extent=3.2, plane_axis=0, plane_value=0.0)
    maps = fft_cuboid_maps(l, TAU, None, MAT, grid)
    co = maps["coords"]
    sp = SeriesParams(n_max=60)
    cell = grid.extent / grid.n
    ext = grid.extent

    # The grid field is periodic, so the series side must accumulate
    # the nearest in-plane periodic images of the cuboid.
    def series_fields(x):
        v = g = h = 0.0
        for dy in (-1, 0, 1):
            for dz in (-1, 0, 1):
                y = x + np.array([0.0, dy * ext, dz * ext])
                if np.hypot(y[1], y[2]) > 2.6:
                    # image contribution is below exp(-16) of the map
                    # scale here, and larger radii would need a longer
                    # series than n_max=60 to converge
                    continue
                v += spatial_L(cube, y, TAU, MAT, sp)
                g += grad_spatial_L(cube, y, TAU, MAT, sp)[2]
                h += _fd4(lambda z: grad_spatial_L(cube, z, TAU, MAT,
                                                   sp)[2], y, 5e-3 * 0.3)[2]
        return v, g, h

    half = l / 2.0
    scale_v = np.abs(maps["L"]).max()
    scale_g = np.abs(maps["L_3"]).max()
    scale_h = np.abs(maps["L_33"]).max()
    worst = np.zeros(3)
    n_pts = 0
    for i in range(grid.n):
        for j in range(grid.n):
            x2, x3 = co[i], co[j]
            # distance from the sample to the cuboid surface
            d2, d3 = abs(x2) - half, abs(x3) - half
            dist = (np.hypot(max(d2, 0.0), max(d3, 0.0))
                    if (d2 > 0 or d3 > 0) else -min(-d2, -d3))
            if abs(dist) < 2.0 * cell:
                continue
            v, g, h = series_fields(np.array([0.0, x2, x3]))
            worst[0] = max(worst[0], abs(maps["L"][i, j] - v) / scale_v)
            worst[1] = max(worst[1], abs(maps["L_3"][i, j] - g) / scale_g)
            worst[2] = max(worst[2], abs(maps["L_33"][i, j] - h) / scale_h)
            n_pts += 1
    assert n_pts > 3000
    assert worst.max() <= 0.01


# ---------------------------------------------------------------------
# 7. Series truncation behaviour against the closed form.
# ---------------------------------------------------------------------

def test_acceptance_7_series_truncation_profile():
    mesh = tessellate_sphere(A, 4)
    t = 2.0
    x3s = np.linspace(-10.0 * A, 10.0 * A, 81)
    ref = np.array([sphere_C(A, abs(x3), t, 0.0, t, 0, MAT)
                    for x3 in x3s])

    def errs(n_max):
        # pointwise relative error against the closed form
        sp = SeriesParams(n_max=n_max)
        got = np.array([
            C_nf(mesh, np.array([0.0, 0.0, x3]), t, 0.0, t, 0, MAT, sp)
            for x3 in x3s])
        return np.abs(got - ref) / np.abs(ref)

    e10 = errs(10)
    assert e10.max() <= 0.01

    e2 = errs(2)
    far = np.abs(x3s) > 3.5 * A
    assert e2[far].max() > 0.05

    e6 = errs(6)
    near5 = np.abs(x3s) <= 5.0 * A + 1e-12
    assert e6[near5].max() <= 0.01


# ---------------------------------------------------------------------
# 8. Equivalent-inclusion-method anchors.
# ---------------------------------------------------------------------

BLOCK_DOC = {
    "matrix": {"K": 1.0, "Cp": 10.0},
    "inhomogeneity": {"K": 10.0, "Cp": 12.0},
    "sphere": {"center": [0.5, 0.5, 1.3], "radius": 0.1},
    "slab": {"thickness": 2.0,
             "top_bc": {"type": "sine", "amplitude": 10.0, "period": 20.0},
             "bottom_bc": 0.0},
    "time": {"dt": 0.05, "steps": 120},
    "order": "quadratic",
}


@pytest.fixture(scope="module")
def eim_histories():
    out = {}
    for order in ("uniform", "linear", "quadratic"):
        doc = dict(BLOCK_DOC)
        doc["order"] = order
        pr = eim.InhomogeneityProblem.from_json(doc)
        out[order] = (pr, eim.solve_history(pr))
    return out


def _interior_residual(problem, history, t):
    KI = problem.inhomogeneity.K
    CpI = problem.inhomogeneity.Cp
    a = problem.radius
    hs = 0.12 * a
    dt = problem.grid.dt
    probes = problem.center + a * np.array(
        [[0.0, 0.0, 0.0], [0.3, 0.0, 0.0], [0.0, -0.3, 0.15],
         [-0.15, 0.0, -0.3], [0.0, 0.3, 0.3]])

    def u(x, tt):
        return problem.undisturbed(x[2], tt).u + eim.disturbance(
            problem, history, x, tt, with_gradient=False)

    worst = 0.0
    for p in probes:
        uc = u(p, t)
        lap = 0.0
        for ax in range(3):
            e = np.zeros(3)
            e[ax] = hs
            lap += (u(p + e, t) - 2 * uc + u(p - e, t)) / hs ** 2
        ut = (uc - u(p, t - dt)) / dt
        worst = max(worst, abs(CpI * ut - KI * lap))
    return worst


def test_acceptance_8a_zero_mismatch_zero_eigenfields():
    doc = dict(BLOCK_DOC)
    doc["inhomogeneity"] = dict(BLOCK_DOC["matrix"])
    doc["time"] = {"dt": 0.1, "steps": 20}
    doc["order"] = "quadratic"
    pr = eim.InhomogeneityProblem.from_json(doc)
    hist = eim.solve_history(pr)
    for co in hist:
        for field in (co.Q0, co.Q1, co.Q2, co.U0, co.U1, co.U2):
            assert np.all(np.asarray(field) == 0.0)
    x = pr.center + np.array([0.0, 0.0, 0.05])
    u, _ = eim.total_field(pr, hist, x, 2.0)
    assert u == pytest.approx(pr.undisturbed(x[2], 2.0).u, abs=1e-14)


def test_acceptance_8b_steady_interior_gradient_ratio():
    doc = dict(BLOCK_DOC)
    doc["slab"] = dict(BLOCK_DOC["slab"])
    doc["slab"]["top_bc"] = {"type": "const", "value": 10.0}
    doc["time"] = {"dt": 0.25, "steps": 120}
    doc["order"] = "uniform"
    pr = eim.InhomogeneityProblem.from_json(doc)
    hist = eim.solve_history(pr)
    t = 30.0
    _, dg = eim.disturbance(pr, hist, pr.center, t)
    g0 = pr.undisturbed(pr.center[2], t).u_x[1]
    ratio = (g0 + dg[2]) / g0
    target = 3 * pr.matrix.K / (pr.inhomogeneity.K + 2 * pr.matrix.K)
    assert target == pytest.approx(0.25)
    assert abs(ratio - target) / target <= 0.01


def test_acceptance_8c_residual_hierarchy(eim_histories):
    for t in (1.0, 2.0):
        res = {order: _interior_residual(pr, hist, t)
               for order, (pr, hist) in eim_histories.items()}
        assert res["uniform"] >= res["linear"] - 1e-12
        assert res["linear"] >= res["quadratic"] - 1e-12


def test_acceptance_8d_far_field_disturbance_small(eim_histories):
    pr, hist = eim_histories["quadratic"]
    a = pr.radius
    t = 6.0
    line = np.linspace(pr.center[2] - 5 * a, pr.center[2] + 5 * a, 21)
    u0max = max(abs(pr.undisturbed(x3, t).u) for x3 in line)
    x_far = pr.center + np.array([0.0, 0.0, 5 * a])
    du = eim.disturbance(pr, hist, x_far, t, with_gradient=False)
    assert abs(du) < 0.01 * u0max


# ---------------------------------------------------------------------
# 9. CLI determinism: identical configs give byte-identical CSVs.
# ---------------------------------------------------------------------

CLI_CASES = [
    ("verify-helmholtz", {"refinements": [2, 3], "samples": 7}),
    ("verify-sphere", {"refinements": [2, 4], "samples": 7,
                       "sweep_refinement": 4, "sweep_samples": 7,
                       "gate": 5.0}),
    ("cuboid-maps", {"grid_n": 64, "diff_lattice": 3}),
    ("eim", {"problem": dict(BLOCK_DOC, time={"dt": 0.05, "steps": 10}),
             "orders": ["uniform"], "times": [0.25, 0.5],
             "line_samples": 5, "steady_anchor": False}),
]


@pytest.mark.parametrize("command,cfg",
                         [pytest.param(c, v, id=c) for c, v in CLI_CASES])
def test_acceptance_9_cli_determinism(command, cfg, tmp_path):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(cfg))
    outs = []
    for sub in ("first", "second"):
        out = tmp_path / sub
        main([command, "--config", str(cfg_path), "--out", str(out)])
        outs.append(out)
    names = sorted(p.name for p in outs[0].iterdir()
                   if p.suffix == ".csv")
    assert names, "command produced no CSV output"
    for name in names:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
