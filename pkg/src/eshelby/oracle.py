"""Independent ground-truth evaluators.

Brute-force quadrature of the defining volume/time integrals and a
discrete-Fourier-space evaluator for cuboids.  Nothing here reuses the
series-form kernels, so these routines serve as oracles for them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import AccuracyError, DomainError, ResolutionError
from .geometry import Material, Polyhedron, triangulate
from .kernels_sphere_ellipsoid import Ellipsoid

__all__ = ["GridSpec", "quad_spatial", "quad_time", "fft_cuboid_maps",
           "jump_measure"]


@dataclass(frozen=True)
class GridSpec:
    """Cubic FFT grid and the plane on which fields are returned.

    plane_axis/plane_value select the plane normal to one axis; maps
    are returned over the remaining two axes in index order.
    """

    n: int = 256
    extent: float = 1.0
    plane_axis: int = 0
    plane_value: float = 0.0

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise DomainError("n must be a power of two")
        if self.extent <= 0:
            raise DomainError("extent must be positive")
        if self.plane_axis not in (0, 1, 2):
            raise DomainError("plane_axis must be 0, 1 or 2")

    def axis_coords(self) -> np.ndarray:
        return self.extent * (np.arange(self.n) / self.n - 0.5)


def _gauss_kernel(d2, tau, mat):
    return np.exp(-d2 / (4 * mat.alpha * tau)) \
        / (mat.Cp * (4 * math.pi * mat.alpha * tau) ** 1.5)


def _as_cuboid_bounds(poly: Polyhedron):
    """Per-axis bounds if poly is an axis-aligned cuboid, else None."""
    v = poly.vertices
    if len(v) != 8:
        return None
    bounds = []
    for d in range(3):
        vals = np.unique(np.round(v[:, d], 12))
        if len(vals) != 2:
            return None
        bounds.append((vals[0], vals[1]))
    expect = {tuple(np.round([xs, ys, zs], 12))
              for xs in bounds[0] for ys in bounds[1] for zs in bounds[2]}
    got = {tuple(t) for t in np.round(v, 12)}
    return bounds if expect == got else None


def _gauss_moment_1d(xi, lo, hi, s, p):
    """integral_lo^hi exp(-(xi-u)^2/s^2) u^p du, closed form for p <= 2."""
    A, B = xi - hi, xi - lo  # v = xi - u runs from A to B
    ea, eb = math.exp(-(A / s) ** 2), math.exp(-(B / s) ** 2)
    i0 = (math.sqrt(math.pi) * s / 2) * (math.erf(B / s) - math.erf(A / s))
    if p == 0:
        return i0
    j1 = (s * s / 2) * (ea - eb)
    if p == 1:
        return xi * i0 - j1
    j2 = -(s * s / 2) * (B * eb - A * ea) + (s * s / 2) * i0
    if p == 2:
        return xi * xi * i0 - 2 * xi * j1 + j2
    f = lambda u: math.exp(-(xi - u) ** 2 / (s * s)) * u ** p
    v, _ = integrate.quad(f, lo, hi, epsabs=1e-15, epsrel=1e-13,
                          points=[min(max(xi, lo), hi)])
    return v


def _quad_separable(bounds, x, tau, mat, powers):
    """Product of closed-form 1D moments for an axis-aligned cuboid."""
    s = math.sqrt(4 * mat.alpha * tau)
    total = 1.0 / (mat.Cp * (4 * math.pi * mat.alpha * tau) ** 1.5)
    for d in range(3):
        lo, hi = bounds[d]
        total *= _gauss_moment_1d(x[d], lo, hi, s, powers[d])
    return total


# 4-point degree-2 rule on the reference tetrahedron (barycentric)
_TET_A = 0.5854101966249685
_TET_B = 0.1381966011250105
_TET_PTS = np.array([
    [_TET_A, _TET_B, _TET_B, _TET_B],
    [_TET_B, _TET_A, _TET_B, _TET_B],
    [_TET_B, _TET_B, _TET_A, _TET_B],
    [_TET_B, _TET_B, _TET_B, _TET_A],
])


def _tet_children(verts):
    """8-way subdivision of a tetrahedron via edge midpoints."""
    v = verts
    m = {(i, j): 0.5 * (v[i] + v[j])
         for i in range(4) for j in range(i + 1, 4)}
    m01, m02, m03 = m[(0, 1)], m[(0, 2)], m[(0, 3)]
    m12, m13, m23 = m[(1, 2)], m[(1, 3)], m[(2, 3)]
    return [
        np.array([v[0], m01, m02, m03]),
        np.array([v[1], m01, m12, m13]),
        np.array([v[2], m02, m12, m23]),
        np.array([v[3], m03, m13, m23]),
        np.array([m01, m02, m03, m13]),
        np.array([m01, m02, m12, m13]),
        np.array([m02, m03, m13, m23]),
        np.array([m02, m12, m13, m23]),
    ]


def _tet_rule(verts, fun):
    vol = abs(np.linalg.det(verts[1:] - verts[0])) / 6.0
    pts = _TET_PTS @ verts
    return vol * 0.25 * sum(fun(p) for p in pts)


def _adaptive_tets(tets, fun, tol):
    total = 0.0
    err = 0.0
    vol_all = sum(abs(np.linalg.det(t[1:] - t[0])) / 6.0 for t in tets)
    stack = [(t, _tet_rule(t, fun), 0) for t in tets]
    while stack:
        verts, coarse, depth = stack.pop()
        children = _tet_children(verts)
        fine = [_tet_rule(c, fun) for c in children]
        local_err = abs(coarse - sum(fine))
        vol = abs(np.linalg.det(verts[1:] - verts[0])) / 6.0
        if local_err <= tol * max(vol / vol_all, 1e-6) or depth >= 12:
            total += sum(fine)
            err += local_err
        else:
            stack.extend((c, fc, depth + 1) for c, fc in zip(children, fine))
    if err > tol:
        raise AccuracyError("adaptive tetrahedral quadrature: error "
                            f"estimate {err:.3e} exceeds tol {tol:.3e}",
                            achieved=err)
    return total


def quad_spatial(region, x, tau: float, mat: Material, tol: float = 1e-9,
                 powers=(0, 0, 0)) -> float:
    """Brute-force integral of G(x - x', tau)/Cp times x'-monomials.

    powers = (p1, p2, p3) weights the integrand by x'_1^p1 x'_2^p2
    x'_3^p3; (0, 0, 0) gives the uniform spatial tensor.
    """
    if tau <= 0:
        raise DomainError("tau must be positive")
    x = np.asarray(x, float)
    if isinstance(region, Ellipsoid):
        ax = region.semi_axes
        vol_fac = ax[0] * ax[1] * ax[2]

        def f(r, u, th):
            su = math.sqrt(max(1.0 - u * u, 0.0))
            xp = np.array([ax[0] * r * su * math.cos(th),
                           ax[1] * r * su * math.sin(th), ax[2] * r * u])
            w = np.prod(xp ** np.asarray(powers))
            return r * r * w * math.exp(
                -np.sum((xp - x) ** 2) / (4 * mat.alpha * tau))

        v, e = integrate.tplquad(f, 0, 2 * math.pi, -1, 1, 0, 1,
                                 epsabs=tol, epsrel=1e-10)
        return v * vol_fac / (mat.Cp * (4 * math.pi * mat.alpha * tau) ** 1.5)
    poly = region
    if poly.volume == 0.0:
        return 0.0
    bounds = _as_cuboid_bounds(poly)
    if bounds is not None:
        return _quad_separable(bounds, x, tau, mat, powers)
    centroid = np.mean(poly.vertices, axis=0)
    tp = triangulate(poly)
    tets = [np.array([centroid, *tp.vertices[f]]) for f in tp.faces]
    pw = np.asarray(powers)

    def fun(p):
        return float(np.prod(p ** pw)) * _gauss_kernel(
            float(np.sum((p - x) ** 2)), tau, mat)

    return _adaptive_tets(tets, fun, tol)


def quad_time(region, x, t: float, window, n: int, mat: Material,
              tol: float = 1e-9) -> float:
    """Brute-force transition function: time quadrature of the spatial one.

    Integrates (2 alpha (t - t'))^n quad_spatial over the window; the
    substitution t' = t - s^2 removes the endpoint singularity when the
    window reaches t.
    """
    t0, t1 = window
    t1 = min(t1, t)
    if t1 <= t0:
        return 0.0
    al = mat.alpha
    inner_tol = tol / max(t1 - t0, 1.0) / 10

    def L_of_tau(tau):
        return quad_spatial(region, x, tau, mat, tol=inner_tol)

    if t1 >= t - 1e-14:
        # s = sqrt(t - t'), dt' = -2s ds
        f = lambda s: 2 * s * (2 * al * s * s) ** n * L_of_tau(s * s)
        v, e = integrate.quad(f, 0.0, math.sqrt(t - t0),
                              epsabs=tol, epsrel=1e-10, limit=200)
    else:
        f = lambda tau: (2 * al * tau) ** n * L_of_tau(tau)
        v, e = integrate.quad(f, t - t1, t - t0,
                              epsabs=tol, epsrel=1e-10, limit=200)
    if e > 10 * tol:
        raise AccuracyError("time quadrature error estimate "
                            f"{e:.3e} exceeds tol", achieved=e)
    return v


def fft_cuboid_maps(l: float, t: float, window, mat: Material,
                    grid: GridSpec = GridSpec(), alias_tol: float = 1e-6):
    """Planar maps of the windowed cuboid tensor and its 3-derivatives.

    Returns a dict with keys 'L', 'L_3', 'L_33' holding (n, n) arrays
    over the two in-plane axes, plus 'coords' (the axis coordinates).
    Spectral product of the cuboid shape factor with the time-window
    multiplier; derivatives are i*k_3 factors.  With ``window=None`` the
    maps are the spatial tensor family at source-time lag t instead of
    the windowed time tensor.
    """
    if grid.extent < 4 * l:
        raise DomainError("grid extent must be at least 4x the cuboid size")
    if window is None:
        if t <= 0:
            raise DomainError("spatial maps require t > 0")
        t0 = t1 = None
    else:
        t0, t1 = window
        t1 = min(t1, t)
        if t1 <= t0:
            z = np.zeros((grid.n, grid.n))
            return {"L": z, "L_3": z.copy(), "L_33": z.copy(),
                    "coords": grid.axis_coords()}
    n, ext = grid.n, grid.extent
    q = np.fft.fftfreq(n, d=1.0 / n)          # integer indices
    k1d = 2 * math.pi * q / ext
    # cuboid shape factor per axis: 2 sin(k l / 2) / k
    with np.errstate(divide="ignore", invalid="ignore"):
        shape1d = np.where(k1d == 0.0, l, 2 * np.sin(k1d * l / 2)
                           / np.where(k1d == 0.0, 1.0, k1d))
    al = mat.alpha
    axes = [a for a in range(3) if a != grid.plane_axis]
    ka, kb = np.meshgrid(k1d, k1d, indexing="ij")
    sa, sb = np.meshgrid(shape1d, shape1d, indexing="ij")
    k3 = kb if axes[1] == 2 else (ka if axes[0] == 2 else None)
    acc = {"L": np.zeros((n, n), complex),
           "L_3": np.zeros((n, n), complex),
           "L_33": np.zeros((n, n), complex)}
    outer = {k: 0.0 for k in acc}
    total = {k: 0.0 for k in acc}
    out_mask1d = np.abs(q) >= 0.45 * n
    mask2d = out_mask1d[:, None] | out_mask1d[None, :]
    v = grid.plane_value
    for i1 in range(n):
        kp = k1d[i1]
        k2sq = kp * kp + ka * ka + kb * kb
        if window is None:
            wmul = np.exp(-al * k2sq * t)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                wmul = np.where(
                    k2sq == 0.0, t1 - t0,
                    (np.exp(-al * k2sq * (t - t1))
                     - np.exp(-al * k2sq * (t - t0)))
                    / np.where(k2sq == 0.0, 1.0, al * k2sq))
        base = shape1d[i1] * sa * sb * wmul / mat.Cp
        if k3 is None:
            k3loc = kp
        else:
            k3loc = k3
        phase = np.exp(1j * kp * v)
        fields = {"L": base, "L_3": 1j * k3loc * base,
                  "L_33": -(k3loc ** 2) * base}
        for key, f in fields.items():
            acc[key] += phase * f
        # aliasing detector on the base (smoothest) field; derivative
        # fields are legitimately slow-decaying when the window hits t
        en = np.abs(fields["L"]) ** 2
        total["L"] += float(np.sum(en))
        outer["L"] += float(np.sum(en[mask2d | out_mask1d[i1]]))
    if total["L"] > 0 and outer["L"] / total["L"] > alias_tol:
        raise ResolutionError(
            "aliasing detected: outer-spectrum energy fraction "
            f"{outer['L'] / total['L']:.2e} > {alias_tol:g}")
    # f(x_m) = sum_q A_q e^{i k_q x_m}, x_m = ext (m/n - 1/2):
    # the half-extent shift is the spectral factor (-1)^(q_a + q_b)
    sign = np.where((np.arange(n)[:, None] + np.arange(n)[None, :]) % 2,
                    -1.0, 1.0)
    out = {}
    for key, A in acc.items():
        field = (n * n) * np.fft.ifft2(A * sign) / ext ** 3
        out[key] = np.real(field)
    out["coords"] = grid.axis_coords()
    return out


def jump_measure(sampler, point, normal, offset: float) -> float:
    """Two-sided jump of a scalar field across a plane.

    Richardson-extrapolates sampler(x + h n) - sampler(x - h n) over
    offsets {4h, 2h, h} assuming smooth one-sided extensions.
    """
    if offset <= 0:
        raise DomainError("offset must be positive")
    point = np.asarray(point, float)
    normal = np.asarray(normal, float)
    normal = normal / np.linalg.norm(normal)
    j = [sampler(point + h * normal) - sampler(point - h * normal)
         for h in (offset, 2 * offset, 4 * offset)]
    if abs(j[1] - j[0]) > abs(j[2] - j[1]) + 1e-300:
        warnings.warn("jump_measure: non-monotone refinement; "
                      "extrapolated jump may be unreliable",
                      RuntimeWarning, stacklevel=2)
    return (8 * j[0] - 6 * j[1] + j[2]) / 3.0
