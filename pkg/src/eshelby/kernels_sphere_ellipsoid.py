"""Closed-form spherical tensors and the ellipsoidal shell integral.

For a sphere of radius a centered at the origin the uniform spatial
tensor L(x, t) and the antiderivatives E^n of (2 alpha tau)^n L(tau)
have closed forms in erf and Gaussians; transition functions follow as
E^n differences, so no separate treatment of the t = t_f window
endpoint is needed.  For a general ellipsoid, L reduces to a smooth
integral over the unit shell of directions with identical limits for
interior and exterior field points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DomainError
from .geometry import Material
from .kernels_transient import TensorSet, _assemble_from_derivs

__all__ = [
    "Ellipsoid",
    "ShellQuadrature",
    "ellipsoid_L",
    "sphere_L",
    "sphere_E",
    "sphere_C",
    "sphere_tensor_set",
]


@dataclass(frozen=True)
class Ellipsoid:
    """Origin-centered ellipsoid with semi-axes along the coordinate axes."""

    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        if min(self.a1, self.a2, self.a3) <= 0:
            raise DomainError("all semi-axes must be positive")

    @property
    def semi_axes(self):
        return np.array([self.a1, self.a2, self.a3])


@dataclass(frozen=True)
class ShellQuadrature:
    """Product rule on the unit direction shell.

    Gauss-Legendre with n_gamma nodes in cos(gamma) times a uniform
    trapezoid (periodic, hence spectrally accurate) with n_theta nodes
    in theta.
    """

    n_theta: int = 64
    n_gamma: int = 32

    def __post_init__(self):
        if self.n_theta < 8 or self.n_gamma < 8:
            raise DomainError("ShellQuadrature needs n_theta, n_gamma >= 8")


def _shell_value(ell: Ellipsoid, x, t: float, mat: Material,
                 n_theta: int, n_gamma: int) -> float:
    ax = ell.semi_axes
    x = np.asarray(x, float)
    u, w = np.polynomial.legendre.leggauss(n_gamma)          # u = cos(gamma)
    th = 2 * math.pi * np.arange(n_theta) / n_theta
    ct, st = np.cos(th), np.sin(th)
    su = np.sqrt(1.0 - u * u)
    # directions e on the unit shell, shape (n_gamma, n_theta, 3)
    e = np.empty((n_gamma, n_theta, 3))
    e[..., 0] = su[:, None] * ct[None, :]
    e[..., 1] = su[:, None] * st[None, :]
    e[..., 2] = u[:, None]
    S = 1.0 / np.sqrt(np.einsum("gti,i->gt", e * e, 1.0 / ax**2))
    B = np.einsum("gti,i->gt", e, x / ax)
    s4 = math.sqrt(4 * mat.alpha * t)
    from scipy.special import erf as verf
    val = (verf((1.0 - B) * S / s4) + verf((1.0 + B) * S / s4)
           - (2.0 * S / (math.sqrt(math.pi) * s4))
           * (np.exp(-(S * (1.0 + B) / s4) ** 2)
              + np.exp(-(S * (1.0 - B) / s4) ** 2)))
    integral = (2 * math.pi / n_theta) * np.einsum("g,gt->", w, val)
    return integral / (8 * math.pi * mat.Cp)


def ellipsoid_L(ell: Ellipsoid, x, t: float, mat: Material,
                quad: ShellQuadrature = ShellQuadrature()) -> float:
    """Uniform spatial tensor of an ellipsoid by shell quadrature.

    The integrand is smooth on the full shell for interior and exterior
    field points alike; the rule is refined by doubling until the
    relative change drops below 1e-6.
    """
    if t <= 0.0:
        return 0.0
    nt, ng = quad.n_theta, quad.n_gamma
    prev = _shell_value(ell, x, t, mat, nt, ng)
    for _ in range(6):
        nt, ng = 2 * nt, 2 * ng
        cur = _shell_value(ell, x, t, mat, nt, ng)
        if abs(cur - prev) <= 1e-6 * max(abs(cur), 1e-300):
            return cur
        prev = cur
    raise AccuracyError(
        "shell quadrature did not converge to 1e-6 relative",
        achieved=abs(cur - prev) / max(abs(cur), 1e-300),
    )


# ----------------------------------------------------------------------
# Sphere closed forms
# ----------------------------------------------------------------------

def _sinhc(y: float) -> float:
    """sinh(y)/y, stable near 0."""
    if abs(y) < 1e-4:
        return 1.0 + y * y / 6.0
    return math.sinh(y) / y


def sphere_L(a: float, x_r: float, t: float, mat: Material) -> float:
    """Uniform spatial tensor of a sphere at radial distance x_r."""
    if a <= 0:
        raise DomainError("radius must be positive")
    if x_r < 0:
        raise DomainError("x_r must be >= 0")
    if t <= 0.0:
        return 0.0
    al, K = mat.alpha, mat.K
    s4 = math.sqrt(4 * al * t)
    erfs = math.erf((a - x_r) / s4) + math.erf((a + x_r) / s4)
    # exp(-(a+x)^2/..) - exp(-(a-x)^2/..) = -2 exp(-(a^2+x^2)/..) sinh(ax/2at)
    # rewritten through sinh(y)/y so the removable 1/x_r is explicit
    y = a * x_r / (2 * al * t)
    if y > 30.0:
        # sinh no longer cancels: use the Gaussian difference directly
        gs = (math.exp(-(a - x_r) ** 2 / (4 * al * t))
              - math.exp(-(a + x_r) ** 2 / (4 * al * t))) / (2 * y)
    else:
        gs = math.exp(-(a * a + x_r * x_r) / (4 * al * t)) * _sinhc(y)
    return (al / (2 * K)) * erfs \
        - (al ** 1.5 * math.sqrt(t) / (math.sqrt(math.pi) * K)) \
        * gs * (a / (al * t))


def _E_raw(a, x, t, n, mat):
    """Closed-form antiderivative of (2 alpha tau)^n sphere_L in tau."""
    al, K = mat.alpha, mat.K
    if t <= 0.0:
        # tau -> 0+ limit: erf -> sign, Gaussians -> 0
        sg = math.copysign(1.0, a - x)
        if n == 0:
            return ((2 * a + x) * (a - x) ** 2 * sg
                    - (2 * a - x) * (a + x) ** 2) / (12 * K * x)
        if n == 1:
            return (-(4 * a + x) * (a - x) ** 4 * sg
                    + (4 * a - x) * (a + x) ** 4) / (240 * x * al * K)
        return ((6 * a + x) * (a - x) ** 6 * sg
                - (6 * a - x) * (a + x) ** 6) / (5040 * x * al ** 2 * K)
    s4 = math.sqrt(4 * al * t)
    g = math.sqrt(4 * al * t / math.pi)
    at = al * t
    ep = math.exp(-(a + x) ** 2 / (4 * at))
    em = math.exp(-(a - x) ** 2 / (4 * at))
    erfm = math.erf((a - x) / s4)
    erfp = math.erf((a + x) / s4)
    if n == 0:
        t1 = g * (-(2 * a - x) * (a + x) + 4 * at) * ep
        t2 = g * ((2 * a + x) * (a - x) - 4 * at) * em
        t3 = ((2 * a + x) * (a - x) ** 2 + 6 * x * at) * erfm
        t4 = (-(2 * a - x) * (a + x) ** 2 + 6 * x * at) * erfp
        return (t1 + t2 + t3 + t4) / (12 * K * x)
    if n == 1:
        t1 = g * ((4 * a - x) * (a + x) ** 3
                  - 2 * (4 * a - x) * (a + x) * at + 48 * at * at) * ep
        t2 = g * (-(4 * a + x) * (a - x) ** 3
                  + 2 * (4 * a + x) * (a - x) * at - 48 * at * at) * em
        t3 = -((4 * a + x) * (a - x) ** 4 - 60 * x * at * at) * erfm
        t4 = ((4 * a - x) * (a + x) ** 4 + 60 * x * at * at) * erfp
        return (t1 + t2 + t3 + t4) / (240 * x * al * K)
    t1 = g * (-(6 * a - x) * (a + x) ** 5 + 2 * (6 * a - x) * (a + x) ** 3 * at
              - 12 * (6 * a - x) * (a + x) * at * at + 720 * at ** 3) * ep
    t2 = g * ((6 * a + x) * (a - x) ** 5 - 2 * (6 * a + x) * (a - x) ** 3 * at
              + 12 * (6 * a + x) * (a - x) * at * at - 720 * at ** 3) * em
    t3 = ((6 * a + x) * (a - x) ** 6 + 840 * x * at ** 3) * erfm
    t4 = -((6 * a - x) * (a + x) ** 6 - 840 * x * at ** 3) * erfp
    return (t1 + t2 + t3 + t4) / (5040 * x * al ** 2 * K)


def sphere_E(a: float, x_r: float, t: float, mat: Material, n: int) -> float:
    """Antiderivative E^n(x_r, tau = t): d E^n / d tau = (2 alpha tau)^n L.

    Continuous at tau = 0+ with a finite (generally nonzero) limit, so
    the window difference E^n(t - t_prev) - E^n(t - t_f) covers the
    t = t_f endpoint with no special handling.
    """
    if n not in (0, 1, 2):
        raise DomainError("n must be 0, 1 or 2")
    if a <= 0 or x_r < 0:
        raise DomainError("need a > 0 and x_r >= 0")
    x = max(x_r, 1e-6 * a)  # removable 1/x_r; even and O(x^2) flat at 0
    return (2 * mat.alpha) ** n * _E_raw(a, x, t, n, mat)


def sphere_C(a: float, x_r: float, t: float, t_prev: float, t_f: float,
             n: int, mat: Material) -> float:
    """Transition function of a sphere over the window [t_prev, t_f]."""
    if t_prev > t_f or t < t_f:
        raise DomainError("need t_prev <= t_f <= t")
    return (sphere_E(a, x_r, t - t_prev, mat, n)
            - sphere_E(a, x_r, t - t_f, mat, n))


# ----------------------------------------------------------------------
# Radial derivative ladder and tensor assembly
# ----------------------------------------------------------------------

# 4th-order central stencils on +/- 3h for derivative orders 1..4
_ST1 = np.array([0, 1 / 12, -2 / 3, 0, 2 / 3, -1 / 12, 0])
_ST2 = np.array([0, -1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12, 0])
_ST3 = np.array([1 / 8, -1, 13 / 8, 0, -13 / 8, 1, -1 / 8])
_ST4 = np.array([-1 / 6, 2, -13 / 2, 28 / 3, -13 / 2, 2, -1 / 6])


class _RadialDerivs:
    """val/grad/hess/third/fourth of an even, smooth radial function."""

    def __init__(self, fun, x, scale):
        x = np.asarray(x, float)
        r = float(np.linalg.norm(x))
        self.val = fun(r)
        if r < 0.05 * scale:
            self._near_center(fun, x, scale)
        else:
            self._generic(fun, x, r, scale)

    def _near_center(self, fun, x, scale):
        # even-polynomial fit in r^2 on [0, 0.3*scale]
        rs = np.linspace(0.0, 0.3 * scale, 25)
        vals = np.array([fun(ri) for ri in rs])
        A = np.vander(rs * rs, 6, increasing=True)
        c, *_ = np.linalg.lstsq(A, vals, rcond=None)
        r2 = float(x @ x)
        # g_m = sum_k c_k prod_{i<m}(2k - 2i) r^(2k - 2m); zero unless k >= m
        g = np.zeros(5)
        for m in range(5):
            for k in range(m, 6):
                fac = 1.0
                for i in range(m):
                    fac *= 2 * k - 2 * i
                g[m] += c[k] * fac * r2 ** (k - m)
        ey = np.eye(3)
        self.val = float(g[0])
        self.grad = g[1] * x
        self.hess = g[1] * ey + g[2] * np.outer(x, x)
        dx = np.einsum("ij,k->ijk", ey, x)
        self.third = (g[2] * (dx + dx.transpose(0, 2, 1) + dx.transpose(2, 0, 1))
                      + g[3] * np.einsum("i,j,k->ijk", x, x, x))
        dd = np.einsum("ij,kl->ijkl", ey, ey)
        dd3 = dd + dd.transpose(0, 2, 1, 3) + dd.transpose(0, 3, 2, 1)
        dxx = np.einsum("ij,k,l->ijkl", ey, x, x)
        dxx6 = (dxx + dxx.transpose(0, 2, 1, 3) + dxx.transpose(0, 3, 2, 1)
                + dxx.transpose(2, 1, 0, 3) + dxx.transpose(3, 1, 2, 0)
                + dxx.transpose(2, 3, 0, 1))
        self.fourth = (g[2] * dd3 + g[3] * dxx6
                       + g[4] * np.einsum("i,j,k,l->ijkl", x, x, x, x))

    def _generic(self, fun, x, r, scale):
        h = 0.01 * scale
        samples = np.array([fun(abs(r + k * h)) for k in range(-3, 4)])
        f1 = float(_ST1 @ samples) / h
        f2 = float(_ST2 @ samples) / h ** 2
        f3 = float(_ST3 @ samples) / h ** 3
        f4 = float(_ST4 @ samples) / h ** 4
        n = x / r
        ey = np.eye(3)
        h1 = (f2 - f1 / r) / r
        h1p = (f3 - 2 * h1) / r
        nn = np.outer(n, n)
        self.grad = f1 * n
        self.hess = (f2 - f1 / r) * nn + (f1 / r) * ey
        dn = np.einsum("ij,k->ijk", ey, n)
        dn3 = dn + dn.transpose(0, 2, 1) + dn.transpose(2, 0, 1)
        self.third = ((f3 - 3 * h1) * np.einsum("i,j,k->ijk", n, n, n)
                      + h1 * dn3)
        a4 = f4 - 6 * f3 / r + 15 * h1 / r
        b4 = (f3 - 3 * h1) / r
        c4 = h1 / r
        dd = np.einsum("ij,kl->ijkl", ey, ey)
        dd3 = dd + dd.transpose(0, 2, 1, 3) + dd.transpose(0, 3, 2, 1)
        dnn = np.einsum("ij,k,l->ijkl", ey, n, n)
        dnn6 = (dnn + dnn.transpose(0, 2, 1, 3) + dnn.transpose(0, 3, 2, 1)
                + dnn.transpose(2, 1, 0, 3) + dnn.transpose(3, 1, 2, 0)
                + dnn.transpose(2, 3, 0, 1))
        self.fourth = (a4 * np.einsum("i,j,k,l->ijkl", n, n, n, n)
                       + b4 * dnn6 + c4 * dd3)


class _SphereCDerivs:
    """Container mirroring the polyhedral derivative set for a sphere."""

    def __init__(self, a, x, t, t_prev, t_f, mat):
        scale = max(a, math.sqrt(4 * mat.alpha * max(t - t_prev, 1e-12)))
        ders = [
            _RadialDerivs(
                lambda r, n=n: sphere_C(a, r, t, t_prev, t_f, n, mat),
                x, scale)
            for n in range(3)
        ]
        self.val = [d.val for d in ders]
        self.grad = [d.grad for d in ders]
        self.hess = [d.hess for d in ders]
        self.third = [None, ders[1].third, ders[2].third]
        self.fourth = ders[2].fourth


def sphere_tensor_set(a: float, x, t: float, window, mat: Material,
                      with_gradients: bool = True) -> TensorSet:
    """Assembled TensorSet of one time window for an origin-centered sphere.

    window is the pair (t_prev, t_f) with t_prev < t_f <= t; a window
    entirely in the future gives the zero set.
    """
    t_prev, t_f = window
    if t <= t_prev:
        return TensorSet.zeros(with_gradients=with_gradients)
    t_f = min(t_f, t)
    d = _SphereCDerivs(a, np.asarray(x, float), t, t_prev, t_f, mat)
    if not with_gradients:
        d.fourth = None
    return _assemble_from_derivs(np.asarray(x, float), mat.K, d,
                                 with_gradients)
