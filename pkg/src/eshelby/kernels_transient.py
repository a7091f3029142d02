"""Series-form spatial and time-integrated Eshelby tensors on polyhedra.

All quantities derive from moments of the transient conduction kernel

    G(r, tau) = (4 pi alpha tau)^(-3/2) exp(-r^2 / (4 alpha tau)) H(tau)

over the inclusion Omega.  The uniform spatial tensor is
L(x, tau) = (1/Cp) integral_Omega G dx', its time integrals over one
window [t_{f-1}, t_f] weighted by (2 alpha (t - t'))^n are the
transition functions C^{n,f}, and the polynomial-order tensor families
are assembled from C^{n,f} and its spatial derivatives.

Volume and face moments of r^j reduce to the per-edge recursion tables
supplied by the compiled/numpy backend; gradients are exact analytic
face sums; second and higher spatial derivatives use fourth-order
central differences of the analytic gradient.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._backend import edge_term_table
from .errors import AccuracyError, DomainError, IntervalError
from .geometry import EdgeArrays, Material, Polyhedron, edge_arrays

__all__ = [
    "SeriesParams",
    "TimeGrid",
    "EigenCoeffs",
    "TensorSet",
    "spatial_L",
    "grad_spatial_L",
    "C_nf",
    "grad_C_nf",
    "higher_derivs_C",
    "assemble_tensors",
    "temperature",
    "flux",
]

_PI32 = math.pi ** 1.5
#: Gamma(1/2 - n) for n = 0, 1, 2.
_GAMMA_HALF_MINUS = (math.sqrt(math.pi), -2.0 * math.sqrt(math.pi),
                     4.0 * math.sqrt(math.pi) / 3.0)
#: Relative size of the last series term above which convergence is flagged.
_CONV_FLAG = 1e-8


@dataclass(frozen=True)
class SeriesParams:
    """Truncation of the m-series."""

    n_max: int = 10

    def __post_init__(self):
        if not (0 <= self.n_max <= 60):
            raise DomainError("n_max must be in [0, 60]")


@dataclass(frozen=True)
class TimeGrid:
    """Uniformly spaced time stations t0 + f*dt, f = 0..steps."""

    t0: float
    dt: float
    steps: int

    def __post_init__(self):
        if self.dt <= 0 or self.steps < 1:
            raise DomainError("TimeGrid requires dt > 0 and steps >= 1")

    def window(self, f: int) -> tuple[float, float]:
        """Time window of step f (1-based)."""
        if not 1 <= f <= self.steps:
            raise IntervalError(f"step {f} outside 1..{self.steps}")
        return (self.t0 + (f - 1) * self.dt, self.t0 + f * self.dt)


def _zeros_coeffs():
    return EigenCoeffs(
        Q0=0.0, Q1=np.zeros(3), Q2=np.zeros((3, 3)),
        U0=np.zeros(3), U1=np.zeros((3, 3)), U2=np.zeros((3, 3, 3)),
    )


@dataclass
class EigenCoeffs:
    """Polynomial coefficients of the eigen-fields on one time step.

    EHS intensity: Q(x') = Q0 + Q1.x' + Q2:x'x'; ETG:
    u*_i(x') = U0_i + U1_ip x'_p + U2_ipq x'_p x'_q.  Quadratic entries
    are stored unsymmetrized (9 and 27 slots).
    """

    Q0: float = 0.0
    Q1: np.ndarray = field(default_factory=lambda: np.zeros(3))
    Q2: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    U0: np.ndarray = field(default_factory=lambda: np.zeros(3))
    U1: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    U2: np.ndarray = field(default_factory=lambda: np.zeros((3, 3, 3)))

    def __post_init__(self):
        self.Q1 = np.asarray(self.Q1, float).reshape(3)
        self.Q2 = np.asarray(self.Q2, float).reshape(3, 3)
        self.U0 = np.asarray(self.U0, float).reshape(3)
        self.U1 = np.asarray(self.U1, float).reshape(3, 3)
        self.U2 = np.asarray(self.U2, float).reshape(3, 3, 3)
        for arr in (self.Q1, self.Q2, self.U0, self.U1, self.U2):
            if not np.all(np.isfinite(arr)):
                raise DomainError("EigenCoeffs entries must be finite")

    @classmethod
    def zeros(cls) -> "EigenCoeffs":
        return cls()


@dataclass
class TensorSet:
    """Assembled polynomial-order tensors (and gradients) at one (x, t)."""

    Lbar: float
    Lbar_p: np.ndarray       # (3,)
    Lbar_pq: np.ndarray      # (3, 3)
    Dbar_i: np.ndarray       # (3,)
    Dbar_ip: np.ndarray      # (3, 3)
    Dbar_ipq: np.ndarray     # (3, 3, 3)
    grad_Lbar: np.ndarray = None          # (3,)
    grad_Lbar_p: np.ndarray = None        # (3, 3): [p, j]
    grad_Lbar_pq: np.ndarray = None       # (3, 3, 3): [p, q, j]
    grad_Dbar_i: np.ndarray = None        # (3, 3): [i, j]
    grad_Dbar_ip: np.ndarray = None       # (3, 3, 3): [i, p, j]
    grad_Dbar_ipq: np.ndarray = None      # (3, 3, 3, 3): [i, p, q, j]

    @classmethod
    def zeros(cls, with_gradients=True) -> "TensorSet":
        ts = cls(0.0, np.zeros(3), np.zeros((3, 3)), np.zeros(3),
                 np.zeros((3, 3)), np.zeros((3, 3, 3)))
        if with_gradients:
            ts.grad_Lbar = np.zeros(3)
            ts.grad_Lbar_p = np.zeros((3, 3))
            ts.grad_Lbar_pq = np.zeros((3, 3, 3))
            ts.grad_Dbar_i = np.zeros((3, 3))
            ts.grad_Dbar_ip = np.zeros((3, 3, 3))
            ts.grad_Dbar_ipq = np.zeros((3, 3, 3, 3))
        return ts


# ----------------------------------------------------------------------
# Moment tables
# ----------------------------------------------------------------------

def _tables(poly: Polyhedron, x, jmax: int):
    """Per-edge recursion table for field point x, cached on the mesh."""
    x = np.asarray(x, float)
    cache = getattr(poly, "_table_cache", None)
    if cache is None:
        cache = poly._table_cache = {}
    key = x.tobytes()
    hit = cache.get(key)
    if hit is not None and hit[2] >= jmax:
        return hit[0], hit[1], hit[3]
    ea = edge_arrays(poly, x)
    T, datan = edge_term_table(ea.a, ea.b, ea.lp, ea.lm, jmax)
    if len(cache) > 32:
        cache.clear()
    cache[key] = (ea, T, jmax, datan)
    return ea, T, datan


def _vol_moments_even(ea: EdgeArrays, T: np.ndarray, mmax: int) -> np.ndarray:
    """V_m = integral_Omega r^(2m) dx' for m = 0..mmax."""
    out = np.empty(mmax + 1)
    for m in range(mmax + 1):
        j = 2 * m
        out[m] = np.dot(ea.a, T[j + 1]) / ((j + 2) * (j + 3))
    return out


def _vol_moment(ea: EdgeArrays, T: np.ndarray, j: int) -> float:
    """integral_Omega r^j dx' for integer j >= -1."""
    return float(np.dot(ea.a, T[j + 1])) / ((j + 2) * (j + 3))


def _face_moments(ea: EdgeArrays, T: np.ndarray, j: int) -> np.ndarray:
    """integral_face r^j dA per face, integer j >= -1."""
    return np.add.reduceat(T[j + 1], ea.offsets[:-1]) / (j + 2)


# ----------------------------------------------------------------------
# Spatial tensor
# ----------------------------------------------------------------------

def _series_coeffs_spatial(tau: float, mat: Material, nmax: int) -> np.ndarray:
    """(-1)^m / (m! (4 alpha tau)^m) / (Cp (4 pi alpha tau)^(3/2))."""
    pref = 1.0 / (mat.Cp * (4 * math.pi * mat.alpha * tau) ** 1.5)
    out = np.empty(nmax + 1)
    c = pref
    for m in range(nmax + 1):
        out[m] = c
        c = -c / ((m + 1) * 4 * mat.alpha * tau)
    return out


def _flag_convergence(terms: np.ndarray, what: str):
    total = float(np.sum(terms))
    if terms.size >= 2 and abs(terms[-1]) > _CONV_FLAG * max(abs(total), 1e-300):
        warnings.warn(
            f"{what}: series last term {terms[-1]:.3e} exceeds "
            f"{_CONV_FLAG:g} of the sum {total:.3e}; increase n_max",
            RuntimeWarning, stacklevel=3,
        )
    return total


def spatial_L(poly: Polyhedron, x, tau: float, mat: Material,
              sp: SeriesParams = SeriesParams()) -> float:
    """Uniform spatial tensor L(x, tau) = (1/Cp) integral_Omega G dx'."""
    if tau <= 0.0:
        return 0.0
    nmax = sp.n_max
    ea, T, _ = _tables(poly, x, 2 * nmax)
    vm = _vol_moments_even(ea, T, nmax)
    coeff = _series_coeffs_spatial(tau, mat, nmax)
    return _flag_convergence(coeff * vm, "spatial_L")


def grad_spatial_L(poly: Polyhedron, x, tau: float, mat: Material,
                   sp: SeriesParams = SeriesParams()) -> np.ndarray:
    """Gradient of spatial_L with respect to the field point."""
    if tau <= 0.0:
        return np.zeros(3)
    nmax = sp.n_max
    ea, T, _ = _tables(poly, x, 2 * nmax)
    coeff = _series_coeffs_spatial(tau, mat, nmax)
    s_face = np.zeros(len(ea.offsets) - 1)
    for m in range(nmax + 1):
        s_face += coeff[m] * _face_moments(ea, T, 2 * m)
    return ea.normals.T @ s_face


# ----------------------------------------------------------------------
# Transition functions C^{n,f}
# ----------------------------------------------------------------------

def _check_window(t: float, t_prev: float, t_f: float, n: int):
    if n not in (0, 1, 2):
        raise DomainError(f"n must be 0, 1 or 2, got {n}")
    if t_prev >= t_f:
        raise IntervalError(f"t_prev={t_prev} must be < t_f={t_f}")
    if t < t_f:
        raise IntervalError(f"t={t} must be >= t_f={t_f}")


def _coeffs_general(t: float, t_prev: float, t_f: float, n: int,
                    mat: Material, nmax: int) -> np.ndarray:
    """m-series coefficients of C^{n,f} for t > t_f (regular window).

    coef_m multiplies the moment integral_Omega r^(2m) dx' and equals
    (2a)^n (-1)^m / (m! (4a)^m Cp (4 pi a)^(3/2)) (tau2^p - tau1^p)/p
    with p = n - m - 1/2, tau1 = t - t_f, tau2 = t - t_prev, a = alpha.
    """
    al = mat.alpha
    tau1, tau2 = t - t_f, t - t_prev
    base = (2 * al) ** n / (mat.Cp * (4 * math.pi * al) ** 1.5)
    out = np.empty(nmax + 1)
    c = base
    for m in range(nmax + 1):
        p = n - m - 0.5
        out[m] = c * (tau2**p - tau1**p) / p
        c = -c / ((m + 1) * 4 * al)
    return out


def _coeffs_singular(delta: float, n: int, mat: Material, nmax: int):
    """Singular-branch pieces of C^{n,f} at t = t_f, window length delta.

    Returns (newton_coef, series_coefs):
        C = newton_coef * R_{2n-1} + sum_m series_coefs[m] * V_m
    with R_j = integral r^j dx' and V_m = integral r^(2m) dx'.
    """
    al = mat.alpha
    if 4 * al * delta < 1.5e-3:
        raise AccuracyError(
            "window too short for the singular-branch series "
            f"(4*alpha*dt = {4 * al * delta:g} < 1.5e-3)"
        )
    c_n = 1.0 / (2 ** (n + 2) * _PI32 * al * mat.Cp)
    newton = c_n * _GAMMA_HALF_MINUS[n]
    coefs = np.empty(nmax + 1)
    w = (4 * al * delta) ** (n - 0.5)
    sgn = 1.0
    for m in range(nmax + 1):
        coefs[m] = -c_n * sgn * w / (m + 0.5 - n)
        w /= (4 * al * delta) * (m + 1)
        sgn = -sgn
    return newton, coefs


def C_nf(poly: Polyhedron, x, t: float, t_prev: float, t_f: float, n: int,
         mat: Material, sp: SeriesParams = SeriesParams()) -> float:
    """Transition function C^{n,f}(x, t) over the window [t_prev, t_f].

    Equals integral_{t_prev}^{t_f} (2 alpha (t - t'))^n L(x, t - t') dt'.
    At t = t_f the regular m-series diverges termwise and the resummed
    branch (steady Newtonian term plus incomplete-gamma series) is used.
    """
    _check_window(t, t_prev, t_f, n)
    nmax = sp.n_max
    ea, T, _ = _tables(poly, x, max(2 * nmax, 2 * n))
    if t > t_f:
        vm = _vol_moments_even(ea, T, nmax)
        return _flag_convergence(
            _coeffs_general(t, t_prev, t_f, n, mat, nmax) * vm, "C_nf")
    newton, coefs = _coeffs_singular(t_f - t_prev, n, mat, nmax)
    vm = _vol_moments_even(ea, T, nmax)
    r_odd = _vol_moment(ea, T, 2 * n - 1)
    return newton * r_odd + _flag_convergence(coefs * vm, "C_nf")


def grad_C_nf(poly: Polyhedron, x, t: float, t_prev: float, t_f: float,
              n: int, mat: Material,
              sp: SeriesParams = SeriesParams()) -> np.ndarray:
    """Gradient of C_nf with respect to the field point (analytic)."""
    _check_window(t, t_prev, t_f, n)
    nmax = sp.n_max
    ea, T, _ = _tables(poly, x, max(2 * nmax, 2 * n))
    s_face = np.zeros(len(ea.offsets) - 1)
    if t > t_f:
        coeff = _coeffs_general(t, t_prev, t_f, n, mat, nmax)
        for m in range(nmax + 1):
            s_face += coeff[m] * _face_moments(ea, T, 2 * m)
    else:
        newton, coefs = _coeffs_singular(t_f - t_prev, n, mat, nmax)
        s_face += newton * _face_moments(ea, T, 2 * n - 1)
        for m in range(nmax + 1):
            s_face += coefs[m] * _face_moments(ea, T, 2 * m)
    return ea.normals.T @ s_face


# ----------------------------------------------------------------------
# Finite-difference derivative ladder
# ----------------------------------------------------------------------

def _fd4(fun, x, h):
    """Fourth-order central difference of a (tensor-valued) function.

    Returns d(fun)/dx_j stacked on a new trailing axis.
    """
    x = np.asarray(x, float)
    cols = []
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        cols.append((-np.asarray(fun(x + 2 * e)) + 8 * np.asarray(fun(x + e))
                     - 8 * np.asarray(fun(x - e)) + np.asarray(fun(x - 2 * e)))
                    / (12 * h))
    return np.stack(cols, axis=-1)


def _near_face_warning(poly: Polyhedron, x):
    x = np.asarray(x, float)
    for i, f in enumerate(poly.faces):
        d = abs(float(np.dot(x - poly.vertices[f[0]], poly.normals[i])))
        if d < 1e-9:
            warnings.warn(
                f"field point within 1e-9 of face plane {i}; higher "
                "derivatives jump across the interface",
                RuntimeWarning, stacklevel=3,
            )
            return


def higher_derivs_C(poly: Polyhedron, x, t, t_prev, t_f, n, mat: Material,
                    sp: SeriesParams = SeriesParams(), order: int = 2,
                    h: float = None) -> np.ndarray:
    """Spatial derivatives of C^{n,f} of order 2 or 3.

    Fourth-order central differences of the analytic gradient; the
    result is symmetrized over derivative indices.
    """
    if order not in (2, 3):
        raise DomainError("order must be 2 or 3")
    _near_face_warning(poly, x)
    if h is None:
        h = 5e-3 * poly.circumradius(np.mean(poly.vertices, axis=0))
    g = lambda y: grad_C_nf(poly, y, t, t_prev, t_f, n, mat, sp)
    hess = _fd4(g, x, h)
    hess = 0.5 * (hess + hess.T)
    if order == 2:
        return hess
    third = _fd4(lambda y: _fd4(g, y, h), x, 2 * h)
    # symmetrize over all three indices
    third = (third + third.transpose(0, 2, 1) + third.transpose(1, 0, 2)
             + third.transpose(1, 2, 0) + third.transpose(2, 0, 1)
             + third.transpose(2, 1, 0)) / 6.0
    return third


class _CDerivs:
    """All spatial derivatives of C^{0..2,f} needed by the assembly."""

    def __init__(self, poly, x, t, t_prev, t_f, mat, sp, h=None,
                 need_fourth=False):
        x = np.asarray(x, float)
        if h is None:
            h = 5e-3 * poly.circumradius(np.mean(poly.vertices, axis=0))
        self.val = [C_nf(poly, x, t, t_prev, t_f, n, mat, sp) for n in range(3)]
        self.grad = [grad_C_nf(poly, x, t, t_prev, t_f, n, mat, sp)
                     for n in range(3)]
        gfun = [lambda y, n=n: grad_C_nf(poly, y, t, t_prev, t_f, n, mat, sp)
                for n in range(3)]
        self.hess = [_fd4(g, x, h) for g in gfun]
        self.hess = [0.5 * (H + H.T) for H in self.hess]
        hfun = [lambda y, g=g: _fd4(g, y, h) for g in gfun]
        self.third = [None, _fd4(hfun[1], x, 2 * h), _fd4(hfun[2], x, 2 * h)]
        if need_fourth:
            tfun = lambda y: _fd4(hfun[2], y, 2 * h)
            self.fourth = _fd4(tfun, x, 4 * h)
        else:
            self.fourth = None


# ----------------------------------------------------------------------
# Tensor assembly
# ----------------------------------------------------------------------

_EYE = np.eye(3)


def _assemble_from_derivs(x, K: float, d: _CDerivs,
                          with_gradients: bool) -> TensorSet:
    x = np.asarray(x, float)
    c0, c1, c2 = d.val
    g0, g1, g2 = d.grad
    h0, h1, h2 = d.hess
    t1, t2 = d.third[1], d.third[2]

    # The recipes follow from v_p G = -2 alpha tau dG/dx_p (v = x - x'),
    # which converts moments of x'_p into derivatives of the next C-order:
    #   M_p  = C1_{,p} + x_p C0
    #   M_pq = C2_{,pq} + x_p C1_{,q} + x_q C1_{,p} + d_pq C1 + x_p x_q C0
    # and the D-families / gradients are -K d/dx_i of these.
    ts = TensorSet.zeros(with_gradients=False)
    ts.Lbar = c0
    ts.Lbar_p = g1 + x * c0
    ts.Lbar_pq = (h2 + np.outer(x, g1) + np.outer(g1, x)
                  + _EYE * c1 + np.outer(x, x) * c0)
    ts.Dbar_i = -K * g0
    ts.Dbar_ip = -K * (h1 + _EYE * c0 + np.outer(g0, x))

    def d_mpq(t2, h1, g1, g0, h0, c0):
        """d/dx_i of M_pq, index order (i, p, q)."""
        return (
            np.einsum("ipq->ipq", t2)
            + np.einsum("ip,q->ipq", _EYE, g1)
            + np.einsum("iq,p->ipq", _EYE, g1)
            + np.einsum("p,iq->ipq", x, h1) + np.einsum("q,ip->ipq", x, h1)
            + np.einsum("pq,i->ipq", _EYE, g1)
            + (np.einsum("ip,q->ipq", _EYE, x)
               + np.einsum("iq,p->ipq", _EYE, x)) * c0
            + np.einsum("p,q,i->ipq", x, x, g0)
        )

    ts.Dbar_ipq = -K * d_mpq(t2, h1, g1, g0, h0, c0)
    if not with_gradients:
        return ts

    f2 = d.fourth
    ts.grad_Lbar = g0.copy()
    # d/dx_j of M_p, index order (p, j): same structure as -Dbar_ip / K
    ts.grad_Lbar_p = h1 + _EYE * c0 + np.outer(x, g0)
    # d/dx_j of M_pq, index order (p, q, j):
    ts.grad_Lbar_pq = np.transpose(
        d_mpq(t2, h1, g1, g0, h0, c0), (1, 2, 0))
    ts.grad_Dbar_i = -K * h0
    ts.grad_Dbar_ip = -K * (
        t1
        + np.einsum("ip,j->ipj", _EYE, g0)
        + np.einsum("pj,i->ipj", _EYE, g0)
        + np.einsum("p,ij->ipj", x, h0)
    )
    ts.grad_Dbar_ipq = -K * (
        f2
        + np.einsum("ip,qj->ipqj", _EYE, h1)
        + np.einsum("iq,pj->ipqj", _EYE, h1)
        + np.einsum("pj,iq->ipqj", _EYE, h1)
        + np.einsum("qj,ip->ipqj", _EYE, h1)
        + np.einsum("pq,ij->ipqj", _EYE, h1)
        + np.einsum("p,iqj->ipqj", x, t1) + np.einsum("q,ipj->ipqj", x, t1)
        + (np.einsum("ip,qj->ipqj", _EYE, _EYE)
           + np.einsum("iq,pj->ipqj", _EYE, _EYE)) * c0
        + (np.einsum("ip,q,j->ipqj", _EYE, x, g0)
           + np.einsum("iq,p,j->ipqj", _EYE, x, g0))
        + (np.einsum("pj,q,i->ipqj", _EYE, x, g0)
           + np.einsum("qj,p,i->ipqj", _EYE, x, g0))
        + np.einsum("p,q,ij->ipqj", x, x, h0)
    )
    return ts


def assemble_tensors(poly: Polyhedron, x, t: float, f: int, grid: TimeGrid,
                     mat: Material, sp: SeriesParams = SeriesParams(),
                     with_gradients: bool = True) -> TensorSet:
    """TensorSet of step f at field point x and observation time t.

    The window upper limit is clipped to t; a window entirely in the
    future returns the zero TensorSet.
    """
    t_prev, t_f = grid.window(f)
    if t <= t_prev:
        return TensorSet.zeros(with_gradients=with_gradients)
    t_f = min(t_f, t)
    d = _CDerivs(poly, x, t, t_prev, t_f, mat, sp, need_fourth=with_gradients)
    return _assemble_from_derivs(x, mat.K, d, with_gradients)


def _contract(ts: TensorSet, co: EigenCoeffs) -> float:
    ehs = (co.Q0 * ts.Lbar + np.dot(co.Q1, ts.Lbar_p)
           + np.sum(co.Q2 * ts.Lbar_pq))
    etg = (np.dot(co.U0, ts.Dbar_i) + np.sum(co.U1 * ts.Dbar_ip)
           + np.sum(co.U2 * ts.Dbar_ipq))
    return -ehs + etg


def _contract_grad(ts: TensorSet, co: EigenCoeffs) -> np.ndarray:
    ehs = (co.Q0 * ts.grad_Lbar
           + np.einsum("p,pj->j", co.Q1, ts.grad_Lbar_p)
           + np.einsum("pq,pqj->j", co.Q2, ts.grad_Lbar_pq))
    etg = (np.einsum("i,ij->j", co.U0, ts.grad_Dbar_i)
           + np.einsum("ip,ipj->j", co.U1, ts.grad_Dbar_ip)
           + np.einsum("ipq,ipqj->j", co.U2, ts.grad_Dbar_ipq))
    return -ehs + etg


def _active_steps(t: float, grid: TimeGrid):
    for f in range(1, grid.steps + 1):
        t_prev, _ = grid.window(f)
        if t <= t_prev:
            break
        yield f


def temperature(poly: Polyhedron, x, t: float, coeffs, grid: TimeGrid,
                mat: Material, sp: SeriesParams = SeriesParams()) -> float:
    """Disturbed temperature from the eigen-field history (K)."""
    u = 0.0
    for f in _active_steps(t, grid):
        co = coeffs[f - 1]
        ts = assemble_tensors(poly, x, t, f, grid, mat, sp,
                              with_gradients=False)
        u += _contract(ts, co)
    return u


def flux(poly: Polyhedron, x, t: float, coeffs, grid: TimeGrid,
         mat: Material, sp: SeriesParams = SeriesParams()) -> np.ndarray:
    """Disturbed matrix heat flux -K grad(temperature), W/m^2.

    The interior constitutive correction belongs to the EIM module.
    """
    g = np.zeros(3)
    for f in _active_steps(t, grid):
        co = coeffs[f - 1]
        ts = assemble_tensors(poly, x, t, f, grid, mat, sp,
                              with_gradients=True)
        g += _contract_grad(ts, co)
    return -mat.K * g
