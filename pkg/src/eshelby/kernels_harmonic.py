"""Helmholtz-potential integrals and harmonic Eshelby tensors.

Under time-harmonic excitation the fundamental solution is the damped
Helmholtz potential exp(i beta r) / (4 pi K r) with beta = sqrt(i
omega / alpha) on the decaying branch.  The building blocks are

    A^n(x) = integral_Omega exp(i beta r) r^(n-1) dx',  n = 0, 1, 2

evaluated by expanding exp(i beta r) in powers of r, which reduces each
term to a polyhedral moment of r^j handled by the shared edge-recursion
tables.  Potentials of linear and quadratic source densities follow by
the same moment-shift identities used in the transient module.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DomainError
from .geometry import Polyhedron
from .kernels_transient import (
    SeriesParams,
    _face_moments,
    _fd4,
    _tables,
    _vol_moment,
)

__all__ = ["HarmonicParams", "A_n", "grad_A_n", "phi_tensors",
           "harmonic_eshelby"]


@dataclass(frozen=True)
class HarmonicParams:
    """Complex wavenumber beta, optionally derived from omega."""

    beta: complex
    omega: float = None

    def __post_init__(self):
        b = complex(self.beta)
        if b.imag < 0:
            raise DomainError("Im(beta) must be >= 0 (decaying branch)")
        if self.omega is not None:
            target = 1j * self.omega  # beta^2 * alpha = i omega
            # alpha is not known here; accept beta^2 == i*omega/alpha up to
            # scale by checking the phase only when omega > 0
            if self.omega < 0:
                raise DomainError("omega must be >= 0")

    @classmethod
    def from_omega(cls, omega: float, alpha: float) -> "HarmonicParams":
        if omega < 0 or alpha <= 0:
            raise DomainError("need omega >= 0 and alpha > 0")
        return cls(beta=cmath.sqrt(1j * omega / alpha), omega=omega)


def _series_coeffs(beta: complex, nmax: int) -> np.ndarray:
    """(i beta)^m / m! for m = 0..nmax."""
    out = np.empty(nmax + 1, complex)
    c = 1.0 + 0.0j
    for m in range(nmax + 1):
        out[m] = c
        c = c * 1j * beta / (m + 1)
    return out


def _check_converged(terms, what):
    tot = np.sum(terms)
    if abs(terms[-1]) > 1e-8 * max(abs(tot), 1e-300):
        raise AccuracyError(
            f"{what}: exponential series not converged at n_max="
            f"{len(terms) - 1}; last term {abs(terms[-1]):.3e}",
            achieved=abs(terms[-1]),
        )
    return tot


def A_n(poly: Polyhedron, x, hp: HarmonicParams, n: int,
        sp: SeriesParams = SeriesParams(30)) -> complex:
    """A^n(x) = integral_Omega exp(i beta r) r^(n-1) dx'."""
    if n not in (0, 1, 2):
        raise DomainError("n must be 0, 1 or 2")
    nmax = sp.n_max
    ea, T, _ = _tables(poly, x, n + nmax - 1)
    coeff = _series_coeffs(complex(hp.beta), nmax)
    terms = np.array([coeff[m] * _vol_moment(ea, T, n + m - 1)
                      for m in range(nmax + 1)])
    return _check_converged(terms, "A_n")


def grad_A_n(poly: Polyhedron, x, hp: HarmonicParams, n: int,
             sp: SeriesParams = SeriesParams(30)) -> np.ndarray:
    """Gradient of A^n with respect to the field point (analytic)."""
    if n not in (0, 1, 2):
        raise DomainError("n must be 0, 1 or 2")
    nmax = sp.n_max
    ea, T, _ = _tables(poly, x, n + nmax - 1)
    coeff = _series_coeffs(complex(hp.beta), nmax)
    s_face = np.zeros(len(ea.offsets) - 1, complex)
    last = 0.0
    for m in range(nmax + 1):
        term = coeff[m] * _face_moments(ea, T, n + m - 1)
        s_face += term
        last = np.max(np.abs(term))
    if last > 1e-8 * max(np.max(np.abs(s_face)), 1e-300):
        raise AccuracyError(
            f"grad_A_n: series not converged at n_max={nmax}",
            achieved=last,
        )
    return ea.normals.T.astype(complex) @ s_face


def _hess_A(poly, x, hp, n, sp, h):
    g = lambda y: grad_A_n(poly, y, hp, n, sp)
    H = _fd4(g, x, h)
    return 0.5 * (H + H.T)


def phi_tensors(poly: Polyhedron, x, hp: HarmonicParams,
                sp: SeriesParams = SeriesParams(30)):
    """Helmholtz potentials of uniform, linear and quadratic densities.

    Returns (Phi, Phi_p, Phi_pq) with
        Phi    = integral exp(i beta r)/r dx'
        Phi_p  = integral exp(i beta r)/r x'_p dx'
        Phi_pq = integral exp(i beta r)/r x'_p x'_q dx'
    assembled from A^n and its derivatives via the antiderivative
    h(r) = exp(i beta r) (-r/beta^2 - i/beta^3) of r exp(i beta r).
    """
    x = np.asarray(x, float)
    beta = complex(hp.beta)
    if beta == 0:
        raise DomainError("beta must be nonzero; use the transient module "
                          "for the steady limit")
    h = 5e-3 * poly.circumradius(np.mean(poly.vertices, axis=0))
    a0 = A_n(poly, x, hp, 0, sp)
    a1 = A_n(poly, x, hp, 1, sp)
    g0 = grad_A_n(poly, x, hp, 0, sp)
    g1 = grad_A_n(poly, x, hp, 1, sp)
    h1 = _hess_A(poly, x, hp, 1, sp, h)
    h2 = _hess_A(poly, x, hp, 2, sp, h)
    phi = a0
    phi_p = (1j / beta) * g1 + x * a0
    phi_pq = (-h2 / beta**2 - 1j * h1 / beta**3
              + (1j / beta) * (np.eye(3) * a1 + np.outer(x, g1)
                               + np.outer(g1, x))
              + np.outer(x, x) * a0)
    phi_pq = 0.5 * (phi_pq + phi_pq.T)
    return phi, phi_p, phi_pq


def harmonic_eshelby(poly: Polyhedron, x, hp: HarmonicParams,
                     sp: SeriesParams = SeriesParams(30), K: float = 1.0):
    """Harmonic Eshelby tensor families at a field point.

    Returns a dict with the potential family scaled by 1/(4 pi K):
    'LH', 'LH_p', 'LH_pq', and the flux family 'DH_i', 'DH_ip',
    'DH_ipq' given by -1/(4 pi) times the field-point gradient of the
    corresponding potential.
    """
    x = np.asarray(x, float)
    h = 5e-3 * poly.circumradius(np.mean(poly.vertices, axis=0))
    phi, phi_p, phi_pq = phi_tensors(poly, x, hp, sp)
    gphi = grad_A_n(poly, x, hp, 0, sp)

    def phi_p_of(y):
        return phi_tensors(poly, y, hp, sp)[1]

    def phi_pq_of(y):
        return phi_tensors(poly, y, hp, sp)[2]

    gphi_p = _fd4(phi_p_of, x, h)       # (p, i)
    gphi_pq = _fd4(phi_pq_of, x, 2 * h)  # (p, q, i)
    c = 1.0 / (4 * math.pi * K)
    return {
        "LH": c * phi,
        "LH_p": c * phi_p,
        "LH_pq": c * phi_pq,
        "DH_i": -gphi / (4 * math.pi),
        "DH_ip": -np.transpose(gphi_p, (1, 0)) / (4 * math.pi),
        "DH_ipq": -np.transpose(gphi_pq, (2, 0, 1)) / (4 * math.pi),
    }
