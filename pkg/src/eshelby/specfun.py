"""Special-function kernels used by the series-form tensor formulas.

Only the argument families the tensor formulas actually call are
implemented; everything else is rejected loudly.  The Gauss 2F1 and
Appell F1 surfaces are evaluated through their one-dimensional integral
representations (after a Pfaff transformation, respectively the t = u**2
substitution that removes the t**(-1/2) endpoint singularity), driven by
an adaptive Gauss--Kronrod scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

from .errors import AccuracyError, DomainError, UnsupportedArgumentError

__all__ = [
    "QuadratureSpec",
    "DEFAULT_QUAD",
    "erf",
    "upper_gamma",
    "gauss_2f1",
    "appell_f1",
]

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for the adaptive quadrature backing 2F1/F1 evaluation."""

    max_subdivisions: int = 2000
    abs_tol: float = 1e-14
    rel_tol: float = 1e-10

    def __post_init__(self):
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise DomainError("tolerances must be >= 0")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise DomainError("abs_tol and rel_tol must not both be zero")


DEFAULT_QUAD = QuadratureSpec()


def _quad(f, lo, hi, spec: QuadratureSpec) -> float:
    val, err = integrate.quad(
        f, lo, hi,
        epsabs=spec.abs_tol, epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
    )
    tol = max(spec.abs_tol, spec.rel_tol * abs(val))
    if err > 100 * max(tol, 1e-300):
        raise AccuracyError(
            f"quadrature error estimate {err:g} exceeds tolerance {tol:g}",
            achieved=err,
        )
    return val


def erf(x: float) -> float:
    """Error function; |error| <= 1e-14 over the real line."""
    if not math.isfinite(x):
        raise DomainError(f"erf requires finite input, got {x!r}")
    return math.erf(x)


_SUPPORTED_GAMMA_ORDERS = (0.5, -0.5, -1.5, -2.5)


def upper_gamma(s: float, x: float) -> float:
    """Upper incomplete gamma Gamma(s, x) for half-integer s.

    Supported orders are s in {1/2, -1/2, -3/2, -5/2}; evaluation is by
    downward recurrence Gamma(s, x) = (Gamma(s+1, x) - x**s * exp(-x)) / s
    seeded with Gamma(1/2, x) = sqrt(pi) * erfc(sqrt(x)).
    """
    if not any(abs(s - v) < 1e-12 for v in _SUPPORTED_GAMMA_ORDERS):
        raise UnsupportedArgumentError(
            f"upper_gamma supports s in {_SUPPORTED_GAMMA_ORDERS}, got {s}"
        )
    if not (math.isfinite(x) and x >= 0):
        raise DomainError(f"upper_gamma requires x >= 0, got {x!r}")
    if x == 0.0:
        # Gamma(1/2) is finite; the negative orders diverge at x = 0.
        return _SQRT_PI if s > 0 else math.inf
    g = _SQRT_PI * math.erfc(math.sqrt(x))  # Gamma(1/2, x)
    t = 0.5
    while t > s + 1e-9:
        t -= 1.0
        g = (g - x**t * math.exp(-x)) / t
    return g


def _is_nonpos_int(b: float) -> bool:
    return b <= 0 and abs(b - round(b)) < 1e-12


def gauss_2f1(a: float, b: float, c: float, x: float,
              spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Gauss hypergeometric 2F1(a, b; c; x) on the restricted call family.

    Supported: b a nonpositive integer (exact terminating polynomial), or
    (a, c) = (1, 3/2) with b = 3/2 + m, integer m >= 0, for x <= 0.  The
    latter is mapped by the Pfaff transformation to an integral over [0, 1]
    with argument z = x / (x - 1) in [0, 1).
    """
    if c <= 0:
        raise UnsupportedArgumentError("gauss_2f1 requires c > 0")
    if x > 0:
        raise DomainError("gauss_2f1 is restricted to x <= 0")
    if x == 0.0:
        return 1.0
    if _is_nonpos_int(b):
        # Terminating series: sum_{k=0}^{-b} (a)_k (b)_k / (c)_k x^k / k!
        n = int(round(-b))
        total, term = 1.0, 1.0
        for k in range(n):
            term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * x
            total += term
        return total
    m = b - 1.5
    if not (a == 1.0 and c == 1.5 and m >= -1e-12 and abs(m - round(m)) < 1e-12):
        raise UnsupportedArgumentError(
            "gauss_2f1 supports b nonpositive integer, or (a, b, c) = "
            f"(1, 3/2+m, 3/2) with integer m >= 0; got {(a, b, c)}"
        )
    z = x / (x - 1.0)  # in [0, 1)
    p = b  # = 3/2 + m
    val = _quad(lambda u: (1.0 - z * u * u) ** (-p), 0.0, 1.0, spec)
    return (1.0 - x) ** (-p) * val


def appell_f1(a: float, b1: float, b2: float, c: float, x: float, y: float,
              spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Appell F1(a; b1, b2; c; x, y) on the restricted call family.

    Supported: a = 1/2, c = 3/2, b2 = 1, b1 a nonpositive half-integer,
    x <= 0, y <= 0.  Uses the Picard integral with the substitution
    t = u**2 that removes the t**(-1/2) endpoint singularity:

        F1 = integral_0^1 (1 - x u^2)^(-b1) / (1 - y u^2) du
    """
    if not (a == 0.5 and c == 1.5 and b2 == 1.0):
        raise UnsupportedArgumentError(
            f"appell_f1 supports (a, c, b2) = (1/2, 3/2, 1); got {(a, c, b2)}"
        )
    if b1 > 1e-12 or abs(2 * b1 - round(2 * b1)) > 1e-12:
        raise UnsupportedArgumentError(
            f"appell_f1 supports b1 a nonpositive half-integer; got {b1}"
        )
    if x > 0 or y > 0:
        raise DomainError("appell_f1 is restricted to x <= 0 and y <= 0")
    return _quad(
        lambda u: (1.0 - x * u * u) ** (-b1) / (1.0 - y * u * u),
        0.0, 1.0, spec,
    )
