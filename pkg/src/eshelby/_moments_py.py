"""Pure-numpy backend for the per-edge recursion tables.

Every series-form tensor reduces to sums over (face, edge) pairs of

    T_j = [P_{(j+2)/2}(a, b, l+) - P_{(j+2)/2}(a, b, l-)]
          - |a|^(j+2) * [atan(l+/b) - atan(l-/b)]

where P_k(a, b, l) = integral_0^l b (a^2 + b^2 + s^2)^k / (b^2 + s^2) ds.
P_k satisfies, with c = a^2 + b^2 and I_k = integral_0^l (c + s^2)^k ds,

    P_k = b I_{k-1} + a^2 P_{k-1}
    I_k = (l (c + l^2)^k + 2 k c I_{k-1}) / (2 k + 1)

for integer and half-integer k alike; the bases are P_0 = atan(l/b),
I_0 = l, P_{-1/2} = atan(a l / (b sqrt(c + l^2))) / a and
I_{-1/2} = asinh(l / sqrt(c)).  This is the library's hot loop.
"""

from __future__ import annotations

import numpy as np


def edge_term_table(a, b, lp, lm, jmax: int):
    """Recursion table T[j + 1, edge] for j = -1 .. jmax, plus delta-atan.

    Parameters
    ----------
    a, b, lp, lm : (ne,) float arrays
        Transformed coordinates per (face, edge) pair.
    jmax : int
        Largest moment exponent needed (T has jmax + 2 rows).

    Returns
    -------
    T : (jmax + 2, ne) ndarray
    datan : (ne,) ndarray
        atan2(l+ b, b^2) - atan2(l- b, b^2) per edge.
    """
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    lp = np.asarray(lp, float)
    lm = np.asarray(lm, float)
    ne = a.size
    c = a * a + b * b
    sp = np.sqrt(c + lp * lp)
    sm = np.sqrt(c + lm * lm)
    atan_p = np.arctan2(lp * b, b * b)
    atan_m = np.arctan2(lm * b, b * b)
    datan = atan_p - atan_m
    T = np.empty((jmax + 2, ne))
    a2 = a * a
    absa = np.abs(a)

    # Half-integer branch (odd j): base P_{-1/2}, I_{-1/2}.
    with np.errstate(divide="ignore", invalid="ignore"):
        php = np.where(a != 0.0,
                       np.arctan2(a * lp * b, b * b * sp) / np.where(a != 0, a, 1.0),
                       np.where(b != 0.0, lp / (b * sp + (b == 0.0)), 0.0))
        phm = np.where(a != 0.0,
                       np.arctan2(a * lm * b, b * b * sm) / np.where(a != 0, a, 1.0),
                       np.where(b != 0.0, lm / (b * sm + (b == 0.0)), 0.0))
        ihp = np.arcsinh(lp / np.sqrt(c))
        ihm = np.arcsinh(lm / np.sqrt(c))
    apow_h = absa.copy()
    k = 0.5
    for j in range(-1, jmax + 1, 2):
        php = b * ihp + a2 * php
        phm = b * ihm + a2 * phm
        ihp = (lp * (c + lp * lp) ** k + 2 * k * c * ihp) / (2 * k + 1)
        ihm = (lm * (c + lm * lm) ** k + 2 * k * c * ihm) / (2 * k + 1)
        k += 1.0
        T[j + 1] = (php - phm) - apow_h * datan
        apow_h = apow_h * a2

    # Integer branch (even j): base P_0 = atan terms, I_0 = l.
    pip_, pim = atan_p.copy(), atan_m.copy()
    iip, iim = lp.copy(), lm.copy()
    apow = a2.copy()
    ki = 1
    for j in range(0, jmax + 1, 2):
        pip_ = b * iip + a2 * pip_
        pim = b * iim + a2 * pim
        iip = (lp * (c + lp * lp) ** ki + 2 * ki * c * iip) / (2 * ki + 1)
        iim = (lm * (c + lm * lm) ** ki + 2 * ki * c * iim) / (2 * ki + 1)
        ki += 1
        T[j + 1] = (pip_ - pim) - apow * datan
        apow = apow * a2

    return T, datan
