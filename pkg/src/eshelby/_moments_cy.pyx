# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython backend for the per-edge recursion tables (see _moments_py)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport atan2, sqrt, asinh, fabs, pow

cnp.import_array()


def edge_term_table(a_in, b_in, lp_in, lm_in, int jmax):
    """Identical contract to eshelby._moments_py.edge_term_table."""
    cdef cnp.ndarray[double, ndim=1] a = np.ascontiguousarray(a_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] b = np.ascontiguousarray(b_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] lp = np.ascontiguousarray(lp_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] lm = np.ascontiguousarray(lm_in, dtype=np.float64)
    cdef Py_ssize_t ne = a.shape[0]
    cdef cnp.ndarray[double, ndim=2] T = np.empty((jmax + 2, ne), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] datan = np.empty(ne, dtype=np.float64)

    cdef Py_ssize_t e
    cdef int j
    cdef double ai, bi, lpi, lmi, c, sp, sm, atp, atm, dat, a2, absa
    cdef double php, phm, ihp, ihm, pip_, pim, iip, iim
    cdef double apow, kh, cki
    cdef int ki

    for e in range(ne):
        ai = a[e]; bi = b[e]; lpi = lp[e]; lmi = lm[e]
        c = ai * ai + bi * bi
        sp = sqrt(c + lpi * lpi)
        sm = sqrt(c + lmi * lmi)
        atp = atan2(lpi * bi, bi * bi)
        atm = atan2(lmi * bi, bi * bi)
        dat = atp - atm
        datan[e] = dat
        a2 = ai * ai
        absa = fabs(ai)

        # half-integer branch (odd j)
        if ai != 0.0:
            php = atan2(ai * lpi * bi, bi * bi * sp) / ai
            phm = atan2(ai * lmi * bi, bi * bi * sm) / ai
        elif bi != 0.0:
            php = lpi / (bi * sp)
            phm = lmi / (bi * sm)
        else:
            php = 0.0
            phm = 0.0
        if c > 0.0:
            ihp = asinh(lpi / sqrt(c))
            ihm = asinh(lmi / sqrt(c))
        else:
            ihp = 0.0
            ihm = 0.0
        apow = absa
        kh = 0.5
        for j in range(-1, jmax + 1, 2):
            php = bi * ihp + a2 * php
            phm = bi * ihm + a2 * phm
            ihp = (lpi * pow(c + lpi * lpi, kh) + 2.0 * kh * c * ihp) / (2.0 * kh + 1.0)
            ihm = (lmi * pow(c + lmi * lmi, kh) + 2.0 * kh * c * ihm) / (2.0 * kh + 1.0)
            kh += 1.0
            T[j + 1, e] = (php - phm) - apow * dat
            apow = apow * a2

        # integer branch (even j)
        pip_ = atp; pim = atm
        iip = lpi; iim = lmi
        apow = a2
        ki = 1
        for j in range(0, jmax + 1, 2):
            pip_ = bi * iip + a2 * pip_
            pim = bi * iim + a2 * pim
            cki = <double> ki
            iip = (lpi * pow(c + lpi * lpi, cki) + 2.0 * cki * c * iip) / (2.0 * cki + 1.0)
            iim = (lmi * pow(c + lmi * lmi, cki) + 2.0 * cki * c * iim) / (2.0 * cki + 1.0)
            ki += 1
            T[j + 1, e] = (pip_ - pim) - apow * dat
            apow = apow * a2

    return T, datan
