# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled guidance/interpolation kernels (cubic Lagrange stencils).

Semantics mirror pilotlab.kernels._fallback exactly; the test suite
cross-checks the two backends.
"""
import numpy as np

ctypedef double complex cplx


cdef inline void _weights(double t, double* w) nogil:
    w[0] = -t * (t - 1) * (t - 2) / 6.0
    w[1] = (t + 1) * (t - 1) * (t - 2) / 2.0
    w[2] = -t * (t + 1) * (t - 2) / 2.0
    w[3] = t * (t + 1) * (t - 1) / 6.0


cdef inline void _stencil(double x, double x0, double inv_dx, Py_ssize_t n,
                          bint periodic, Py_ssize_t* idx, double* w) nogil:
    cdef double s = (x - x0) * inv_dx
    cdef Py_ssize_t base = <Py_ssize_t> s
    if s < 0 and s != base:
        base -= 1
    cdef double t
    cdef Py_ssize_t j, raw
    if periodic:
        t = s - base
        for j in range(4):
            raw = (base + j - 1) % n
            if raw < 0:
                raw += n
            idx[j] = raw
    else:
        if base < 1:
            base = 1
        elif base > n - 3:
            base = n - 3
        t = s - base
        for j in range(4):
            idx[j] = base + j - 1
    _weights(t, w)


def interp_cubic_1d(double[::1] values, double[::1] pos, double x0,
                    double inv_dx, bint periodic):
    cdef Py_ssize_t m = pos.shape[0]
    cdef Py_ssize_t n = values.shape[0]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef Py_ssize_t idx[4]
    cdef double w[4]
    cdef double acc
    with nogil:
        for i in range(m):
            _stencil(pos[i], x0, inv_dx, n, periodic, idx, w)
            acc = 0.0
            for j in range(4):
                acc += values[idx[j]] * w[j]
            out[i] = acc
    return out_arr


def interp_cubic_2d(double[:, ::1] values, double[:, ::1] pos, double x0,
                    double y0, double inv_dx, double inv_dy, bint periodic):
    cdef Py_ssize_t m = pos.shape[0]
    cdef Py_ssize_t nx = values.shape[0]
    cdef Py_ssize_t ny = values.shape[1]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j, l
    cdef Py_ssize_t ix[4]
    cdef Py_ssize_t iy[4]
    cdef double wx[4]
    cdef double wy[4]
    cdef double acc, row
    with nogil:
        for i in range(m):
            _stencil(pos[i, 0], x0, inv_dx, nx, periodic, ix, wx)
            _stencil(pos[i, 1], y0, inv_dy, ny, periodic, iy, wy)
            acc = 0.0
            for j in range(4):
                row = 0.0
                for l in range(4):
                    row += values[ix[j], iy[l]] * wy[l]
                acc += row * wx[j]
            out[i] = acc
    return out_arr


def guidance_terms_1d(cplx[:, ::1] psi, cplx[:, ::1] dpsi, double[::1] pos,
                      double x0, double inv_dx, bint periodic):
    cdef Py_ssize_t m = pos.shape[0]
    cdef Py_ssize_t ncomp = psi.shape[0]
    cdef Py_ssize_t n = psi.shape[1]
    num_arr = np.zeros(m, dtype=np.float64)
    rho_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] num = num_arr
    cdef double[::1] rho = rho_arr
    cdef Py_ssize_t i, j, s
    cdef Py_ssize_t idx[4]
    cdef double w[4]
    cdef cplx p, d
    with nogil:
        for i in range(m):
            _stencil(pos[i], x0, inv_dx, n, periodic, idx, w)
            for s in range(ncomp):
                p = 0
                d = 0
                for j in range(4):
                    p = p + psi[s, idx[j]] * w[j]
                    d = d + dpsi[s, idx[j]] * w[j]
                num[i] += p.real * d.imag - p.imag * d.real
                rho[i] += p.real * p.real + p.imag * p.imag
    return num_arr, rho_arr


def guidance_terms_2d(cplx[:, :, ::1] psi, cplx[:, :, ::1] dpsix,
                      cplx[:, :, ::1] dpsiy, double[:, ::1] pos, double x0,
                      double y0, double inv_dx, double inv_dy, bint periodic):
    cdef Py_ssize_t m = pos.shape[0]
    cdef Py_ssize_t ncomp = psi.shape[0]
    cdef Py_ssize_t nx = psi.shape[1]
    cdef Py_ssize_t ny = psi.shape[2]
    numx_arr = np.zeros(m, dtype=np.float64)
    numy_arr = np.zeros(m, dtype=np.float64)
    rho_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] numx = numx_arr
    cdef double[::1] numy = numy_arr
    cdef double[::1] rho = rho_arr
    cdef Py_ssize_t i, j, l, s
    cdef Py_ssize_t ix[4]
    cdef Py_ssize_t iy[4]
    cdef double wx[4]
    cdef double wy[4]
    cdef cplx p, dx_val, dy_val
    cdef double wgt
    with nogil:
        for i in range(m):
            _stencil(pos[i, 0], x0, inv_dx, nx, periodic, ix, wx)
            _stencil(pos[i, 1], y0, inv_dy, ny, periodic, iy, wy)
            for s in range(ncomp):
                p = 0
                dx_val = 0
                dy_val = 0
                for j in range(4):
                    for l in range(4):
                        wgt = wx[j] * wy[l]
                        p = p + psi[s, ix[j], iy[l]] * wgt
                        dx_val = dx_val + dpsix[s, ix[j], iy[l]] * wgt
                        dy_val = dy_val + dpsiy[s, ix[j], iy[l]] * wgt
                numx[i] += p.real * dx_val.imag - p.imag * dx_val.real
                numy[i] += p.real * dy_val.imag - p.imag * dy_val.real
                rho[i] += p.real * p.real + p.imag * p.imag
    return numx_arr, numy_arr, rho_arr
