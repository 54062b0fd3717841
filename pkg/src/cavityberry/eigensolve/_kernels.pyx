# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Hermitian eigenkernel.

Mirrors ``_pure.tridiagonal_eigh`` step for step. All work happens on
row-major buffers so the inner loops run over contiguous memory.
"""
import numpy as np

from libc.math cimport sqrt, fabs, fmax, hypot, copysign
from libc.float cimport DBL_EPSILON, DBL_MIN

cdef double TINY_TAIL = 1e-300  # see _pure._TINY_TAIL


cdef inline double cabs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double complex cunit(double complex z, double mag) noexcept nogil:
    # z / |z| with unit modulus to rounding, see _pure._unit; avoids the
    # limited-range complex quotient and the few bits of a subnormal |z|
    cdef double big, re, im, r
    if mag == 0.0:
        return 1.0
    big = fmax(fabs(z.real), fabs(z.imag))
    re = z.real / big
    im = z.imag / big
    r = hypot(re, im)
    return (re / r) + 1j * (im / r)


cdef inline double complex cconj(double complex z) noexcept nogil:
    return z.real - 1j * z.imag


cdef void _householder(double complex[:, ::1] a, double complex[:, ::1] qt,
                       double complex[::1] v, double complex[::1] p,
                       double complex[::1] w) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t k, r, c, m
    cdef double tail, ax0, xnorm, h, inv_h, kk
    cdef double complex phase, acc, vc, qc, vr, qr
    for k in range(n - 2):
        m = n - k - 1
        tail = 0.0
        for r in range(k + 2, n):
            tail += cabs2(a[r, k])
        if tail < TINY_TAIL:
            for r in range(k + 2, n):
                a[r, k] = 0.0
                a[k, r] = 0.0
            continue
        ax0 = hypot(a[k + 1, k].real, a[k + 1, k].imag)
        xnorm = sqrt(tail + ax0 * ax0)
        # complex-by-real divisions avoid the limited-range complex
        # quotient, which squares the denominator
        phase = cunit(a[k + 1, k], ax0)
        for r in range(m):
            v[r] = a[k + 1 + r, k]
        v[0] = v[0] + phase * xnorm
        h = xnorm * (xnorm + ax0)
        inv_h = 1.0 / h

        # p = B v / h with B the trailing block
        for r in range(m):
            acc = 0.0
            for c in range(m):
                acc = acc + a[k + 1 + r, k + 1 + c] * v[c]
            p[r] = acc * inv_h
        kk = 0.0
        for r in range(m):
            kk += (cconj(v[r]) * p[r]).real
        kk = 0.5 * kk * inv_h
        for r in range(m):
            p[r] = p[r] - kk * v[r]
        # B -= q v^H + v q^H   (q stored in p)
        for r in range(m):
            qr = p[r]
            vr = v[r]
            for c in range(m):
                a[k + 1 + r, k + 1 + c] = (a[k + 1 + r, k + 1 + c]
                                           - qr * cconj(v[c]) - vr * cconj(p[c]))

        a[k + 1, k] = -phase * xnorm
        a[k, k + 1] = cconj(a[k + 1, k])
        for r in range(k + 2, n):
            a[r, k] = 0.0
            a[k, r] = 0.0

        # rows k+1.. of Q^T: w = v @ rows ; rows -= conj(v) w / h
        for c in range(n):
            w[c] = 0.0
        for r in range(m):
            vr = v[r]
            for c in range(n):
                w[c] = w[c] + vr * qt[k + 1 + r, c]
        for r in range(m):
            vc = cconj(v[r]) * inv_h
            for c in range(n):
                qt[k + 1 + r, c] = qt[k + 1 + r, c] - vc * w[c]


cdef void _realify(double complex[:, ::1] a, double complex[:, ::1] qt,
                   double[::1] d, double[::1] e) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, c
    cdef double mag
    cdef double complex delta = 1.0
    for i in range(n):
        d[i] = a[i, i].real
    for i in range(n - 1):
        mag = hypot(a[i + 1, i].real, a[i + 1, i].imag)
        if mag != 0.0:
            delta = delta * cunit(a[i + 1, i], mag)
        e[i] = mag
        for c in range(n):
            qt[i + 1, c] = qt[i + 1, c] * delta
    e[n - 1] = 0.0


cdef int _tql2(double[::1] d, double[::1] e, double[:, ::1] zt,
               int max_iter) noexcept nogil:
    # zt is the complex basis viewed as interleaved doubles (n, 2n); the
    # rotations are real, so re and im parts rotate identically
    cdef Py_ssize_t width = zt.shape[1]
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t l, m, i, c
    cdef int it
    cdef bint underflow
    cdef double dd, g, r, s, co, p, f, b, zi, zj
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = fabs(d[m]) + fabs(d[m + 1])
                # absolute floor as in _pure._tql2
                if fabs(e[m]) <= DBL_EPSILON * dd or e[m] * e[m] <= DBL_MIN:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                return <int>(l + 1)
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + copysign(r, g))
            s = 1.0
            co = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = co * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                co = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * co * b
                p = s * r
                d[i + 1] = g + p
                g = co * r - b
                for c in range(width):
                    zi = zt[i, c]
                    zj = zt[i + 1, c]
                    zt[i, c] = co * zi - s * zj
                    zt[i + 1, c] = s * zi + co * zj
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def tridiagonal_eigh(a, int max_iter):
    """Eigen-decompose a Hermitian matrix; see ``_pure.tridiagonal_eigh``."""
    cdef double complex[:, ::1] work = np.array(a, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t n = work.shape[0]
    qt_arr = np.eye(n, dtype=np.complex128)
    d_arr = np.empty(n, dtype=np.float64)
    e_arr = np.zeros(n, dtype=np.float64)
    cdef double complex[:, ::1] qt = qt_arr
    cdef double[:, ::1] qtr = qt_arr.view(np.float64)
    cdef double[::1] d = d_arr
    cdef double[::1] e = e_arr
    cdef double complex[::1] v = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] p = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] w = np.empty(n, dtype=np.complex128)
    cdef int info = 0
    with nogil:
        if n == 1:
            d[0] = work[0, 0].real
        else:
            _householder(work, qt, v, p, w)
            _realify(work, qt, d, e)
            info = _tql2(d, e, qtr, max_iter)
    return d_arr, qt_arr, info
