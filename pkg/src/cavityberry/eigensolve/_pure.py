"""Pure numpy implementation of the Hermitian eigenkernel.

Same algorithm and output layout as the compiled ``_kernels`` module:
Householder reduction to Hermitian tridiagonal form, a diagonal phase
scaling that makes the off-diagonal real, then implicit-shift QL on the
real tridiagonal matrix with the rotations accumulated into the complex
basis.
"""
import math

import numpy as np

_EPS = np.finfo(float).eps
# a column tail below sqrt of this is dropped rather than reflected: for the
# O(1)-scaled input the perturbation is far below eps and h ~ |x|^2 stays normal
_TINY_TAIL = 1e-300
_SAFMIN = np.finfo(float).tiny


def _householder(a, qt):
    """Reduce Hermitian ``a`` in place; accumulate ``qt = Q^T``.

    Returns the diagonal and the complex sub-diagonal of ``Q^H a Q``.
    """
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1:, k].copy()
        tail = float(np.vdot(x[1:], x[1:]).real)
        if tail < _TINY_TAIL:
            # (numerically) tridiagonal in this column; a complex x[0] is fine
            a[k + 2:, k] = 0.0
            a[k, k + 2:] = 0.0
            continue
        ax0 = abs(x[0])
        xnorm = math.sqrt(tail + ax0 * ax0)
        phase = _unit(x[0], ax0)
        v = x
        v[0] += phase * xnorm
        h = xnorm * (xnorm + ax0)

        b = a[k + 1:, k + 1:]
        p = (b @ v) / h
        kk = np.vdot(v, p).real / (2.0 * h)
        q = p - kk * v
        b -= np.outer(q, v.conj()) + np.outer(v, q.conj())

        a[k + 1, k] = -phase * xnorm
        a[k, k + 1] = np.conj(a[k + 1, k])
        a[k + 2:, k] = 0.0
        a[k, k + 2:] = 0.0

        rows = qt[k + 1:, :]
        w = v @ rows
        rows -= np.outer(v.conj(), w) / h

    d = a.diagonal().real.copy()
    e = a.diagonal(-1).copy()
    return d, e


def _unit(z, mag):
    """``z / |z|`` with unit modulus to rounding even for subnormal ``z``.

    Components are first divided by the larger of the two, so the final
    normalization works on O(1) numbers.
    """
    if mag == 0.0:
        return 1.0 + 0.0j
    big = max(abs(z.real), abs(z.imag))
    re, im = z.real / big, z.imag / big
    r = math.hypot(re, im)
    return complex(re / r, im / r)


def _realify(e, qt):
    """Rescale basis rows so the sub-diagonal becomes real and non-negative."""
    n = qt.shape[0]
    off = np.zeros(n)
    delta = 1.0 + 0.0j
    for i in range(n - 1):
        mag = abs(e[i])
        if mag != 0.0:
            delta = delta * _unit(e[i], mag)
        off[i] = mag
        qt[i + 1, :] *= delta
    return off


def _tql2(d, e, zt, max_iter):
    """Implicit QL on the real tridiagonal (d, e); rotate rows of ``zt``.

    ``e[i]`` couples ``d[i]`` and ``d[i+1]``; ``e[n-1]`` is workspace.
    Returns 0 on success or ``l + 1`` for the first unconverged index.
    """
    n = d.shape[0]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                # the absolute floor (as in LAPACK's steqr) deflates couplings
                # whose products would underflow and stall the sweep
                if abs(e[m]) <= _EPS * dd or e[m] * e[m] <= _SAFMIN:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                return l + 1
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = zt[i].copy()
                zt[i] = c * zi - s * zt[i + 1]
                zt[i + 1] = s * zi + c * zt[i + 1]
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def tridiagonal_eigh(a, max_iter):
    """Eigen-decompose a Hermitian matrix.

    Parameters
    ----------
    a : (n, n) complex ndarray
        Hermitian input; not modified.
    max_iter : int
        QL iteration cap per eigenvalue.

    Returns
    -------
    w : (n,) float ndarray
        Eigenvalues, unsorted.
    vt : (n, n) complex ndarray
        Row ``j`` is the eigenvector paired with ``w[j]``.
    info : int
        0 on success, otherwise ``l + 1`` for the index that failed.
    """
    a = np.array(a, dtype=np.complex128, order="C", copy=True)
    n = a.shape[0]
    qt = np.eye(n, dtype=np.complex128)
    if n == 1:
        return a.diagonal().real.copy(), qt, 0
    d, ec = _householder(a, qt)
    off = _realify(ec, qt)
    e = np.zeros(n)
    e[: n - 1] = off[: n - 1]
    info = _tql2(d, e, qt, max_iter)
    return d, qt, info
