# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Batched Hermitian eigensolver.

Each matrix in the stack is reduced to a real symmetric tridiagonal matrix by
complex Householder reflections, the subdiagonal phases are folded into the
accumulated unitary, and the tridiagonal problem is solved by implicit
shift QL iteration.  Written for stacks of small matrices, where the per-call
overhead of a general-purpose driver dominates the actual factorization work.
"""

import numpy as np

from libc.math cimport fabs, hypot, sqrt

ctypedef double complex zcomplex

cdef double EPS = 2.220446049250313e-16
cdef int MAX_SWEEPS = 64


cdef inline double _abs2(zcomplex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef int _reduce_and_solve(zcomplex[:, :, ::1] a, double[:, ::1] w,
                           zcomplex[:, :, ::1] q, zcomplex[::1] u,
                           zcomplex[::1] p, double[::1] e,
                           Py_ssize_t b, int n, bint vectors) noexcept nogil:
    cdef int i, j, k, r, c, m, l, it, broke, kmin
    cdef double xnorm2, xnorm, x0abs, kk
    cdef double dd, g, rr, s, cc, pp, f, bb, tmp
    cdef zcomplex x0, alpha, phase, acc, zf, ph, beta

    if vectors:
        for i in range(n):
            for j in range(n):
                q[b, i, j] = 1.0 if i == j else 0.0

    # Householder reduction: zero out column k below the first subdiagonal.
    for k in range(n - 2):
        xnorm2 = 0.0
        for i in range(k + 1, n):
            xnorm2 += _abs2(a[b, i, k])
        if xnorm2 == 0.0:
            continue
        x0 = a[b, k + 1, k]
        x0abs = sqrt(_abs2(x0))
        xnorm = sqrt(xnorm2)
        if x0abs > 0.0:
            phase = x0 / x0abs
        else:
            phase = 1.0
        # alpha carries the phase of x0 so that |v|^2 = 2*xnorm*(xnorm+|x0|)
        # never cancels.
        alpha = -phase * xnorm
        rr = 1.0 / sqrt(2.0 * xnorm * (xnorm + x0abs))
        u[k + 1] = (x0 - alpha) * rr
        for i in range(k + 2, n):
            u[i] = a[b, i, k] * rr
        # p = B u on the trailing block, kk = Re(u^H p)
        for r in range(k + 1, n):
            acc = 0.0
            for c in range(k + 1, n):
                acc = acc + a[b, r, c] * u[c]
            p[r] = acc
        kk = 0.0
        for r in range(k + 1, n):
            kk += (u[r].conjugate() * p[r]).real
        for r in range(k + 1, n):
            p[r] = p[r] - kk * u[r]
        # rank-two update B <- B - 2 u p^H - 2 p u^H keeps the block Hermitian
        for r in range(k + 1, n):
            for c in range(k + 1, n):
                a[b, r, c] = a[b, r, c] - 2.0 * (u[r] * p[c].conjugate()
                                                 + p[r] * u[c].conjugate())
        a[b, k + 1, k] = alpha
        a[b, k, k + 1] = alpha.conjugate()
        for i in range(k + 2, n):
            a[b, i, k] = 0.0
            a[b, k, i] = 0.0
        if vectors:
            for r in range(n):
                acc = 0.0
                for c in range(k + 1, n):
                    acc = acc + q[b, r, c] * u[c]
                acc = 2.0 * acc
                for c in range(k + 1, n):
                    q[b, r, c] = q[b, r, c] - acc * u[c].conjugate()

    # Strip subdiagonal phases so the tridiagonal matrix is real symmetric;
    # the diagonal phase matrix is absorbed into the eigenvector columns.
    w[b, 0] = a[b, 0, 0].real
    ph = 1.0
    for i in range(n - 1):
        w[b, i + 1] = a[b, i + 1, i + 1].real
        beta = a[b, i + 1, i]
        rr = sqrt(_abs2(beta))
        e[i] = rr
        if vectors:
            if rr > 0.0:
                ph = ph * (beta / rr)
            for r in range(n):
                q[b, r, i + 1] = q[b, r, i + 1] * ph
    e[n - 1] = 0.0

    # Implicit shift QL with eigenvector accumulation.
    for l in range(n):
        it = 0
        while True:
            m = n - 1
            for i in range(l, n - 1):
                dd = fabs(w[b, i]) + fabs(w[b, i + 1])
                if fabs(e[i]) <= EPS * dd:
                    m = i
                    break
            if m == l:
                break
            it += 1
            if it > MAX_SWEEPS:
                return -1
            g = (w[b, l + 1] - w[b, l]) / (2.0 * e[l])
            rr = hypot(g, 1.0)
            if g >= 0.0:
                g = w[b, m] - w[b, l] + e[l] / (g + rr)
            else:
                g = w[b, m] - w[b, l] + e[l] / (g - rr)
            s = 1.0
            cc = 1.0
            pp = 0.0
            broke = 0
            i = m - 1
            while i >= l:
                f = s * e[i]
                bb = cc * e[i]
                rr = hypot(f, g)
                e[i + 1] = rr
                if rr == 0.0:
                    w[b, i + 1] -= pp
                    e[m] = 0.0
                    broke = 1
                    break
                s = f / rr
                cc = g / rr
                g = w[b, i + 1] - pp
                rr = (w[b, i] - g) * s + 2.0 * cc * bb
                pp = s * rr
                w[b, i + 1] = g + pp
                g = cc * rr - bb
                if vectors:
                    for r in range(n):
                        zf = q[b, r, i + 1]
                        q[b, r, i + 1] = s * q[b, r, i] + cc * zf
                        q[b, r, i] = cc * q[b, r, i] - s * zf
                i -= 1
            if broke:
                continue
            w[b, l] -= pp
            e[l] = g
            e[m] = 0.0

    # Ascending selection sort, carrying eigenvector columns along.
    for i in range(n - 1):
        kmin = i
        for j in range(i + 1, n):
            if w[b, j] < w[b, kmin]:
                kmin = j
        if kmin != i:
            tmp = w[b, i]
            w[b, i] = w[b, kmin]
            w[b, kmin] = tmp
            if vectors:
                for r in range(n):
                    zf = q[b, r, i]
                    q[b, r, i] = q[b, r, kmin]
                    q[b, r, kmin] = zf
    return 0


def run(zcomplex[:, :, ::1] a, double[:, ::1] w, zcomplex[:, :, ::1] q,
        bint vectors):
    """Solve every matrix in the stack ``a`` in place (``a`` is destroyed)."""
    cdef Py_ssize_t nb = a.shape[0]
    cdef int n = <int> a.shape[1]
    u_arr = np.empty(n, dtype=np.complex128)
    p_arr = np.empty(n, dtype=np.complex128)
    e_arr = np.empty(n, dtype=np.float64)
    cdef zcomplex[::1] u = u_arr
    cdef zcomplex[::1] p = p_arr
    cdef double[::1] e = e_arr
    cdef Py_ssize_t b
    cdef int status = 0
    with nogil:
        for b in range(nb):
            status = _reduce_and_solve(a, w, q, u, p, e, b, n, vectors)
            if status != 0:
                break
    if status != 0:
        raise RuntimeError("QL iteration failed to converge")
