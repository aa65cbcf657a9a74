"""Pure NumPy fallback for the compiled eigensolver kernel.

Same algorithm as the compiled version: complex Householder reduction to a
real symmetric tridiagonal matrix followed by implicit shift QL with
accumulated rotations.  Per-matrix cost here is dominated by interpreter
overhead, so the public wrapper prefers the compiled kernel whenever it is
importable.
"""

import numpy as np

_EPS = float(np.finfo(float).eps)
_MAX_SWEEPS = 64


def _tridiagonalize(a, q, vectors):
    n = a.shape[0]
    for k in range(n - 2):
        col = a[k + 1:, k]
        xnorm2 = float(np.sum(col.real ** 2 + col.imag ** 2))
        if xnorm2 == 0.0:
            continue
        x0 = a[k + 1, k]
        x0abs = abs(x0)
        xnorm = np.sqrt(xnorm2)
        phase = x0 / x0abs if x0abs > 0.0 else 1.0 + 0.0j
        alpha = -phase * xnorm
        u = col.copy()
        u[0] = x0 - alpha
        u /= np.sqrt(2.0 * xnorm * (xnorm + x0abs))
        blk = a[k + 1:, k + 1:]
        p = blk @ u
        kk = float(np.vdot(u, p).real)
        p -= kk * u
        blk -= 2.0 * (np.outer(u, p.conj()) + np.outer(p, u.conj()))
        a[k + 1, k] = alpha
        a[k, k + 1] = np.conj(alpha)
        a[k + 2:, k] = 0.0
        a[k, k + 2:] = 0.0
        if vectors:
            qs = q[:, k + 1:]
            qs -= 2.0 * np.outer(qs @ u, u.conj())
    d = a.diagonal().real.copy()
    e = np.zeros(n)
    if n > 1:
        sub = a[np.arange(1, n), np.arange(n - 1)]
        e[: n - 1] = np.abs(sub)
        if vectors:
            ph = np.ones(n, dtype=np.complex128)
            for i in range(n - 1):
                r = abs(sub[i])
                ph[i + 1] = ph[i] * (sub[i] / r) if r > 0.0 else ph[i]
            q *= ph
    return d, e


def _ql(d, e, q, vectors):
    n = d.shape[0]
    for l in range(n):
        it = 0
        while True:
            m = n - 1
            for i in range(l, n - 1):
                dd = abs(d[i]) + abs(d[i + 1])
                if abs(e[i]) <= _EPS * dd:
                    m = i
                    break
            if m == l:
                break
            it += 1
            if it > _MAX_SWEEPS:
                raise RuntimeError("QL iteration failed to converge")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = float(np.hypot(g, 1.0))
            g = d[m] - d[l] + e[l] / (g + r if g >= 0.0 else g - r)
            s = c = 1.0
            p = 0.0
            broke = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = float(np.hypot(f, g))
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    broke = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if vectors:
                    zi = q[:, i].copy()
                    zi1 = q[:, i + 1].copy()
                    q[:, i + 1] = s * zi + c * zi1
                    q[:, i] = c * zi - s * zi1
            if broke:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0


def run(a, w, q, vectors):
    """Mirror of the compiled kernel entry point; ``a`` is destroyed."""
    nb = a.shape[0]
    n = a.shape[1]
    for b in range(nb):
        ab = a[b]
        qb = q[b] if vectors else None
        if vectors:
            qb[...] = np.eye(n, dtype=np.complex128)
        d, e = _tridiagonalize(ab, qb, vectors)
        _ql(d, e, qb, vectors)
        order = np.argsort(d, kind="stable")
        w[b] = d[order]
        if vectors:
            qb[...] = qb[:, order]
