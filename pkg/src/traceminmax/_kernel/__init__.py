"""Kernel backend selection.

The compiled Cython kernel is preferred; a pure NumPy implementation of the
same algorithm is the fallback when the extension has not been built.  Set
``TRACEMINMAX_KERNEL=python`` or ``=compiled`` to force a backend.
"""

import contextlib
import os

import numpy as np

from . import eigh_py

try:
    from . import _ceigh
except ImportError:
    _ceigh = None

_IMPLS = {"python": eigh_py}
if _ceigh is not None:
    _IMPLS["compiled"] = _ceigh


def _select_default():
    forced = os.environ.get("TRACEMINMAX_KERNEL", "").strip().lower()
    if forced in ("", "auto"):
        return "compiled" if _ceigh is not None else "python"
    if forced not in _IMPLS:
        have = ", ".join(sorted(_IMPLS))
        raise ImportError(
            f"TRACEMINMAX_KERNEL={forced!r} is not available (have: {have})")
    return forced


BACKEND = _select_default()
_impl = _IMPLS[BACKEND]


def available_backends():
    return tuple(sorted(_IMPLS))


@contextlib.contextmanager
def use_backend(name):
    """Temporarily switch the kernel backend (tests and benchmarks only)."""
    global BACKEND, _impl
    if name not in _IMPLS:
        raise ValueError(f"unknown backend {name!r}")
    prev = BACKEND
    BACKEND, _impl = name, _IMPLS[name]
    try:
        yield
    finally:
        BACKEND, _impl = prev, _IMPLS[prev]


def _prepare(a):
    arr = np.array(a, dtype=np.complex128, order="C", copy=True)
    single = arr.ndim == 2
    if single:
        arr = arr[None, :, :]
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2] or arr.shape[1] < 1:
        raise ValueError("expected a square matrix or a stack of square matrices")
    return arr, single


def eigh_stack(a, impl=None):
    """Eigenvalues (ascending) and eigenvector columns for a matrix or stack."""
    mod = _IMPLS[impl] if impl is not None else _impl
    buf, single = _prepare(a)
    nb, n, _ = buf.shape
    w = np.empty((nb, n))
    q = np.empty((nb, n, n), dtype=np.complex128)
    mod.run(buf, w, q, True)
    return (w[0], q[0]) if single else (w, q)


def eigvalsh_stack(a, impl=None):
    """Eigenvalues only; noticeably cheaper than :func:`eigh_stack`."""
    mod = _IMPLS[impl] if impl is not None else _impl
    buf, single = _prepare(a)
    nb, n, _ = buf.shape
    w = np.empty((nb, n))
    q = np.empty((1, 1, 1), dtype=np.complex128)
    mod.run(buf, w, q, False)
    return w[0] if single else w
