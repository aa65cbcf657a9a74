"""Hermitian matrix primitives.

Construction with exact symmetrization, cached spectral decompositions, and
positive semidefiniteness tests defining the Loewner partial order.  The
eigensolver lives in :mod:`traceminmax._kernel`; everything here is a thin,
immutable layer over it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernel import BACKEND, eigh_stack, eigvalsh_stack  # noqa: F401

__all__ = [
    "HERMITIAN_ATOL",
    "HermitianMatrix",
    "NotHermitianError",
    "SpectralDecomposition",
    "diag",
    "eigh",
    "eigvalsh_many",
    "identity",
    "is_psd",
    "loewner_leq",
    "random_hermitian",
    "random_unitary",
]

HERMITIAN_ATOL = 1e-14


class NotHermitianError(ValueError):
    """Input is not square or deviates from self-adjointness beyond tolerance."""


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues with a unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


class HermitianMatrix:
    """Square self-adjoint complex matrix with a cached spectral decomposition.

    Entries are checked against the conjugate transpose within ``atol``
    (absolute) and then symmetrized exactly, so the stored array satisfies
    ``entries == entries.conj().T`` bit for bit.  Instances are immutable
    after construction and safe to share between worker threads.
    """

    __slots__ = ("n", "entries", "_eigenvalues", "_spectral")

    def __init__(self, entries, *, atol: float = HERMITIAN_ATOL):
        m = np.asarray(entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise NotHermitianError(f"expected a square matrix, got shape {m.shape}")
        m = m.astype(np.complex128, copy=False)
        dev = float(np.max(np.abs(m - m.conj().T)))
        if dev > atol:
            raise NotHermitianError(
                f"matrix deviates from self-adjointness by {dev:.3e} "
                f"(allowed {atol:.1e})")
        sym = (m + m.conj().T) / 2.0
        sym.setflags(write=False)
        self.n = int(sym.shape[0])
        self.entries = sym
        self._eigenvalues = None
        self._spectral = None

    # -- spectral data -----------------------------------------------------

    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues (cached; skips eigenvector accumulation)."""
        if self._eigenvalues is None:
            if self._spectral is not None:
                self._eigenvalues = self._spectral.eigenvalues
            else:
                w = eigvalsh_stack(self.entries)
                w.setflags(write=False)
                self._eigenvalues = w
        return self._eigenvalues

    def spectral(self) -> SpectralDecomposition:
        """Full cached spectral decomposition."""
        if self._spectral is None:
            w, q = eigh_stack(self.entries)
            w.setflags(write=False)
            q.setflags(write=False)
            self._spectral = SpectralDecomposition(w, q)
            self._eigenvalues = w
        return self._spectral

    # -- scalar summaries --------------------------------------------------

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def operator_norm(self) -> float:
        w = self.eigenvalues()
        return float(max(abs(w[0]), abs(w[-1])))

    def spectral_radius(self) -> float:
        return self.operator_norm()

    # -- arithmetic (results are exactly Hermitian, validation skipped) -----

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return _wrap(self.entries + other.entries)

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return _wrap(self.entries - other.entries)

    def scaled(self, factor: float) -> "HermitianMatrix":
        return _wrap(self.entries * float(factor))

    def __repr__(self):
        return f"HermitianMatrix(n={self.n})"


def _wrap(entries: np.ndarray) -> HermitianMatrix:
    """Trusted constructor for arrays that are already exactly Hermitian."""
    obj = object.__new__(HermitianMatrix)
    arr = np.asarray(entries, dtype=np.complex128)
    arr.setflags(write=False)
    obj.n = int(arr.shape[0])
    obj.entries = arr
    obj._eigenvalues = None
    obj._spectral = None
    return obj


def eigh(x: HermitianMatrix) -> SpectralDecomposition:
    return x.spectral()


def eigvalsh_many(stack: np.ndarray) -> np.ndarray:
    """Eigenvalues for a raw ``(m, n, n)`` stack (campaign fast path)."""
    return eigvalsh_stack(stack)


def is_psd(x: HermitianMatrix, tol: float = 1e-12) -> bool:
    """True iff the minimum eigenvalue is at least ``-tol * max(1, |entries|)``.

    The tolerance is relative to the largest entry magnitude with a floor of
    one, so inequalities that hold with equality test stably at any scale.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    scale = max(1.0, float(np.max(np.abs(x.entries))))
    return float(x.eigenvalues()[0]) >= -tol * scale


def loewner_leq(a: HermitianMatrix, b: HermitianMatrix, tol: float = 1e-12) -> bool:
    """Loewner order test: ``a <= b`` iff ``b - a`` is positive semidefinite."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    return is_psd(b - a, tol)


def identity(n: int) -> HermitianMatrix:
    return _wrap(np.eye(n, dtype=np.complex128))


def diag(values) -> HermitianMatrix:
    v = np.asarray(values, dtype=float)
    return _wrap(np.diag(v).astype(np.complex128))


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> HermitianMatrix:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return _wrap((g + g.conj().T) * (scale / 2.0))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish unitary from the QR of a complex Gaussian matrix."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))
