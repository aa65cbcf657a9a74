"""Truncated power series and Hankel positivity tests.

A convergent series f(x) = sum a_n x^n (about a center) is trace minmax
exactly when the shifted Hankel matrix with entries (s+i+j) a_{s+i+j},
s = 2, is positive semidefinite; the unweighted variant drops the factor
(s+i+j).  Only finite truncations are testable here, so every verdict is a
necessary finite shadow of the infinite condition.

Hankel truncations are capped at size 12 in double precision because the
conditioning of moment-type matrices grows exponentially with size; an
extended-precision mode (mpmath) raises the cap to 20.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import HermitianMatrix, _wrap

__all__ = [
    "DOUBLE_SIZE_CAP",
    "EXTENDED_SIZE_CAP",
    "HankelSpec",
    "PowerSeries",
    "build_hankel",
    "first_passing_shift",
    "hankel_psd_test",
    "hilbert_type_matrix",
    "series_exp",
    "series_from_csv",
    "series_log_neg",
    "weighted_to_unweighted_check",
]

DOUBLE_SIZE_CAP = 12
EXTENDED_SIZE_CAP = 20


class PowerSeries:
    """Finite truncated Taylor coefficients a_0..a_N about a real center."""

    __slots__ = ("center", "coeffs")

    def __init__(self, coeffs, center: float = 0.0):
        c = np.asarray(coeffs, dtype=float).copy()
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        self.coeffs = c
        self.center = float(center)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        z = np.asarray(x, dtype=float) - self.center
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def scaled(self, factor: float) -> "PowerSeries":
        return PowerSeries(self.coeffs * float(factor), center=self.center)

    def truncated(self, order: int) -> "PowerSeries":
        return PowerSeries(self.coeffs[: order + 1], center=self.center)

    def __repr__(self):
        return f"PowerSeries(order={self.order}, center={self.center!r})"


def series_log_neg(g: PowerSeries) -> PowerSeries:
    """Coefficients of -log g, from the recurrence g (log g)' = g'."""
    c = g.coeffs
    if c[0] <= 0.0:
        raise ValueError("series must have a positive constant term")
    n = c.size
    h = np.zeros(n)
    h[0] = math.log(c[0])
    for m in range(1, n):
        acc = m * c[m]
        for k in range(1, m):
            acc -= c[k] * (m - k) * h[m - k]
        h[m] = acc / (m * c[0])
    return PowerSeries(-h, center=g.center)


def series_exp(h: PowerSeries) -> PowerSeries:
    """Coefficients of exp h, from the recurrence (exp h)' = h' exp h."""
    c = h.coeffs
    n = c.size
    e = np.zeros(n)
    e[0] = math.exp(c[0])
    for m in range(1, n):
        acc = 0.0
        for k in range(1, m + 1):
            acc += k * c[k] * e[m - k]
        e[m] = acc / m
    return PowerSeries(e, center=h.center)


def series_from_csv(path, center: float = 0.0) -> PowerSeries:
    """One coefficient per line; blank lines and '#' comments are skipped."""
    coeffs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                coeffs.append(float(text))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {text!r}") from None
    if not coeffs:
        raise ValueError(f"{path}: no coefficients found")
    return PowerSeries(coeffs, center=center)


@dataclass(frozen=True)
class HankelSpec:
    """Shift (even, >= 2), truncation size, and weighted/unweighted choice."""

    start: int = 2
    size: int = 4
    weighted: bool = True

    def __post_init__(self):
        if self.start < 2 or self.start % 2 != 0:
            raise ValueError("start must be an even integer >= 2")
        if self.size < 1:
            raise ValueError("size must be positive")

    def max_index(self) -> int:
        return self.start + 2 * (self.size - 1)


def build_hankel(p: PowerSeries, spec: HankelSpec) -> HermitianMatrix:
    """Hankel truncation with entries (s+i+j) a_{s+i+j} (or a_{s+i+j})."""
    if spec.max_index() > p.order:
        raise ValueError(
            f"series order {p.order} too short for shift {spec.start} and "
            f"size {spec.size} (needs order >= {spec.max_index()})")
    idx = spec.start + np.add.outer(np.arange(spec.size), np.arange(spec.size))
    entries = p.coeffs[idx]
    if spec.weighted:
        entries = idx * entries
    return _wrap(entries.astype(np.complex128))


def _min_eig_extended(matrix: np.ndarray, dps: int = 40) -> float:
    import mpmath as mp

    with mp.workdps(dps):
        m = mp.matrix(matrix.tolist())
        eigenvalues = mp.eigsy(m, eigvals_only=True)
        return float(min(eigenvalues))


def hankel_psd_test(p: PowerSeries, spec: HankelSpec, tol: float = 1e-9,
                    extended: bool = False):
    """PSD verdict and minimum eigenvalue of the Hankel truncation.

    The verdict tolerance is relative to the largest entry magnitude, since
    rank-deficient moment matrices sit exactly on the PSD boundary.
    """
    cap = EXTENDED_SIZE_CAP if extended else DOUBLE_SIZE_CAP
    if spec.size > cap:
        raise ValueError(
            f"size {spec.size} exceeds the cap {cap} for this precision mode")
    h = build_hankel(p, spec)
    if extended:
        min_eig = _min_eig_extended(h.entries.real)
    else:
        min_eig = float(h.eigenvalues()[0])
    scale = max(1.0, float(np.max(np.abs(h.entries))))
    return min_eig >= -tol * scale, min_eig


def weighted_to_unweighted_check(p: PowerSeries, start: int, size: int) -> float:
    """Max deviation of [1/(s+i+j)] o weighted-Hankel from the unweighted one."""
    weighted = build_hankel(p, HankelSpec(start, size, weighted=True)).entries.real
    unweighted = build_hankel(p, HankelSpec(start, size, weighted=False)).entries.real
    recip = 1.0 / (start + np.add.outer(np.arange(size), np.arange(size)))
    return float(np.max(np.abs(recip * weighted - unweighted)))


def hilbert_type_matrix(start: int, size: int) -> np.ndarray:
    """[1/(s+i+j)]: the moment matrix of t^(s-1) dt on [0, 1]."""
    return 1.0 / (start + np.add.outer(np.arange(size), np.arange(size)))


def first_passing_shift(p: PowerSeries, size: int, k_max: int = 4,
                        tol: float = 1e-9, weighted: bool = True):
    """Smallest k in 1..k_max whose shift-2k Hankel passes, or None.

    Operationalizes the existential "some shift works" form of the test.
    """
    for k in range(1, k_max + 1):
        spec = HankelSpec(2 * k, size, weighted)
        if spec.max_index() > p.order:
            break
        ok, _ = hankel_psd_test(p, spec, tol=tol)
        if ok:
            return k
    return None
