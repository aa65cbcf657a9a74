"""Integral representations f(z) = alpha + beta z + sum w_i K(t_i, z; c).

The kernel is K(t, z; c) = (-log(1 - t(z-c)) - t(z-c)) / t^2, extended to
t = 0 by its series limit (z-c)^2 / 2.  Forward evaluation sums the kernel
over a finitely supported measure; inversion recovers the atoms from Taylor
coefficients through the moment identity n a_n = integral t^(n-2) dmu and a
Gauss-quadrature (moment Hankel -> Jacobi matrix) extraction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .funcalc import ScalarFunction
from .linalg import _wrap
from .series import PowerSeries

__all__ = [
    "MomentProblemError",
    "MomentSequence",
    "PickRepresentation",
    "RecoveredMeasure",
    "coeffs_to_moments",
    "eval_representation",
    "eval_representation_deriv",
    "kernel",
    "recover_measure",
    "represent",
    "representation_from_dict",
    "representation_to_dict",
    "roundtrip_residual",
]


class MomentProblemError(ValueError):
    """The input is not (numerically) a moment sequence of a positive measure."""


# -- kernel -----------------------------------------------------------------

_SMALL_W = 1e-4
# phi(w) = (-log(1-w) - w) / w^2 = sum_{k>=0} w^k / (k+2); series below 1e-4
# keeps the relative error at the 1e-35 level.
_PHI_SERIES_TERMS = 8


def _phi(w):
    # w is 1-d
    if np.any(1.0 - w <= 0.0):
        bad = float(w[1.0 - w <= 0.0][0])
        raise ValueError(f"kernel argument 1 - t(z-c) must be positive (w={bad!r})")
    out = np.empty_like(w)
    small = np.abs(w) < _SMALL_W
    ws = w[small]
    acc = np.full_like(ws, 1.0 / (_PHI_SERIES_TERMS + 2))
    for k in range(_PHI_SERIES_TERMS - 1, -1, -1):
        acc = acc * ws + 1.0 / (k + 2)
    out[small] = acc
    wl = w[~small]
    out[~small] = (-np.log1p(-wl) - wl) / (wl * wl)
    return out


def kernel(t: float, z, c: float = 0.0):
    """K(t, z; c); the t = 0 value is the series limit (z-c)^2 / 2."""
    zarr = np.asarray(z, dtype=float)
    scalar = zarr.ndim == 0
    d = np.atleast_1d(zarr) - c
    val = d * d * _phi(t * d)
    return float(val[0]) if scalar else val


def _kernel_deriv(t: float, z, c: float = 0.0):
    # d/dz K = (z-c) / (1 - t(z-c))
    zarr = np.asarray(z, dtype=float)
    scalar = zarr.ndim == 0
    d = np.atleast_1d(zarr) - c
    denom = 1.0 - t * d
    if np.any(denom <= 0.0):
        raise ValueError("kernel argument 1 - t(z-c) must be positive")
    val = d / denom
    return float(val[0]) if scalar else val


# -- representation ---------------------------------------------------------


@dataclass(frozen=True)
class PickRepresentation:
    """(alpha, beta, center, atomic measure) on an open interval.

    Atom locations must lie in [1/(a-c), 1/(b-c)] (an infinite endpoint
    contributes 0) and weights must be positive.
    """

    alpha: float
    beta: float
    center: float
    interval: tuple
    atoms: tuple

    def __post_init__(self):
        a, b = self.interval
        if not a < self.center < b:
            raise ValueError("center must lie inside the interval")
        lo = 1.0 / (a - self.center) if math.isfinite(a) else 0.0
        hi = 1.0 / (b - self.center) if math.isfinite(b) else 0.0
        slack = 1e-12 * max(1.0, abs(lo), abs(hi))
        for t, w in self.atoms:
            if w <= 0.0:
                raise ValueError(f"atom weight must be positive, got {w!r}")
            if not lo - slack <= t <= hi + slack:
                raise ValueError(
                    f"atom location {t!r} outside [{lo!r}, {hi!r}]")


def eval_representation(rep: PickRepresentation, z):
    zarr = np.asarray(z, dtype=float)
    scalar = zarr.ndim == 0
    zz = np.atleast_1d(zarr)
    out = rep.alpha + rep.beta * zz
    for t, w in rep.atoms:
        out = out + w * kernel(t, zz, rep.center)
    return float(out[0]) if scalar else out


def eval_representation_deriv(rep: PickRepresentation, z):
    zarr = np.asarray(z, dtype=float)
    scalar = zarr.ndim == 0
    zz = np.atleast_1d(zarr)
    out = rep.beta + np.zeros_like(zz)
    for t, w in rep.atoms:
        out = out + w * _kernel_deriv(t, zz, rep.center)
    return float(out[0]) if scalar else out


def representation_to_dict(rep: PickRepresentation) -> dict:
    a, b = rep.interval
    return {
        "alpha": rep.alpha,
        "beta": rep.beta,
        "center": rep.center,
        "interval": [a, b],
        "atoms": [[t, w] for t, w in rep.atoms],
    }


def representation_from_dict(data: dict) -> PickRepresentation:
    return PickRepresentation(
        alpha=float(data["alpha"]),
        beta=float(data["beta"]),
        center=float(data["center"]),
        interval=(float(data["interval"][0]), float(data["interval"][1])),
        atoms=tuple((float(t), float(w)) for t, w in data["atoms"]),
    )


# -- moments and inversion ----------------------------------------------------


@dataclass(frozen=True)
class MomentSequence:
    """m_0..m_K; a genuine moment sequence has a PSD Hankel [m_{i+j}]."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).copy()
        if v.ndim != 1 or v.size == 0 or not np.all(np.isfinite(v)):
            raise ValueError("moments must be a finite nonempty 1-d sequence")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def hankel(self, size: int) -> np.ndarray:
        if 2 * (size - 1) >= self.values.size:
            raise ValueError("not enough moments for the requested Hankel size")
        idx = np.add.outer(np.arange(size), np.arange(size))
        return self.values[idx]


def coeffs_to_moments(p: PowerSeries) -> MomentSequence:
    """m_k = (k+2) a_{k+2}: the moment sequence of the representing measure."""
    if p.order < 4:
        raise ValueError("need series order >= 4 for moment extraction")
    k = np.arange(p.order - 1)
    return MomentSequence((k + 2) * p.coeffs[2:])


class RecoveredMeasure(NamedTuple):
    atoms: tuple
    truncated: bool
    moment_residual: float


def recover_measure(moments, n_atoms: int, *, psd_tol: float = 1e-8,
                    rank_tol: float = 1e-12, check: bool = True) -> RecoveredMeasure:
    """Atoms of a measure from its raw moments, via the Jacobi matrix.

    Cholesky of the moment Hankel yields the three-term recurrence; the
    eigenvalues of the tridiagonal Jacobi matrix are the atom locations and
    m_0 times the squared first eigenvector components are the weights.  A
    Hankel that is indefinite beyond ``psd_tol`` (relative) raises
    :class:`MomentProblemError`; a rank-deficient Hankel yields fewer atoms
    than requested, flagged by ``truncated``.
    """
    m = np.asarray(moments.values if isinstance(moments, MomentSequence) else moments,
                   dtype=float)
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    if m.size < 2 * n_atoms + 1:
        raise ValueError(
            f"need {2 * n_atoms + 1} moments for {n_atoms} atoms, got {m.size}")
    size = n_atoms + 1
    idx = np.add.outer(np.arange(size), np.arange(size))
    h = m[idx]
    scale = max(1.0, float(np.max(np.abs(m))))
    min_eig = float(_wrap(h.astype(np.complex128)).eigenvalues()[0])
    if min_eig < -psd_tol * scale:
        raise MomentProblemError(
            f"not a moment sequence: Hankel minimum eigenvalue {min_eig:.3e}")

    # upper-trapezoidal Cholesky with rank detection; the final pivot is
    # never divided by, so exactly-atomic (rank deficient) inputs are fine
    r = np.zeros((size, size))
    k_eff = n_atoms
    truncated = False
    for i in range(size):
        pivot = h[i, i] - float(np.dot(r[:i, i], r[:i, i]))
        if i == n_atoms:
            break
        if pivot <= rank_tol * scale:
            k_eff = i
            truncated = True
            break
        r[i, i] = math.sqrt(pivot)
        r[i, i + 1:] = (h[i, i + 1:] - r[:i, i] @ r[:i, i + 1:]) / r[i, i]

    if k_eff == 0:
        return RecoveredMeasure((), True, 0.0)

    alpha = np.empty(k_eff)
    beta = np.empty(max(k_eff - 1, 0))
    for j in range(k_eff):
        alpha[j] = r[j, j + 1] / r[j, j]
        if j > 0:
            alpha[j] -= r[j - 1, j] / r[j - 1, j - 1]
        if j < k_eff - 1:
            beta[j] = r[j + 1, j + 1] / r[j, j]
    jacobi = np.diag(alpha).astype(np.complex128)
    if k_eff > 1:
        jacobi += np.diag(beta, 1) + np.diag(beta, -1)
    spec = _wrap(jacobi).spectral()
    nodes = spec.eigenvalues
    weights = m[0] * np.abs(spec.eigenvectors[0, :]) ** 2

    atoms = tuple(sorted((float(t), float(w)) for t, w in zip(nodes, weights)))
    residual = _moment_residual(atoms, m[: 2 * n_atoms])
    if check and residual > 1e-8:
        raise MomentProblemError(
            f"recovered atoms reproduce the moments only to {residual:.3e}")
    return RecoveredMeasure(atoms, truncated, residual)


def _moment_residual(atoms, m) -> float:
    worst = 0.0
    scale = max(1.0, float(np.max(np.abs(m)))) if len(m) else 1.0
    for j, target in enumerate(m):
        got = sum(w * t ** j for t, w in atoms)
        worst = max(worst, abs(got - target) / scale)
    return worst


# -- round trip ---------------------------------------------------------------


def represent(f: ScalarFunction, center: float, n_atoms: int,
              order: int | None = None) -> PickRepresentation:
    """Recover (alpha, beta, mu) for f about a center from its Taylor series."""
    if order is None:
        order = max(2 * n_atoms + 2, 10)
    p = f.taylor(center, order + 1)
    moments = coeffs_to_moments(p)
    recovered = recover_measure(moments, n_atoms)
    a0, a1 = float(p.coeffs[0]), float(p.coeffs[1])
    return PickRepresentation(
        alpha=a0 - a1 * center,
        beta=a1,
        center=float(center),
        interval=f.domain,
        atoms=recovered.atoms,
    )


def roundtrip_residual(f: ScalarFunction, center: float, n_atoms: int,
                       points: int = 50, radius: float | None = None) -> float:
    """Max |f - representation| over a grid at half distance to the boundary."""
    rep = represent(f, center, n_atoms)
    if radius is None:
        a, b = f.domain
        dist = min(center - a if math.isfinite(a) else math.inf,
                   b - center if math.isfinite(b) else math.inf)
        radius = 1.0 if math.isinf(dist) else 0.5 * dist
    grid = np.linspace(center - radius, center + radius, points)
    return float(np.max(np.abs(f.eval(grid) - eval_representation(rep, grid))))


def save_representation(rep: PickRepresentation, path) -> None:
    with open(path, "w") as fh:
        json.dump(representation_to_dict(rep), fh, indent=2, sort_keys=True)
        fh.write("\n")
