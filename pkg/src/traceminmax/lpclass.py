"""Hadamard products x^k exp(-a - b x - c x^2) prod (1 - x/rho_i) e^{x/rho_i}.

Entire functions of this form with real nonzero roots and c >= 0 make up the
Laguerre-Polya class; on intervals where such a function is positive, its
negative logarithm is trace minmax, which is what ``neg_log_series`` plus the
Hankel tests of :mod:`traceminmax.series` verify at finite order.

Products are truncated at the listed roots.  The paired factor
(1 - x/rho) e^{x/rho} makes the omitted tail second order in x/rho, and a
product built with ``tail_moments`` applies the analytic tail correction and
reports a bound on what is left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .funcalc import ScalarFunction
from .series import HankelSpec, PowerSeries, hankel_psd_test, series_log_neg

__all__ = [
    "EvalWithBound",
    "HadamardProduct",
    "eval_product",
    "eval_product_with_bound",
    "inverse_gamma_product",
    "neg_log_series",
    "radical_membership_margin",
    "roots_from_csv",
]


@dataclass(frozen=True)
class HadamardProduct:
    """Truncated genus-one product.

    ``roots`` is a sequence of (rho, multiplicity) with real nonzero rho.
    ``tail_moments[j]`` holds sum over omitted roots of rho^{-(j+2)} (signed)
    and ``tail_abs_moments[j]`` the same sum of absolute values, one order
    further; both are optional and only sharpen evaluation of products that
    stand for an infinite one.
    """

    k: int = 0
    a: float = 0.0
    b: float = 0.0
    cq: float = 0.0
    roots: tuple = ()
    tail_moments: tuple = ()
    tail_abs_moments: tuple = field(default=(), repr=False)
    min_omitted_root: float = math.inf

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("root order k must be nonnegative")
        if self.cq < 0:
            raise ValueError("quadratic exponent must be nonnegative")
        for rho, mult in self.roots:
            if rho == 0.0 or not math.isfinite(rho):
                raise ValueError(f"roots must be real, nonzero and finite: {rho!r}")
            if mult < 1 or int(mult) != mult:
                raise ValueError(f"multiplicity must be a positive integer: {mult!r}")


def _root_arrays(h: HadamardProduct):
    if not h.roots:
        return np.empty(0), np.empty(0)
    rho = np.array([r for r, _ in h.roots], dtype=float)
    mult = np.array([m for _, m in h.roots], dtype=float)
    return rho, mult


def _tail_log_correction(h: HadamardProduct, x: float) -> float:
    # sum over omitted roots of log[(1 - x/rho) e^{x/rho}] = -sum_j x^j S_j / j
    acc = 0.0
    for j, s in enumerate(h.tail_moments, start=2):
        acc -= x ** j * s / j
    return acc


class EvalWithBound(NamedTuple):
    value: float
    bound: float  # bound on |log correction| still unaccounted for


def eval_product(h: HadamardProduct, x: float) -> float:
    """Signed value by log-domain accumulation; exact zeros at listed roots."""
    x = float(x)
    rho, mult = _root_arrays(h)
    sign = 1.0
    log_abs = -h.a - h.b * x - h.cq * x * x
    if h.k:
        if x == 0.0:
            return 0.0
        if x < 0.0 and h.k % 2 == 1:
            sign = -sign
        log_abs += h.k * math.log(abs(x))
    if rho.size:
        f = 1.0 - x / rho
        if np.any(f == 0.0):
            return 0.0
        neg = f < 0.0
        odd = mult.astype(int) % 2 == 1
        if np.count_nonzero(neg & odd) % 2 == 1:
            sign = -sign
        log_abs += float(np.sum(mult * (np.log(np.abs(f)) + x / rho)))
    log_abs += _tail_log_correction(h, x)
    return sign * math.exp(log_abs)


def eval_product_with_bound(h: HadamardProduct, x: float) -> EvalWithBound:
    """Value plus a bound on the relative error from the omitted tail."""
    value = eval_product(h, x)
    x = float(x)
    j_next = 2 + len(h.tail_moments)
    if len(h.tail_abs_moments) >= j_next - 1:
        s_next = h.tail_abs_moments[j_next - 2]
    elif h.tail_abs_moments:
        s_next = h.tail_abs_moments[-1]
    else:
        return EvalWithBound(value, 0.0)
    ratio = abs(x) / h.min_omitted_root if math.isfinite(h.min_omitted_root) else 0.0
    if ratio >= 1.0:
        return EvalWithBound(value, math.inf)
    bound = abs(x) ** j_next * s_next / (j_next * (1.0 - ratio))
    return EvalWithBound(value, bound)


def neg_log_series(h: HadamardProduct, center: float, order: int) -> PowerSeries:
    """Taylor coefficients of -log h about a point where h is positive.

    Assembled analytically from the shifted roots rho' = rho - center; tail
    moment corrections are not recentered and are ignored here.
    """
    c = float(center)
    if eval_product(h, c) <= 0.0:
        raise ValueError(f"product is not positive at center {c!r}")
    coeffs = np.zeros(order + 1)
    # quadratic exponent part: a + b x + cq x^2 recentered
    coeffs[0] += h.a + h.b * c + h.cq * c * c
    if order >= 1:
        coeffs[1] += h.b + 2.0 * h.cq * c
    if order >= 2:
        coeffs[2] += h.cq
    # -k log x part
    if h.k:
        if c == 0.0:
            raise ValueError("center must avoid the root at 0")
        coeffs[0] -= h.k * math.log(abs(c))
        for n in range(1, order + 1):
            coeffs[n] += h.k * (-1.0) ** n / (n * c ** n)
    # root factors: -log(1 - x/rho) - x/rho recentered
    for rho, mult in h.roots:
        shifted = rho - c
        if shifted == 0.0:
            raise ValueError(f"center coincides with the root {rho!r}")
        coeffs[0] += mult * (-math.log(abs(1.0 - c / rho)) - c / rho)
        if order >= 1:
            coeffs[1] += mult * (1.0 / shifted - 1.0 / rho)
        for n in range(2, order + 1):
            coeffs[n] += mult / (n * shifted ** n)
    return PowerSeries(coeffs, center=c)


def radical_membership_margin(g: ScalarFunction, interval, n_root: int = 1,
                              size: int = 6) -> float:
    """Finite membership test for the radical class on an interval.

    Returns the minimum eigenvalue of the weighted Hankel built from the
    series of -log(g)/n_root at the interval midpoint; membership of g^(1/n)
    requires it to be nonnegative.
    """
    a, b = float(interval[0]), float(interval[1])
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ValueError("interval must be finite and nonempty")
    if n_root < 1:
        raise ValueError("n_root must be a positive integer")
    mid = 0.5 * (a + b)
    order = 2 * size
    p = g.taylor(mid, order + 1)
    neg_log = series_log_neg(p).scaled(1.0 / n_root)
    _, min_eig = hankel_psd_test(neg_log, HankelSpec(2, size, weighted=True))
    return min_eig


def inverse_gamma_product(n_roots: int, tail_order: int = 4) -> HadamardProduct:
    """1/Gamma as a product over its roots at -1, -2, ..., -n_roots.

    1/Gamma(x) = x e^{gamma x} prod (1 + x/m) e^{-x/m}; tail moments through
    ``tail_order`` absorb the omitted roots analytically.
    """
    if n_roots < 1:
        raise ValueError("need at least one root")
    roots = tuple((-float(m), 1) for m in range(1, n_roots + 1))
    tail, tail_abs = [], []
    for j in range(2, tail_order + 1):
        sigma = _zeta_tail(j, n_roots)
        tail.append((-1.0) ** j * sigma)
        tail_abs.append(sigma)
    tail_abs.append(_zeta_tail(tail_order + 1, n_roots))
    return HadamardProduct(
        k=1, a=0.0, b=-float(np.euler_gamma), cq=0.0, roots=roots,
        tail_moments=tuple(tail), tail_abs_moments=tuple(tail_abs),
        min_omitted_root=float(n_roots + 1),
    )


def _zeta_tail(j: int, m: int) -> float:
    # sum_{n > m} n^{-j} by Euler-Maclaurin; error O(m^{-j-3})
    m = float(m)
    return (1.0 / ((j - 1) * m ** (j - 1)) - 1.0 / (2.0 * m ** j)
            + j / (12.0 * m ** (j + 1)))


def roots_from_csv(path):
    """One real root per line; shares the zero-table format."""
    roots = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                value = float(text)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {text!r}") from None
            if value == 0.0:
                raise ValueError(f"{path}:{lineno}: roots must be nonzero")
            roots.append((value, 1))
    return tuple(roots)
