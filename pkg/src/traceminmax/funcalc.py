"""Matrix functional calculus.

Evaluates f(X) through the spectral decomposition, computes the first
Fréchet derivative in Daleckii-Krein form (divided-difference matrix Schur
multiplied against the rotated perturbation) and the traced second
derivative, and exposes the trace-duality residual
|tr Df(X)[H] - tr H f'(X)| used as a verification target.

Scalar functions carry analytic first and second derivatives plus optional
Taylor-coefficient access; the builtin registry covers the monomials,
exponentials, the logarithmic kernels -log(1 - t(x - c)) and -log x, real
powers x^t on (0, oo), and user-supplied polynomials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .linalg import HermitianMatrix, _wrap
from .series import PowerSeries, series_exp

__all__ = [
    "DomainError",
    "ScalarFunction",
    "apply",
    "builtin_names",
    "check_spectrum_in_domain",
    "divided_difference_matrix",
    "exp_function",
    "frechet",
    "function_product",
    "function_sum",
    "gauss_function",
    "neg_exp_of",
    "neglog1m_function",
    "neglog_function",
    "poly_function",
    "power_function",
    "resolve_function",
    "second_derivative_trace",
    "trace_duality_residual",
    "unitary_equivariance_residual",
]

# Eigenvalue pairs closer than this (relative) use the midpoint derivative in
# divided differences, avoiding cancellation.
CLOSE_EIGENVALUE_RTOL = 1e-8


class DomainError(ValueError):
    """A spectrum point falls outside the open domain of a scalar function."""


@dataclass(frozen=True)
class ScalarFunction:
    """Real function on an open interval with analytic derivatives.

    ``eval``/``deriv``/``deriv2`` accept and return NumPy arrays. ``taylor_fn``
    maps ``(center, count)`` to the first ``count`` Taylor coefficients about
    ``center`` and may be absent for functions without convenient series.
    """

    name: str
    domain: tuple
    eval: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]
    deriv2: Optional[Callable[[np.ndarray], np.ndarray]] = None
    taylor_fn: Optional[Callable[[float, int], np.ndarray]] = field(default=None, repr=False)

    def __call__(self, x):
        return self.eval(np.asarray(x, dtype=float))

    def contains(self, x: float) -> bool:
        a, b = self.domain
        return a < x < b

    def derivative(self) -> "ScalarFunction":
        """f' as a scalar function; its own second derivative is unavailable."""
        tf = None
        if self.taylor_fn is not None:
            parent = self.taylor_fn

            def tf(center, count):
                c = parent(center, count + 1)
                return c[1:] * np.arange(1, count + 1)

        return ScalarFunction(
            name=self.name + "'",
            domain=self.domain,
            eval=self.deriv,
            deriv=self.deriv2 if self.deriv2 is not None else _missing_deriv(self.name),
            deriv2=None,
            taylor_fn=tf,
        )

    def taylor(self, center: float, count: int) -> PowerSeries:
        if self.taylor_fn is None:
            raise ValueError(f"function {self.name!r} has no Taylor access")
        if not self.contains(center):
            raise DomainError(f"center {center} outside domain of {self.name!r}")
        return PowerSeries(self.taylor_fn(float(center), int(count)), center=float(center))


def _missing_deriv(name):
    def raiser(x):
        raise ValueError(f"second derivative of {name!r} is not available")

    return raiser


def check_spectrum_in_domain(f: ScalarFunction, eigenvalues: np.ndarray) -> None:
    a, b = f.domain
    lo, hi = float(np.min(eigenvalues)), float(np.max(eigenvalues))
    if lo <= a or hi >= b:
        bad = lo if lo <= a else hi
        raise DomainError(
            f"eigenvalue {bad!r} outside the domain ({a}, {b}) of {f.name!r}")


# ---------------------------------------------------------------------------
# builtin function constructors


def poly_function(coeffs, name: Optional[str] = None) -> ScalarFunction:
    """Real polynomial from ascending coefficients."""
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)):
        raise ValueError("polynomial coefficients must be a finite 1-d sequence")
    d1 = np.polynomial.polynomial.polyder(c) if c.size > 1 else np.zeros(1)
    d2 = np.polynomial.polynomial.polyder(c, 2) if c.size > 2 else np.zeros(1)
    pv = np.polynomial.polynomial.polyval

    def taylor_shift(center, count):
        # coefficient k is p^(k)(center)/k!
        out = np.zeros(count)
        for k in range(min(count, c.size)):
            dk = np.polynomial.polynomial.polyder(c, k) if k else c
            out[k] = pv(center, dk) / math.factorial(k)
        return out

    return ScalarFunction(
        name=name or "poly[" + ",".join(repr(float(x)) for x in c) + "]",
        domain=(-math.inf, math.inf),
        eval=lambda x: pv(x, c),
        deriv=lambda x: pv(x, d1),
        deriv2=lambda x: pv(x, d2),
        taylor_fn=taylor_shift,
    )


def exp_function(sign: int = 1) -> ScalarFunction:
    s = 1.0 if sign >= 0 else -1.0

    def taylor(center, count):
        k = np.arange(count)
        return math.exp(s * center) * s ** k / np.array(
            [math.factorial(int(i)) for i in k])

    return ScalarFunction(
        name="exp" if s > 0 else "expneg",
        domain=(-math.inf, math.inf),
        eval=lambda x: np.exp(s * x),
        deriv=lambda x: s * np.exp(s * x),
        deriv2=lambda x: np.exp(s * x),
        taylor_fn=taylor,
    )


def power_function(t: float) -> ScalarFunction:
    """x^t on (0, oo); trace minmax exactly when 1 <= t <= 2."""
    t = float(t)
    if t <= 0:
        raise ValueError("exponent must be positive")

    def taylor(center, count):
        out = np.empty(count)
        binom = 1.0
        for k in range(count):
            out[k] = binom * center ** (t - k)
            binom *= (t - k) / (k + 1)
        return out

    return ScalarFunction(
        name=f"pow[{t!r}]",
        domain=(0.0, math.inf),
        eval=lambda x: np.power(x, t),
        deriv=lambda x: t * np.power(x, t - 1),
        deriv2=lambda x: t * (t - 1) * np.power(x, t - 2),
        taylor_fn=taylor,
    )


def neglog1m_function(t: float, c: float = 0.0) -> ScalarFunction:
    """-log(1 - t(x - c)) on the half line where the argument is positive."""
    t = float(t)
    c = float(c)
    if t == 0.0:
        raise ValueError("t must be nonzero (t = 0 is the zero function)")
    domain = (-math.inf, c + 1.0 / t) if t > 0 else (c + 1.0 / t, math.inf)

    def taylor(center, count):
        s = 1.0 - t * (center - c)
        out = np.zeros(count)
        out[0] = -math.log(s)
        ratio = t / s
        for k in range(1, count):
            out[k] = ratio ** k / k
        return out

    return ScalarFunction(
        name=f"neglog1m[t={t!r},c={c!r}]",
        domain=domain,
        eval=lambda x: -np.log1p(-t * (x - c)),
        deriv=lambda x: t / (1.0 - t * (x - c)),
        deriv2=lambda x: t * t / (1.0 - t * (x - c)) ** 2,
        taylor_fn=taylor,
    )


def neglog_function() -> ScalarFunction:
    """-log x on (0, oo)."""

    def taylor(center, count):
        out = np.zeros(count)
        out[0] = -math.log(center)
        for k in range(1, count):
            out[k] = (-1.0) ** k / (k * center ** k)
        return out

    return ScalarFunction(
        name="neglog",
        domain=(0.0, math.inf),
        eval=lambda x: -np.log(x),
        deriv=lambda x: -1.0 / x,
        deriv2=lambda x: 1.0 / x ** 2,
        taylor_fn=taylor,
    )


def gauss_function() -> ScalarFunction:
    """exp(-x^2); determinant isoperimetric on every interval."""

    def taylor(center, count):
        # exp of the shifted series of -x^2, zero-padded to the asked order
        coeffs = np.zeros(max(count, 1))
        quad = [-center * center, -2.0 * center, -1.0]
        coeffs[: min(3, count)] = quad[: min(3, count)]
        return series_exp(PowerSeries(coeffs, center=center)).coeffs[:count]

    return ScalarFunction(
        name="gauss",
        domain=(-math.inf, math.inf),
        eval=lambda x: np.exp(-x * x),
        deriv=lambda x: -2.0 * x * np.exp(-x * x),
        deriv2=lambda x: (4.0 * x * x - 2.0) * np.exp(-x * x),
        taylor_fn=taylor,
    )


def function_sum(f: ScalarFunction, g: ScalarFunction, name=None) -> ScalarFunction:
    dom = (max(f.domain[0], g.domain[0]), min(f.domain[1], g.domain[1]))
    tf = None
    if f.taylor_fn is not None and g.taylor_fn is not None:
        tf = lambda c, n: f.taylor_fn(c, n) + g.taylor_fn(c, n)
    d2 = None
    if f.deriv2 is not None and g.deriv2 is not None:
        d2 = lambda x: f.deriv2(x) + g.deriv2(x)
    return ScalarFunction(
        name=name or f"({f.name}+{g.name})",
        domain=dom,
        eval=lambda x: f.eval(x) + g.eval(x),
        deriv=lambda x: f.deriv(x) + g.deriv(x),
        deriv2=d2,
        taylor_fn=tf,
    )


def function_product(f: ScalarFunction, g: ScalarFunction, name=None) -> ScalarFunction:
    dom = (max(f.domain[0], g.domain[0]), min(f.domain[1], g.domain[1]))
    tf = None
    if f.taylor_fn is not None and g.taylor_fn is not None:
        def tf(c, n):
            a, b = f.taylor_fn(c, n), g.taylor_fn(c, n)
            return np.convolve(a, b)[:n]
    d2 = None
    if f.deriv2 is not None and g.deriv2 is not None:
        d2 = lambda x: (f.deriv2(x) * g.eval(x) + 2.0 * f.deriv(x) * g.deriv(x)
                        + f.eval(x) * g.deriv2(x))
    return ScalarFunction(
        name=name or f"({f.name}*{g.name})",
        domain=dom,
        eval=lambda x: f.eval(x) * g.eval(x),
        deriv=lambda x: f.deriv(x) * g.eval(x) + f.eval(x) * g.deriv(x),
        deriv2=d2,
        taylor_fn=tf,
    )


def neg_exp_of(f: ScalarFunction) -> ScalarFunction:
    """exp(-f); the determinant-isoperimetric partner of a trace minmax f."""
    tf = None
    if f.taylor_fn is not None:
        def tf(c, n):
            p = PowerSeries(-f.taylor_fn(c, n), center=c)
            return series_exp(p).coeffs
    d2 = None
    if f.deriv2 is not None:
        d2 = lambda x: (f.deriv(x) ** 2 - f.deriv2(x)) * np.exp(-f.eval(x))
    return ScalarFunction(
        name=f"exp(-{f.name})",
        domain=f.domain,
        eval=lambda x: np.exp(-f.eval(x)),
        deriv=lambda x: -f.deriv(x) * np.exp(-f.eval(x)),
        deriv2=d2,
        taylor_fn=tf,
    )


_BUILTINS = {
    "x": lambda: poly_function([0.0, 1.0], name="x"),
    "x2": lambda: poly_function([0.0, 0.0, 1.0], name="x2"),
    "x3": lambda: poly_function([0.0, 0.0, 0.0, 1.0], name="x3"),
    "exp": lambda: exp_function(+1),
    "expneg": lambda: exp_function(-1),
    "neglog": neglog_function,
    "neglog1mx": lambda: neglog1m_function(1.0, 0.0),
    "gauss": gauss_function,
}


def builtin_names():
    return tuple(sorted(_BUILTINS))


def resolve_function(spec: str) -> ScalarFunction:
    """Resolve a function spec string.

    Plain names come from the builtin table; parameterized forms are
    ``pow:t=1.5``, ``neglog1m:t=0.5,c=0`` and ``poly:c0,c1,...``.
    """
    spec = spec.strip()
    if ":" not in spec:
        try:
            return _BUILTINS[spec]()
        except KeyError:
            raise ValueError(
                f"unknown function {spec!r}; builtins: {', '.join(builtin_names())}"
            ) from None
    head, _, arg = spec.partition(":")
    head = head.strip().lower()
    if head in ("pow", "xt"):
        params = _parse_params(arg, {"t"})
        return power_function(params["t"])
    if head == "neglog1m":
        params = _parse_params(arg, {"t", "c"})
        return neglog1m_function(params["t"], params.get("c", 0.0))
    if head == "poly":
        try:
            coeffs = [float(tok) for tok in arg.split(",") if tok.strip()]
        except ValueError:
            raise ValueError(f"bad polynomial coefficients in {spec!r}") from None
        return poly_function(coeffs)
    raise ValueError(f"unknown parameterized function {head!r}")


def _parse_params(arg: str, allowed: set) -> dict:
    out = {}
    for tok in arg.split(","):
        tok = tok.strip()
        if not tok:
            continue
        key, sep, val = tok.partition("=")
        key = key.strip()
        if not sep or key not in allowed:
            raise ValueError(f"bad parameter {tok!r} (allowed: {sorted(allowed)})")
        out[key] = float(val)
    return out


# ---------------------------------------------------------------------------
# functional calculus


def apply(f: ScalarFunction, x: HermitianMatrix) -> HermitianMatrix:
    """f(X) through the spectral decomposition of X."""
    s = x.spectral()
    check_spectrum_in_domain(f, s.eigenvalues)
    vals = f.eval(s.eigenvalues)
    u = s.eigenvectors
    m = (u * vals) @ u.conj().T
    return _wrap((m + m.conj().T) / 2.0)


def divided_difference_matrix(f: ScalarFunction, values: np.ndarray) -> np.ndarray:
    """First divided differences f[x_i, x_j] with f'(x_i) on the diagonal.

    Pairs closer than ``CLOSE_EIGENVALUE_RTOL`` relative to the value scale
    use the derivative at the midpoint.
    """
    v = np.asarray(values, dtype=float)
    scale = max(1.0, float(np.max(np.abs(v)))) if v.size else 1.0
    diff = v[:, None] - v[None, :]
    close = np.abs(diff) < CLOSE_EIGENVALUE_RTOL * scale
    fv = f.eval(v)
    with np.errstate(divide="ignore", invalid="ignore"):
        dd = (fv[:, None] - fv[None, :]) / diff
    mid = (v[:, None] + v[None, :]) / 2.0
    dd = np.where(close, f.deriv(mid), dd)
    return dd


def frechet(f: ScalarFunction, x: HermitianMatrix, h: HermitianMatrix) -> HermitianMatrix:
    """Fréchet derivative Df(X)[H] in Daleckii-Krein form."""
    if x.n != h.n:
        raise ValueError("X and H must have equal dimensions")
    s = x.spectral()
    check_spectrum_in_domain(f, s.eigenvalues)
    u = s.eigenvectors
    dd = divided_difference_matrix(f, s.eigenvalues)
    hrot = u.conj().T @ h.entries @ u
    m = u @ (dd * hrot) @ u.conj().T
    return _wrap((m + m.conj().T) / 2.0)


def trace_duality_residual(f: ScalarFunction, x: HermitianMatrix,
                           h: HermitianMatrix) -> float:
    """Relative residual of the identity tr Df(X)[H] = tr H f'(X)."""
    lhs = frechet(f, x, h).trace()
    s = x.spectral()
    hrot = s.eigenvectors.conj().T @ h.entries @ s.eigenvectors
    rhs = float(np.sum(f.deriv(s.eigenvalues) * np.diagonal(hrot).real))
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def second_derivative_trace(f: ScalarFunction, x: HermitianMatrix,
                            h: HermitianMatrix, k: HermitianMatrix) -> float:
    """tr D^2 f(X)[H, K], computed as tr H Df'(X)[K]."""
    fp = f.derivative()
    dk = frechet(fp, x, k)
    return float(np.trace(h.entries @ dk.entries).real)


def unitary_equivariance_residual(f: ScalarFunction, x: HermitianMatrix,
                                  u: np.ndarray, utol: float = 1e-12) -> float:
    """Entrywise max of |f(U* X U) - U* f(X) U|."""
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (x.n, x.n):
        raise ValueError("U must match the dimension of X")
    defect = float(np.max(np.abs(u.conj().T @ u - np.eye(x.n))))
    if defect > utol:
        raise ValueError(f"U is not unitary within {utol:.1e} (defect {defect:.3e})")
    conj = HermitianMatrix(u.conj().T @ x.entries @ u, atol=1e-10)
    left = apply(f, conj).entries
    right = u.conj().T @ apply(f, x).entries @ u
    return float(np.max(np.abs(left - right)))
